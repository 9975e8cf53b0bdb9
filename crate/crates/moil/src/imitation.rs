//! Behavioral-cloning learners for multi-expert demonstration data.
//!
//! Four learners share one maximum-likelihood core ([`bc_fit`]):
//!
//! * [`naive_bc`]: one policy fit on everything, expert identity ignored.
//! * [`isolated_bc`]: one policy per expert, fit on that expert's data only.
//! * [`mabc`]: one policy per expert, fit on the expert's own pairs plus all
//!   cross-expert pairs at conflict-free states.
//! * [`unsplit_mabc`]: like `mabc` but for anonymous trajectory data; latent
//!   expert identities are recovered as connected components of the
//!   action-consistency graph.
//!
//! [`concentrability`] and [`graph_failure_rate`] are the matching
//! diagnostics: how much the data mixture covers each expert, and how often
//! component recovery breaks at a given data size.

use crate::momdp::{
    occupancy, sample_trajectory, DeterministicPolicy, MomdpError, StochasticPolicy, TabularMOMDP,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Demonstrations with known expert identity: one pair list per expert.
#[derive(Debug, Clone, Default)]
pub struct SplitDemos {
    pub per_expert: Vec<Vec<(usize, usize)>>,
}

impl SplitDemos {
    pub fn new(per_expert: Vec<Vec<(usize, usize)>>) -> Self {
        Self { per_expert }
    }

    pub fn num_experts(&self) -> usize {
        self.per_expert.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.per_expert.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.per_expert.iter().map(Vec::len).sum()
    }
}

/// Anonymous demonstrations: trajectories whose generating expert is hidden.
#[derive(Debug, Clone, Default)]
pub struct UnsplitDemos {
    pub trajectories: Vec<Vec<(usize, usize)>>,
}

/// Output of [`curate`]: the observed data split into conflict pairs and
/// conflict-free pairs.
#[derive(Debug, Clone)]
pub struct CuratedDataset {
    /// States where two different experts take different actions.
    pub div_states: BTreeSet<usize>,
    /// Distinct `(state, action)` pairs observed at divergent states.
    pub div_pairs: BTreeSet<(usize, usize)>,
    /// Every observed pair whose state is not divergent, multiplicities kept.
    pub common_pairs: Vec<(usize, usize)>,
}

/// Splits the observed pairs by cross-expert conflict.
///
/// A state is divergent when two *different* experts were observed taking
/// different actions there; a single expert's own stochasticity never
/// triggers divergence. All pairs at non-divergent states form the common
/// pool, with multiplicities preserved.
pub fn curate(demos: &SplitDemos) -> CuratedDataset {
    // state -> (experts that saw it, union of observed actions)
    let mut seen: BTreeMap<usize, (BTreeSet<usize>, BTreeSet<usize>)> = BTreeMap::new();
    for (expert, pairs) in demos.per_expert.iter().enumerate() {
        for &(s, a) in pairs {
            let entry = seen.entry(s).or_default();
            entry.0.insert(expert);
            entry.1.insert(a);
        }
    }
    // Some expert pair disagrees at s iff at least two experts saw s and the
    // observed actions are not a single shared one.
    let div_states: BTreeSet<usize> = seen
        .iter()
        .filter(|(_, (experts, actions))| experts.len() >= 2 && actions.len() >= 2)
        .map(|(&s, _)| s)
        .collect();

    let mut div_pairs = BTreeSet::new();
    let mut common_pairs = Vec::new();
    for pairs in &demos.per_expert {
        for &(s, a) in pairs {
            if div_states.contains(&s) {
                div_pairs.insert((s, a));
            } else {
                common_pairs.push((s, a));
            }
        }
    }
    CuratedDataset {
        div_states,
        div_pairs,
        common_pairs,
    }
}

/// Per-state maximum-likelihood policy: empirical action frequencies, and a
/// uniform distribution at states with no observations.
///
/// Panics if a pair indexes outside `num_states` x `num_actions`.
pub fn bc_fit<I>(pairs: I, num_states: usize, num_actions: usize) -> StochasticPolicy
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut counts = vec![0u64; num_states * num_actions];
    let mut totals = vec![0u64; num_states];
    for (s, a) in pairs {
        assert!(s < num_states && a < num_actions, "pair ({s}, {a}) out of range");
        counts[s * num_actions + a] += 1;
        totals[s] += 1;
    }
    let mut probs = vec![0.0; num_states * num_actions];
    for s in 0..num_states {
        let row = &mut probs[s * num_actions..(s + 1) * num_actions];
        if totals[s] == 0 {
            row.fill(1.0 / num_actions as f64);
        } else {
            for a in 0..num_actions {
                row[a] = counts[s * num_actions + a] as f64 / totals[s] as f64;
            }
        }
    }
    StochasticPolicy::new(num_states, num_actions, probs)
        .expect("empirical frequencies form valid rows")
}

/// One policy fit on the union of all experts' pairs.
pub fn naive_bc(demos: &SplitDemos, num_states: usize, num_actions: usize) -> StochasticPolicy {
    bc_fit(
        demos.per_expert.iter().flatten().copied(),
        num_states,
        num_actions,
    )
}

/// One policy per expert, each fit on that expert's pairs alone.
pub fn isolated_bc(
    demos: &SplitDemos,
    num_states: usize,
    num_actions: usize,
) -> Vec<StochasticPolicy> {
    demos
        .per_expert
        .iter()
        .map(|pairs| bc_fit(pairs.iter().copied(), num_states, num_actions))
        .collect()
}

/// One policy per expert, each fit on the shared conflict-free pool plus the
/// expert's own pairs at divergent states.
pub fn mabc(demos: &SplitDemos, num_states: usize, num_actions: usize) -> Vec<StochasticPolicy> {
    let curated = curate(demos);
    demos
        .per_expert
        .iter()
        .map(|pairs| {
            let own_div = pairs
                .iter()
                .copied()
                .filter(|(s, _)| curated.div_states.contains(s));
            bc_fit(
                curated.common_pairs.iter().copied().chain(own_div),
                num_states,
                num_actions,
            )
        })
        .collect()
}

/// Action-consistency graph over divergent `(state, action)` pairs.
///
/// Nodes are the distinct pairs observed at divergent states (states with at
/// least two distinct observed actions); an edge joins two nodes whenever
/// some trajectory visits both. Connected components recover latent expert
/// identities when each trajectory is internally consistent and experts take
/// pairwise distinct actions at divergent states.
#[derive(Debug, Clone)]
pub struct ConsistencyGraph {
    pub nodes: Vec<(usize, usize)>,
    /// Unordered co-occurrence links, as index pairs into `nodes` with i < j.
    pub edges: Vec<(usize, usize)>,
    /// Partition of node indices, ordered by first appearance in the data.
    pub components: Vec<Vec<usize>>,
    /// Raised when the component count differs from the caller's expectation.
    pub count_mismatch: bool,
    /// States carrying two distinct actions inside one component. Under the
    /// pairwise-distinct-action assumption with deterministic experts this
    /// is empty; entries signal that the assumption looks violated.
    pub suspect_states: Vec<usize>,
}

impl ConsistencyGraph {
    /// Components as sets of `(state, action)` pairs.
    pub fn component_pairs(&self) -> Vec<BTreeSet<(usize, usize)>> {
        self.components
            .iter()
            .map(|c| c.iter().map(|&i| self.nodes[i]).collect())
            .collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.parent[rj] = ri;
        }
    }
}

/// Builds the consistency graph for anonymous trajectories. The mismatch
/// flag is left unset; [`unsplit_mabc`] fills it in.
pub fn build_consistency_graph(demos: &UnsplitDemos) -> ConsistencyGraph {
    let mut actions_at: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for traj in &demos.trajectories {
        for &(s, a) in traj {
            actions_at.entry(s).or_default().insert(a);
        }
    }
    let divergent: BTreeSet<usize> = actions_at
        .iter()
        .filter(|(_, actions)| actions.len() >= 2)
        .map(|(&s, _)| s)
        .collect();

    // Nodes in first-appearance order.
    let mut nodes = Vec::new();
    let mut node_id: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for traj in &demos.trajectories {
        for &(s, a) in traj {
            if divergent.contains(&s) && !node_id.contains_key(&(s, a)) {
                node_id.insert((s, a), nodes.len());
                nodes.push((s, a));
            }
        }
    }

    let mut uf = UnionFind::new(nodes.len());
    let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for traj in &demos.trajectories {
        let mut ids: Vec<usize> = traj
            .iter()
            .filter(|(s, _)| divergent.contains(s))
            .map(|p| node_id[p])
            .collect();
        ids.sort_unstable();
        ids.dedup();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                edge_set.insert((ids[i], ids[j]));
                uf.union(ids[i], ids[j]);
            }
        }
    }

    // Components keyed by root, ordered by their earliest node.
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..nodes.len() {
        let root = uf.find(i);
        by_root.entry(root).or_default().push(i);
    }
    let mut components: Vec<Vec<usize>> = by_root.into_values().collect();
    components.sort_by_key(|c| c[0]);

    let mut suspect_states = Vec::new();
    for comp in &components {
        let mut states: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &i in comp {
            let (s, a) = nodes[i];
            states.entry(s).or_default().insert(a);
        }
        for (s, actions) in states {
            if actions.len() >= 2 {
                suspect_states.push(s);
            }
        }
    }
    suspect_states.sort_unstable();
    suspect_states.dedup();

    ConsistencyGraph {
        nodes,
        edges: edge_set.into_iter().collect(),
        components,
        count_mismatch: false,
        suspect_states,
    }
}

/// Expert-identity-free variant of [`mabc`].
///
/// Divergent states are those with at least two distinct observed actions.
/// Each consistency-graph component is trained as one recovered expert:
/// `bc_fit` on the conflict-free pool plus the component's pairs, with
/// observed multiplicities. A component count different from `l_expected`
/// raises the graph's mismatch flag but still returns every component's
/// policy; with no divergence at all, `l_expected` copies of the fit on the
/// whole pool are returned.
pub fn unsplit_mabc(
    demos: &UnsplitDemos,
    l_expected: usize,
    num_states: usize,
    num_actions: usize,
) -> (Vec<StochasticPolicy>, ConsistencyGraph) {
    let mut graph = build_consistency_graph(demos);
    graph.count_mismatch = graph.components.len() != l_expected;

    let divergent: BTreeSet<usize> = graph.nodes.iter().map(|&(s, _)| s).collect();
    let common_pairs: Vec<(usize, usize)> = demos
        .trajectories
        .iter()
        .flatten()
        .copied()
        .filter(|(s, _)| !divergent.contains(s))
        .collect();

    if graph.components.is_empty() {
        let policy = bc_fit(common_pairs.iter().copied(), num_states, num_actions);
        return (vec![policy; l_expected], graph);
    }

    let policies = graph
        .component_pairs()
        .iter()
        .map(|members| {
            let own = demos
                .trajectories
                .iter()
                .flatten()
                .copied()
                .filter(|p| members.contains(p));
            bc_fit(common_pairs.iter().copied().chain(own), num_states, num_actions)
        })
        .collect();
    (policies, graph)
}

/// Worst-case ratio of an expert's state occupancy to the data mixture's,
/// over the given states.
///
/// The data occupancy is the size-weighted mixture of the experts' exact
/// occupancies. States where the mixture has no mass are skipped (no expert
/// visits them either); if no state qualifies the ratio is reported as 1.
pub fn concentrability(
    m: &TabularMOMDP,
    experts: &[DeterministicPolicy],
    sizes: &[usize],
    common_states: &[usize],
) -> Result<f64, MomdpError> {
    assert_eq!(experts.len(), sizes.len(), "one size per expert");
    assert!(!experts.is_empty(), "at least one expert");
    let total: usize = sizes.iter().sum();
    assert!(total > 0, "sizes must not all be zero");

    let occupancies = experts
        .iter()
        .map(|pi| occupancy(m, pi))
        .collect::<Result<Vec<_>, _>>()?;
    let mut best = 1.0f64;
    for &x in common_states {
        let mixture: f64 = occupancies
            .iter()
            .zip(sizes)
            .map(|(nu, &n)| nu.state[x] * n as f64 / total as f64)
            .sum();
        if mixture <= 0.0 {
            continue;
        }
        for nu in &occupancies {
            best = best.max(nu.state[x] / mixture);
        }
    }
    Ok(best)
}

/// Monte Carlo probability that consistency-graph recovery breaks.
///
/// Each trial samples `n_traj` trajectories from every expert, pools them
/// anonymously, and rebuilds the graph. The trial fails unless the computed
/// components exactly reproduce the ground truth: one group per expert,
/// holding `(x, pi_l(x))` for every state `x` where some experts disagree
/// and that is reachable under `pi_l` from the initial distribution. Missing
/// pairs therefore count as failures, matching the coverage semantics of the
/// failure-probability envelope. Assumes experts take pairwise distinct
/// actions at the states where they disagree.
pub fn graph_failure_rate(
    m: &TabularMOMDP,
    experts: &[DeterministicPolicy],
    n_traj: usize,
    max_len: usize,
    trials: usize,
    seed: u64,
) -> Result<f64, MomdpError> {
    assert!(trials >= 1, "at least one trial");
    let div_states: Vec<usize> = (0..m.num_states())
        .filter(|&x| {
            experts
                .iter()
                .any(|pi| pi.action(x) != experts[0].action(x))
        })
        .collect();
    if div_states.is_empty() {
        return Ok(0.0);
    }

    let mut truth: Vec<BTreeSet<(usize, usize)>> = Vec::new();
    for pi in experts {
        let reach = reachable_states(m, pi);
        let group: BTreeSet<(usize, usize)> = div_states
            .iter()
            .filter(|&&x| reach[x])
            .map(|&x| (x, pi.action(x)))
            .collect();
        if !group.is_empty() {
            truth.push(group);
        }
    }
    truth.sort();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for _ in 0..trials {
        let mut demos = UnsplitDemos::default();
        for pi in experts {
            for _ in 0..n_traj {
                demos
                    .trajectories
                    .push(sample_trajectory(m, pi, max_len, rng.gen())?);
            }
        }
        let graph = build_consistency_graph(&demos);
        let mut found = graph.component_pairs();
        found.sort();
        if found != truth {
            failures += 1;
        }
    }
    Ok(failures as f64 / trials as f64)
}

/// States reachable from the initial distribution when following `policy`.
fn reachable_states(m: &TabularMOMDP, policy: &DeterministicPolicy) -> Vec<bool> {
    let mut reach = vec![false; m.num_states()];
    let mut stack: Vec<usize> = (0..m.num_states())
        .filter(|&s| m.initial_dist()[s] > 0.0)
        .collect();
    for &s in &stack {
        reach[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &(sp, _) in m.successors(s, policy.action(s)) {
            if !reach[sp as usize] {
                reach[sp as usize] = true;
                stack.push(sp as usize);
            }
        }
    }
    reach
}
