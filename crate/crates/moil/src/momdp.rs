//! Tabular multi-objective MDPs with exact evaluation.
//!
//! A [`TabularMOMDP`] is a finite MDP whose reward is a vector in `R^d`. The
//! operations here are the primitives everything else builds on: policy
//! evaluation and occupancy measures via direct linear solves, scalarized
//! value iteration, deterministic-policy enumeration, and seeded sampling of
//! occupancy-distributed state-action pairs and episodic trajectories.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Residual bound enforced on every linear solve.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-10;

const DIST_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MomdpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("{count} deterministic policies exceed cap {cap}")]
    EnumerationCap { count: u128, cap: usize },
    #[error("linear solve residual {residual:.3e} exceeds {tol:.3e}")]
    SolverResidual { residual: f64, tol: f64 },
    #[error("linear system is singular")]
    SingularSystem,
}

/// Discounted vector return `J` of a policy, one entry per objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnVector {
    pub values: Vec<f64>,
}

impl ReturnVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Componentwise `self >= other - tol` with strict improvement somewhere.
    pub fn dominates(&self, other: &ReturnVector, tol: f64) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        let ge = self
            .values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| *a >= *b - tol);
        let gt = self
            .values
            .iter()
            .zip(&other.values)
            .any(|(a, b)| *a > *b + tol);
        ge && gt
    }

    pub fn linf_distance(&self, other: &ReturnVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One action per state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicPolicy {
    pub actions: Vec<usize>,
}

impl DeterministicPolicy {
    pub fn new(actions: Vec<usize>) -> Self {
        Self { actions }
    }

    pub fn action(&self, state: usize) -> usize {
        self.actions[state]
    }

    pub fn num_states(&self) -> usize {
        self.actions.len()
    }

    /// Copy of this policy with the action at `state` replaced.
    pub fn with_action(&self, state: usize, action: usize) -> Self {
        let mut actions = self.actions.clone();
        actions[state] = action;
        Self { actions }
    }

    pub fn to_stochastic(&self, num_actions: usize) -> StochasticPolicy {
        let mut probs = vec![0.0; self.actions.len() * num_actions];
        for (s, &a) in self.actions.iter().enumerate() {
            probs[s * num_actions + a] = 1.0;
        }
        StochasticPolicy {
            num_actions,
            probs,
        }
    }
}

/// Row-stochastic policy, stored flat as `probs[s * num_actions + a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticPolicy {
    num_actions: usize,
    probs: Vec<f64>,
}

impl StochasticPolicy {
    pub fn new(num_states: usize, num_actions: usize, probs: Vec<f64>) -> Result<Self, MomdpError> {
        if probs.len() != num_states * num_actions {
            return Err(MomdpError::Dimension(format!(
                "policy table has {} entries, expected {}",
                probs.len(),
                num_states * num_actions
            )));
        }
        for s in 0..num_states {
            let row = &probs[s * num_actions..(s + 1) * num_actions];
            validate_distribution(row, &format!("policy row {s}"))?;
        }
        Ok(Self { num_actions, probs })
    }

    pub fn uniform(num_states: usize, num_actions: usize) -> Self {
        Self {
            num_actions,
            probs: vec![1.0 / num_actions as f64; num_states * num_actions],
        }
    }

    pub fn num_states(&self) -> usize {
        self.probs.len() / self.num_actions
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.probs[state * self.num_actions..(state + 1) * self.num_actions]
    }

    pub fn prob(&self, state: usize, action: usize) -> f64 {
        self.probs[state * self.num_actions + action]
    }
}

/// Borrowed view over either policy kind, so evaluation and sampling accept both.
#[derive(Debug, Clone, Copy)]
pub enum PolicyRef<'a> {
    Det(&'a DeterministicPolicy),
    Stoch(&'a StochasticPolicy),
}

impl<'a> PolicyRef<'a> {
    pub fn prob(&self, state: usize, action: usize) -> f64 {
        match self {
            PolicyRef::Det(p) => {
                if p.action(state) == action {
                    1.0
                } else {
                    0.0
                }
            }
            PolicyRef::Stoch(p) => p.prob(state, action),
        }
    }

    fn sample_action(&self, state: usize, num_actions: usize, rng: &mut ChaCha8Rng) -> usize {
        match self {
            PolicyRef::Det(p) => p.action(state),
            PolicyRef::Stoch(p) => {
                let row = p.row(state);
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (a, &pa) in row.iter().enumerate() {
                    acc += pa;
                    if u < acc {
                        return a;
                    }
                }
                num_actions - 1
            }
        }
    }
}

impl<'a> From<&'a DeterministicPolicy> for PolicyRef<'a> {
    fn from(p: &'a DeterministicPolicy) -> Self {
        PolicyRef::Det(p)
    }
}

impl<'a> From<&'a StochasticPolicy> for PolicyRef<'a> {
    fn from(p: &'a StochasticPolicy) -> Self {
        PolicyRef::Stoch(p)
    }
}

/// Discounted state and state-action visitation frequencies, both normalized
/// to sum to one.
#[derive(Debug, Clone)]
pub struct OccupancyMeasure {
    pub num_actions: usize,
    /// `state_action[s * num_actions + a]`
    pub state_action: Vec<f64>,
    pub state: Vec<f64>,
}

/// Finite MDP with vector rewards `r(s, a) in R^d` and discount `gamma`.
///
/// Transitions are stored sparsely (successor lists per state-action); the
/// benchmark environments have at most a handful of successors per pair, and
/// value iteration and sampling only touch the support.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMOMDP {
    num_states: usize,
    num_actions: usize,
    num_objectives: usize,
    gamma: f64,
    initial_dist: Vec<f64>,
    /// `rewards[(s * num_actions + a) * num_objectives + i]`
    rewards: Vec<f64>,
    support: Vec<(u32, f64)>,
    support_index: Vec<u32>,
}

impl TabularMOMDP {
    /// Build from dense transition rows `transitions[(s * A + a) * S + s']`.
    pub fn new(
        num_states: usize,
        num_actions: usize,
        num_objectives: usize,
        gamma: f64,
        initial_dist: Vec<f64>,
        transitions: Vec<f64>,
        rewards: Vec<f64>,
    ) -> Result<Self, MomdpError> {
        if num_states == 0 || num_actions == 0 || num_objectives == 0 {
            return Err(MomdpError::Parameter(
                "states, actions, and objectives must all be nonzero".into(),
            ));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(MomdpError::Parameter(format!(
                "gamma must lie in [0, 1), got {gamma}"
            )));
        }
        if transitions.len() != num_states * num_actions * num_states {
            return Err(MomdpError::Dimension(format!(
                "transition table has {} entries, expected {}",
                transitions.len(),
                num_states * num_actions * num_states
            )));
        }
        if rewards.len() != num_states * num_actions * num_objectives {
            return Err(MomdpError::Dimension(format!(
                "reward table has {} entries, expected {}",
                rewards.len(),
                num_states * num_actions * num_objectives
            )));
        }
        if initial_dist.len() != num_states {
            return Err(MomdpError::Dimension(format!(
                "initial distribution has {} entries, expected {num_states}",
                initial_dist.len()
            )));
        }
        validate_distribution(&initial_dist, "initial distribution")?;
        if rewards.iter().any(|r| !r.is_finite()) {
            return Err(MomdpError::Parameter("rewards must be finite".into()));
        }

        let mut support = Vec::new();
        let mut support_index = Vec::with_capacity(num_states * num_actions + 1);
        support_index.push(0u32);
        for s in 0..num_states {
            for a in 0..num_actions {
                let row = &transitions[(s * num_actions + a) * num_states..][..num_states];
                validate_distribution(row, &format!("transition row ({s}, {a})"))?;
                for (sp, &p) in row.iter().enumerate() {
                    if p > 0.0 {
                        support.push((sp as u32, p));
                    }
                }
                support_index.push(support.len() as u32);
            }
        }

        Ok(Self {
            num_states,
            num_actions,
            num_objectives,
            gamma,
            initial_dist,
            rewards,
            support,
            support_index,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn initial_dist(&self) -> &[f64] {
        &self.initial_dist
    }

    pub fn reward(&self, state: usize, action: usize) -> &[f64] {
        let base = (state * self.num_actions + action) * self.num_objectives;
        &self.rewards[base..base + self.num_objectives]
    }

    /// Nonzero successors of `(state, action)` as `(next_state, probability)`.
    pub fn successors(&self, state: usize, action: usize) -> &[(u32, f64)] {
        let k = state * self.num_actions + action;
        let lo = self.support_index[k] as usize;
        let hi = self.support_index[k + 1] as usize;
        &self.support[lo..hi]
    }

    pub fn transition_prob(&self, state: usize, action: usize, next: usize) -> f64 {
        self.successors(state, action)
            .iter()
            .find(|(sp, _)| *sp as usize == next)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }

    /// Dense transition row, reconstructed from the sparse support.
    pub fn transition_row(&self, state: usize, action: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.num_states];
        for &(sp, p) in self.successors(state, action) {
            row[sp as usize] = p;
        }
        row
    }

    fn check_policy_shape(&self, policy: PolicyRef<'_>) -> Result<(), MomdpError> {
        let (states, actions) = match policy {
            PolicyRef::Det(p) => (p.num_states(), self.num_actions),
            PolicyRef::Stoch(p) => (p.num_states(), p.num_actions()),
        };
        if states != self.num_states || actions != self.num_actions {
            return Err(MomdpError::Dimension(format!(
                "policy shape ({states}, {actions}) does not match model ({}, {})",
                self.num_states, self.num_actions
            )));
        }
        if let PolicyRef::Det(p) = policy {
            if let Some(&a) = p.actions.iter().find(|&&a| a >= self.num_actions) {
                return Err(MomdpError::Parameter(format!(
                    "policy action {a} out of range"
                )));
            }
        }
        Ok(())
    }

    /// State-to-state transition matrix under `policy`.
    fn policy_matrix(&self, policy: PolicyRef<'_>) -> DMatrix<f64> {
        let n = self.num_states;
        let mut m = DMatrix::zeros(n, n);
        for s in 0..n {
            for a in 0..self.num_actions {
                let pa = policy.prob(s, a);
                if pa == 0.0 {
                    continue;
                }
                for &(sp, p) in self.successors(s, a) {
                    m[(s, sp as usize)] += pa * p;
                }
            }
        }
        m
    }
}

fn validate_distribution(row: &[f64], what: &str) -> Result<(), MomdpError> {
    let mut sum = 0.0;
    for &p in row {
        if !p.is_finite() || p < 0.0 {
            return Err(MomdpError::Distribution(format!(
                "{what} contains invalid mass {p}"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > DIST_SUM_TOL {
        return Err(MomdpError::Distribution(format!(
            "{what} sums to {sum}, expected 1"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Exact evaluation
// ---------------------------------------------------------------------------

/// Exact discounted vector return of `policy`, one linear solve per objective.
///
/// Solves `(I - gamma * P_pi) v_i = r_pi_i` with one step of iterative
/// refinement and enforces a `1e-10` residual on each system.
pub fn evaluate_returns<'a>(
    m: &TabularMOMDP,
    policy: impl Into<PolicyRef<'a>>,
) -> Result<ReturnVector, MomdpError> {
    let policy = policy.into();
    m.check_policy_shape(policy)?;
    let n = m.num_states;
    let mut a = m.policy_matrix(policy);
    a *= -m.gamma;
    for s in 0..n {
        a[(s, s)] += 1.0;
    }
    let lu = a.clone().lu();

    let mut values = Vec::with_capacity(m.num_objectives);
    for i in 0..m.num_objectives {
        let mut r = DVector::zeros(n);
        for s in 0..n {
            for act in 0..m.num_actions {
                let pa = policy.prob(s, act);
                if pa > 0.0 {
                    r[s] += pa * m.reward(s, act)[i];
                }
            }
        }
        let v = solve_refined(&a, &lu, &r)?;
        values.push(m.initial_dist.iter().zip(v.iter()).map(|(p, v)| p * v).sum());
    }
    Ok(ReturnVector { values })
}

/// Exact normalized occupancy measure of `policy` from the initial distribution.
pub fn occupancy<'a>(
    m: &TabularMOMDP,
    policy: impl Into<PolicyRef<'a>>,
) -> Result<OccupancyMeasure, MomdpError> {
    let policy = policy.into();
    m.check_policy_shape(policy)?;
    let n = m.num_states;
    // nu^T = (1 - gamma) nu0^T (I - gamma P_pi)^{-1}, solved on the transpose.
    let mut a = m.policy_matrix(policy).transpose();
    a *= -m.gamma;
    for s in 0..n {
        a[(s, s)] += 1.0;
    }
    let lu = a.clone().lu();
    let b = DVector::from_iterator(n, m.initial_dist.iter().map(|p| p * (1.0 - m.gamma)));
    let nu = solve_refined(&a, &lu, &b)?;

    let mut state = vec![0.0; n];
    let mut state_action = vec![0.0; n * m.num_actions];
    for s in 0..n {
        let mass = nu[s].max(0.0);
        state[s] = mass;
        for act in 0..m.num_actions {
            state_action[s * m.num_actions + act] = mass * policy.prob(s, act);
        }
    }
    Ok(OccupancyMeasure {
        num_actions: m.num_actions,
        state_action,
        state,
    })
}

fn solve_refined(
    a: &DMatrix<f64>,
    lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    b: &DVector<f64>,
) -> Result<DVector<f64>, MomdpError> {
    let mut x = lu.solve(b).ok_or(MomdpError::SingularSystem)?;
    // One refinement pass keeps residuals near machine precision even for
    // discounts close to 1.
    let r = b - a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let residual = (b - a * &x).amax();
    if residual > SOLVE_RESIDUAL_TOL {
        return Err(MomdpError::SolverResidual {
            residual,
            tol: SOLVE_RESIDUAL_TOL,
        });
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Scalarized planning
// ---------------------------------------------------------------------------

/// Output of [`scalarized_value_iteration`].
#[derive(Debug, Clone)]
pub struct ScalarizedSolution {
    /// `q[s * num_actions + a]` for the scalarized reward.
    pub q: Vec<f64>,
    pub values: Vec<f64>,
    /// Greedy policy; ties broken toward the lowest action index.
    pub policy: DeterministicPolicy,
    pub iterations: usize,
}

impl ScalarizedSolution {
    /// Optimal scalarized return from the initial distribution.
    pub fn initial_value(&self, m: &TabularMOMDP) -> f64 {
        m.initial_dist()
            .iter()
            .zip(&self.values)
            .map(|(p, v)| p * v)
            .sum()
    }
}

/// Value iteration on the scalarized reward `w . r(s, a)`.
///
/// Iterates until the sup-norm change of the value function is at most
/// `tol * (1 - gamma) / (2 gamma)`, which bounds the value error by `tol / 2`,
/// then recomputes `q` from the converged values.
pub fn scalarized_value_iteration(
    m: &TabularMOMDP,
    w: &[f64],
    tol: f64,
) -> Result<ScalarizedSolution, MomdpError> {
    if w.len() != m.num_objectives {
        return Err(MomdpError::Dimension(format!(
            "weight has {} entries, expected {}",
            w.len(),
            m.num_objectives
        )));
    }
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(MomdpError::Parameter(
            "scalarization weight must be nonnegative and finite".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(MomdpError::Parameter("tolerance must be positive".into()));
    }

    let n = m.num_states;
    let na = m.num_actions;
    let rw: Vec<f64> = (0..n * na)
        .map(|k| {
            let r = &m.rewards[k * m.num_objectives..(k + 1) * m.num_objectives];
            r.iter().zip(w).map(|(ri, wi)| ri * wi).sum()
        })
        .collect();

    let threshold = if m.gamma > 0.0 {
        tol * (1.0 - m.gamma) / (2.0 * m.gamma)
    } else {
        f64::INFINITY
    };
    // Generous cap; the sparse backups converge well before this in practice.
    let max_iters = 50_000_000usize;

    let mut v = vec![0.0; n];
    let mut v_next = vec![0.0; n];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut diff: f64 = 0.0;
        for s in 0..n {
            let mut best = f64::NEG_INFINITY;
            for a in 0..na {
                let mut q = rw[s * na + a];
                for &(sp, p) in m.successors(s, a) {
                    q += m.gamma * p * v[sp as usize];
                }
                if q > best {
                    best = q;
                }
            }
            diff = diff.max((best - v[s]).abs());
            v_next[s] = best;
        }
        std::mem::swap(&mut v, &mut v_next);
        if diff <= threshold || iterations >= max_iters {
            break;
        }
    }

    let mut q = vec![0.0; n * na];
    let mut actions = vec![0usize; n];
    for s in 0..n {
        let mut best = f64::NEG_INFINITY;
        let mut best_a = 0usize;
        for a in 0..na {
            let mut qa = rw[s * na + a];
            for &(sp, p) in m.successors(s, a) {
                qa += m.gamma * p * v[sp as usize];
            }
            q[s * na + a] = qa;
            if qa > best {
                best = qa;
                best_a = a;
            }
        }
        actions[s] = best_a;
        v[s] = best;
    }

    Ok(ScalarizedSolution {
        q,
        values: v,
        policy: DeterministicPolicy::new(actions),
        iterations,
    })
}

/// All `A^S` deterministic policies in lexicographic order (state 0 most
/// significant), refusing to materialize more than `cap`.
pub fn enumerate_deterministic_policies(
    m: &TabularMOMDP,
    cap: usize,
) -> Result<Vec<DeterministicPolicy>, MomdpError> {
    let mut count: u128 = 1;
    for _ in 0..m.num_states {
        count = count.saturating_mul(m.num_actions as u128);
        if count > cap as u128 {
            return Err(MomdpError::EnumerationCap { count, cap });
        }
    }
    let total = count as usize;
    let mut out = Vec::with_capacity(total);
    let mut actions = vec![0usize; m.num_states];
    loop {
        out.push(DeterministicPolicy::new(actions.clone()));
        // Odometer increment from the least significant (last) state.
        let mut s = m.num_states;
        loop {
            if s == 0 {
                return Ok(out);
            }
            s -= 1;
            actions[s] += 1;
            if actions[s] < m.num_actions {
                break;
            }
            actions[s] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Seeded sampling
// ---------------------------------------------------------------------------

struct SamplerTables {
    /// Per state-action prefix sums over the sparse successor list.
    cdf: Vec<f64>,
    nu0_cdf: Vec<f64>,
    /// States the policy can never leave.
    absorbing: Vec<bool>,
    /// Absorbing states whose supported actions all pay exactly zero reward.
    absorbing_zero: Vec<bool>,
}

impl SamplerTables {
    fn new(m: &TabularMOMDP, policy: PolicyRef<'_>) -> Self {
        let mut cdf = Vec::with_capacity(m.support.len());
        for k in 0..m.num_states * m.num_actions {
            let lo = m.support_index[k] as usize;
            let hi = m.support_index[k + 1] as usize;
            let mut acc = 0.0;
            for &(_, p) in &m.support[lo..hi] {
                acc += p;
                cdf.push(acc);
            }
        }
        let mut nu0_cdf = Vec::with_capacity(m.num_states);
        let mut acc = 0.0;
        for &p in &m.initial_dist {
            acc += p;
            nu0_cdf.push(acc);
        }
        let mut absorbing = vec![true; m.num_states];
        let mut absorbing_zero = vec![true; m.num_states];
        for s in 0..m.num_states {
            for a in 0..m.num_actions {
                if policy.prob(s, a) == 0.0 {
                    continue;
                }
                let self_loop =
                    matches!(m.successors(s, a), [(sp, p)] if *sp as usize == s && *p == 1.0);
                if !self_loop {
                    absorbing[s] = false;
                    absorbing_zero[s] = false;
                    break;
                }
                if m.reward(s, a).iter().any(|&r| r != 0.0) {
                    absorbing_zero[s] = false;
                }
            }
        }
        Self {
            cdf,
            nu0_cdf,
            absorbing,
            absorbing_zero,
        }
    }

    fn draw_initial(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.gen();
        let idx = self.nu0_cdf.partition_point(|&c| c <= u);
        idx.min(self.nu0_cdf.len() - 1)
    }

    fn draw_next(&self, m: &TabularMOMDP, s: usize, a: usize, rng: &mut ChaCha8Rng) -> usize {
        let k = s * m.num_actions + a;
        let lo = m.support_index[k] as usize;
        let hi = m.support_index[k + 1] as usize;
        let succ = &m.support[lo..hi];
        if succ.len() == 1 {
            return succ[0].0 as usize;
        }
        let total = self.cdf[hi - 1];
        let u: f64 = rng.gen::<f64>() * total;
        let off = self.cdf[lo..hi].partition_point(|&c| c <= u);
        succ[off.min(succ.len() - 1)].0 as usize
    }
}

/// `n` i.i.d. draws from the normalized occupancy measure of `policy`.
///
/// Each draw samples a horizon `T` with `P(T = t) = (1 - gamma) gamma^t`,
/// rolls the chain forward `T` steps from the initial distribution, and emits
/// `(X_T, A_T)`. Rollouts cut short once they enter a state the policy cannot
/// leave, which does not change the draw's distribution.
pub fn sample_occupancy_pairs<'a>(
    m: &TabularMOMDP,
    policy: impl Into<PolicyRef<'a>>,
    n: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>, MomdpError> {
    let policy = policy.into();
    m.check_policy_shape(policy)?;
    let tables = SamplerTables::new(m, policy);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_gamma = m.gamma.ln();

    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let horizon = if m.gamma == 0.0 {
            0
        } else {
            let u = 1.0 - rng.gen::<f64>(); // in (0, 1]
            (u.ln() / log_gamma).floor() as u64
        };
        let mut s = tables.draw_initial(&mut rng);
        for _ in 0..horizon {
            if tables.absorbing[s] {
                break;
            }
            let a = policy.sample_action(s, m.num_actions, &mut rng);
            s = tables.draw_next(m, s, a, &mut rng);
        }
        let a = policy.sample_action(s, m.num_actions, &mut rng);
        out.push((s, a));
    }
    Ok(out)
}

/// One episodic rollout from the initial distribution, recording `(state,
/// action)` pairs until the chain enters an absorbing zero-reward state or
/// `max_len` pairs have been recorded.
pub fn sample_trajectory<'a>(
    m: &TabularMOMDP,
    policy: impl Into<PolicyRef<'a>>,
    max_len: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>, MomdpError> {
    let policy = policy.into();
    m.check_policy_shape(policy)?;
    let tables = SamplerTables::new(m, policy);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut out = Vec::new();
    let mut s = tables.draw_initial(&mut rng);
    while out.len() < max_len && !tables.absorbing_zero[s] {
        let a = policy.sample_action(s, m.num_actions, &mut rng);
        out.push((s, a));
        s = tables.draw_next(m, s, a, &mut rng);
    }
    Ok(out)
}
