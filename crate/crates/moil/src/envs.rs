//! Benchmark environment constructors.
//!
//! Each builder returns an [`EnvironmentBundle`]: the model, its ground-truth
//! expert policies (each extracted by scalarized value iteration at a
//! near-extreme weight and exactly optimal for it), human-readable expert
//! labels, and layout metadata mapping states back to grid coordinates and
//! named regions.

use crate::momdp::{scalarized_value_iteration, DeterministicPolicy, MomdpError, TabularMOMDP};
use thiserror::Error;

pub const ACTION_UP: usize = 0;
pub const ACTION_DOWN: usize = 1;
pub const ACTION_LEFT: usize = 2;
pub const ACTION_RIGHT: usize = 3;

/// Weight mass moved off an extreme corner when extracting experts, so every
/// expert weight is strictly positive.
pub const EXPERT_WEIGHT_EPS: f64 = 1e-6;

const EXPERT_VI_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Momdp(#[from] MomdpError),
}

/// Grid coordinates and named state regions for inspection and experiment
/// selection (for example, picking one shared region of the lower-bound
/// model for a concentrability computation).
#[derive(Debug, Clone)]
pub struct LayoutMeta {
    /// Per-state `(x, y)` coordinate for states that live on a grid.
    pub coords: Vec<Option<(i32, i32)>>,
    pub groups: Vec<(String, Vec<usize>)>,
}

impl LayoutMeta {
    pub fn group(&self, name: &str) -> Option<&[usize]> {
        self.groups
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, states)| states.as_slice())
    }
}

/// A model together with its ground-truth experts.
#[derive(Debug, Clone)]
pub struct EnvironmentBundle {
    pub name: String,
    pub momdp: TabularMOMDP,
    pub experts: Vec<DeterministicPolicy>,
    pub expert_labels: Vec<String>,
    /// The scalarization weight defining each expert.
    pub expert_weights: Vec<Vec<f64>>,
    pub layout: LayoutMeta,
}

fn vi_expert(m: &TabularMOMDP, w: &[f64]) -> Result<DeterministicPolicy, EnvError> {
    Ok(scalarized_value_iteration(m, w, EXPERT_VI_TOL)?.policy)
}

/// Two-objective extreme weights `(1-eps, eps)` and `(eps, 1-eps)`.
fn extreme_weights_2d() -> [Vec<f64>; 2] {
    let e = EXPERT_WEIGHT_EPS;
    [vec![1.0 - e, e], vec![e, 1.0 - e]]
}

fn no_layout(num_states: usize) -> LayoutMeta {
    LayoutMeta {
        coords: vec![None; num_states],
        groups: Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Single-state conflict model
// ---------------------------------------------------------------------------

/// One absorbing state, three actions with rewards `[1,0]`, `[0,1]`, and
/// `[0.5+alpha, 0.5+alpha]`. Pooling the two experts' conflicting actions
/// produces a return strictly below the third action's, by `alpha` per
/// normalized objective.
pub fn build_counterexample(alpha: f64, gamma: f64) -> Result<EnvironmentBundle, EnvError> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(EnvError::Parameter(format!(
            "alpha must lie in (0, 0.5), got {alpha}"
        )));
    }
    let momdp = TabularMOMDP::new(
        1,
        3,
        2,
        gamma,
        vec![1.0],
        vec![1.0, 1.0, 1.0],
        vec![1.0, 0.0, 0.0, 1.0, 0.5 + alpha, 0.5 + alpha],
    )?;
    let weights = extreme_weights_2d();
    let experts = vec![vi_expert(&momdp, &weights[0])?, vi_expert(&momdp, &weights[1])?];
    Ok(EnvironmentBundle {
        name: "counterexample".into(),
        momdp,
        experts,
        expert_labels: vec!["first_objective".into(), "second_objective".into()],
        expert_weights: weights.to_vec(),
        layout: no_layout(1),
    })
}

// ---------------------------------------------------------------------------
// Deep sea treasure
// ---------------------------------------------------------------------------

/// Seabed depth (terminal treasure row) per column.
const DST_DEPTHS: [usize; 10] = [1, 2, 3, 4, 4, 4, 7, 7, 9, 10];
/// Treasure value per column; strictly increasing with distance.
const DST_TREASURES: [f64; 10] = [1.0, 2.0, 3.0, 5.0, 8.0, 16.0, 24.0, 50.0, 74.0, 124.0];
const DST_ROWS: usize = 11;
const DST_COLS: usize = 10;

/// Submarine grid: dive deeper for exponentially better treasure, paying
/// `-1` time per step. `spawn_mix` blends a uniform start over water cells
/// (1.0) with a fixed start at the surface corner (0.0).
///
/// Objectives: `[treasure, time]`. Experts: treasure-seeker and time-saver.
pub fn build_deep_sea(gamma: f64, spawn_mix: f64) -> Result<EnvironmentBundle, EnvError> {
    if !(0.0..=1.0).contains(&spawn_mix) {
        return Err(EnvError::Parameter(format!(
            "spawn_mix must lie in [0, 1], got {spawn_mix}"
        )));
    }
    // Accessible cells are those at or above the seabed of their column.
    let mut cell_state = vec![[usize::MAX; DST_COLS]; DST_ROWS];
    let mut coords: Vec<Option<(i32, i32)>> = Vec::new();
    for r in 0..DST_ROWS {
        for c in 0..DST_COLS {
            if r <= DST_DEPTHS[c] {
                cell_state[r][c] = coords.len();
                coords.push(Some((c as i32, r as i32)));
            }
        }
    }
    let sink = coords.len();
    coords.push(None);
    let n = coords.len();
    let na = 4;

    let is_treasure = |r: usize, c: usize| r == DST_DEPTHS[c];
    let mut transitions = vec![0.0; n * na * n];
    let mut rewards = vec![0.0; n * na * 2];
    let mut water = Vec::new();
    let mut treasure_states = Vec::new();
    for r in 0..DST_ROWS {
        for c in 0..DST_COLS {
            let s = cell_state[r][c];
            if s == usize::MAX {
                continue;
            }
            if is_treasure(r, c) {
                treasure_states.push(s);
            } else {
                water.push(s);
            }
            for a in 0..na {
                let k = s * na + a;
                if is_treasure(r, c) {
                    transitions[k * n + sink] = 1.0;
                    rewards[k * 2] = DST_TREASURES[c];
                    rewards[k * 2 + 1] = -1.0;
                    continue;
                }
                let (nr, nc) = grid_step(r, c, a);
                let dest = if nr < DST_ROWS && nc < DST_COLS && nr <= DST_DEPTHS[nc] {
                    cell_state[nr][nc]
                } else {
                    s
                };
                transitions[k * n + dest] = 1.0;
                rewards[k * 2 + 1] = -1.0;
            }
        }
    }
    for a in 0..na {
        transitions[(sink * na + a) * n + sink] = 1.0;
    }

    let start = cell_state[0][0];
    let mut initial = vec![0.0; n];
    for &s in &water {
        initial[s] += spawn_mix / water.len() as f64;
    }
    initial[start] += 1.0 - spawn_mix;

    let momdp = TabularMOMDP::new(n, na, 2, gamma, initial, transitions, rewards)?;
    let weights = extreme_weights_2d();
    let experts = vec![vi_expert(&momdp, &weights[0])?, vi_expert(&momdp, &weights[1])?];
    Ok(EnvironmentBundle {
        name: "deep_sea".into(),
        momdp,
        experts,
        expert_labels: vec!["treasure_seeker".into(), "time_saver".into()],
        expert_weights: weights.to_vec(),
        layout: LayoutMeta {
            coords,
            groups: vec![
                ("water".into(), water),
                ("treasure".into(), treasure_states),
                ("sink".into(), vec![sink]),
            ],
        },
    })
}

fn grid_step(r: usize, c: usize, action: usize) -> (usize, usize) {
    match action {
        ACTION_UP => (r.wrapping_sub(1), c),
        ACTION_DOWN => (r + 1, c),
        ACTION_LEFT => (r, c.wrapping_sub(1)),
        ACTION_RIGHT => (r, c + 1),
        _ => unreachable!("grid actions are 0..4"),
    }
}

// ---------------------------------------------------------------------------
// Slippery Y-maze
// ---------------------------------------------------------------------------

const YM_STEM: usize = 20;
const YM_BRANCH: usize = 10;

/// Y-shaped corridor with a deadly stem: every stem step carries probability
/// 0.10 of dropping to the terminal state. Branch movement is deterministic
/// and two-way, so re-entering the fork is possible. Exiting outward off a
/// branch end pays `[1,0]` (right, gold) or `[0,1]` (left, gem).
///
/// Both experts climb the stem as fast as possible; they split at the fork
/// and head to opposite branch ends.
pub fn build_y_maze(gamma: f64) -> Result<EnvironmentBundle, EnvError> {
    // Stem (0, 0..=19), right branch (1..=10, 19), left branch (-1..=-10, 19).
    let fork_y = (YM_STEM - 1) as i32;
    let n = YM_STEM + 2 * YM_BRANCH + 1;
    let terminal = n - 1;
    let na = 4;

    let coord_of = |s: usize| -> (i32, i32) {
        if s < YM_STEM {
            (0, s as i32)
        } else if s < YM_STEM + YM_BRANCH {
            ((s - YM_STEM) as i32 + 1, fork_y)
        } else {
            (-((s - YM_STEM - YM_BRANCH) as i32 + 1), fork_y)
        }
    };
    let state_at = |x: i32, y: i32| -> Option<usize> {
        if x == 0 && (0..YM_STEM as i32).contains(&y) {
            Some(y as usize)
        } else if y == fork_y && (1..=YM_BRANCH as i32).contains(&x) {
            Some(YM_STEM + (x - 1) as usize)
        } else if y == fork_y && (-(YM_BRANCH as i32)..=-1).contains(&x) {
            Some(YM_STEM + YM_BRANCH + (-x - 1) as usize)
        } else {
            None
        }
    };
    let delta = |a: usize| -> (i32, i32) {
        match a {
            ACTION_UP => (0, 1),
            ACTION_DOWN => (0, -1),
            ACTION_LEFT => (-1, 0),
            ACTION_RIGHT => (1, 0),
            _ => unreachable!(),
        }
    };

    let mut transitions = vec![0.0; n * na * n];
    let mut rewards = vec![0.0; n * na * 2];
    for s in 0..n - 1 {
        let (x, y) = coord_of(s);
        let in_stem = s < YM_STEM;
        for a in 0..na {
            let k = s * na + a;
            let exits_gold = x == YM_BRANCH as i32 && a == ACTION_RIGHT;
            let exits_gem = x == -(YM_BRANCH as i32) && a == ACTION_LEFT;
            if exits_gold || exits_gem {
                transitions[k * n + terminal] = 1.0;
                if exits_gold {
                    rewards[k * 2] = 1.0;
                } else {
                    rewards[k * 2 + 1] = 1.0;
                }
                continue;
            }
            let (dx, dy) = delta(a);
            let dest = state_at(x + dx, y + dy).unwrap_or(s);
            if in_stem {
                transitions[k * n + terminal] += 0.10;
                transitions[k * n + dest] += 0.90;
            } else {
                transitions[k * n + dest] = 1.0;
            }
        }
    }
    for a in 0..na {
        transitions[(terminal * na + a) * n + terminal] = 1.0;
    }

    let mut initial = vec![1.0 / (n - 1) as f64; n];
    initial[terminal] = 0.0;

    let momdp = TabularMOMDP::new(n, na, 2, gamma, initial, transitions, rewards)?;
    let weights = extreme_weights_2d();
    let experts = vec![vi_expert(&momdp, &weights[0])?, vi_expert(&momdp, &weights[1])?];

    let coords: Vec<Option<(i32, i32)>> = (0..n)
        .map(|s| if s == terminal { None } else { Some(coord_of(s)) })
        .collect();
    let fork = YM_STEM - 1;
    Ok(EnvironmentBundle {
        name: "y_maze".into(),
        momdp,
        experts,
        expert_labels: vec!["gold".into(), "gem".into()],
        expert_weights: weights.to_vec(),
        layout: LayoutMeta {
            coords,
            groups: vec![
                ("stem".into(), (0..fork).collect()),
                ("fork".into(), vec![fork]),
                ("branch_right".into(), (YM_STEM..YM_STEM + YM_BRANCH).collect()),
                (
                    "branch_left".into(),
                    (YM_STEM + YM_BRANCH..YM_STEM + 2 * YM_BRANCH).collect(),
                ),
                ("terminal".into(), vec![terminal]),
            ],
        },
    })
}

// ---------------------------------------------------------------------------
// Resource gathering
// ---------------------------------------------------------------------------

const RG_SIZE: usize = 5;
const RG_HOME: (usize, usize) = (4, 2);
const RG_GOLD: (usize, usize) = (0, 2);
const RG_GEM: (usize, usize) = (1, 4);
const RG_ENEMIES: [(usize, usize); 2] = [(0, 3), (1, 2)];
const RG_ATTACK_PROB: f64 = 0.1;

/// 5x5 gathering grid with objectives `[gold, gem, enemy]`. Stepping onto the
/// gold or gem cell pays `+1` on its channel and returns the agent home.
/// Moving onto an enemy cell or next to one risks an attack (probability
/// 0.1), which pays `-1` on the enemy channel and also sends the agent home.
/// `spawn_mix` blends a uniform start over grid cells with a fixed home
/// start. Experts: gold-seeker, gem-seeker, and a caution-first gatherer.
pub fn build_resource_gathering(gamma: f64, spawn_mix: f64) -> Result<EnvironmentBundle, EnvError> {
    if !(0.0..=1.0).contains(&spawn_mix) {
        return Err(EnvError::Parameter(format!(
            "spawn_mix must lie in [0, 1], got {spawn_mix}"
        )));
    }
    let cells = RG_SIZE * RG_SIZE;
    let attacked = cells;
    let n = cells + 1;
    let na = 4;
    let idx = |r: usize, c: usize| r * RG_SIZE + c;
    let home = idx(RG_HOME.0, RG_HOME.1);

    let danger = {
        let mut d = vec![false; cells];
        for &(er, ec) in &RG_ENEMIES {
            d[idx(er, ec)] = true;
            for (nr, nc) in [
                (er.wrapping_sub(1), ec),
                (er + 1, ec),
                (er, ec.wrapping_sub(1)),
                (er, ec + 1),
            ] {
                if nr < RG_SIZE && nc < RG_SIZE {
                    d[idx(nr, nc)] = true;
                }
            }
        }
        d
    };

    let mut transitions = vec![0.0; n * na * n];
    let mut rewards = vec![0.0; n * na * 3];
    for r in 0..RG_SIZE {
        for c in 0..RG_SIZE {
            let s = idx(r, c);
            for a in 0..na {
                let k = s * na + a;
                if (r, c) == RG_GOLD {
                    transitions[k * n + home] = 1.0;
                    rewards[k * 3] = 1.0;
                    continue;
                }
                if (r, c) == RG_GEM {
                    transitions[k * n + home] = 1.0;
                    rewards[k * 3 + 1] = 1.0;
                    continue;
                }
                let (nr, nc) = grid_step(r, c, a);
                let dest = if nr < RG_SIZE && nc < RG_SIZE {
                    idx(nr, nc)
                } else {
                    s
                };
                if danger[dest] {
                    transitions[k * n + attacked] += RG_ATTACK_PROB;
                    transitions[k * n + dest] += 1.0 - RG_ATTACK_PROB;
                } else {
                    transitions[k * n + dest] = 1.0;
                }
            }
        }
    }
    for a in 0..na {
        let k = attacked * na + a;
        transitions[k * n + home] = 1.0;
        rewards[k * 3 + 2] = -1.0;
    }

    let mut initial = vec![0.0; n];
    for s in 0..cells {
        initial[s] += spawn_mix / cells as f64;
    }
    initial[home] += 1.0 - spawn_mix;

    let momdp = TabularMOMDP::new(n, na, 3, gamma, initial, transitions, rewards)?;
    let e = EXPERT_WEIGHT_EPS;
    let weights = vec![
        vec![1.0 - 2.0 * e, e, e],
        vec![e, 1.0 - 2.0 * e, e],
        vec![e, e, 1.0 - 2.0 * e],
    ];
    let experts = weights
        .iter()
        .map(|w| vi_expert(&momdp, w))
        .collect::<Result<Vec<_>, _>>()?;

    let coords: Vec<Option<(i32, i32)>> = (0..n)
        .map(|s| {
            if s < cells {
                Some(((s % RG_SIZE) as i32, (s / RG_SIZE) as i32))
            } else {
                None
            }
        })
        .collect();
    let danger_states: Vec<usize> = (0..cells).filter(|&s| danger[s]).collect();
    Ok(EnvironmentBundle {
        name: "resource".into(),
        momdp,
        experts,
        expert_labels: vec!["gold".into(), "gem".into(), "cautious".into()],
        expert_weights: weights,
        layout: LayoutMeta {
            coords,
            groups: vec![
                ("home".into(), vec![home]),
                ("gold".into(), vec![idx(RG_GOLD.0, RG_GOLD.1)]),
                ("gem".into(), vec![idx(RG_GEM.0, RG_GEM.1)]),
                (
                    "enemies".into(),
                    RG_ENEMIES.iter().map(|&(r, c)| idx(r, c)).collect(),
                ),
                ("danger".into(), danger_states),
                ("attacked".into(), vec![attacked]),
            ],
        },
    })
}

// ---------------------------------------------------------------------------
// Concentrability lower-bound model
// ---------------------------------------------------------------------------

/// `k_div` divergent start states feeding two identical hard regions.
///
/// At a divergent state: action 0 pays `[1,0]` and moves (half the time) to
/// the first region; action 1 pays `[0,1]` and moves to the first region
/// with probability `p`, else the second; action 2 pays `[0.8,0.8]` and
/// mixes the two; action 3 pays nothing and ends the episode. Both moving
/// actions keep the agent in place with probability one half, so the two
/// experts share identical exit timing and the second expert's occupancy on
/// the first region is exactly `p` times the first's.
///
/// Each hard region is a root that scatters (under every action) onto
/// `n_common` leaves, the first with probability `1 - (n_common-1)/(data_scale+1)`
/// and the rest with `1/(data_scale+1)` each; a leaf's action 0 self-loops
/// paying `[1,1]` and every other action falls into a zero sink.
pub fn build_lower_bound(
    k_div: usize,
    n_common: usize,
    p: f64,
    gamma: f64,
    data_scale: usize,
) -> Result<EnvironmentBundle, EnvError> {
    if k_div == 0 || n_common == 0 {
        return Err(EnvError::Parameter(
            "k_div and n_common must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(EnvError::Parameter(format!("p must lie in [0, 1], got {p}")));
    }
    if gamma < 0.5 {
        return Err(EnvError::Parameter(format!(
            "gamma must be at least 0.5, got {gamma}"
        )));
    }
    if data_scale + 1 < n_common {
        return Err(EnvError::Parameter(format!(
            "data_scale {data_scale} too small for {n_common} leaves per region"
        )));
    }

    let root1 = k_div;
    let leaves1 = k_div + 1;
    let root2 = leaves1 + n_common;
    let leaves2 = root2 + 1;
    let sink = leaves2 + n_common;
    let n = sink + 1;
    let na = 4;

    let mut transitions = vec![0.0; n * na * n];
    let mut rewards = vec![0.0; n * na * 2];

    for s in 0..k_div {
        // Action 0: reward [1, 0], half stay, half to region 1.
        let k = s * na;
        rewards[k * 2] = 1.0;
        transitions[k * n + s] = 0.5;
        transitions[k * n + root1] = 0.5;
        // Action 1: reward [0, 1], half stay, half split p / 1-p.
        let k = s * na + 1;
        rewards[k * 2 + 1] = 1.0;
        transitions[k * n + s] = 0.5;
        transitions[k * n + root1] += 0.5 * p;
        transitions[k * n + root2] += 0.5 * (1.0 - p);
        // Action 2: reward [0.8, 0.8], equal mixture of the two above.
        let k = s * na + 2;
        rewards[k * 2] = 0.8;
        rewards[k * 2 + 1] = 0.8;
        transitions[k * n + s] = 0.5;
        transitions[k * n + root1] += 0.25 * (1.0 + p);
        transitions[k * n + root2] += 0.25 * (1.0 - p);
        // Action 3: end the episode.
        let k = s * na + 3;
        transitions[k * n + sink] = 1.0;
    }

    let spread = 1.0 / (data_scale as f64 + 1.0);
    for (root, leaves) in [(root1, leaves1), (root2, leaves2)] {
        for a in 0..na {
            let k = root * na + a;
            transitions[k * n + leaves] = 1.0 - (n_common as f64 - 1.0) * spread;
            for j in 1..n_common {
                transitions[k * n + leaves + j] = spread;
            }
        }
        for j in 0..n_common {
            let leaf = leaves + j;
            let k = leaf * na;
            rewards[k * 2] = 1.0;
            rewards[k * 2 + 1] = 1.0;
            transitions[k * n + leaf] = 1.0;
            for a in 1..na {
                transitions[(leaf * na + a) * n + sink] = 1.0;
            }
        }
    }
    for a in 0..na {
        transitions[(sink * na + a) * n + sink] = 1.0;
    }

    let mut initial = vec![0.0; n];
    for s in 0..k_div {
        initial[s] = 1.0 / k_div as f64;
    }

    let momdp = TabularMOMDP::new(n, na, 2, gamma, initial, transitions, rewards)?;
    let weights = extreme_weights_2d();
    let experts = vec![vi_expert(&momdp, &weights[0])?, vi_expert(&momdp, &weights[1])?];
    Ok(EnvironmentBundle {
        name: "lower_bound".into(),
        momdp,
        experts,
        expert_labels: vec!["direct".into(), "split".into()],
        expert_weights: weights.to_vec(),
        layout: LayoutMeta {
            coords: vec![None; n],
            groups: vec![
                ("divergent".into(), (0..k_div).collect()),
                ("region1".into(), (root1..root2).collect()),
                ("region2".into(), (root2..sink).collect()),
                ("sink".into(), vec![sink]),
            ],
        },
    })
}
