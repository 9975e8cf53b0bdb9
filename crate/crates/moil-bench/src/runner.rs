//! Experiment execution: one RNG stream per (sweep value, trial) cell, one
//! demonstration draw per cell shared by every learner, fronts cached on
//! disk keyed by a content hash of the model.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use moil::envs::{
    build_counterexample, build_deep_sea, build_lower_bound, build_resource_gathering,
    build_y_maze, EnvironmentBundle,
};
use moil::imitation::{isolated_bc, mabc, naive_bc, unsplit_mabc, SplitDemos, UnsplitDemos};
use moil::io::{read_front, write_front, write_momdp};
use moil::lqr::{
    build_drone, continuous_front, evaluate_controller, make_experts, normalized_lipschitz,
    pool_compatible, ridge_fit, sample_demos, ContinuousDemo, LQRObjective, LinearSystem, LqrError,
};
use moil::momdp::{evaluate_returns, sample_trajectory, StochasticPolicy, TabularMOMDP};
use moil::pareto::{linf_pareto_distance, ols_front};
use moil::ParetoFront;

use crate::config::{EnvSpec, ExperimentConfig, Learner, Sweep};
use crate::BenchError;

pub const CSV_HEADER: &str = "env,learner,sweep,expert,seed,distance,wall_ms";

/// Front-distance score assigned to a learned controller whose closed loop
/// is not stable: its true cost is infinite, so it sits at the distance
/// ceiling and averages stay finite.
pub const UNSTABLE_DISTANCE: f64 = 1.0;

/// Tolerance for tabular front enumeration.
const OLS_TOL: f64 = 1e-9;
/// Tolerance for Riccati solves behind the continuous front and experts.
const DARE_TOL: f64 = 1e-10;

/// One measurement: a learner's front distance in one trial cell.
///
/// `expert` is the output index for multi-policy learners and -1 for the
/// aggregate (or only) value. `seed` is the cell's RNG stream id, from which
/// the cell's demonstrations can be re-drawn exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub env: String,
    pub learner: String,
    pub sweep: f64,
    pub expert: i64,
    pub seed: u64,
    pub distance: f64,
    pub wall_ms: u64,
}

/// Disk + memory cache of exact fronts, keyed by a SHA-256 of the full model
/// serialization (or parameter string for the continuous task), so any
/// change to the instance lands in a different file.
pub struct FrontCache {
    dir: PathBuf,
    mem: BTreeMap<String, ParetoFront>,
}

impl FrontCache {
    pub fn new(dir: &Path) -> Self {
        FrontCache {
            dir: dir.to_path_buf(),
            mem: BTreeMap::new(),
        }
    }

    fn get_or_compute(
        &mut self,
        key_text: &str,
        compute: impl FnOnce() -> Result<ParetoFront, BenchError>,
    ) -> Result<ParetoFront, BenchError> {
        let hash = hex_digest(key_text);
        if let Some(front) = self.mem.get(&hash) {
            return Ok(front.clone());
        }
        let path = self.dir.join(format!("{hash}.front"));
        let front = if path.exists() {
            read_front(&read_file(&path)?)?
        } else {
            let front = compute()?;
            fs::create_dir_all(&self.dir).map_err(|source| BenchError::Io {
                path: self.dir.clone(),
                source,
            })?;
            write_file(&path, &write_front(&front))?;
            front
        };
        self.mem.insert(hash, front.clone());
        Ok(front)
    }

    /// Exact front of a tabular model, enumerated on a cold cache.
    ///
    /// Serialized vertex values survive the file roundtrip bit-exactly
    /// (shortest-roundtrip float formatting), so distances computed against
    /// a cached front equal those against a freshly computed one.
    pub fn tabular(&mut self, m: &TabularMOMDP) -> Result<ParetoFront, BenchError> {
        self.get_or_compute(&write_momdp(m), || Ok(ols_front(m, OLS_TOL)?))
    }

    /// Weight-sweep front of the continuous control task.
    pub fn drone(
        &mut self,
        sys: &LinearSystem,
        n_weights: usize,
    ) -> Result<ParetoFront, BenchError> {
        let key = format!(
            "drone\ndt={}\ngravity={}\nn_weights={n_weights}\ntol={DARE_TOL:e}\n",
            sys.dt, sys.gravity
        );
        self.get_or_compute(&key, || Ok(continuous_front(sys, n_weights, DARE_TOL)?))
    }
}

fn hex_digest(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

fn read_file(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), BenchError> {
    fs::write(path, text).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Builds the environment bundle for a spec's fixed parameters.
pub fn build_tabular_bundle(env: &EnvSpec) -> Result<EnvironmentBundle, BenchError> {
    let bundle = match *env {
        EnvSpec::Counterexample { alpha, gamma } => build_counterexample(alpha, gamma)?,
        EnvSpec::DeepSea { gamma, spawn_mix } => build_deep_sea(gamma, spawn_mix)?,
        EnvSpec::YMaze { gamma } => build_y_maze(gamma)?,
        EnvSpec::Resource { gamma, spawn_mix } => build_resource_gathering(gamma, spawn_mix)?,
        EnvSpec::LowerBound {
            k_div,
            n_common,
            p,
            gamma,
            data_scale,
        } => build_lower_bound(k_div, n_common, p, gamma, data_scale)?,
        EnvSpec::Drone { .. } => {
            return Err(BenchError::Config(
                "the drone task has no tabular bundle".into(),
            ))
        }
    };
    Ok(bundle)
}

/// Copies a spec with the swept parameter set to `v`. `Sweep::N` varies the
/// data size, not the environment, so the spec passes through unchanged.
fn apply_sweep(env: &EnvSpec, sweep: Sweep, v: f64) -> EnvSpec {
    let mut spec = env.clone();
    match (sweep, &mut spec) {
        (Sweep::P, EnvSpec::LowerBound { p, .. }) => *p = v,
        (Sweep::SpawnMix, EnvSpec::DeepSea { spawn_mix, .. }) => *spawn_mix = v,
        (Sweep::SpawnMix, EnvSpec::Resource { spawn_mix, .. }) => *spawn_mix = v,
        _ => {}
    }
    spec
}

/// The cell's RNG stream id: sweep index in the high half, trial in the low
/// half, so extending either the grid or the trial count never re-seeds
/// existing cells.
fn stream_id(sweep_idx: usize, trial: usize) -> u64 {
    ((sweep_idx as u64) << 32) | trial as u64
}

/// Runs a validated experiment and writes its CSV to `cfg.output`. Returns
/// the rows in file order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, BenchError> {
    let mut cache = FrontCache::new(&cfg.cache_dir);
    let rows = if cfg.env.is_tabular() {
        run_tabular(cfg, &mut cache)?
    } else {
        run_drone(cfg, &mut cache)?
    };
    if let Some(parent) = cfg.output.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| BenchError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    write_file(&cfg.output, &write_csv(&rows))?;
    Ok(rows)
}

fn front_distance(
    m: &TabularMOMDP,
    front: &ParetoFront,
    policy: &StochasticPolicy,
) -> Result<f64, BenchError> {
    let j = evaluate_returns(m, policy)?;
    Ok(linf_pareto_distance(front, &j)?.delta)
}

fn run_tabular(
    cfg: &ExperimentConfig,
    cache: &mut FrontCache,
) -> Result<Vec<ResultRow>, BenchError> {
    let mut rows = Vec::new();
    for (sweep_idx, &v) in cfg.grid.iter().enumerate() {
        let bundle = build_tabular_bundle(&apply_sweep(&cfg.env, cfg.sweep, v))?;
        let m = &bundle.momdp;
        let ns = m.num_states();
        let na = m.num_actions();
        let n_experts = bundle.experts.len();
        let front = cache.tabular(m)?;
        let n_traj = match cfg.sweep {
            Sweep::N => v as usize,
            _ => cfg.n_per_expert,
        };
        for trial in 0..cfg.trials {
            let stream = stream_id(sweep_idx, trial);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed);
            rng.set_stream(stream);
            // One demonstration draw per cell, shared by all learners:
            // expert-major, trajectory-minor seed order.
            let mut trajectories: Vec<Vec<Vec<(usize, usize)>>> = Vec::with_capacity(n_experts);
            for expert in &bundle.experts {
                let per: Result<Vec<_>, _> = (0..n_traj)
                    .map(|_| sample_trajectory(m, expert, cfg.max_len, rng.gen()))
                    .collect();
                trajectories.push(per?);
            }
            let flat: Vec<Vec<(usize, usize)>> = trajectories
                .iter()
                .map(|per| per.iter().flatten().copied().collect())
                .collect();
            let demos = SplitDemos::new(flat);

            for &learner in &cfg.learners {
                let t0 = Instant::now();
                let distances: Vec<f64> = match learner {
                    Learner::Naive => {
                        let pi = naive_bc(&demos, ns, na);
                        vec![front_distance(m, &front, &pi)?]
                    }
                    Learner::Isolated => isolated_bc(&demos, ns, na)
                        .iter()
                        .map(|pi| front_distance(m, &front, pi))
                        .collect::<Result<_, _>>()?,
                    Learner::Mabc => mabc(&demos, ns, na)
                        .iter()
                        .map(|pi| front_distance(m, &front, pi))
                        .collect::<Result<_, _>>()?,
                    Learner::UnsplitMabc => {
                        let anonymous = UnsplitDemos {
                            trajectories: trajectories.iter().flatten().cloned().collect(),
                        };
                        let (policies, _) = unsplit_mabc(&anonymous, n_experts, ns, na);
                        policies
                            .iter()
                            .map(|pi| front_distance(m, &front, pi))
                            .collect::<Result<_, _>>()?
                    }
                };
                let wall_ms = t0.elapsed().as_millis() as u64;
                push_rows(&mut rows, &bundle.name, learner, v, stream, &distances, wall_ms);
            }
        }
    }
    Ok(rows)
}

fn run_drone(cfg: &ExperimentConfig, cache: &mut FrontCache) -> Result<Vec<ResultRow>, BenchError> {
    let EnvSpec::Drone {
        alpha,
        noise_sigma,
        lambda,
        n_traj,
        horizon,
        n_weights,
    } = cfg.env.clone()
    else {
        return Err(BenchError::Config("drone runner needs env=drone".into()));
    };
    let sys = build_drone();
    let (_, experts) = make_experts(&sys, alpha, DARE_TOL)?;
    let bases = [LQRObjective::tracking(), LQRObjective::eco()];
    let front = cache.drone(&sys, n_weights)?;

    let mut rows = Vec::new();
    for (sweep_idx, &delta) in cfg.grid.iter().enumerate() {
        for trial in 0..cfg.trials {
            let stream = stream_id(sweep_idx, trial);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed);
            rng.set_stream(stream);
            let demos: Vec<ContinuousDemo> = experts
                .iter()
                .map(|k| sample_demos(&sys, k, n_traj, horizon, noise_sigma, rng.gen()))
                .collect();

            for &learner in &cfg.learners {
                let t0 = Instant::now();
                let mut distances = Vec::with_capacity(demos.len());
                for l in 0..demos.len() {
                    let pairs = match learner {
                        Learner::Isolated => {
                            demos[l].pairs().map(|(x, u)| (*x, *u)).collect::<Vec<_>>()
                        }
                        Learner::Mabc => {
                            let others: Vec<ContinuousDemo> = demos
                                .iter()
                                .enumerate()
                                .filter(|&(j, _)| j != l)
                                .map(|(_, d)| d.clone())
                                .collect();
                            let norm = others
                                .iter()
                                .fold(demos[l].norm.clone(), |acc, d| acc.merge(&d.norm));
                            let lip = normalized_lipschitz(&experts[l].k, &norm);
                            pool_compatible(&demos[l], &others, delta, lip).pairs
                        }
                        _ => {
                            return Err(BenchError::Config(format!(
                                "learner '{}' is undefined for the drone task",
                                learner.name()
                            )))
                        }
                    };
                    let fitted = ridge_fit(&pairs, lambda)?;
                    let d = match evaluate_controller(&sys, &fitted, &bases, 1.0) {
                        Ok(j) => linf_pareto_distance(&front, &j)?.delta,
                        Err(LqrError::Unstable { .. }) => UNSTABLE_DISTANCE,
                        Err(e) => return Err(e.into()),
                    };
                    distances.push(d);
                }
                let wall_ms = t0.elapsed().as_millis() as u64;
                push_rows(&mut rows, "drone", learner, delta, stream, &distances, wall_ms);
            }
        }
    }
    Ok(rows)
}

/// Appends a learner's cell results: per-expert rows for multi-output
/// learners, then the across-expert mean as `expert = -1`. Single-output
/// learners report just the -1 row.
fn push_rows(
    rows: &mut Vec<ResultRow>,
    env: &str,
    learner: Learner,
    sweep: f64,
    seed: u64,
    distances: &[f64],
    wall_ms: u64,
) {
    let row = |expert: i64, distance: f64| ResultRow {
        env: env.to_string(),
        learner: learner.name().to_string(),
        sweep,
        expert,
        seed,
        distance,
        wall_ms,
    };
    if distances.len() > 1 {
        for (i, &d) in distances.iter().enumerate() {
            rows.push(row(i as i64, d));
        }
    }
    let mean = distances.iter().sum::<f64>() / distances.len() as f64;
    rows.push(row(-1, mean));
}

pub fn write_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.env, r.learner, r.sweep, r.expert, r.seed, r.distance, r.wall_ms
        ));
    }
    out
}

pub fn read_csv(text: &str) -> Result<Vec<ResultRow>, BenchError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| BenchError::Csv("empty results file".into()))?;
    if header != CSV_HEADER {
        return Err(BenchError::Csv(format!(
            "unexpected header {header:?}, expected {CSV_HEADER:?}"
        )));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(BenchError::Csv(format!(
                "line {}: expected 7 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        fn field<T: std::str::FromStr>(raw: &str, what: &str, lineno: usize) -> Result<T, BenchError> {
            raw.parse().map_err(|_| {
                BenchError::Csv(format!("line {}: bad {what} {raw:?}", lineno + 2))
            })
        }
        rows.push(ResultRow {
            env: fields[0].to_string(),
            learner: fields[1].to_string(),
            sweep: field(fields[2], "sweep value", lineno)?,
            expert: field(fields[3], "expert index", lineno)?,
            seed: field(fields[4], "seed", lineno)?,
            distance: field(fields[5], "distance", lineno)?,
            wall_ms: field(fields[6], "wall_ms", lineno)?,
        });
    }
    Ok(rows)
}
