//! Experiment configuration: a flat key=value file, parsed and validated
//! up front so a bad config dies before any work starts.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::BenchError;

/// Which environment family an experiment runs on, with its fixed parameters.
/// The swept parameter (if any) is overridden per grid value at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvSpec {
    Counterexample {
        alpha: f64,
        gamma: f64,
    },
    DeepSea {
        gamma: f64,
        spawn_mix: f64,
    },
    YMaze {
        gamma: f64,
    },
    Resource {
        gamma: f64,
        spawn_mix: f64,
    },
    LowerBound {
        k_div: usize,
        n_common: usize,
        p: f64,
        gamma: f64,
        data_scale: usize,
    },
    Drone {
        alpha: f64,
        noise_sigma: f64,
        lambda: f64,
        n_traj: usize,
        horizon: usize,
        n_weights: usize,
    },
}

impl EnvSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EnvSpec::Counterexample { .. } => "counterexample",
            EnvSpec::DeepSea { .. } => "deep_sea",
            EnvSpec::YMaze { .. } => "y_maze",
            EnvSpec::Resource { .. } => "resource",
            EnvSpec::LowerBound { .. } => "lower_bound",
            EnvSpec::Drone { .. } => "drone",
        }
    }

    pub fn is_tabular(&self) -> bool {
        !matches!(self, EnvSpec::Drone { .. })
    }

    /// Builds a spec from bare key=value pairs (the `front` subcommand's
    /// flags), rejecting leftover keys like the config parser does.
    pub fn parse_map(map: BTreeMap<String, String>) -> Result<Self, BenchError> {
        let mut fields = Fields { map };
        let spec = parse_env(&mut fields)?;
        if let Some(key) = fields.map.keys().next() {
            return Err(BenchError::Config(format!("unknown key '{key}'")));
        }
        Ok(spec)
    }
}

/// The parameter a sweep varies. `N` counts demonstration trajectories per
/// expert; the others hold N fixed and vary one environment or learner knob.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    N,
    P,
    SpawnMix,
    Delta,
}

impl Sweep {
    pub fn name(&self) -> &'static str {
        match self {
            Sweep::N => "N",
            Sweep::P => "p",
            Sweep::SpawnMix => "spawn_mix",
            Sweep::Delta => "delta",
        }
    }
}

impl FromStr for Sweep {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "N" => Ok(Sweep::N),
            "p" => Ok(Sweep::P),
            "spawn_mix" => Ok(Sweep::SpawnMix),
            "delta" => Ok(Sweep::Delta),
            other => Err(BenchError::Config(format!(
                "unknown sweep '{other}' (expected N, p, spawn_mix, or delta)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Learner {
    Naive,
    Isolated,
    Mabc,
    UnsplitMabc,
}

impl Learner {
    pub fn name(&self) -> &'static str {
        match self {
            Learner::Naive => "naive",
            Learner::Isolated => "isolated",
            Learner::Mabc => "mabc",
            Learner::UnsplitMabc => "unsplit_mabc",
        }
    }
}

impl FromStr for Learner {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "naive" => Ok(Learner::Naive),
            "isolated" => Ok(Learner::Isolated),
            "mabc" => Ok(Learner::Mabc),
            "unsplit_mabc" => Ok(Learner::UnsplitMabc),
            other => Err(BenchError::Config(format!(
                "unknown learner '{other}' (expected naive, isolated, mabc, or unsplit_mabc)"
            ))),
        }
    }
}

impl fmt::Display for Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub env: EnvSpec,
    pub learners: Vec<Learner>,
    pub sweep: Sweep,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub output: PathBuf,
    pub cache_dir: PathBuf,
    /// Trajectory cap for tabular sampling. Unused by the drone task, which
    /// has its own horizon.
    pub max_len: usize,
    /// Trajectories per expert when the sweep is not over N.
    pub n_per_expert: usize,
}

/// Splits a key=value file into a map, rejecting duplicate keys and junk
/// lines so typos fail loudly instead of silently using a default.
fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, BenchError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            BenchError::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), value).is_some() {
            return Err(BenchError::Config(format!(
                "line {}: duplicate key '{key}'",
                lineno + 1
            )));
        }
    }
    Ok(map)
}

struct Fields {
    map: BTreeMap<String, String>,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<String, BenchError> {
        self.take(key)
            .ok_or_else(|| BenchError::Config(format!("missing required key '{key}'")))
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<T, BenchError>
    where
        T::Err: fmt::Display,
    {
        let raw = self.required(key)?;
        raw.parse().map_err(|e| {
            BenchError::Config(format!("key '{key}': cannot parse '{raw}': {e}"))
        })
    }

    fn parse_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, BenchError>
    where
        T::Err: fmt::Display,
    {
        match self.take(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|e| {
                BenchError::Config(format!("key '{key}': cannot parse '{raw}': {e}"))
            }),
        }
    }
}

fn unit_interval(name: &str, v: f64) -> Result<f64, BenchError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(BenchError::Config(format!("{name}={v} must lie in [0, 1]")));
    }
    Ok(v)
}

fn parse_env(fields: &mut Fields) -> Result<EnvSpec, BenchError> {
    let kind = fields.required("env")?;
    let spec = match kind.as_str() {
        "counterexample" => EnvSpec::Counterexample {
            alpha: fields.parse("alpha")?,
            gamma: fields.parse("gamma")?,
        },
        "deep_sea" => EnvSpec::DeepSea {
            gamma: fields.parse("gamma")?,
            spawn_mix: unit_interval("spawn_mix", fields.parse_or("spawn_mix", 0.0)?)?,
        },
        "y_maze" => EnvSpec::YMaze {
            gamma: fields.parse("gamma")?,
        },
        "resource" => EnvSpec::Resource {
            gamma: fields.parse("gamma")?,
            spawn_mix: unit_interval("spawn_mix", fields.parse_or("spawn_mix", 0.0)?)?,
        },
        "lower_bound" => EnvSpec::LowerBound {
            k_div: fields.parse("k_div")?,
            n_common: fields.parse("n_common")?,
            p: unit_interval("p", fields.parse_or("p", 1.0)?)?,
            gamma: fields.parse("gamma")?,
            data_scale: fields.parse("data_scale")?,
        },
        "drone" => EnvSpec::Drone {
            alpha: fields.parse("alpha")?,
            noise_sigma: fields.parse("noise_sigma")?,
            lambda: fields.parse("lambda")?,
            n_traj: fields.parse("lqr_n_traj")?,
            horizon: fields.parse("lqr_horizon")?,
            n_weights: fields.parse_or("n_weights", 101)?,
        },
        other => {
            return Err(BenchError::Config(format!(
                "unknown env '{other}' (expected counterexample, deep_sea, y_maze, resource, lower_bound, or drone)"
            )))
        }
    };
    Ok(spec)
}

impl ExperimentConfig {
    /// Parses and validates a config file body. Every experiment-shaping rule
    /// lives here so `run` can assume a coherent description.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let mut fields = Fields {
            map: parse_pairs(text)?,
        };

        let env = parse_env(&mut fields)?;

        let learners: Vec<Learner> = fields
            .required("learners")?
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_, _>>()?;
        if learners.is_empty() {
            return Err(BenchError::Config("learners list is empty".into()));
        }
        for (i, l) in learners.iter().enumerate() {
            if learners[..i].contains(l) {
                return Err(BenchError::Config(format!("duplicate learner '{l}'")));
            }
        }

        let sweep: Sweep = fields.required("sweep")?.parse()?;
        let grid: Vec<f64> = {
            let raw = fields.required("grid")?;
            raw.split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|e| {
                        BenchError::Config(format!("grid entry '{}': {e}", s.trim()))
                    })
                })
                .collect::<Result<_, _>>()?
        };
        if grid.is_empty() {
            return Err(BenchError::Config("grid is empty".into()));
        }

        let trials: usize = fields.parse("trials")?;
        if trials == 0 {
            return Err(BenchError::Config("trials must be at least 1".into()));
        }
        let base_seed: u64 = fields.parse("base_seed")?;
        let output = PathBuf::from(fields.required("output")?);
        let cache_dir = PathBuf::from(
            fields
                .take("cache_dir")
                .unwrap_or_else(|| "front_cache".to_string()),
        );
        let max_len: usize = fields.parse_or("max_len", 0)?;
        let n_per_expert: usize = fields.parse_or("n_per_expert", 0)?;

        if let Some(key) = fields.map.keys().next() {
            return Err(BenchError::Config(format!("unknown key '{key}'")));
        }

        let cfg = ExperimentConfig {
            env,
            learners,
            sweep,
            grid,
            trials,
            base_seed,
            output,
            cache_dir,
            max_len,
            n_per_expert,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), BenchError> {
        let tabular = self.env.is_tabular();

        match self.sweep {
            Sweep::N => {
                if !tabular {
                    return Err(BenchError::Config(
                        "sweep=N applies to tabular environments only".into(),
                    ));
                }
                for &v in &self.grid {
                    if v.fract() != 0.0 || v < 1.0 {
                        return Err(BenchError::Config(format!(
                            "sweep=N grid entry {v} must be a positive integer"
                        )));
                    }
                }
            }
            Sweep::P => {
                if !matches!(self.env, EnvSpec::LowerBound { .. }) {
                    return Err(BenchError::Config(
                        "sweep=p requires env=lower_bound".into(),
                    ));
                }
                for &v in &self.grid {
                    unit_interval("p grid entry", v)?;
                }
            }
            Sweep::SpawnMix => {
                if !matches!(self.env, EnvSpec::DeepSea { .. } | EnvSpec::Resource { .. }) {
                    return Err(BenchError::Config(
                        "sweep=spawn_mix requires env=deep_sea or env=resource".into(),
                    ));
                }
                for &v in &self.grid {
                    unit_interval("spawn_mix grid entry", v)?;
                }
            }
            Sweep::Delta => {
                if tabular {
                    return Err(BenchError::Config("sweep=delta requires env=drone".into()));
                }
                for &v in &self.grid {
                    if v < 0.0 {
                        return Err(BenchError::Config(format!(
                            "delta grid entry {v} must be nonnegative"
                        )));
                    }
                }
            }
        }

        if tabular {
            if self.max_len == 0 {
                return Err(BenchError::Config(
                    "max_len is required (at least 1) for tabular environments".into(),
                ));
            }
            if self.sweep != Sweep::N && self.n_per_expert == 0 {
                return Err(BenchError::Config(
                    "n_per_expert is required when the sweep does not vary N".into(),
                ));
            }
        } else {
            for l in &self.learners {
                if !matches!(l, Learner::Isolated | Learner::Mabc) {
                    return Err(BenchError::Config(format!(
                        "learner '{l}' is undefined for the drone task (use isolated and/or mabc)"
                    )));
                }
            }
        }

        if !tabular && self.sweep != Sweep::Delta {
            return Err(BenchError::Config(
                "the drone task sweeps delta only".into(),
            ));
        }

        Ok(())
    }
}
