use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use moil::io::write_front;
use moil::lqr::{build_drone, continuous_front};
use moil::pareto::ols_front;
use moil_bench::runner::build_tabular_bundle;
use moil_bench::{read_csv, render_summary, run_experiment, summarize, BenchError, EnvSpec, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "moil-bench",
    about = "Seeded imitation-learning experiments with exact front metrics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a key=value config file
    Run { config: PathBuf },
    /// Compute an environment's exact front and print it as CSV
    Front {
        /// counterexample, deep_sea, y_maze, resource, lower_bound, or drone
        #[arg(long)]
        env: String,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        spawn_mix: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        k_div: Option<usize>,
        #[arg(long)]
        n_common: Option<usize>,
        #[arg(long)]
        data_scale: Option<usize>,
        /// Weight-sweep resolution for the drone front
        #[arg(long)]
        n_weights: Option<usize>,
        /// Write the front here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate a results CSV into per-(learner, sweep) mean and SEM
    Summarize { csv: PathBuf },
}

fn read_path(path: &PathBuf) -> Result<String, BenchError> {
    std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.clone(),
        source,
    })
}

fn run(cmd: Cmd) -> Result<(), BenchError> {
    match cmd {
        Cmd::Run { config } => {
            let cfg = ExperimentConfig::parse(&read_path(&config)?)?;
            let rows = run_experiment(&cfg)?;
            println!("wrote {} rows to {}", rows.len(), cfg.output.display());
        }
        Cmd::Front {
            env,
            gamma,
            alpha,
            spawn_mix,
            p,
            k_div,
            n_common,
            data_scale,
            n_weights,
            out,
        } => {
            let text = if env == "drone" {
                let front = continuous_front(&build_drone(), n_weights.unwrap_or(101), 1e-10)?;
                write_front(&front)
            } else {
                let mut map = BTreeMap::new();
                map.insert("env".to_string(), env);
                let mut put = |key: &str, value: Option<String>| {
                    if let Some(v) = value {
                        map.insert(key.to_string(), v);
                    }
                };
                put("gamma", gamma.map(|v| v.to_string()));
                put("alpha", alpha.map(|v| v.to_string()));
                put("spawn_mix", spawn_mix.map(|v| v.to_string()));
                put("p", p.map(|v| v.to_string()));
                put("k_div", k_div.map(|v| v.to_string()));
                put("n_common", n_common.map(|v| v.to_string()));
                put("data_scale", data_scale.map(|v| v.to_string()));
                let spec = EnvSpec::parse_map(map)?;
                let bundle = build_tabular_bundle(&spec)?;
                write_front(&ols_front(&bundle.momdp, 1e-9)?)
            };
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|source| BenchError::Io { path, source })?,
                None => print!("{text}"),
            }
        }
        Cmd::Summarize { csv } => {
            let rows = read_csv(&read_path(&csv)?)?;
            print!("{}", render_summary(&summarize(&rows)));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_invalid_input() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
