//! Command-line front end. `main_with_args` returns the process exit code so
//! the binary stays a one-liner and tests can drive it in-process.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use super::config::load_config;
use super::tools::{read_msd_csv, run_fit, run_kernels, run_map_osp, run_msd};
use super::{emit, run_simulate, run_validate, to_json, RunError};
use crate::density::Coordinate;
use crate::transform::TransformSpec;

#[derive(Debug, Parser)]
#[command(name = "ptdiff", version, about = "Diffusion under point transformations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one or more configs and write snapshots, MSD and a summary.
    /// Several configs run in parallel up to PTDIFF_THREADS workers.
    Simulate {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Dotted override, e.g. `operator.alpha=0.5`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run the property checks for a config and print a JSON report.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Also write the report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write the MSD series of a config, solving it or reading its snapshots.
    Msd {
        config: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Long-format snapshot CSV written earlier for the same config.
        #[arg(long)]
        snapshots: Option<PathBuf>,
        #[arg(long, default_value = "msd.csv")]
        out: PathBuf,
    },
    /// Fit a power law to an MSD CSV and print a plain-text report.
    Fit {
        msd_csv: PathBuf,
        #[arg(long, value_enum, default_value = "x")]
        coordinate: CoordinateArg,
        /// Fit window as `LO HI`.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        window: Option<Vec<f64>>,
        /// Also run two-segment crossover detection.
        #[arg(long)]
        crossover: bool,
    },
    /// Map fractal-diffusion parameters (c, g) to a monomial transform.
    MapOsp {
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, allow_negative_numbers = true)]
        g: f64,
        #[arg(long = "D", default_value_t = 1.0)]
        d: f64,
        /// Run the mapped diffusion and compare the fitted exponent with 1/β.
        #[arg(long)]
        simulate: bool,
    },
    /// Tabulate the transform kernels for plotting.
    Kernels {
        /// Transform as JSON, e.g. `{"kind":"monomial","beta":2}`.
        #[arg(long)]
        transform: String,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        k: Vec<f64>,
        #[arg(long, default_value_t = 3.0)]
        x_max: f64,
        #[arg(long, default_value_t = 600)]
        n: usize,
        #[arg(long, default_value = "kernels.csv")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CoordinateArg {
    X,
    W,
}

impl From<CoordinateArg> for Coordinate {
    fn from(c: CoordinateArg) -> Self {
        match c {
            CoordinateArg::X => Coordinate::X,
            CoordinateArg::W => Coordinate::W,
        }
    }
}

/// Batch width from `PTDIFF_THREADS`; 0 or unset means serial.
pub fn batch_threads() -> usize {
    std::env::var("PTDIFF_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

fn report(err: &RunError) -> i32 {
    eprintln!("ptdiff: {err}");
    err.exit_code()
}

fn print(text: &str) {
    print!("{text}");
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.command {
        Command::Simulate { configs, overrides } => simulate_batch(&configs, &overrides),
        Command::Validate {
            config,
            overrides,
            report: path,
        } => {
            let outcome = load_config(&config, &overrides).and_then(|cfg| run_validate(&cfg));
            match outcome {
                Ok(rep) => {
                    let json = to_json(&rep);
                    if let Some(p) = path {
                        if let Err(e) = emit(&p, |w| w.write_all(json.as_bytes())) {
                            return report(&e);
                        }
                    }
                    print(&json);
                    if rep.passed {
                        0
                    } else {
                        report(&RunError::ChecksFailed(rep.failures()))
                    }
                }
                Err(e) => report(&e),
            }
        }
        Command::Msd {
            config,
            overrides,
            snapshots,
            out,
        } => {
            let result = load_config(&config, &overrides)
                .and_then(|cfg| run_msd(&cfg, snapshots.as_deref()))
                .and_then(|series| emit(&out, |w| series.write_csv(w)));
            result.map_or_else(|e| report(&e), |_| 0)
        }
        Command::Fit {
            msd_csv,
            coordinate,
            window,
            crossover,
        } => {
            let window = window.map(|w| [w[0], w[1]]);
            let result = read_msd_csv(&msd_csv).and_then(|s| run_fit(&s, coordinate.into(), window, crossover));
            match result {
                Ok(outcome) => {
                    let mut buf = Vec::new();
                    outcome.write_text(&mut buf).expect("writing to memory");
                    print(&String::from_utf8_lossy(&buf));
                    0
                }
                Err(e) => report(&e),
            }
        }
        Command::MapOsp { c, g, d, simulate } => match run_map_osp(c, g, d, simulate) {
            Ok(rep) => {
                print(&to_json(&rep));
                0
            }
            Err(e) => report(&e),
        },
        Command::Kernels {
            transform,
            alpha,
            k,
            x_max,
            n,
            out,
        } => {
            let pt = serde_json::from_str::<TransformSpec>(&transform)
                .map_err(|e| RunError::Config {
                    path: "--transform".into(),
                    message: e.to_string(),
                })
                .and_then(|spec| {
                    spec.validate().map_err(|e| RunError::Config {
                        path: "--transform".into(),
                        message: e.to_string(),
                    })
                });
            match pt.and_then(|pt| run_kernels(&pt, alpha, &k, x_max, n, &out)) {
                Ok(_) => 0,
                Err(e) => report(&e),
            }
        }
    }
}

/// Runs each config independently; the exit code is the worst of them.
fn simulate_batch(configs: &[PathBuf], overrides: &[String]) -> i32 {
    let one = |path: &PathBuf| -> i32 {
        match load_config(path, overrides).and_then(|cfg| run_simulate(&cfg)) {
            Ok(summary) => {
                print(&to_json(&summary));
                0
            }
            Err(e) => {
                eprintln!("ptdiff: {}: {e}", path.display());
                e.exit_code()
            }
        }
    };
    let threads = batch_threads();
    let codes: Vec<i32> = if threads == 0 || configs.len() < 2 {
        configs.iter().map(one).collect()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| configs.par_iter().map(one).collect()),
            Err(e) => {
                eprintln!("ptdiff: cannot start {threads} batch workers: {e}");
                return 3;
            }
        }
    };
    codes.into_iter().max().unwrap_or(0)
}
