//! `simulate`: solve, analyze the MSD series, emit CSV and a JSON summary.

use serde::Serialize;

use super::config::{RunConfig, ValidatedRun};
use super::{emit, to_json, RunError};
use crate::density::{write_snapshots_csv, Coordinate, DensityField};
use crate::scaling::{classify_regime, detect_crossover, fit_scaling, Crossover, MsdSeries, Regime, ScalingFit};
use crate::solvers::{solve, SolveRequest, Solution};

/// Snapshot agreement required between methods in a cross-check.
pub const CROSS_CHECK_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    #[serde(flatten)]
    pub fit: ScalingFit,
    pub prefactor: f64,
    /// `None` when the exponent is not positive.
    pub regime: Option<Regime>,
}

impl FitReport {
    pub fn new(fit: ScalingFit) -> Self {
        Self {
            prefactor: fit.log_prefactor.exp(),
            regime: classify_regime(fit.exponent).ok(),
            fit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PerCoordinate<T> {
    pub x: T,
    pub w: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct MassSummary {
    pub max_abs_drift: f64,
    /// Drift not accounted for by boundary leakage.
    pub max_unexplained_drift: f64,
    pub total_leakage: f64,
    pub min_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossCheck {
    pub method: &'static str,
    pub max_abs_diff: Vec<f64>,
    pub worst: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub method: &'static str,
    pub snapshot_count: usize,
    /// Absent when the run has too few snapshots to fit.
    pub fit_window: Option<[f64; 2]>,
    pub fits: Option<PerCoordinate<FitReport>>,
    pub crossover: Option<PerCoordinate<Crossover>>,
    pub mass: MassSummary,
    pub cross_check: Vec<CrossCheck>,
    pub files: Vec<String>,
}

/// Everything a simulation produces, before anything is written.
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub solution: Solution,
    pub series: MsdSeries,
    pub summary: Summary,
}

pub fn simulate(run: &ValidatedRun) -> Result<SimulationOutput, RunError> {
    let solution = solve(&run.request).map_err(RunError::numerical)?;
    let series = MsdSeries::from_solution(&solution).map_err(RunError::numerical)?;
    let fits = match run.fit_window {
        Some(window) => {
            let fit = |c| fit_scaling(&series, c, window).map(FitReport::new).map_err(RunError::numerical);
            Some(PerCoordinate {
                x: fit(Coordinate::X)?,
                w: fit(Coordinate::W)?,
            })
        }
        None => None,
    };
    let crossover = if run.config.analysis.crossover {
        let c = |coord| detect_crossover(&series, coord).map_err(RunError::numerical);
        Some(PerCoordinate {
            x: c(Coordinate::X)?,
            w: c(Coordinate::W)?,
        })
    } else {
        None
    };
    let mass = MassSummary {
        max_abs_drift: solution.mass.iter().fold(0.0, |m, r| f64::max(m, r.drift.abs())),
        max_unexplained_drift: solution
            .mass
            .iter()
            .fold(0.0, |m, r| f64::max(m, r.unexplained_drift().abs())),
        total_leakage: solution.mass.last().map_or(0.0, |r| r.leakage),
        min_value: solution.mass.iter().fold(f64::INFINITY, |m, r| m.min(r.min_value)),
    };
    let mut cross_check = Vec::new();
    for other in &run.config.analysis.cross_check {
        let req = SolveRequest {
            method: other.to_method(),
            ..run.request.clone()
        };
        let alt = solve(&req).map_err(RunError::numerical)?;
        cross_check.push(compare(&solution.snapshots, &alt));
    }
    let files = file_names(&run.config, solution.snapshots.len());
    let summary = Summary {
        method: solution.method,
        snapshot_count: solution.snapshots.len(),
        fit_window: run.fit_window,
        fits,
        crossover,
        mass,
        cross_check,
        files,
    };
    Ok(SimulationOutput {
        solution,
        series,
        summary,
    })
}

fn compare(reference: &[DensityField], other: &Solution) -> CrossCheck {
    let diffs: Vec<f64> = reference
        .iter()
        .zip(&other.snapshots)
        .map(|(a, b)| a.max_abs_diff(b))
        .collect();
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    CrossCheck {
        method: other.method,
        max_abs_diff: diffs,
        worst,
        threshold: CROSS_CHECK_LIMIT,
        pass: worst <= CROSS_CHECK_LIMIT,
    }
}

fn file_names(cfg: &RunConfig, count: usize) -> Vec<String> {
    let mut names = if cfg.outputs.per_snapshot {
        (0..count).map(|i| format!("snapshot_{i:04}.csv")).collect()
    } else {
        vec!["snapshots.csv".to_string()]
    };
    names.push("msd.csv".into());
    names.push("summary.json".into());
    names
}

/// Writes the snapshot CSV(s), `msd.csv` and `summary.json` into the
/// configured output directory.
pub fn write_outputs(cfg: &RunConfig, out: &SimulationOutput) -> Result<(), RunError> {
    let dir = &cfg.outputs.dir;
    let snaps = &out.solution.snapshots;
    if cfg.outputs.per_snapshot {
        for (i, s) in snaps.iter().enumerate() {
            emit(&dir.join(&out.summary.files[i]), |w| write_snapshots_csv(std::slice::from_ref(s), w))?;
        }
    } else {
        emit(&dir.join("snapshots.csv"), |w| write_snapshots_csv(snaps, w))?;
    }
    emit(&dir.join("msd.csv"), |w| out.series.write_csv(w))?;
    let json = to_json(&out.summary);
    emit(&dir.join("summary.json"), |w| w.write_all(json.as_bytes()))
}

/// Validates, solves, analyzes and writes. Nothing is written unless every
/// step before the output stage succeeds.
pub fn run_simulate(cfg: &RunConfig) -> Result<Summary, RunError> {
    let run = cfg.validate()?;
    let out = simulate(&run)?;
    write_outputs(cfg, &out)?;
    Ok(out.summary)
}
