//! The smaller subcommands: `msd`, `fit`, `map-osp` and `kernels`.

use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::Serialize;

use super::config::RunConfig;
use super::simulate::FitReport;
use super::{emit, RunError};
use crate::density::{Coordinate, DensityField, InitialCondition, Sampling};
use crate::operator::{Grid1D, OperatorSpec, Variant};
use crate::output::fmt_f64;
use crate::scaling::{
    classify_regime, detect_crossover, fit_scaling, osp_to_pt, Crossover, MsdSeries, Regime, ScalingError,
};
use crate::solvers::{solve, FdOptions, Method, SolveRequest};
use crate::spectral::{gft_kernel_samples, BesselBranch, BesselKernelSpec, GftKernel};
use crate::transform::PointTransform;

fn config_err(path: &str, message: impl ToString) -> RunError {
    RunError::Config {
        path: path.into(),
        message: message.to_string(),
    }
}

/// MSD series for a config, either by solving it or from a snapshot CSV
/// previously written for the same config.
pub fn run_msd(cfg: &RunConfig, snapshots: Option<&Path>) -> Result<MsdSeries, RunError> {
    let run = cfg.validate()?;
    match snapshots {
        None => {
            let sol = solve(&run.request).map_err(RunError::numerical)?;
            MsdSeries::from_solution(&sol).map_err(RunError::numerical)
        }
        Some(path) => {
            let initial = run.request.initial_density().map_err(RunError::numerical)?;
            let fields = read_snapshots(path, &initial)?;
            MsdSeries::from_snapshots(&initial, &fields).map_err(RunError::numerical)
        }
    }
}

/// Parses the long-format snapshot CSV back onto the sampling of `template`.
fn read_snapshots(path: &Path, template: &DensityField) -> Result<Vec<DensityField>, RunError> {
    let bad = |m: String| config_err("--snapshots", format!("{}: {m}", path.display()));
    let file = std::fs::File::open(path).map_err(|e| bad(e.to_string()))?;
    let n = template.values.len();
    let mut fields: Vec<DensityField> = Vec::new();
    for (line_no, line) in io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line_no == 0 {
            if line.trim() != "t,x,W_of_x,rho,measure_weight" {
                return Err(bad("unexpected header".into()));
            }
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("line {}: {e}", line_no + 1)))?;
        if cols.len() != 5 {
            return Err(bad(format!("line {}: expected 5 columns", line_no + 1)));
        }
        let start_new = fields.last().map_or(true, |f| f.values.len() == n);
        if start_new {
            let mut f = template.clone();
            f.time = cols[0];
            f.values.clear();
            fields.push(f);
        }
        let field = fields.last_mut().expect("pushed above");
        let i = field.values.len();
        if (cols[1] - template.x()[i]).abs() > 1e-9 * (1.0 + cols[1].abs()) {
            return Err(bad(format!("line {}: node does not match the config grid", line_no + 1)));
        }
        field.values.push(cols[3]);
    }
    if fields.is_empty() || fields.last().is_some_and(|f| f.values.len() != n) {
        return Err(bad("snapshot rows do not fill the config grid".into()));
    }
    Ok(fields)
}

/// Plain-text fit report, one `key: value` line per field.
#[derive(Debug, Clone, Serialize)]
pub struct FitOutcome {
    pub coordinate: Coordinate,
    pub fit: FitReport,
    pub crossover: Option<Crossover>,
}

impl FitOutcome {
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        let f = &self.fit;
        writeln!(out, "coordinate: {:?}", self.coordinate)?;
        writeln!(out, "exponent: {}", fmt_f64(f.fit.exponent))?;
        writeln!(out, "prefactor: {}", fmt_f64(f.prefactor))?;
        writeln!(out, "window: [{}, {}]", fmt_f64(f.fit.window[0]), fmt_f64(f.fit.window[1]))?;
        writeln!(out, "r_squared: {}", fmt_f64(f.fit.r_squared))?;
        writeln!(out, "points: {}", f.fit.points)?;
        match f.regime {
            Some(r) => writeln!(out, "regime: {r:?}")?,
            None => writeln!(out, "regime: none")?,
        }
        if let Some(c) = &self.crossover {
            writeln!(out, "early_exponent: {}", fmt_f64(c.early.exponent))?;
            writeln!(out, "late_exponent: {}", fmt_f64(c.late.exponent))?;
            writeln!(out, "knee_time: {}", fmt_f64(c.knee_time))?;
            writeln!(out, "no_knee: {}", c.no_knee)?;
        }
        Ok(())
    }
}

/// Reads an MSD CSV (`t, msd_x, msd_w, norm_x, norm_w`).
pub fn read_msd_csv(path: &Path) -> Result<MsdSeries, RunError> {
    let bad = |m: String| config_err("msd_csv", format!("{}: {m}", path.display()));
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("t,msd_x,msd_w,norm_x,norm_w") {
        return Err(bad("unexpected header".into()));
    }
    let (mut t, mut x, mut w) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        if cols.len() != 5 {
            return Err(bad(format!("row {}: expected 5 columns", i + 1)));
        }
        t.push(cols[0]);
        x.push(cols[1]);
        w.push(cols[2]);
    }
    Ok(MsdSeries::from_values(t, x, w))
}

pub fn run_fit(
    series: &MsdSeries,
    coordinate: Coordinate,
    window: Option<[f64; 2]>,
    crossover: bool,
) -> Result<FitOutcome, RunError> {
    let positive: Vec<f64> = series.times.iter().copied().filter(|&t| t > 0.0).collect();
    let window = window.unwrap_or([
        positive.first().copied().unwrap_or(0.0),
        positive.last().copied().unwrap_or(0.0),
    ]);
    let as_config = |e: ScalingError| match e {
        ScalingError::WindowTooSparse { .. } => config_err("--window", e),
        ScalingError::SpanTooShort(_) => config_err("--crossover", e),
        other => RunError::numerical(other),
    };
    let fit = fit_scaling(series, coordinate, window).map_err(as_config)?;
    let crossover = if crossover {
        Some(detect_crossover(series, coordinate).map_err(as_config)?)
    } else {
        None
    };
    Ok(FitOutcome {
        coordinate,
        fit: FitReport::new(fit),
        crossover,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OspReport {
    pub c: f64,
    pub g: f64,
    pub beta: f64,
    pub scale: f64,
    /// Exponent of the composite map `W = x^{βc}`.
    pub composite_exponent: f64,
    pub expected_msd_exponent: f64,
    pub regime: Regime,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<OspSimulation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OspSimulation {
    pub fitted_exponent: f64,
    pub window: [f64; 2],
    pub deviation: f64,
}

pub fn run_map_osp(c: f64, g: f64, d: f64, simulate: bool) -> Result<OspReport, RunError> {
    let (_, params) = osp_to_pt(c, g, d).map_err(|e| match e {
        ScalingError::NonPositiveDimension(_) => config_err("c", e),
        _ => config_err("g", e),
    })?;
    if !(d > 0.0 && d.is_finite()) {
        return Err(config_err("D", "diffusion must be positive"));
    }
    let expected = 1.0 / params.beta;
    let simulation = if simulate {
        Some(simulate_osp(params.beta, params.scale)?)
    } else {
        None
    };
    Ok(OspReport {
        c,
        g,
        beta: params.beta,
        scale: params.scale,
        composite_exponent: params.beta * c,
        expected_msd_exponent: expected,
        regime: classify_regime(expected).map_err(RunError::numerical)?,
        simulation,
    })
}

/// Late-time scaling run for `W = sgn(y)|y|^β` under `D · d²/dW²` (Δ3 at
/// α = 0), snapshots over four decades and the fit window `[1/D, 10/D]`.
///
/// The domain reaches 8 final standard deviations in W. The grid puts at
/// least 150 nodes (600 when β < 1, where W is steep at the origin) across
/// the spread at the window start. The initial W-Gaussian is as narrow as the
/// central cells allow, because the baseline subtraction in the MSD biases
/// sub-linear exponents by roughly `(variance / 2Dt)^{1/β}`.
pub fn monomial_scaling_request(beta: f64, diffusion: f64) -> Result<(SolveRequest, [f64; 2]), RunError> {
    let pt = PointTransform::monomial(beta).map_err(|e| config_err("beta", e))?;
    let spec = OperatorSpec::new(Variant::Delta3, 0.0, pt.clone(), diffusion).map_err(|e| config_err("D", e))?;
    let (t_lo, t_hi) = (1.0 / diffusion, 10.0 / diffusion);
    let w_reach = 8.0 * (2.0 * diffusion * t_hi).sqrt();
    let y_max = w_reach.powf(1.0 / beta);
    let ratio = w_reach / (2.0 * diffusion * t_lo).sqrt();
    let per_spread = if beta < 1.0 { 600.0 } else { 150.0 };
    let n = ((per_spread * ratio.powf(1.0 / beta)).ceil() as usize).max(4000);
    let grid = Grid1D::symmetric(y_max, n + n % 2).map_err(RunError::numerical)?;
    let central_w = pt.evaluate(0.5 * grid.h());
    let variance = (2.0 * central_w).powi(2).max(1e-4);
    let times = (0..=40).map(|i| 1e-3 / diffusion * 10f64.powf(i as f64 / 10.0)).collect();
    let req = SolveRequest {
        spec,
        grid,
        ic: InitialCondition::GaussianInW { center: 0.0, variance },
        times,
        method: Method::FiniteDifference(FdOptions {
            growth: 0.01,
            ..FdOptions::default()
        }),
    };
    Ok((req, [t_lo, t_hi]))
}

fn simulate_osp(beta: f64, scale: f64) -> Result<OspSimulation, RunError> {
    let (req, window) = monomial_scaling_request(beta, scale)?;
    let sol = solve(&req).map_err(RunError::numerical)?;
    let series = MsdSeries::from_solution(&sol).map_err(RunError::numerical)?;
    let fit = fit_scaling(&series, Coordinate::X, window).map_err(RunError::numerical)?;
    Ok(OspSimulation {
        fitted_exponent: fit.exponent,
        window,
        deviation: (fit.exponent - 1.0 / beta).abs(),
    })
}

/// Kernel tables for plotting: `kernel, K, x, W_of_x, re, im`.
///
/// Plane-wave kernels are tabulated for any transform; the Bessel kernels
/// only for monomials, with `K` the mode `k` and the kernel evaluated at `kx`.
pub fn run_kernels(
    pt: &PointTransform,
    alpha: f64,
    ks: &[f64],
    x_max: f64,
    n: usize,
    out: &Path,
) -> Result<usize, RunError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(config_err("--alpha", format!("must lie in [0, 1], got {alpha}")));
    }
    if ks.is_empty() {
        return Err(config_err("--k", "at least one mode is needed"));
    }
    let grid = Grid1D::symmetric(x_max, n).map_err(|e| config_err("--n", e))?;
    let sampling = Sampling::new(pt, &grid).map_err(|e| config_err("--x-max", e))?;
    let mut rows: Vec<(&'static str, f64, usize, num_complex::Complex64)> = Vec::new();
    for &k in ks {
        for (name, kernel) in [("phi", GftKernel::Phi), ("phi_tilde", GftKernel::PhiTilde)] {
            for (i, v) in gft_kernel_samples(&sampling, kernel, alpha, k).into_iter().enumerate() {
                rows.push((name, k, i, v));
            }
        }
    }
    if pt.monomial_beta().is_some() {
        for (name, branch) in [("bessel_phi", BesselBranch::Phi), ("bessel_phi_tilde", BesselBranch::PhiTilde)] {
            let Ok(spec) = BesselKernelSpec::for_transform(pt, branch) else {
                continue;
            };
            for &k in ks {
                for (i, &x) in sampling.x.iter().enumerate() {
                    rows.push((name, k, i, spec.eval(k * x)));
                }
            }
        }
    }
    emit(out, |w| {
        writeln!(w, "kernel,K,x,W_of_x,re,im")?;
        for (name, k, i, v) in &rows {
            writeln!(
                w,
                "{name},{},{},{},{},{}",
                fmt_f64(*k),
                fmt_f64(sampling.x[*i]),
                fmt_f64(sampling.w[*i]),
                fmt_f64(v.re),
                fmt_f64(v.im)
            )?;
        }
        Ok(())
    })?;
    Ok(rows.len())
}
