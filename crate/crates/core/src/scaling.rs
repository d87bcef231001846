//! Moments, power-law fits, regime classification, crossover detection and
//! the fractal-diffusion parameter map.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::{Coordinate, DensityField, Measure};
use crate::output::fmt_f64;
use crate::solvers::Solution;
use crate::transform::PointTransform;

/// Own-measure mass may differ from 1 by this much before `msd` refuses.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Minimum points per fitted segment.
pub const MIN_FIT_POINTS: usize = 5;

/// Half-width of the band around β = 1 classified as normal diffusion.
pub const NORMAL_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalingError {
    #[error("density mass {0} drifted from 1 by more than {NORMALIZATION_TOLERANCE:e}")]
    NormalizationDrift(f64),
    #[error("window [{lo}, {hi}] holds {got} usable points, need at least {MIN_FIT_POINTS}")]
    WindowTooSparse { lo: f64, hi: f64, got: usize },
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(f64),
    #[error("series spans {0:.3} decades, crossover detection needs 3")]
    SpanTooShort(f64),
    #[error("dimension c must be positive, got {0}")]
    NonPositiveDimension(f64),
    #[error("beta = g/2 - c + 2 = {0} is not positive; no point transformation represents this pair")]
    NonPositiveBeta(f64),
}

/// Second moments of one density in both coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub msd_x: f64,
    pub msd_w: f64,
    /// `∫ρ dx`.
    pub norm_x: f64,
    /// `∫ρ dW`.
    pub norm_w: f64,
}

fn central_moment(weights: &[f64], values: &[f64], coord: &[f64]) -> (f64, f64) {
    let mut m0 = 0.0;
    let mut m1 = 0.0;
    for i in 0..values.len() {
        let p = weights[i] * values[i];
        m0 += p;
        m1 += p * coord[i];
    }
    let mean = m1 / m0;
    let mut m2 = 0.0;
    for i in 0..values.len() {
        let d = coord[i] - mean;
        m2 += weights[i] * values[i] * d * d;
    }
    (m2 / m0, m0)
}

pub fn moments(density: &DensityField) -> Moments {
    let s = &density.sampling;
    let (msd_x, norm_x) = central_moment(&s.weights(Measure::Dx), &density.values, &s.x);
    let (msd_w, norm_w) = central_moment(&s.weights(Measure::Dw), &density.values, &s.w);
    Moments {
        msd_x,
        msd_w,
        norm_x,
        norm_w,
    }
}

/// Central second moment of `ξ = x` (renormalized under dx) or `ξ = W`
/// (renormalized under dW). The density must first be normalized under its
/// own measure to within [`NORMALIZATION_TOLERANCE`].
pub fn msd(density: &DensityField, coordinate: Coordinate) -> Result<f64, ScalingError> {
    let m = density.mass();
    if (m - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(ScalingError::NormalizationDrift(m));
    }
    let mo = moments(density);
    Ok(match coordinate {
        Coordinate::X => mo.msd_x,
        Coordinate::W => mo.msd_w,
    })
}

/// MSD time series. `msd_x`/`msd_w` are displacement variances relative to
/// the initial density (`raw - baseline`), so the initial width does not
/// mask the early-time growth law; the raw moments are kept alongside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MsdSeries {
    pub times: Vec<f64>,
    pub msd_x: Vec<f64>,
    pub msd_w: Vec<f64>,
    pub raw_x: Vec<f64>,
    pub raw_w: Vec<f64>,
    pub norm_x: Vec<f64>,
    pub norm_w: Vec<f64>,
    /// Own-measure mass minus the initial mass.
    pub norm_drift: Vec<f64>,
    pub baseline_x: f64,
    pub baseline_w: f64,
}

impl MsdSeries {
    pub fn from_snapshots(initial: &DensityField, snapshots: &[DensityField]) -> Result<Self, ScalingError> {
        let base = moments(initial);
        let m0 = initial.mass();
        let mut out = Self {
            times: Vec::with_capacity(snapshots.len()),
            msd_x: Vec::new(),
            msd_w: Vec::new(),
            raw_x: Vec::new(),
            raw_w: Vec::new(),
            norm_x: Vec::new(),
            norm_w: Vec::new(),
            norm_drift: Vec::new(),
            baseline_x: base.msd_x,
            baseline_w: base.msd_w,
        };
        for s in snapshots {
            let m = s.mass();
            if (m - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(ScalingError::NormalizationDrift(m));
            }
            let mo = moments(s);
            out.times.push(s.time);
            out.raw_x.push(mo.msd_x);
            out.raw_w.push(mo.msd_w);
            out.msd_x.push(mo.msd_x - base.msd_x);
            out.msd_w.push(mo.msd_w - base.msd_w);
            out.norm_x.push(mo.norm_x);
            out.norm_w.push(mo.norm_w);
            out.norm_drift.push(m - m0);
        }
        Ok(out)
    }

    pub fn from_solution(sol: &Solution) -> Result<Self, ScalingError> {
        Self::from_snapshots(&sol.initial, &sol.snapshots)
    }

    /// Series built directly from values, without baselines.
    pub fn from_values(times: Vec<f64>, msd_x: Vec<f64>, msd_w: Vec<f64>) -> Self {
        let n = times.len();
        Self {
            raw_x: msd_x.clone(),
            raw_w: msd_w.clone(),
            times,
            msd_x,
            msd_w,
            norm_x: vec![1.0; n],
            norm_w: vec![1.0; n],
            norm_drift: vec![0.0; n],
            baseline_x: 0.0,
            baseline_w: 0.0,
        }
    }

    pub fn values(&self, coordinate: Coordinate) -> &[f64] {
        match coordinate {
            Coordinate::X => &self.msd_x,
            Coordinate::W => &self.msd_w,
        }
    }

    /// `t, msd_x, msd_w, norm_x, norm_w`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,msd_x,msd_w,norm_x,norm_w")?;
        for i in 0..self.times.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(self.times[i]),
                fmt_f64(self.msd_x[i]),
                fmt_f64(self.msd_w[i]),
                fmt_f64(self.norm_x[i]),
                fmt_f64(self.norm_w[i])
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    /// Natural log of the prefactor.
    pub log_prefactor: f64,
    pub window: [f64; 2],
    pub r_squared: f64,
    pub points: usize,
}

struct Ols {
    slope: f64,
    intercept: f64,
    ssr: f64,
    sst: f64,
}

fn ols(x: &[f64], y: &[f64]) -> Ols {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut sst = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        sst += (b - my) * (b - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ssr = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    Ols {
        slope,
        intercept,
        ssr,
        sst,
    }
}

fn to_fit(o: &Ols, window: [f64; 2], points: usize) -> ScalingFit {
    let r_squared = if o.sst > 0.0 { (1.0 - o.ssr / o.sst).clamp(0.0, 1.0) } else { 1.0 };
    ScalingFit {
        exponent: o.slope,
        log_prefactor: o.intercept,
        window,
        r_squared,
        points,
    }
}

/// OLS of `ln y` on `ln t` over points with `t` in `window` and `y > 0`.
pub fn fit_power_law(times: &[f64], values: &[f64], window: [f64; 2]) -> Result<ScalingFit, ScalingError> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, y)| **t >= window[0] && **t <= window[1] && **t > 0.0 && **y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .unzip();
    if lx.len() < MIN_FIT_POINTS {
        return Err(ScalingError::WindowTooSparse {
            lo: window[0],
            hi: window[1],
            got: lx.len(),
        });
    }
    Ok(to_fit(&ols(&lx, &ly), window, lx.len()))
}

pub fn fit_scaling(series: &MsdSeries, coordinate: Coordinate, window: [f64; 2]) -> Result<ScalingFit, ScalingError> {
    fit_power_law(&series.times, series.values(coordinate), window)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Ballistic,
    SuperDiffusive,
    Normal,
    SubDiffusive,
}

/// Regime of `MSD ∝ t^{exponent}` with `β = 1/exponent`. The band
/// `|β - 1| <= 0.02` is normal; `β = 0.25` counts as super-diffusive.
pub fn classify_regime(exponent: f64) -> Result<Regime, ScalingError> {
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(ScalingError::NonPositiveExponent(exponent));
    }
    let beta = 1.0 / exponent;
    Ok(if (beta - 1.0).abs() <= NORMAL_TOLERANCE {
        Regime::Normal
    } else if beta < 0.25 {
        Regime::Ballistic
    } else if beta < 1.0 {
        Regime::SuperDiffusive
    } else {
        Regime::SubDiffusive
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    pub early: ScalingFit,
    pub late: ScalingFit,
    pub knee_time: f64,
    /// Set when splitting improves the single-line residual by less than 1%.
    pub no_knee: bool,
    pub ssr_single: f64,
    pub ssr_split: f64,
}

/// Two-segment log-log fit with an exhaustive breakpoint search. The knee is
/// where the two fitted lines meet, clamped to the series span.
pub fn detect_crossover(series: &MsdSeries, coordinate: Coordinate) -> Result<Crossover, ScalingError> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = series
        .times
        .iter()
        .zip(series.values(coordinate))
        .filter(|(t, y)| **t > 0.0 && **y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .unzip();
    let n = lx.len();
    let span = if n > 1 { (lx[n - 1] - lx[0]) / std::f64::consts::LN_10 } else { 0.0 };
    if span < 3.0 {
        return Err(ScalingError::SpanTooShort(span));
    }
    if n < 2 * MIN_FIT_POINTS {
        return Err(ScalingError::WindowTooSparse {
            lo: lx[0].exp(),
            hi: lx[n - 1].exp(),
            got: n,
        });
    }
    let single = ols(&lx, &ly);
    let mut best: Option<(usize, Ols, Ols)> = None;
    for k in MIN_FIT_POINTS..=n - MIN_FIT_POINTS {
        let a = ols(&lx[..k], &ly[..k]);
        let b = ols(&lx[k..], &ly[k..]);
        let better = match &best {
            None => true,
            Some((_, pa, pb)) => a.ssr + b.ssr < pa.ssr + pb.ssr,
        };
        if better {
            best = Some((k, a, b));
        }
    }
    let (k, a, b) = best.expect("at least one split");
    let ssr_split = a.ssr + b.ssr;
    // A single line that already fits to rounding level has no knee to find.
    let exact = single.ssr <= 1e-20 * n as f64;
    let no_knee = exact || (single.ssr - ssr_split) / single.ssr < 0.01;
    let log_knee = if (a.slope - b.slope).abs() > 1e-12 {
        (b.intercept - a.intercept) / (a.slope - b.slope)
    } else {
        0.5 * (lx[k - 1] + lx[k])
    };
    let knee_time = log_knee.clamp(lx[0], lx[n - 1]).exp();
    Ok(Crossover {
        early: to_fit(&a, [lx[0].exp(), lx[k - 1].exp()], k),
        late: to_fit(&b, [lx[k].exp(), lx[n - 1].exp()], n - k),
        knee_time,
        no_knee,
        ssr_single: single.ssr,
        ssr_split,
    })
}

/// Fractal-diffusion parameters and their point-transformation image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OspParams {
    pub c: f64,
    pub g: f64,
    pub beta: f64,
    /// Effective diffusion scale `c² β² D`.
    pub scale: f64,
}

/// Maps dimension `c` and exponent `g` to the monomial transform `W(y) = y^β`
/// in `y = x^c`, with `β = g/2 - c + 2`. The composite map is `W = x^{βc}`.
pub fn osp_to_pt(c: f64, g: f64, d: f64) -> Result<(PointTransform, OspParams), ScalingError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(ScalingError::NonPositiveDimension(c));
    }
    let beta = g / 2.0 - c + 2.0;
    if !(beta > 0.0) {
        return Err(ScalingError::NonPositiveBeta(beta));
    }
    let pt = PointTransform::monomial(beta).map_err(|_| ScalingError::NonPositiveBeta(beta))?;
    Ok((
        pt,
        OspParams {
            c,
            g,
            beta,
            scale: c * c * beta * beta * d,
        },
    ))
}

/// `g = 2(β + c - 2)`, the inverse of [`osp_to_pt`] at fixed `c`.
pub fn pt_to_osp(beta: f64, c: f64) -> f64 {
    2.0 * (beta + c - 2.0)
}
