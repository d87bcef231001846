//! Ground states of the generalized oscillator Hamiltonians, their
//! annihilation residuals and modality.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::Grid1D;
use crate::output::fmt_f64;
use crate::transform::PointTransform;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroundStateError {
    #[error("dW/dx is non-finite at x = {x}")]
    SingularWeight { x: f64 },
    #[error("ordering parameter alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `f^α e^{-W²/2}`.
    H1H3,
    /// `f^{1-α} e^{-W²/2}`.
    H2H4,
}

impl Family {
    pub fn power(self, alpha: f64) -> f64 {
        match self {
            Self::H1H3 => alpha,
            Self::H2H4 => 1.0 - alpha,
        }
    }

    pub fn partner(self) -> Self {
        match self {
            Self::H1H3 => Self::H2H4,
            Self::H2H4 => Self::H1H3,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::H1H3 => "H1H3",
            Self::H2H4 => "H2H4",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub family: Family,
    pub alpha: f64,
    pub transform: PointTransform,
    pub grid: Grid1D,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub f: Vec<f64>,
    /// Normalized under dx.
    pub samples: Vec<f64>,
    /// `samples = normalization · f^p e^{-W²/2}`.
    pub normalization: f64,
}

/// Samples `f^p e^{-W²/2}` and normalizes them under dx, the measure shared
/// by both families at every α, so the α = 0 / α = 1 swap is exact.
pub fn build_ground_state(
    family: Family,
    alpha: f64,
    pt: &PointTransform,
    grid: &Grid1D,
) -> Result<GroundState, GroundStateError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(GroundStateError::AlphaOutOfRange(alpha));
    }
    let x = grid.nodes();
    let w: Vec<f64> = x.iter().map(|&v| pt.evaluate(v)).collect();
    let mut f = Vec::with_capacity(x.len());
    for &xi in &x {
        match pt.derivative(xi) {
            Ok(v) if v.is_finite() => f.push(v),
            _ => return Err(GroundStateError::SingularWeight { x: xi }),
        }
    }
    let p = family.power(alpha);
    let raw: Vec<f64> = f
        .iter()
        .zip(&w)
        .map(|(fi, wi)| fi.powf(p) * (-0.5 * wi * wi).exp())
        .collect();
    let mass: f64 = raw.iter().sum::<f64>() * grid.h();
    let normalization = 1.0 / mass;
    Ok(GroundState {
        family,
        alpha,
        transform: pt.clone(),
        grid: grid.clone(),
        samples: raw.iter().map(|v| v * normalization).collect(),
        x,
        w,
        f,
        normalization,
    })
}

impl GroundState {
    /// `index`-th sample before normalization.
    pub fn unnormalized(&self, index: usize) -> f64 {
        self.samples[index] / self.normalization
    }

    /// `x, W_of_x, f, psi, family, alpha`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,W_of_x,f,psi,family,alpha")?;
        for i in 0..self.x.len() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_f64(self.x[i]),
                fmt_f64(self.w[i]),
                fmt_f64(self.f[i]),
                fmt_f64(self.samples[i]),
                self.family,
                fmt_f64(self.alpha)
            )?;
        }
        Ok(())
    }
}

/// Residuals of the annihilating factor `f^{-(1-p)} d/dx f^{-p} + W` on the
/// interior faces, scaled by `max|ψ|`.
///
/// With `v = f^{-p} ψ` (the bare W-Gaussian) the factor equals
/// `f^p (dv/dW + W v)`; on face `i + 1/2` it is discretized as
/// `(f^p)_{i+1/2} [(v_{i+1} - v_i)/(W_{i+1} - W_i) + W̄ v̄]` with face
/// averages and the secant slope for `f`.
pub fn annihilation_residuals(gs: &GroundState) -> Vec<(f64, f64)> {
    let p = gs.family.power(gs.alpha);
    let h = gs.grid.h();
    let v: Vec<f64> = gs
        .samples
        .iter()
        .zip(&gs.f)
        .map(|(s, f)| s / f.powf(p))
        .collect();
    let scale = gs.samples.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
    (0..gs.x.len() - 1)
        .map(|i| {
            let dw = gs.w[i + 1] - gs.w[i];
            let secant = dw / h;
            let wbar = 0.5 * (gs.w[i] + gs.w[i + 1]);
            let vbar = 0.5 * (v[i] + v[i + 1]);
            let r = secant.powf(p) * ((v[i + 1] - v[i]) / dw + wbar * vbar);
            (0.5 * (gs.x[i] + gs.x[i + 1]), r.abs() / scale)
        })
        .collect()
}

/// Largest interior annihilation residual.
pub fn annihilation_residual(gs: &GroundState) -> f64 {
    annihilation_residual_where(gs, |_| true)
}

/// Largest annihilation residual over faces whose position satisfies `keep`.
pub fn annihilation_residual_where<F: Fn(f64) -> bool>(gs: &GroundState, keep: F) -> f64 {
    annihilation_residuals(gs)
        .into_iter()
        .filter(|(x, _)| keep(*x))
        .fold(0.0, |m, (_, r)| m.max(r))
}

/// Number of strict interior local maxima; a plateau counts once.
pub fn count_modes(gs: &GroundState) -> usize {
    count_local_maxima(&gs.samples)
}

pub fn count_local_maxima(values: &[f64]) -> usize {
    // Collapse equal neighbours so plateaus become single points.
    let mut runs: Vec<f64> = Vec::with_capacity(values.len());
    for &v in values {
        if runs.last() != Some(&v) {
            runs.push(v);
        }
    }
    (1..runs.len().saturating_sub(1))
        .filter(|&i| runs[i] > runs[i - 1] && runs[i] > runs[i + 1])
        .count()
}
