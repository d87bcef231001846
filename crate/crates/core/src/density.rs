//! Densities sampled on a grid, their measures, and initial conditions.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::Grid1D;
use crate::output::fmt_f64;
use crate::transform::PointTransform;

/// Edge values above this fraction of the peak make truncation unsafe.
pub const TRUNCATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("density at the domain edge is {edge:e} of its peak, above {limit:e}")]
    TruncationUnsafe { edge: f64, limit: f64 },
    #[error("dW/dx is non-finite at x = {x}")]
    SingularWeight { x: f64 },
    #[error("initial condition width must be positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("initial condition has zero or non-finite mass")]
    ZeroMass,
    #[error("sample count {got} does not match the grid ({want})")]
    LengthMismatch { got: usize, want: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coordinate {
    X,
    W,
}

/// Quadrature measure `f^p dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Measure {
    Dx,
    Dw,
    Weighted(f64),
}

impl Measure {
    pub fn from_power(p: f64) -> Self {
        if p == 0.0 {
            Self::Dx
        } else if p == 1.0 {
            Self::Dw
        } else {
            Self::Weighted(p)
        }
    }

    pub fn power(self) -> f64 {
        match self {
            Self::Dx => 0.0,
            Self::Dw => 1.0,
            Self::Weighted(p) => p,
        }
    }
}

/// Grid nodes with their W images and `dW/dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    pub grid: Grid1D,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub f: Vec<f64>,
}

impl Sampling {
    pub fn new(pt: &PointTransform, grid: &Grid1D) -> Result<Self, DensityError> {
        let x = grid.nodes();
        let w = x.iter().map(|&v| pt.evaluate(v)).collect();
        let mut f = Vec::with_capacity(x.len());
        for &xi in &x {
            match pt.derivative(xi) {
                Ok(v) if v.is_finite() => f.push(v),
                _ => return Err(DensityError::SingularWeight { x: xi }),
            }
        }
        Ok(Self {
            grid: grid.clone(),
            x,
            w,
            f,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Node weights `h f_i^p`.
    pub fn weights(&self, measure: Measure) -> Vec<f64> {
        let h = self.grid.h();
        match measure {
            Measure::Dx => vec![h; self.len()],
            Measure::Dw => self.f.iter().map(|f| h * f).collect(),
            Measure::Weighted(p) => self.f.iter().map(|f| h * f.powf(p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub sampling: Arc<Sampling>,
    pub coordinate: Coordinate,
    pub measure: Measure,
    pub time: f64,
    pub values: Vec<f64>,
}

impl DensityField {
    pub fn new(
        sampling: Arc<Sampling>,
        coordinate: Coordinate,
        measure: Measure,
        time: f64,
        values: Vec<f64>,
    ) -> Result<Self, DensityError> {
        if values.len() != sampling.len() {
            return Err(DensityError::LengthMismatch {
                got: values.len(),
                want: sampling.len(),
            });
        }
        Ok(Self {
            sampling,
            coordinate,
            measure,
            time,
            values,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.sampling.x
    }

    pub fn w(&self) -> &[f64] {
        &self.sampling.w
    }

    pub fn f(&self) -> &[f64] {
        &self.sampling.f
    }

    pub fn weights(&self) -> Vec<f64> {
        self.sampling.weights(self.measure)
    }

    /// `∫ρ dμ` under an arbitrary measure.
    pub fn mass_under(&self, measure: Measure) -> f64 {
        self.sampling
            .weights(measure)
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// `∫ρ dμ` under the field's own measure.
    pub fn mass(&self) -> f64 {
        self.mass_under(self.measure)
    }

    pub fn normalize(&mut self) -> Result<(), DensityError> {
        let m = self.mass();
        if !(m > 0.0 && m.is_finite()) {
            return Err(DensityError::ZeroMass);
        }
        self.values.iter_mut().for_each(|v| *v /= m);
        Ok(())
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest edge magnitude relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.values.len();
        self.values[0].abs().max(self.values[n - 1].abs()) / peak
    }

    pub fn check_truncation(&self) -> Result<(), DensityError> {
        let edge = self.edge_ratio();
        if edge > TRUNCATION_TOLERANCE {
            Err(DensityError::TruncationUnsafe {
                edge,
                limit: TRUNCATION_TOLERANCE,
            })
        } else {
            Ok(())
        }
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &DensityField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Initial profiles. Shapes are given as functions of W and sampled at the
/// W images of the nodes, then normalized under the solver's mass measure.
#[derive(Clone)]
pub enum InitialCondition {
    /// `exp(-(W - center)² / (2 variance))`.
    GaussianInW { center: f64, variance: f64 },
    /// Delta at position `x0`, realized as `exp(-1000 (W - W(x0))²)`.
    DeltaAt { x0: f64 },
    /// Arbitrary profile of `(x, W)`.
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

/// Coefficient of the narrow Gaussian standing in for a delta.
pub const DELTA_SHARPNESS: f64 = 1000.0;

impl fmt::Debug for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GaussianInW { center, variance } => f
                .debug_struct("GaussianInW")
                .field("center", center)
                .field("variance", variance)
                .finish(),
            Self::DeltaAt { x0 } => f.debug_struct("DeltaAt").field("x0", x0).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Serializable subset of [`InitialCondition`] used in run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConditionSpec {
    GaussianInW {
        #[serde(default)]
        center: f64,
        variance: f64,
    },
    DeltaAt {
        #[serde(default)]
        x0: f64,
    },
}

impl From<&InitialConditionSpec> for InitialCondition {
    fn from(spec: &InitialConditionSpec) -> Self {
        match *spec {
            InitialConditionSpec::GaussianInW { center, variance } => {
                Self::GaussianInW { center, variance }
            }
            InitialConditionSpec::DeltaAt { x0 } => Self::DeltaAt { x0 },
        }
    }
}

impl InitialCondition {
    /// The paper-style delta at the origin, `exp(-1000 W²)`.
    pub fn narrow() -> Self {
        Self::DeltaAt { x0: 0.0 }
    }

    pub fn validate(&self) -> Result<(), DensityError> {
        if let Self::GaussianInW { variance, .. } = *self {
            if !(variance > 0.0 && variance.is_finite()) {
                return Err(DensityError::NonPositiveWidth(variance));
            }
        }
        Ok(())
    }

    /// Samples the profile and normalizes it under `measure`.
    pub fn realize(
        &self,
        pt: &PointTransform,
        sampling: Arc<Sampling>,
        measure: Measure,
    ) -> Result<DensityField, DensityError> {
        self.validate()?;
        let values: Vec<f64> = match self {
            Self::GaussianInW { center, variance } => sampling
                .w
                .iter()
                .map(|w| (-(w - center).powi(2) / (2.0 * variance)).exp())
                .collect(),
            Self::DeltaAt { x0 } => {
                let w0 = pt.evaluate(*x0);
                sampling
                    .w
                    .iter()
                    .map(|w| (-DELTA_SHARPNESS * (w - w0).powi(2)).exp())
                    .collect()
            }
            Self::Custom(g) => sampling
                .x
                .iter()
                .zip(&sampling.w)
                .map(|(&x, &w)| g(x, w))
                .collect(),
        };
        let coordinate = if measure == Measure::Dx {
            Coordinate::X
        } else {
            Coordinate::W
        };
        let mut field = DensityField::new(sampling, coordinate, measure, 0.0, values)?;
        field.normalize()?;
        Ok(field)
    }
}

/// Long-format snapshot CSV: `t, x, W_of_x, rho, measure_weight`.
pub fn write_snapshots_csv<W: Write>(fields: &[DensityField], mut out: W) -> io::Result<()> {
    writeln!(out, "t,x,W_of_x,rho,measure_weight")?;
    for field in fields {
        let weights = field.weights();
        let t = fmt_f64(field.time);
        for i in 0..field.values.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                t,
                fmt_f64(field.x()[i]),
                fmt_f64(field.w()[i]),
                fmt_f64(field.values[i]),
                fmt_f64(weights[i])
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn narrow_gaussian_normalizes_under_dw() {
        let pt = PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap();
        let s = Arc::new(Sampling::new(&pt, &Grid1D::symmetric(1.0, 2000).unwrap()).unwrap());
        let rho = InitialCondition::narrow().realize(&pt, s, Measure::Dw).unwrap();
        assert!((rho.mass() - 1.0).abs() < 1e-14);
        assert!(rho.check_truncation().is_ok());
        // Peak of the normalized exp(-1000 W²) is sqrt(1000/π).
        assert!((rho.peak() / (1000.0 / std::f64::consts::PI).sqrt() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn wide_profile_is_truncation_unsafe() {
        let pt = PointTransform::identity();
        let s = Arc::new(Sampling::new(&pt, &Grid1D::symmetric(2.0, 100).unwrap()).unwrap());
        let ic = InitialCondition::GaussianInW {
            center: 0.0,
            variance: 1.0,
        };
        let rho = ic.realize(&pt, s, Measure::Dx).unwrap();
        assert!(matches!(
            rho.check_truncation(),
            Err(DensityError::TruncationUnsafe { .. })
        ));
    }

    #[test]
    fn config_record_format() {
        let spec: InitialConditionSpec =
            serde_json::from_str(r#"{"kind": "gaussian_in_w", "variance": 0.5}"#).unwrap();
        assert_eq!(
            spec,
            InitialConditionSpec::GaussianInW {
                center: 0.0,
                variance: 0.5
            }
        );
        let spec: InitialConditionSpec = serde_json::from_str(r#"{"kind": "delta_at"}"#).unwrap();
        assert_eq!(spec, InitialConditionSpec::DeltaAt { x0: 0.0 });
    }
}
