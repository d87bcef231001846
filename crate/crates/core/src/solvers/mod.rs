//! Three independent routes to the generalized diffusion equations:
//! closed-form convolution in W, spectral propagation, and Crank–Nicolson
//! time stepping in x.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::density::{DensityError, DensityField, InitialCondition, Measure, Sampling};
use crate::operator::{Grid1D, OperatorError, OperatorSpec, Variant};
use crate::spectral::SpectralError;

pub mod closed_form;
pub mod fd;
pub mod spectral;

pub use fd::FdOptions;
pub use spectral::SpectralOptions;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("no {method} kernel for {variant} at alpha = {alpha}: {reason}")]
    NoKernelAvailable {
        method: &'static str,
        variant: Variant,
        alpha: f64,
        reason: &'static str,
    },
    #[error("halving the time step changed the snapshot at t = {t} by {change:e} (limit {limit:e})")]
    StepTooLarge { t: f64, change: f64, limit: f64 },
    #[error("snapshot times: {0}")]
    BadTimes(String),
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("density undershoots to {min:e} at t = {t}")]
    Undershoot { t: f64, min: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    WClosedForm,
    Spectral(SpectralOptions),
    FiniteDifference(FdOptions),
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Self::WClosedForm => "w_closed_form",
            Self::Spectral(_) => "spectral",
            Self::FiniteDifference(_) => "finite_difference",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveRequest {
    pub spec: OperatorSpec,
    pub grid: Grid1D,
    pub ic: InitialCondition,
    pub times: Vec<f64>,
    pub method: Method,
}

/// Mass bookkeeping for one snapshot, in the variant's conserved measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassRecord {
    pub t: f64,
    pub mass: f64,
    /// `mass - initial mass`.
    pub drift: f64,
    /// Mass that left through the boundaries so far.
    pub leakage: f64,
    pub min_value: f64,
}

impl MassRecord {
    /// Drift not explained by boundary leakage.
    pub fn unexplained_drift(&self) -> f64 {
        self.drift + self.leakage
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub method: &'static str,
    pub initial: DensityField,
    pub snapshots: Vec<DensityField>,
    pub mass: Vec<MassRecord>,
}

/// Measure in which `variant` conserves mass.
pub fn mass_measure(variant: Variant, alpha: f64) -> Measure {
    Measure::from_power(variant.mass_power(alpha))
}

pub fn check_times(times: &[f64]) -> Result<(), SolveError> {
    if times.is_empty() {
        return Err(SolveError::BadTimes("list is empty".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(SolveError::BadTimes("times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|p| p[1] <= p[0]) {
        return Err(SolveError::BadTimes("times must be strictly increasing".into()));
    }
    Ok(())
}

impl SolveRequest {
    pub fn validate(&self) -> Result<(), SolveError> {
        check_times(&self.times)?;
        self.ic.validate()?;
        if let Method::FiniteDifference(opts) = &self.method {
            opts.validate(&self.times)?;
        }
        Ok(())
    }

    pub fn sampling(&self) -> Result<Arc<Sampling>, SolveError> {
        Ok(Arc::new(Sampling::new(&self.spec.transform, &self.grid)?))
    }

    /// The initial density, normalized in the variant's mass measure.
    pub fn initial_density(&self) -> Result<DensityField, SolveError> {
        let measure = mass_measure(self.spec.variant, self.spec.alpha);
        let rho = self.ic.realize(&self.spec.transform, self.sampling()?, measure)?;
        rho.check_truncation()?;
        Ok(rho)
    }
}

pub fn solve(req: &SolveRequest) -> Result<Solution, SolveError> {
    req.validate()?;
    let initial = req.initial_density()?;
    match &req.method {
        Method::WClosedForm => closed_form::propagate(&req.spec, &initial, &req.times),
        Method::Spectral(opts) => spectral::propagate(&req.spec, &initial, &req.times, opts),
        Method::FiniteDifference(opts) => fd::propagate(&req.spec, &initial, &req.times, opts),
    }
}

/// Mass records for snapshots from a method without boundary fluxes.
pub(crate) fn closed_mass_records(initial: &DensityField, snapshots: &[DensityField]) -> Vec<MassRecord> {
    let m0 = initial.mass();
    snapshots
        .iter()
        .map(|s| {
            let mass = s.mass();
            MassRecord {
                t: s.time,
                mass,
                drift: mass - m0,
                leakage: 0.0,
                min_value: s.min_value(),
            }
        })
        .collect()
}
