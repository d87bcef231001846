//! Spectral propagation: analyze with one kernel, damp each mode by
//! `exp(-K² D t)`, synthesize with the biorthogonal partner.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_times, closed_mass_records, SolveError, Solution};
use crate::density::DensityField;
use crate::operator::{OperatorSpec, Variant};
use crate::spectral::{bessel_propagate, BesselBranch, BesselKernelSpec, KGrid, KMode};
use crate::transform::PointTransform;

const INV_2PI: f64 = 0.159_154_943_091_895_34;

/// Modes are kept while `exp(-K² D t_min)` exceeds `e^{-40}`.
const DAMPING_EXPONENT: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralOptions {
    /// Override of the largest retained wavenumber.
    pub k_max: Option<f64>,
    /// Override of the node count on `[-k_max, k_max]`.
    pub k_count: Option<usize>,
}

/// Which kernel family diagonalizes the operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    /// Plane waves in W with f-power prefactors (`analysis`, `synthesis`).
    PlaneWave { analysis: f64, synthesis: f64 },
    Bessel(BesselKernelSpec),
}

pub fn kernel_family(spec: &OperatorSpec) -> Result<KernelFamily, SolveError> {
    let (pa, pb, pc) = spec.variant.exponents(spec.alpha);
    if pb == 1.0 {
        return Ok(KernelFamily::PlaneWave {
            analysis: pa,
            synthesis: pc,
        });
    }
    let unavailable = |reason| SolveError::NoKernelAvailable {
        method: "spectral",
        variant: spec.variant,
        alpha: spec.alpha,
        reason,
    };
    if spec.transform.monomial_beta().is_none() {
        return Err(unavailable("Bessel kernels need a monomial transform"));
    }
    // Δ1 at α = 1 is Δ2 at α = 0 and vice versa.
    let branch = match (spec.variant, spec.alpha) {
        (Variant::Delta1, a) if a == 0.0 => BesselBranch::Phi,
        (Variant::Delta2, a) if a == 1.0 => BesselBranch::Phi,
        (Variant::Delta2, a) if a == 0.0 => BesselBranch::PhiTilde,
        (Variant::Delta1, a) if a == 1.0 => BesselBranch::PhiTilde,
        _ => return Err(unavailable("Bessel kernels exist only at alpha = 0 or 1")),
    };
    Ok(KernelFamily::Bessel(BesselKernelSpec::for_transform(
        &spec.transform,
        branch,
    )?))
}

pub fn propagate(
    spec: &OperatorSpec,
    initial: &DensityField,
    times: &[f64],
    opts: &SpectralOptions,
) -> Result<Solution, SolveError> {
    check_times(times)?;
    initial.check_truncation()?;
    let family = kernel_family(spec)?;
    let s = &initial.sampling;
    let d = spec.diffusion;
    let t_min = times[0];

    let snapshots_values: Vec<Vec<f64>> = match family {
        KernelFamily::PlaneWave { analysis, synthesis } => {
            let w_ext = s.w[0].abs().max(s.w[s.len() - 1].abs());
            let min_dw = s.w.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
            let k_max = opts.k_max.unwrap_or_else(|| damping_limit(d, t_min, 1.0).min(PI / min_dw));
            let kgrid = match opts.k_count {
                Some(count) => KGrid::new(k_max, count, KMode::UniformK, &PointTransform::identity())?,
                None => KGrid::resolving(w_ext, k_max)?,
            };
            plane_wave_propagate(s.as_ref(), &kgrid, &initial.values, analysis, synthesis, d, times)
        }
        KernelFamily::Bessel(kernel) => {
            let beta = kernel.beta;
            let x_ext = s.x[0].abs().max(s.x[s.len() - 1].abs());
            let k_max = opts.k_max.unwrap_or_else(|| damping_limit(d, t_min, beta).min(PI / s.grid.h()));
            let count = opts.k_count.unwrap_or_else(|| {
                let rate = (beta * x_ext.powf(beta) * k_max.powf(beta - 1.0)).max(x_ext);
                let dk = 0.9 * PI / rate;
                let c = (2.0 * k_max / dk).ceil() as usize;
                c.max(2) + c % 2
            });
            let kgrid = KGrid::new(k_max, count, KMode::UniformK, &PointTransform::identity())?;
            let multipliers: Vec<Vec<f64>> = times
                .iter()
                .map(|&t| kgrid.k.iter().map(|&k| (-kernel.k_squared(k) * d * t).exp()).collect())
                .collect();
            bessel_propagate(&kernel, s.as_ref(), &kgrid, &initial.values, &multipliers)
        }
    };

    let snapshots: Vec<DensityField> = times
        .iter()
        .zip(snapshots_values)
        .map(|(&t, values)| DensityField {
            sampling: s.clone(),
            coordinate: initial.coordinate,
            measure: initial.measure,
            time: t,
            values,
        })
        .collect();
    let mass = closed_mass_records(initial, &snapshots);
    Ok(Solution {
        method: "spectral",
        initial: initial.clone(),
        snapshots,
        mass,
    })
}

/// `|k|` at which `exp(-|k|^{2β} D t)` drops to `e^{-40}`; unbounded at t = 0.
fn damping_limit(d: f64, t: f64, beta: f64) -> f64 {
    if t > 0.0 {
        (DAMPING_EXPONENT / (d * t)).powf(0.5 / beta)
    } else {
        f64::INFINITY
    }
}

fn plane_wave_propagate(
    s: &crate::density::Sampling,
    kgrid: &KGrid,
    initial: &[f64],
    analysis: f64,
    synthesis: f64,
    d: f64,
    times: &[f64],
) -> Vec<Vec<f64>> {
    let h = s.grid.h();
    let amps: Vec<f64> = s
        .f
        .iter()
        .zip(initial)
        .map(|(f, r)| h * f.powf(analysis) * r)
        .collect();
    let forward: Vec<Complex64> = kgrid
        .big_k
        .par_iter()
        .map(|&kk| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, w) in amps.iter().zip(&s.w) {
                let (sn, c) = (kk * w).sin_cos();
                acc += Complex64::new(a * c, -a * sn);
            }
            acc
        })
        .collect();
    let prefactor: Vec<f64> = s.f.iter().map(|f| f.powf(synthesis) * INV_2PI).collect();
    times
        .iter()
        .map(|&t| {
            let damped: Vec<Complex64> = kgrid
                .big_k
                .iter()
                .zip(&forward)
                .zip(&kgrid.d_big_k)
                .map(|((&kk, v), dk)| v * (dk * (-kk * kk * d * t).exp()))
                .collect();
            s.w.par_iter()
                .zip(&prefactor)
                .map(|(&w, p)| {
                    let mut acc = 0.0;
                    for (kk, a) in kgrid.big_k.iter().zip(&damped) {
                        let (sn, c) = (kk * w).sin_cos();
                        acc += a.re * c - a.im * sn;
                    }
                    acc * p
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{InitialCondition, Measure, Sampling};
    use crate::operator::Grid1D;
    use crate::solvers::closed_form;
    use std::sync::Arc;

    #[test]
    fn zero_time_is_identity() {
        let pt = PointTransform::identity();
        let spec = OperatorSpec::new(Variant::Delta3, 0.0, pt.clone(), 1.0).unwrap();
        let s = Arc::new(Sampling::new(&pt, &Grid1D::symmetric(8.0, 400).unwrap()).unwrap());
        let ic = InitialCondition::GaussianInW {
            center: 0.0,
            variance: 1.0,
        };
        let rho = ic.realize(&pt, s, Measure::Dw).unwrap();
        let opts = SpectralOptions {
            k_max: Some(12.0),
            k_count: None,
        };
        let sol = propagate(&spec, &rho, &[0.0, 0.5], &opts).unwrap();
        assert!(sol.snapshots[0].max_abs_diff(&rho) < 1e-10);
    }

    #[test]
    fn agrees_with_closed_form_on_cubic() {
        let pt = PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap();
        let spec = OperatorSpec::new(Variant::Delta3, 0.0, pt.clone(), 1.0).unwrap();
        let s = Arc::new(Sampling::new(&pt, &Grid1D::symmetric(3.0, 3000).unwrap()).unwrap());
        let rho = InitialCondition::narrow().realize(&pt, s, Measure::Dw).unwrap();
        let a = propagate(&spec, &rho, &[1.0], &SpectralOptions::default()).unwrap();
        let b = closed_form::propagate(&spec, &rho, &[1.0]).unwrap();
        let diff = a.snapshots[0].max_abs_diff(&b.snapshots[0]);
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn polynomial_delta1_has_no_kernel() {
        let pt = PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap();
        let spec = OperatorSpec::new(Variant::Delta1, 0.0, pt, 1.0).unwrap();
        assert!(matches!(kernel_family(&spec), Err(SolveError::NoKernelAvailable { .. })));
    }
}
