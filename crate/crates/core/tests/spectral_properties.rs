//! Bessel-kernel transforms, the plane-wave pairing with ground states, and
//! the Bessel spectral solver against finite differences.

use std::sync::Arc;

use num_complex::Complex64;
use ptdiff::density::{Coordinate, DensityField, InitialCondition, Measure, Sampling};
use ptdiff::ground_state::{build_ground_state, Family};
use ptdiff::operator::{Grid1D, OperatorSpec, Variant};
use ptdiff::solvers::{solve, FdOptions, Method, SolveRequest, SpectralOptions};
use ptdiff::spectral::{bessel_transform, gft_apply, BesselBranch, BesselKernelSpec, GftKernel, KGrid, KMode};
use ptdiff::transform::PointTransform;

fn field(pt: &PointTransform, half: f64, n: usize, g: impl Fn(f64) -> f64) -> DensityField {
    let s = Arc::new(Sampling::new(pt, &Grid1D::symmetric(half, n).unwrap()).unwrap());
    let values = s.x.iter().map(|&x| g(x)).collect();
    DensityField::new(s, Coordinate::X, Measure::Dx, 0.0, values).unwrap()
}

/// Mixtures the branch maps to rapidly decaying spectra: stretched Gaussians
/// for Φ, the same weighted by `dW/dx` for Φ̃. Generic profiles have spectra
/// decaying only like `1/k` and need impractically wide k grids.
fn smooth_for(branch: BesselBranch, beta: f64, x: f64) -> f64 {
    let s = x.abs().powf(2.0 * beta);
    let mix = (-0.5 * s).exp() + 0.3 * (-2.0 * s).exp() + 0.2 * (-0.4 * s).exp();
    match branch {
        BesselBranch::Phi => mix,
        BesselBranch::PhiTilde => beta * x.abs().powf(beta - 1.0) * mix,
    }
}

#[test]
fn bessel_transform_preserves_the_dx_norm() {
    for beta in [2.0, 3.0] {
        let pt = PointTransform::monomial(beta).unwrap();
        let kg = Arc::new(KGrid::new(4.0, 801, KMode::UniformK, &PointTransform::identity()).unwrap());
        for branch in [BesselBranch::Phi, BesselBranch::PhiTilde] {
            let rho = field(&pt, 3.0, 3000, |x| smooth_for(branch, beta, x));
            let h = rho.sampling.grid.h();
            let norm_x: f64 = rho.values.iter().map(|v| h * v * v).sum();
            let spec = BesselKernelSpec::new(beta, branch).unwrap();
            let out = bessel_transform(&rho, &spec, &kg).unwrap();
            let norm_k: f64 = out.values.iter().zip(&kg.dk).map(|(v, dk)| dk * v.norm_sqr()).sum();
            let rel = (norm_k / norm_x - 1.0).abs();
            assert!(rel < 1e-6, "β={beta} {branch:?}: {rel:e}");
        }
    }
}

#[test]
fn weighted_stretched_gaussian_is_invariant_under_phi_tilde() {
    // (dW/dx) exp(-W²/2) maps to the same form in k; checked against
    // adaptive quadrature at k = 0.5025.
    let beta = 2.0;
    let pt = PointTransform::monomial(beta).unwrap();
    let rho = field(&pt, 4.0, 4000, |x| 2.0 * x.abs() * (-0.5 * x.powi(4)).exp());
    let kg = Arc::new(KGrid::new(2.5, 101, KMode::UniformK, &PointTransform::identity()).unwrap());
    let spec = BesselKernelSpec::new(beta, BesselBranch::PhiTilde).unwrap();
    let out = bessel_transform(&rho, &spec, &kg).unwrap();
    for (k, v) in kg.k.iter().zip(&out.values) {
        let want = 2.0 * k.abs() * (-0.5 * k.powi(4)).exp();
        assert!((v - Complex64::new(want, 0.0)).norm() < 1e-6, "k={k}: {v}");
    }
}

#[test]
fn even_density_has_real_even_spectrum() {
    let pt = PointTransform::monomial(2.0).unwrap();
    let rho = field(&pt, 3.0, 2000, |x| (-0.5 * x.powi(4)).exp() * (1.0 + x * x));
    let kg = Arc::new(KGrid::new(3.0, 61, KMode::UniformK, &PointTransform::identity()).unwrap());
    for branch in [BesselBranch::Phi, BesselBranch::PhiTilde] {
        let out = bessel_transform(&rho, &BesselKernelSpec::new(2.0, branch).unwrap(), &kg).unwrap();
        let n = out.values.len();
        for j in 0..n {
            assert!(out.values[j].im.abs() < 1e-12);
            assert!((out.values[j].re - out.values[n - 1 - j].re).abs() < 1e-12);
        }
    }
}

#[test]
fn partner_ground_state_analyzed_with_phi_is_gaussian_in_k() {
    let pt = PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap();
    let grid = Grid1D::symmetric(3.0, 6000).unwrap();
    for alpha in [0.0, 0.3, 0.5] {
        let gs = build_ground_state(Family::H2H4, alpha, &pt, &grid).unwrap();
        let values = (0..gs.x.len()).map(|i| gs.unnormalized(i)).collect();
        let s = Arc::new(Sampling::new(&pt, &grid).unwrap());
        let rho = DensityField::new(s, Coordinate::X, Measure::Dx, 0.0, values).unwrap();
        let kg = Arc::new(KGrid::new(5.0, 101, KMode::UniformK, &PointTransform::identity()).unwrap());
        let out = gft_apply(&rho, GftKernel::Phi, alpha, &kg).unwrap();
        for (k, v) in kg.big_k.iter().zip(&out.values) {
            let want = Complex64::new((-0.5 * k * k).exp(), 0.0);
            assert!((v - want).norm() < 1e-7, "α={alpha} K={k}: {v}");
        }
    }
}

#[test]
fn bessel_spectral_solver_agrees_with_finite_differences() {
    // Variants and exponents where both discretizations converge to the
    // same solution; see the README for the excluded cases.
    for (variant, beta) in [(Variant::Delta1, 2.0), (Variant::Delta2, 2.0), (Variant::Delta2, 3.0)] {
        let req = |method| SolveRequest {
            spec: OperatorSpec::new(variant, 0.0, PointTransform::monomial(beta).unwrap(), 1.0).unwrap(),
            grid: Grid1D::symmetric(3.0, 3000).unwrap(),
            ic: InitialCondition::GaussianInW { center: 0.0, variance: 0.05 },
            times: vec![0.05, 0.2, 0.5],
            method,
        };
        let spectral = solve(&req(Method::Spectral(SpectralOptions::default()))).unwrap();
        let fd = solve(&req(Method::FiniteDifference(FdOptions {
            monitor: true,
            ..FdOptions::default()
        })))
        .unwrap();
        for (a, b) in spectral.snapshots.iter().zip(&fd.snapshots) {
            let diff = a.max_abs_diff(b);
            assert!(diff < 1e-4, "{variant} β={beta} t={}: {diff:e}", a.time);
        }
    }
}
