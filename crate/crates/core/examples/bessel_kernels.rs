//! Bessel kernels for monomial transforms: the collapse to plane waves at
//! β = 1, invariance of the stretched Gaussian, and the exponent choice.

use std::sync::Arc;

use num_complex::Complex64;
use ptdiff::density::{Coordinate, DensityField, Measure, Sampling};
use ptdiff::operator::Grid1D;
use ptdiff::spectral::{bessel_transform, select_exponent_variant, BesselBranch, BesselKernelSpec, KGrid, KMode};
use ptdiff::transform::PointTransform;

fn main() {
    let unit = BesselKernelSpec::new(1.0, BesselBranch::Phi).unwrap();
    for eta in [0.5, 2.0, 10.0] {
        let (s, c) = (-eta as f64).sin_cos();
        let plane = Complex64::new(c, s) / (2.0 * std::f64::consts::PI).sqrt();
        println!("beta = 1, eta = {eta}: kernel {:.12} plane wave {:.12}", unit.eval(eta), plane);
    }

    for beta in [2.0, 3.0] {
        let pt = PointTransform::monomial(beta).unwrap();
        let s = Arc::new(Sampling::new(&pt, &Grid1D::symmetric(3.5, 4000).unwrap()).unwrap());
        let values = s.x.iter().map(|x| (-0.5 * x.abs().powf(2.0 * beta)).exp()).collect();
        let rho = DensityField::new(s, Coordinate::X, Measure::Dx, 0.0, values).unwrap();
        let kg = Arc::new(KGrid::new(2.0, 81, KMode::UniformK, &PointTransform::identity()).unwrap());
        let spec = bessel_transform(&rho, &BesselKernelSpec::new(beta, BesselBranch::Phi).unwrap(), &kg).unwrap();
        let worst = kg
            .k
            .iter()
            .zip(&spec.values)
            .map(|(k, v)| (v - Complex64::new((-0.5 * k.abs().powf(2.0 * beta)).exp(), 0.0)).norm())
            .fold(0.0, f64::max);
        println!("beta = {beta}: exp(-|x|^2b/2) -> exp(-|k|^2b/2), max error {worst:.2e}");
    }

    let sel = select_exponent_variant(3.0, BesselBranch::Phi).unwrap();
    println!(
        "exponent choice at beta = 3: {:?} (collapse errors {:.1e} / {:.1e})",
        sel.chosen, sel.collapse_error[0], sel.collapse_error[1]
    );
}
