//! The W-Gaussian is its own W-Fourier transform, and the biorthogonal
//! kernel pair reconstructs a density after analysis.

use std::sync::Arc;

use num_complex::Complex64;
use ptdiff::density::{Coordinate, DensityField, Measure, Sampling};
use ptdiff::operator::Grid1D;
use ptdiff::spectral::{gft_apply, gft_inverse, wft_forward, GftKernel, KGrid, KMode};
use ptdiff::transform::PointTransform;

fn main() {
    let pt = PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap();
    let s = Arc::new(Sampling::new(&pt, &Grid1D::symmetric(2.5, 4000).unwrap()).unwrap());

    let values = s.w.iter().map(|w| (-0.5 * w * w).exp()).collect();
    let rho = DensityField::new(s.clone(), Coordinate::W, Measure::Dw, 0.0, values).unwrap();
    let kg = Arc::new(KGrid::new(6.0, 121, KMode::UniformK, &pt).unwrap());
    let spec = wft_forward(&rho, &kg).unwrap();
    let worst = kg
        .big_k
        .iter()
        .zip(&spec.values)
        .map(|(k, v)| (v - Complex64::new((-0.5 * k * k).exp(), 0.0)).norm())
        .fold(0.0, f64::max);
    println!("W-FT of exp(-W^2/2) vs exp(-K^2/2): max error {worst:.2e}");

    // Analysis with phi-tilde, synthesis with phi.
    let alpha = 0.3;
    let bump = |w: f64| (-2.0 * (w - 1.0).powi(2)).exp() + (-w * w).exp();
    let values = (0..s.len()).map(|i| s.f[i].powf(alpha) * bump(s.w[i])).collect();
    let rho = DensityField::new(s.clone(), Coordinate::X, Measure::Dx, 0.0, values).unwrap();
    let wmax = s.w[s.len() - 1];
    let kg = Arc::new(KGrid::resolving(wmax, 30.0).unwrap());
    let spec = gft_apply(&rho, GftKernel::PhiTilde, alpha, &kg).unwrap();
    let back = gft_inverse(&spec, GftKernel::Phi, alpha, &s, Measure::Dx);
    println!("biorthogonal round trip at alpha = {alpha}: max error {:.2e}", back.max_abs_diff(&rho));
}
