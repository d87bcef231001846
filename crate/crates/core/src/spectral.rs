//! W-Fourier transform, the biorthogonal `φ_K`/`φ̃_K` kernels, and the
//! Bessel-kernel transforms for monomial W.
//!
//! All transforms are plain rectangle-rule quadratures on the cell-centered
//! grids. Analysis multiplies by the conjugate kernel; synthesis sums the
//! partner kernel over the K (or k) nodes.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::{Coordinate, DensityError, DensityField, Measure, Sampling};
use crate::operator::AssembledOperator;
use crate::output::fmt_f64;
use crate::special::{bessel_j, bessel_j_scaled, SpecialError, BESSEL_SWITCH};
use crate::transform::PointTransform;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error("Bessel kernels are defined for monomial transforms only")]
    NotMonomial,
    #[error("beta = {0} puts a Bessel order outside (-2, 2)")]
    BetaTooSmall(f64),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("K grid needs a positive extent and at least 2 nodes")]
    BadKGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KMode {
    /// `K_j = k_j`.
    UniformK,
    /// `K_j = W(k_j)`.
    KEqualsWofK,
}

/// Cell-centered nodes `k_j` on `[-k_max, k_max]` with their images `K_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct KGrid {
    pub mode: KMode,
    pub k: Vec<f64>,
    pub big_k: Vec<f64>,
    /// Quadrature weights in k.
    pub dk: Vec<f64>,
    /// Quadrature weights in K (face differences of `K(k)`).
    pub d_big_k: Vec<f64>,
}

impl KGrid {
    pub fn new(k_max: f64, count: usize, mode: KMode, pt: &PointTransform) -> Result<Self, SpectralError> {
        if !(k_max > 0.0 && k_max.is_finite()) || count < 2 {
            return Err(SpectralError::BadKGrid);
        }
        let step = 2.0 * k_max / count as f64;
        let map = |k: f64| match mode {
            KMode::UniformK => k,
            KMode::KEqualsWofK => pt.evaluate(k),
        };
        let k: Vec<f64> = (0..count).map(|j| -k_max + (j as f64 + 0.5) * step).collect();
        let big_k = k.iter().map(|&v| map(v)).collect();
        let d_big_k = (0..count)
            .map(|j| {
                let lo = -k_max + j as f64 * step;
                map(lo + step) - map(lo)
            })
            .collect();
        Ok(Self {
            mode,
            k,
            big_k,
            dk: vec![step; count],
            d_big_k,
        })
    }

    /// Uniform K grid on `[-k_max, k_max]` whose spacing resolves a signal
    /// supported on `|W| <= w_extent` without aliasing.
    pub fn resolving(w_extent: f64, k_max: f64) -> Result<Self, SpectralError> {
        let spacing = 0.9 * PI / w_extent;
        let count = ((2.0 * k_max / spacing).ceil() as usize).max(2);
        let count = count + count % 2;
        Self::new(k_max, count, KMode::UniformK, &PointTransform::identity())
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub kgrid: Arc<KGrid>,
    pub values: Vec<Complex64>,
}

impl SpectralField {
    /// `k, K, re_rho_hat, im_rho_hat`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,K,re_rho_hat,im_rho_hat")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(self.kgrid.k[j]),
                fmt_f64(self.kgrid.big_k[j]),
                fmt_f64(v.re),
                fmt_f64(v.im)
            )?;
        }
        Ok(())
    }
}

/// W-Fourier analysis under dW: `ρ̂(K) = Σ_i h f_i ρ_i e^{-iKW_i} / √(2π)`.
pub fn wft_forward(density: &DensityField, kgrid: &Arc<KGrid>) -> Result<SpectralField, SpectralError> {
    density.check_truncation()?;
    let weights = density.sampling.weights(Measure::Dw);
    let amps: Vec<f64> = weights.iter().zip(&density.values).map(|(w, r)| w * r).collect();
    let w = &density.sampling.w;
    let values = kgrid
        .big_k
        .par_iter()
        .map(|&kk| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, wi) in amps.iter().zip(w) {
                let (s, c) = (kk * wi).sin_cos();
                acc += Complex64::new(a * c, -a * s);
            }
            acc * INV_SQRT_2PI
        })
        .collect();
    Ok(SpectralField {
        kgrid: kgrid.clone(),
        values,
    })
}

/// Inverse W-Fourier transform back onto `sampling`, as a density in W.
pub fn wft_inverse(spectral: &SpectralField, sampling: &Arc<Sampling>) -> DensityField {
    let kg = &spectral.kgrid;
    let amps: Vec<Complex64> = spectral
        .values
        .iter()
        .zip(&kg.d_big_k)
        .map(|(v, dk)| v * dk)
        .collect();
    let values = sampling
        .w
        .par_iter()
        .map(|&wi| synth_plane_waves(&kg.big_k, &amps, wi) * INV_SQRT_2PI)
        .collect();
    DensityField {
        sampling: sampling.clone(),
        coordinate: Coordinate::W,
        measure: Measure::Dw,
        time: 0.0,
        values,
    }
}

fn synth_plane_waves(big_k: &[f64], amps: &[Complex64], w: f64) -> f64 {
    let mut acc = 0.0;
    for (kk, a) in big_k.iter().zip(amps) {
        let (s, c) = (kk * w).sin_cos();
        acc += a.re * c - a.im * s;
    }
    acc
}

/// The two biorthogonal kernel families for Δ3 and Δ4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GftKernel {
    /// `f^α e^{iKW} / √(2π)`, eigenfunctions of Δ3.
    Phi,
    /// `f^{1-α} e^{iKW} / √(2π)`, eigenfunctions of Δ4.
    PhiTilde,
}

impl GftKernel {
    pub fn partner(self) -> Self {
        match self {
            Self::Phi => Self::PhiTilde,
            Self::PhiTilde => Self::Phi,
        }
    }

    pub fn power(self, alpha: f64) -> f64 {
        match self {
            Self::Phi => alpha,
            Self::PhiTilde => 1.0 - alpha,
        }
    }
}

/// Samples of `φ_K` or `φ̃_K` on the grid.
pub fn gft_kernel_samples(sampling: &Sampling, kernel: GftKernel, alpha: f64, big_k: f64) -> Vec<Complex64> {
    let p = kernel.power(alpha);
    sampling
        .w
        .iter()
        .zip(&sampling.f)
        .map(|(w, f)| {
            let (s, c) = (big_k * w).sin_cos();
            Complex64::new(c, s) * (f.powf(p) * INV_SQRT_2PI)
        })
        .collect()
}

/// Analysis `ρ̂(K) = Σ_i h · conj(kernel_K(x_i)) · ρ_i` under dx.
pub fn gft_apply(
    density: &DensityField,
    kernel: GftKernel,
    alpha: f64,
    kgrid: &Arc<KGrid>,
) -> Result<SpectralField, SpectralError> {
    density.check_truncation()?;
    let s = &density.sampling;
    let h = s.grid.h();
    let p = kernel.power(alpha);
    let amps: Vec<f64> = s
        .f
        .iter()
        .zip(&density.values)
        .map(|(f, r)| h * f.powf(p) * r * INV_SQRT_2PI)
        .collect();
    let values = kgrid
        .big_k
        .par_iter()
        .map(|&kk| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, wi) in amps.iter().zip(&s.w) {
                let (sn, c) = (kk * wi).sin_cos();
                acc += Complex64::new(a * c, -a * sn);
            }
            acc
        })
        .collect();
    Ok(SpectralField {
        kgrid: kgrid.clone(),
        values,
    })
}

/// Synthesis with `kernel` (the partner of the analysis kernel):
/// `ρ(x) = Σ_j dK_j kernel_{K_j}(x) ρ̂_j`, real part.
pub fn gft_inverse(
    spectral: &SpectralField,
    kernel: GftKernel,
    alpha: f64,
    sampling: &Arc<Sampling>,
    measure: Measure,
) -> DensityField {
    let kg = &spectral.kgrid;
    let p = kernel.power(alpha);
    let amps: Vec<Complex64> = spectral
        .values
        .iter()
        .zip(&kg.d_big_k)
        .map(|(v, dk)| v * dk)
        .collect();
    let values = sampling
        .w
        .par_iter()
        .zip(&sampling.f)
        .map(|(&wi, f)| synth_plane_waves(&kg.big_k, &amps, wi) * f.powf(p) * INV_SQRT_2PI)
        .collect();
    DensityField {
        sampling: sampling.clone(),
        coordinate: Coordinate::X,
        measure,
        time: 0.0,
        values,
    }
}

/// Which printed power of `|η|` multiplies the Bessel functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExponentVariant {
    /// `|η|^{β - 1/2}`.
    BetaMinusHalf,
    /// `|η|^{(β - 1)/2}`.
    HalfBetaMinusOne,
}

impl ExponentVariant {
    pub fn exponent(self, beta: f64) -> f64 {
        match self {
            Self::BetaMinusHalf => beta - 0.5,
            Self::HalfBetaMinusOne => 0.5 * (beta - 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselBranch {
    /// Orders `∓(1 - 1/(2β))`, eigenfunctions of Δ1 at α = 0.
    Phi,
    /// Orders `∓1/(2β)`, eigenfunctions of Δ2 at α = 0.
    PhiTilde,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselKernelSpec {
    pub beta: f64,
    pub branch: BesselBranch,
    pub exponent: ExponentVariant,
}

impl BesselKernelSpec {
    pub fn new(beta: f64, branch: BesselBranch) -> Result<Self, SpectralError> {
        let spec = Self {
            beta,
            branch,
            exponent: ExponentVariant::BetaMinusHalf,
        };
        if !(beta >= 0.25) || spec.order().abs() >= crate::special::MAX_ORDER {
            return Err(SpectralError::BetaTooSmall(beta));
        }
        Ok(spec)
    }

    pub fn for_transform(pt: &PointTransform, branch: BesselBranch) -> Result<Self, SpectralError> {
        let beta = pt.monomial_beta().ok_or(SpectralError::NotMonomial)?;
        Self::new(beta, branch)
    }

    pub fn with_exponent(mut self, exponent: ExponentVariant) -> Self {
        self.exponent = exponent;
        self
    }

    /// The positive-sign order `ν`; the kernel combines `J_{-ν}` and `J_ν`.
    pub fn order(&self) -> f64 {
        match self.branch {
            BesselBranch::Phi => 1.0 - 0.5 / self.beta,
            BesselBranch::PhiTilde => 0.5 / self.beta,
        }
    }

    /// Kernel value at `η = kx`, normalized to be unitary under `dx` and `dk`.
    pub fn eval(&self, eta: f64) -> Complex64 {
        let beta = self.beta;
        let nu = self.order();
        let a = eta.abs();
        let z = a.powf(beta);
        let e = self.exponent.exponent(beta);
        let j = |mu: f64| -> f64 {
            // J_{-1} = -J_1 keeps the folded power non-negative.
            let (mu, flip) = if mu == -1.0 { (1.0, -1.0) } else { (mu, 1.0) };
            flip * if z > BESSEL_SWITCH {
                a.powf(e) * bessel_j(mu, z).expect("order checked at construction")
            } else {
                // |η|^e (z/2)^μ folded into one power so η = 0 stays finite.
                a.powf(e + mu * beta)
                    * 2f64.powf(-mu)
                    * bessel_j_scaled(mu, z).expect("order checked at construction")
            }
        };
        let even = j(-nu);
        let sign = if eta == 0.0 { 0.0 } else { eta.signum() };
        let odd = j(nu) * sign;
        let im = match self.branch {
            BesselBranch::Phi => -odd,
            BesselBranch::PhiTilde => odd,
        };
        Complex64::new(even, im) * (0.5 * beta)
    }

    /// Eigenvalue magnitude `K² = |k|^{2β}` for mode `k`.
    pub fn k_squared(&self, k: f64) -> f64 {
        k.abs().powf(2.0 * self.beta)
    }
}

/// Kernel table `kernel(k_j x_i)`, row-major in `j`.
fn bessel_table(spec: &BesselKernelSpec, x: &[f64], k: &[f64]) -> Vec<Complex64> {
    k.par_iter()
        .flat_map_iter(|&kj| x.iter().map(move |&xi| spec.eval(kj * xi)))
        .collect()
}

/// Analysis `ρ̂(k) = Σ_i h · conj(Φ_k(x_i)) · ρ_i` under dx.
pub fn bessel_transform(
    density: &DensityField,
    spec: &BesselKernelSpec,
    kgrid: &Arc<KGrid>,
) -> Result<SpectralField, SpectralError> {
    density.check_truncation()?;
    let s = &density.sampling;
    let h = s.grid.h();
    let values = kgrid
        .k
        .par_iter()
        .map(|&kj| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (xi, r) in s.x.iter().zip(&density.values) {
                acc += spec.eval(kj * xi).conj() * (h * r);
            }
            acc
        })
        .collect();
    Ok(SpectralField {
        kgrid: kgrid.clone(),
        values,
    })
}

/// Synthesis `ρ(x) = Σ_j dk_j Φ_{k_j}(x) ρ̂_j`, real part.
pub fn bessel_inverse(spectral: &SpectralField, spec: &BesselKernelSpec, sampling: &Arc<Sampling>) -> DensityField {
    let kg = &spectral.kgrid;
    let values = sampling
        .x
        .par_iter()
        .map(|&xi| {
            let mut acc = 0.0;
            for j in 0..kg.len() {
                let v = spec.eval(kg.k[j] * xi) * spectral.values[j];
                acc += kg.dk[j] * v.re;
            }
            acc
        })
        .collect();
    DensityField {
        sampling: sampling.clone(),
        coordinate: Coordinate::X,
        measure: Measure::Dx,
        time: 0.0,
        values,
    }
}

/// Analysis and synthesis through one shared kernel table, propagating each
/// mode by `multiplier(k)` in between. Used by the spectral solver.
pub(crate) fn bessel_propagate(
    spec: &BesselKernelSpec,
    sampling: &Sampling,
    kgrid: &KGrid,
    initial: &[f64],
    multipliers: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let n = sampling.len();
    let h = sampling.grid.h();
    let table = bessel_table(spec, &sampling.x, &kgrid.k);
    let forward: Vec<Complex64> = (0..kgrid.len())
        .into_par_iter()
        .map(|j| {
            let row = &table[j * n..(j + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (kv, r) in row.iter().zip(initial) {
                acc += kv.conj() * (h * r);
            }
            acc
        })
        .collect();
    multipliers
        .iter()
        .map(|mult| {
            let amps: Vec<Complex64> = (0..kgrid.len())
                .map(|j| forward[j] * (kgrid.dk[j] * mult[j]))
                .collect();
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut acc = 0.0;
                    for (j, a) in amps.iter().enumerate() {
                        let kv = table[j * n + i];
                        acc += kv.re * a.re - kv.im * a.im;
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `max_i |(A φ)_i + K² φ_i| / max|φ|` over interior rows (first and last
/// excluded).
pub fn eigenrelation_residual(op: &AssembledOperator, kernel: &[Complex64], big_k: f64) -> f64 {
    eigenrelation_residual_where(op, kernel, big_k, |_| true)
}

/// As [`eigenrelation_residual`], restricted to interior rows whose node
/// satisfies `keep`.
pub fn eigenrelation_residual_where<F: Fn(f64) -> bool>(
    op: &AssembledOperator,
    kernel: &[Complex64],
    big_k: f64,
    keep: F,
) -> f64 {
    let image = op.apply(kernel);
    let scale = kernel.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    if scale == 0.0 {
        return 0.0;
    }
    let k2 = big_k * big_k;
    let n = kernel.len();
    let mut worst = 0.0_f64;
    for i in 1..n.saturating_sub(1) {
        if keep(op.x[i]) {
            worst = worst.max((image[i] + kernel[i] * k2).norm());
        }
    }
    worst / scale
}

/// Gram matrix `G_{jl} = Σ_i h conj(φ̃_{K_j}(x_i)) φ_{K_l}(x_i)`.
pub fn gram_matrix(sampling: &Sampling, alpha: f64, big_ks: &[f64]) -> Vec<Vec<Complex64>> {
    let h = sampling.grid.h();
    let phis: Vec<Vec<Complex64>> = big_ks
        .iter()
        .map(|&k| gft_kernel_samples(sampling, GftKernel::Phi, alpha, k))
        .collect();
    let tildes: Vec<Vec<Complex64>> = big_ks
        .iter()
        .map(|&k| gft_kernel_samples(sampling, GftKernel::PhiTilde, alpha, k))
        .collect();
    tildes
        .iter()
        .map(|t| {
            phis.iter()
                .map(|p| t.iter().zip(p).map(|(a, b)| a.conj() * b * h).sum())
                .collect()
        })
        .collect()
}

/// Largest off-diagonal magnitude over the smallest diagonal magnitude.
pub fn gram_offdiagonal_ratio(gram: &[Vec<Complex64>]) -> f64 {
    let mut diag = f64::INFINITY;
    let mut off = 0.0_f64;
    for (j, row) in gram.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            if j == l {
                diag = diag.min(v.norm());
            } else {
                off = off.max(v.norm());
            }
        }
    }
    off / diag
}

/// Evidence gathered when choosing between the two printed exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentSelection {
    pub chosen: ExponentVariant,
    /// Max deviation from the Fourier kernel at β = 1, per variant.
    pub collapse_error: [f64; 2],
    /// Eigenrelation residual at the requested β, per variant.
    pub eigen_residual: [f64; 2],
}

/// Picks the exponent variant that collapses to the Fourier kernel at β = 1
/// and has the smaller eigenrelation residual for `beta`.
pub fn select_exponent_variant(beta: f64, branch: BesselBranch) -> Result<ExponentSelection, SpectralError> {
    use crate::operator::{assemble, Grid1D, OperatorSpec, Variant};
    let variants = [ExponentVariant::BetaMinusHalf, ExponentVariant::HalfBetaMinusOne];
    let mut collapse = [0.0; 2];
    let mut residual = [0.0; 2];
    let pt = PointTransform::monomial(beta).map_err(|_| SpectralError::BetaTooSmall(beta))?;
    let variant = match branch {
        BesselBranch::Phi => Variant::Delta1,
        BesselBranch::PhiTilde => Variant::Delta2,
    };
    let grid = Grid1D::symmetric(2.0, 2000).expect("fixed grid");
    let spec = OperatorSpec::new(variant, 0.0, pt, 1.0).expect("fixed spec");
    let op = assemble(&spec, &grid);
    for (slot, &v) in variants.iter().enumerate() {
        let unit = BesselKernelSpec::new(1.0, branch)?.with_exponent(v);
        let sign = match branch {
            BesselBranch::Phi => -1.0,
            BesselBranch::PhiTilde => 1.0,
        };
        let mut worst = 0.0_f64;
        for i in 0..=500 {
            let eta = 0.1 + i as f64 * (50.0 - 0.1) / 500.0;
            for e in [eta, -eta] {
                let (s, c) = (sign * e).sin_cos();
                let want = Complex64::new(c, s) * INV_SQRT_2PI;
                worst = worst.max((unit.eval(e) - want).norm());
            }
        }
        collapse[slot] = worst;
        residual[slot] = match &op {
            Ok(op) => {
                let k = BesselKernelSpec::new(beta, branch)?.with_exponent(v);
                let samples: Vec<Complex64> = op.x.iter().map(|&x| k.eval(x)).collect();
                eigenrelation_residual_where(op, &samples, 1.0, |x| x.abs() > 0.1)
            }
            Err(_) => f64::NAN,
        };
    }
    let score = |i: usize| {
        let r = if residual[i].is_nan() { 0.0 } else { residual[i] };
        collapse[i] + r
    };
    let chosen = if score(0) <= score(1) { variants[0] } else { variants[1] };
    Ok(ExponentSelection {
        chosen,
        collapse_error: collapse,
        eigen_residual: residual,
    })
}
