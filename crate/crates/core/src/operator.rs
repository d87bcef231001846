//! Truncated grids and the four generalized Laplacians in flux form.
//!
//! Every variant has the shape `a(x) d/dx b(x) d/dx c(x)` with `a`, `b`, `c`
//! powers of `f = dW/dx`. On a cell-centered grid this becomes
//!
//! ```text
//! (Au)_i = a_i/h · [B_{i+1/2}(c_{i+1}u_{i+1} - c_i u_i) - B_{i-1/2}(c_i u_i - c_{i-1}u_{i-1})]
//! ```
//!
//! where `B_{i+1/2}` is the reciprocal of the cell integral of `f^q` between
//! neighbouring nodes (`q` the power in `b = f^-q`). For `q = 1` that integral
//! is `W_{i+1} - W_i`, so the middle factor divides by the local W spacing.
//! Homogeneous Dirichlet conditions are imposed through ghost nodes half a
//! cell outside the domain.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::output::fmt_f64;
use crate::transform::PointTransform;
use crate::tridiag::{max_eigenvalue, Tridiagonal};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("grid bounds must satisfy finite x_min < x_max, got [{x_min}, {x_max}]")]
    BadBounds { x_min: f64, x_max: f64 },
    #[error("symmetric domain needs an even node count so no node sits at 0, got {0}")]
    OddNodeCountOnSymmetricDomain(usize),
    #[error("grid needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("ordering parameter alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("diffusion coefficient must be positive and finite, got {0}")]
    NonPositiveDiffusion(f64),
    #[error("dW/dx weight is zero or non-finite near x = {x}")]
    SingularWeight { x: f64 },
    #[error("eigenvalue bisection failed: band is not similar to a symmetric matrix")]
    EigensolveFailure,
}

/// Cell-centered grid: `x_i = x_min + (i + 1/2) h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self, OperatorError> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(OperatorError::BadBounds { x_min, x_max });
        }
        if n < 2 {
            return Err(OperatorError::TooFewNodes(n));
        }
        if x_min == -x_max && n % 2 == 1 {
            return Err(OperatorError::OddNodeCountOnSymmetricDomain(n));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Symmetric grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self, OperatorError> {
        Self::new(-half_width, half_width, n)
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn is_symmetric(&self) -> bool {
        self.x_min == -self.x_max
    }

    /// Node `i`; indices `-1` and `n` give the Dirichlet ghost nodes.
    pub fn node(&self, i: isize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        if self.is_symmetric() {
            // Mirror the upper half so the node set is exactly odd.
            let half = self.n / 2;
            let mut upper: Vec<f64> = (half..self.n).map(|i| self.node(i as isize)).collect();
            let mut out: Vec<f64> = upper.iter().rev().map(|x| -x).collect();
            out.append(&mut upper);
            out
        } else {
            (0..self.n).map(|i| self.node(i as isize)).collect()
        }
    }

    /// Cell faces `x_min + j h`, `j = 0..=n`.
    pub fn half_nodes(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|j| self.x_min + j as f64 * self.h())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Delta1,
    Delta2,
    Delta3,
    Delta4,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Self::Delta1, Self::Delta2, Self::Delta3, Self::Delta4];

    /// Exponents `(p_a, p_b, p_c)` with `a = f^-p_a`, `b = f^-p_b`, `c = f^-p_c`.
    pub fn exponents(self, alpha: f64) -> (f64, f64, f64) {
        match self {
            Self::Delta1 => (alpha, 2.0 - 2.0 * alpha, alpha),
            Self::Delta2 => (1.0 - alpha, 2.0 * alpha, 1.0 - alpha),
            Self::Delta3 => (1.0 - alpha, 1.0, alpha),
            Self::Delta4 => (alpha, 1.0, 1.0 - alpha),
        }
    }

    /// Power `p` of `f` in the self-adjointness measure `f^p dx`.
    pub fn measure_power(self, alpha: f64) -> f64 {
        let (pa, _, pc) = self.exponents(alpha);
        pa - pc
    }

    /// Power `p` of `f` in the measure `f^p dx` under which the variant
    /// conserves mass (the outermost factor is absorbed).
    pub fn mass_power(self, alpha: f64) -> f64 {
        self.exponents(alpha).0
    }

    /// The dx-adjoint partner: Δ3 and Δ4 swap, Δ1 and Δ2 are their own.
    pub fn adjoint(self) -> Self {
        match self {
            Self::Delta3 => Self::Delta4,
            Self::Delta4 => Self::Delta3,
            v => v,
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Delta1 => "Delta1",
            Self::Delta2 => "Delta2",
            Self::Delta3 => "Delta3",
            Self::Delta4 => "Delta4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub variant: Variant,
    pub alpha: f64,
    pub transform: PointTransform,
    pub diffusion: f64,
}

impl OperatorSpec {
    pub fn new(
        variant: Variant,
        alpha: f64,
        transform: PointTransform,
        diffusion: f64,
    ) -> Result<Self, OperatorError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(OperatorError::AlphaOutOfRange(alpha));
        }
        if !(diffusion > 0.0 && diffusion.is_finite()) {
            return Err(OperatorError::NonPositiveDiffusion(diffusion));
        }
        Ok(Self {
            variant,
            alpha,
            transform,
            diffusion,
        })
    }
}

/// `D · Δ` as a tridiagonal band with the weights it is self-adjoint under.
#[derive(Debug, Clone)]
pub struct AssembledOperator {
    pub spec: OperatorSpec,
    pub grid: Grid1D,
    pub x: Vec<f64>,
    /// `dW/dx` at the nodes.
    pub f: Vec<f64>,
    pub band: Tridiagonal,
    /// `μ_i`, self-adjointness quadrature weights.
    pub measure_weights: Vec<f64>,
    /// Weights `h f^p` of the conserved mass.
    pub mass_weights: Vec<f64>,
}

/// Assembles the discrete `D · Δ_variant`.
pub fn assemble(spec: &OperatorSpec, grid: &Grid1D) -> Result<AssembledOperator, OperatorError> {
    let n = grid.n;
    let h = grid.h();
    let pt = &spec.transform;
    let x = grid.nodes();
    let mut f = Vec::with_capacity(n);
    for &xi in &x {
        match pt.derivative(xi) {
            Ok(v) if v > 0.0 && v.is_finite() => f.push(v),
            _ => return Err(OperatorError::SingularWeight { x: xi }),
        }
    }
    let (pa, pb, pc) = spec.variant.exponents(spec.alpha);
    let a: Vec<f64> = f.iter().map(|v| v.powf(-pa)).collect();
    let c: Vec<f64> = f.iter().map(|v| v.powf(-pc)).collect();

    // Face coefficients over [x_{j-1}, x_j], j = 0..=n, ghosts included.
    let mut face = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let lo = if j == 0 { grid.node(-1) } else { x[j - 1] };
        let hi = if j == n { grid.node(n as isize) } else { x[j] };
        let integral = pt.derivative_power_integral(lo, hi, pb);
        let coeff = 1.0 / integral;
        if !(coeff > 0.0 && coeff.is_finite()) {
            return Err(OperatorError::SingularWeight { x: 0.5 * (lo + hi) });
        }
        face.push(coeff);
    }

    let d = spec.diffusion;
    let scale = d / h;
    let diag: Vec<f64> = (0..n)
        .map(|i| -(scale * ((a[i] * c[i]) * (face[i] + face[i + 1]))))
        .collect();
    let sup: Vec<f64> = (0..n - 1)
        .map(|i| scale * ((a[i] * c[i + 1]) * face[i + 1]))
        .collect();
    let sub: Vec<f64> = (0..n - 1)
        .map(|i| scale * ((a[i + 1] * c[i]) * face[i + 1]))
        .collect();

    let mp = spec.variant.measure_power(spec.alpha);
    let measure_weights = f.iter().map(|v| h * v.powf(mp)).collect();
    let kp = spec.variant.mass_power(spec.alpha);
    let mass_weights = f.iter().map(|v| h * v.powf(kp)).collect();

    Ok(AssembledOperator {
        spec: spec.clone(),
        grid: grid.clone(),
        x,
        f,
        band: Tridiagonal::new(sub, diag, sup),
        measure_weights,
        mass_weights,
    })
}

impl AssembledOperator {
    pub fn apply<T>(&self, u: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        self.band.apply(u)
    }

    /// Net outflow through both Dirichlet faces per unit time for state `u`,
    /// measured in the conserved mass. Only the edge values enter, so a
    /// density that has not reached the boundary leaks nothing, whatever the
    /// rounding in the interior.
    pub fn boundary_outflow(&self, u: &[f64]) -> f64 {
        let (left, right) = self.edge_conductances();
        left * u[0] + right * u[u.len() - 1]
    }

    /// `D B c` on the outer faces, recovered from the first and last rows:
    /// `w_i A_ii + w_{i±1} A_{i±1,i}` leaves only the boundary face term.
    fn edge_conductances(&self) -> (f64, f64) {
        let b = &self.band;
        let w = &self.mass_weights;
        let n = b.len();
        let left = -w[0] * b.diag[0] - w[1] * b.sub[0];
        let right = -w[n - 1] * b.diag[n - 1] - w[n - 2] * b.sup[n - 2];
        (left, right)
    }

    /// Writes `index, x, f, sub, diag, super, measure_weight`. The first row
    /// has no `sub` and the last no `super`; those cells hold 0.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,x,f,sub,diag,super,measure_weight")?;
        let n = self.grid.n;
        for i in 0..n {
            let sub = if i > 0 { self.band.sub[i - 1] } else { 0.0 };
            let sup = if i + 1 < n { self.band.sup[i] } else { 0.0 };
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                i,
                fmt_f64(self.x[i]),
                fmt_f64(self.f[i]),
                fmt_f64(sub),
                fmt_f64(self.band.diag[i]),
                fmt_f64(sup),
                fmt_f64(self.measure_weights[i])
            )?;
        }
        Ok(())
    }
}

/// `‖M_μ A − Aᵀ M_μ‖_max / ‖M_μ A‖_max`: zero when the band is self-adjoint
/// under its own measure weights.
pub fn adjoint_residual(op: &AssembledOperator) -> f64 {
    let b = &op.band;
    let mu = &op.measure_weights;
    let mut worst = 0.0_f64;
    let mut norm = 0.0_f64;
    for i in 0..b.len() {
        norm = norm.max((mu[i] * b.diag[i]).abs());
    }
    for i in 0..b.len().saturating_sub(1) {
        let upper = mu[i] * b.sup[i];
        let lower = mu[i + 1] * b.sub[i];
        norm = norm.max(upper.abs()).max(lower.abs());
        worst = worst.max((upper - lower).abs());
    }
    if norm == 0.0 {
        0.0
    } else {
        worst / norm
    }
}

/// `‖Aᵀ − B‖_max / ‖B‖_max` for two operators on the same grid. With a
/// Δ3 band as `first` and the matching Δ4 band as `second` this measures
/// the discrete dx-adjoint pairing `Δ3ᵀ = Δ4`.
pub fn pair_adjoint_residual(first: &AssembledOperator, second: &AssembledOperator) -> f64 {
    let t = first.band.transpose();
    let b = &second.band;
    let diff = |p: &[f64], q: &[f64]| {
        p.iter()
            .zip(q)
            .fold(0.0_f64, |m, (u, v)| m.max((u - v).abs()))
    };
    let worst = diff(&t.sub, &b.sub)
        .max(diff(&t.diag, &b.diag))
        .max(diff(&t.sup, &b.sup));
    let norm = b.max_abs();
    if norm == 0.0 {
        0.0
    } else {
        worst / norm
    }
}

/// Largest eigenvalue of the operator. The band is similar to the symmetric
/// matrix `M^{1/2} A M^{-1/2}`, whose off-diagonals are `sqrt(sub·sup)`.
pub fn spectrum_check(op: &AssembledOperator) -> Result<f64, OperatorError> {
    max_eigenvalue(&op.band).ok_or(OperatorError::EigensolveFailure)
}
