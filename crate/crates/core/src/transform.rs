//! Point transformations `W(x)`.
//!
//! Two families are supported: the odd monomial `W(x) = sgn(x)|x|^β` and
//! polynomials `W(x) = Σ_{j=1}^{2J+1} a_j x^j` with non-negative
//! coefficients. Validated transforms are immutable and monotone
//! non-decreasing on the whole real line.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Iteration cap for [`PointTransform::invert`].
const MAX_INVERT_ITER: usize = 400;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("monomial exponent must be positive and finite, got {0}")]
    NonPositiveBeta(f64),
    #[error("highest non-zero coefficient multiplies x^{0}; the leading power must be odd")]
    EvenLeadingPower(usize),
    #[error("coefficient a_{index} = {value} is negative or not finite")]
    NegativeCoefficient { index: usize, value: f64 },
    #[error("even coefficient a_{index} = {even} is not below a_{next} = {odd}", next = index + 1)]
    EvenCoefficientNotDominated { index: usize, even: f64, odd: f64 },
    #[error("all polynomial coefficients are zero")]
    AllZeroCoefficients,
    #[error("dW/dx is negative near x = {at} (min {value:e}); W is not monotone")]
    NotMonotone { at: f64, value: f64 },
    #[error("dW/dx is unbounded at x = {0}")]
    Unbounded(f64),
    #[error("inversion of W(x) = {0} did not converge")]
    NoConvergence(f64),
    #[error("relative tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// Unvalidated description of a point transformation, as it appears in run
/// configurations: `{"kind": "monomial", "beta": 3.0}` or
/// `{"kind": "polynomial", "coeffs": [1.0, 0.0, 1.0]}` (a₁ first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TransformSpec {
    Monomial { beta: f64 },
    Polynomial { coeffs: Vec<f64> },
}

impl TransformSpec {
    pub fn validate(&self) -> Result<PointTransform, TransformError> {
        PointTransform::validate(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Monomial { beta: f64 },
    /// `coeffs[j - 1] = a_j`, trailing zeros trimmed.
    Polynomial { coeffs: Vec<f64> },
}

/// A validated, monotone point transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTransform {
    kind: Kind,
}

impl PointTransform {
    pub fn validate(spec: &TransformSpec) -> Result<Self, TransformError> {
        match spec {
            TransformSpec::Monomial { beta } => Self::monomial(*beta),
            TransformSpec::Polynomial { coeffs } => Self::polynomial(coeffs),
        }
    }

    /// `W(x) = sgn(x)|x|^β`.
    pub fn monomial(beta: f64) -> Result<Self, TransformError> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(TransformError::NonPositiveBeta(beta));
        }
        Ok(Self {
            kind: Kind::Monomial { beta },
        })
    }

    /// The identity transform `W(x) = x`.
    pub fn identity() -> Self {
        Self {
            kind: Kind::Monomial { beta: 1.0 },
        }
    }

    /// `W(x) = Σ a_j x^j` with `coeffs = [a₁, a₂, …]`.
    ///
    /// Zero even-index coefficients are exempt from the dominance rule; a
    /// non-zero `a_{2m}` must be strictly below `a_{2m+1}`. Candidates that
    /// pass the coefficient rules but still have a negative derivative
    /// somewhere are rejected with [`TransformError::NotMonotone`].
    pub fn polynomial(coeffs: &[f64]) -> Result<Self, TransformError> {
        for (i, &a) in coeffs.iter().enumerate() {
            if !(a.is_finite() && a >= 0.0) {
                return Err(TransformError::NegativeCoefficient {
                    index: i + 1,
                    value: a,
                });
            }
        }
        let last = match coeffs.iter().rposition(|&a| a > 0.0) {
            Some(last) => last,
            None => return Err(TransformError::AllZeroCoefficients),
        };
        let coeffs = coeffs[..=last].to_vec();
        let degree = coeffs.len();
        if degree % 2 == 0 {
            return Err(TransformError::EvenLeadingPower(degree));
        }
        // 1-based even index j sits at 0-based position j - 1.
        for j in (2..degree).step_by(2) {
            let (even, odd) = (coeffs[j - 1], coeffs[j]);
            if even > 0.0 && even >= odd {
                return Err(TransformError::EvenCoefficientNotDominated { index: j, even, odd });
            }
        }
        let pt = Self {
            kind: Kind::Polynomial { coeffs },
        };
        pt.check_monotone()?;
        Ok(pt)
    }

    pub fn spec(&self) -> TransformSpec {
        match &self.kind {
            Kind::Monomial { beta } => TransformSpec::Monomial { beta: *beta },
            Kind::Polynomial { coeffs } => TransformSpec::Polynomial {
                coeffs: coeffs.clone(),
            },
        }
    }

    /// Exponent of a monomial transform.
    pub fn monomial_beta(&self) -> Option<f64> {
        match self.kind {
            Kind::Monomial { beta } => Some(beta),
            Kind::Polynomial { .. } => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.kind {
            Kind::Monomial { beta } => *beta == 1.0,
            Kind::Polynomial { coeffs } => coeffs.len() == 1 && coeffs[0] == 1.0,
        }
    }

    /// True when `W(-x) = -W(x)`; polynomials qualify only without even terms.
    pub fn is_odd(&self) -> bool {
        match &self.kind {
            Kind::Monomial { .. } => true,
            Kind::Polynomial { coeffs } => coeffs.iter().skip(1).step_by(2).all(|&a| a == 0.0),
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Monomial { beta } => x.signum() * x.abs().powf(*beta),
            Kind::Polynomial { coeffs } => {
                let inner = coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a);
                inner * x
            }
        }
    }

    /// `dW/dx`. For a monomial with `β < 1` the derivative at the origin is
    /// infinite and reported as [`TransformError::Unbounded`].
    pub fn derivative(&self, x: f64) -> Result<f64, TransformError> {
        match &self.kind {
            Kind::Monomial { beta } => {
                let beta = *beta;
                if x == 0.0 {
                    if beta > 1.0 {
                        Ok(0.0)
                    } else if beta == 1.0 {
                        Ok(1.0)
                    } else {
                        Err(TransformError::Unbounded(x))
                    }
                } else {
                    Ok(beta * x.abs().powf(beta - 1.0))
                }
            }
            Kind::Polynomial { coeffs } => Ok(poly_derivative(coeffs, x)),
        }
    }

    /// Integral of `(dW/dx)^q` over `[a, b]`.
    ///
    /// Exact for monomials (infinite when the integrand is not integrable at
    /// the origin) and 8-point Gauss-Legendre per sub-interval for
    /// polynomials. `q = 1` always reduces to `W(b) - W(a)`.
    pub fn derivative_power_integral(&self, a: f64, b: f64, q: f64) -> f64 {
        if q == 1.0 {
            return self.evaluate(b) - self.evaluate(a);
        }
        if q == 0.0 {
            return b - a;
        }
        match &self.kind {
            Kind::Monomial { beta } => {
                let e = q * (beta - 1.0) + 1.0;
                if e <= 0.0 && a <= 0.0 && b >= 0.0 {
                    return f64::INFINITY;
                }
                // Odd extension of ∫ (β s^{β-1})^q ds.
                let anti = |x: f64| {
                    let magnitude = if e == 0.0 { x.abs().ln() } else { x.abs().powf(e) / e };
                    x.signum() * beta.powf(q) * magnitude
                };
                anti(b) - anti(a)
            }
            Kind::Polynomial { coeffs } => {
                let integrand = |x: f64| poly_derivative(coeffs, x).powf(q);
                if a < 0.0 && b > 0.0 {
                    gauss_legendre(&integrand, a, 0.0) + gauss_legendre(&integrand, 0.0, b)
                } else {
                    gauss_legendre(&integrand, a, b)
                }
            }
        }
    }

    /// Solves `W(x) = w` for `x` with `|W(x) - w| <= rel_tol * max(1, |w|)`.
    ///
    /// Monomials use the signed root directly. Polynomials use a bracket that
    /// is grown geometrically until it straddles `w`, followed by Newton
    /// steps that fall back to bisection whenever they leave the bracket.
    pub fn invert(&self, w: f64, rel_tol: f64) -> Result<f64, TransformError> {
        if !(rel_tol > 0.0) {
            return Err(TransformError::BadTolerance(rel_tol));
        }
        match &self.kind {
            Kind::Monomial { beta } => Ok(w.signum() * w.abs().powf(1.0 / beta)),
            Kind::Polynomial { coeffs } => self.invert_polynomial(coeffs, w, rel_tol),
        }
    }

    fn invert_polynomial(&self, coeffs: &[f64], w: f64, rel_tol: f64) -> Result<f64, TransformError> {
        if !w.is_finite() {
            return Err(TransformError::NoConvergence(w));
        }
        let tol = rel_tol * w.abs().max(1.0);
        let degree = coeffs.len() as f64;
        let mut bound = w.abs().max(1.0).powf(1.0 / degree);
        let (mut lo, mut hi) = (-bound, bound);
        while !(self.evaluate(lo) <= w && self.evaluate(hi) >= w) {
            bound *= 2.0;
            if !bound.is_finite() {
                return Err(TransformError::NoConvergence(w));
            }
            lo = -bound;
            hi = bound;
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..MAX_INVERT_ITER {
            let r = self.evaluate(x) - w;
            if r == 0.0 {
                return Ok(x);
            }
            if r < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = poly_derivative(coeffs, x);
            let mut next = if d > 0.0 { x - r / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let scale = x.abs().max(f64::MIN_POSITIVE);
            if r.abs() <= tol && (next - x).abs() <= 4.0 * f64::EPSILON * scale {
                return Ok(next);
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                return Ok(0.5 * (lo + hi));
            }
            x = next;
        }
        Err(TransformError::NoConvergence(w))
    }

    fn check_monotone(&self) -> Result<(), TransformError> {
        let coeffs = match &self.kind {
            Kind::Polynomial { coeffs } => coeffs,
            Kind::Monomial { .. } => return Ok(()),
        };
        // Derivative polynomial d_k = (k+1) a_{k+1}; its critical points lie
        // within the Cauchy bound of the second derivative's roots.
        let deriv: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(k, &a)| (k + 1) as f64 * a)
            .collect();
        if deriv.len() <= 2 {
            // Linear W, or W' constant: a₁ ≥ 0 already checked.
            return Ok(());
        }
        let second: Vec<f64> = deriv
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &d)| k as f64 * d)
            .collect();
        let lead = *second.last().unwrap_or(&1.0);
        let radius = 1.0
            + second[..second.len() - 1]
                .iter()
                .map(|c| (c / lead).abs())
                .fold(0.0, f64::max);
        let scale = deriv
            .iter()
            .enumerate()
            .map(|(k, d)| d * radius.powi(k as i32))
            .sum::<f64>();
        let samples = 4096;
        let step = 2.0 * radius / samples as f64;
        let eval = |x: f64| poly_derivative(coeffs, x);
        let mut worst = (0.0, f64::INFINITY);
        for i in 0..=samples {
            let x = -radius + i as f64 * step;
            let v = eval(x);
            if v < worst.1 {
                worst = (x, v);
            }
        }
        // Polish the sampled minimum with golden-section search.
        let (mut a, mut b) = (worst.0 - step, worst.0 + step);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if eval(c) < eval(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let xm = 0.5 * (a + b);
        let vm = eval(xm).min(worst.1);
        if vm < -1e-12 * scale {
            return Err(TransformError::NotMonotone { at: xm, value: vm });
        }
        Ok(())
    }
}

fn poly_derivative(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (k, &a)| acc * x + (k + 1) as f64 * a)
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (node, weight) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        sum += weight * (f(mid - half * node) + f(mid + half * node));
    }
    sum * half
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> PointTransform {
        PointTransform::polynomial(&[1.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(PointTransform::polynomial(&[1.0, 0.0, 1.0]).is_ok());
        assert!(PointTransform::polynomial(&[0.0, 0.0, 1.0]).is_ok());
        assert!(matches!(
            PointTransform::polynomial(&[1.0, 2.0, 1.0]),
            Err(TransformError::EvenCoefficientNotDominated { index: 2, .. })
        ));
        assert!(matches!(
            PointTransform::polynomial(&[1.0, 1.0]),
            Err(TransformError::EvenLeadingPower(2))
        ));
        assert!(matches!(
            PointTransform::polynomial(&[1.0, -0.5, 1.0]),
            Err(TransformError::NegativeCoefficient { index: 2, .. })
        ));
        assert!(matches!(
            PointTransform::polynomial(&[0.0, 0.0, 0.0]),
            Err(TransformError::AllZeroCoefficients)
        ));
        assert!(matches!(
            PointTransform::monomial(0.0),
            Err(TransformError::NonPositiveBeta(_))
        ));
        assert!(matches!(
            PointTransform::monomial(f64::NAN),
            Err(TransformError::NonPositiveBeta(_))
        ));
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let pt = PointTransform::polynomial(&[1.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(pt.spec(), TransformSpec::Polynomial { coeffs: vec![1.0, 0.0, 1.0] });
    }

    #[test]
    fn coefficient_rules_alone_do_not_imply_monotone() {
        // W' = 0.01 + x + 3x² dips below zero between its two real roots.
        assert!(matches!(
            PointTransform::polynomial(&[0.01, 0.5, 1.0]),
            Err(TransformError::NotMonotone { .. })
        ));
        assert!(PointTransform::polynomial(&[1.0, 0.9, 1.0]).is_ok());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(cubic().evaluate(1.0), 2.0);
        assert_eq!(PointTransform::monomial(1.0).unwrap().evaluate(-3.7), -3.7);
        assert_eq!(PointTransform::monomial(3.0).unwrap().evaluate(2.0), 8.0);
        assert_eq!(PointTransform::monomial(3.0).unwrap().evaluate(-2.0), -8.0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(cubic().derivative(1.0).unwrap(), 4.0);
        assert_eq!(cubic().derivative(0.0).unwrap(), 1.0);
        assert_eq!(PointTransform::monomial(3.0).unwrap().derivative(0.0).unwrap(), 0.0);
        assert!(matches!(
            PointTransform::monomial(0.5).unwrap().derivative(0.0),
            Err(TransformError::Unbounded(_))
        ));
    }

    #[test]
    fn invert_examples() {
        let pt = cubic();
        assert!((pt.invert(2.0, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        // Frozen from a 30-digit root of x + x³ - 0.1.
        let x = pt.invert(0.1, 1e-12).unwrap();
        assert!((x - 0.099_028_852_405_457_31).abs() < 1e-12, "{x}");
        let m = PointTransform::monomial(3.0).unwrap();
        assert!((m.invert(-8.0, 1e-12).unwrap() + 2.0).abs() < 1e-14);
        assert_eq!(pt.invert(0.0, 1e-12).unwrap(), 0.0);
        assert!(matches!(pt.invert(1.0, 0.0), Err(TransformError::BadTolerance(_))));
    }

    #[test]
    fn pure_cube_inverts_near_plateau() {
        let pt = PointTransform::polynomial(&[0.0, 0.0, 1.0]).unwrap();
        let x = pt.invert(1e-30, 1e-12).unwrap();
        assert!((x - 1e-10).abs() < 1e-22, "{x}");
    }

    #[test]
    fn derivative_power_integral_matches_closed_forms() {
        let m = PointTransform::monomial(3.0).unwrap();
        // ∫_{-1}^{1} (3x²)² dx = 9 · 2/5
        let v = m.derivative_power_integral(-1.0, 1.0, 2.0);
        assert!((v - 3.6).abs() < 1e-14, "{v}");
        let p = cubic();
        // ∫_0^1 (1+3x²)² dx = 1 + 2 + 9/5
        let v = p.derivative_power_integral(0.0, 1.0, 2.0);
        assert!((v - 4.8).abs() < 1e-13, "{v}");
        assert!((p.derivative_power_integral(0.0, 1.0, 1.0) - 2.0).abs() < 1e-15);
        let s = PointTransform::monomial(0.5).unwrap();
        assert!(s.derivative_power_integral(-0.1, 0.1, 2.0).is_infinite());
    }

    #[test]
    fn serde_record_format() {
        let spec: TransformSpec =
            serde_json::from_str(r#"{"kind": "polynomial", "coeffs": [1.0, 0.0, 1.0]}"#).unwrap();
        assert_eq!(spec.validate().unwrap(), cubic());
        let spec: TransformSpec = serde_json::from_str(r#"{"kind": "monomial", "beta": 3.0}"#).unwrap();
        assert_eq!(spec.validate().unwrap().monomial_beta(), Some(3.0));
    }
}
