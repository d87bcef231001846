//! Bessel functions of the first kind for real, fractional orders.
//!
//! `J_ν(z)` for `|ν| < 2` and `z ≥ 0`. Small arguments use the ascending
//! power series; the series suffers cancellation as `z` grows, so between
//! [`SERIES_PLAIN_LIMIT`] and [`BESSEL_SWITCH`] it is summed in double-double
//! arithmetic. Past the switch point the Hankel asymptotic expansion takes
//! over.

use std::f64::consts::PI;
use thiserror::Error;

/// Argument at which evaluation switches from the series to the asymptotic
/// expansion.
pub const BESSEL_SWITCH: f64 = 25.0;

/// Below this argument the series is summed in plain `f64`.
pub const SERIES_PLAIN_LIMIT: f64 = 8.0;

/// Supported order range, exclusive.
pub const MAX_ORDER: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("Bessel order {0} outside (-2, 2)")]
    OrderOutOfRange(f64),
    #[error("Bessel argument must be finite and non-negative, got {0}")]
    NegativeArgument(f64),
}

fn check(nu: f64, z: f64) -> Result<(), SpecialError> {
    if !(nu.abs() < MAX_ORDER) {
        return Err(SpecialError::OrderOutOfRange(nu));
    }
    if !(z >= 0.0 && z.is_finite()) {
        return Err(SpecialError::NegativeArgument(z));
    }
    Ok(())
}

/// `J_ν(z)`.
pub fn bessel_j(nu: f64, z: f64) -> Result<f64, SpecialError> {
    check(nu, z)?;
    if nu == -1.0 {
        return bessel_j(1.0, z).map(|v| -v);
    }
    if z > BESSEL_SWITCH {
        return Ok(bessel_j_asymptotic(nu, z));
    }
    if z == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    Ok((0.5 * z).powf(nu) * series_scaled(nu, z))
}

/// `J_ν(z) / (z/2)^ν`, finite at `z = 0` where it equals `1/Γ(ν+1)`.
pub fn bessel_j_scaled(nu: f64, z: f64) -> Result<f64, SpecialError> {
    check(nu, z)?;
    if nu == -1.0 {
        // J_{-1} = -J_1, so J_{-1}/(z/2)^{-1} = -(z/2)² · J_1/(z/2).
        return bessel_j_scaled(1.0, z).map(|v| -(0.25 * z * z) * v);
    }
    if z > BESSEL_SWITCH {
        return Ok(bessel_j_asymptotic(nu, z) / (0.5 * z).powf(nu));
    }
    Ok(series_scaled(nu, z))
}

/// Ascending series `Σ_m (-1)^m (z/2)^{2m} / (m! Γ(m+ν+1))`, i.e. the
/// scaled Bessel function. Valid for any `z`, but only accurate where the
/// cancellation stays within double-double precision.
pub fn bessel_j_series(nu: f64, z: f64) -> f64 {
    (0.5 * z).powf(nu) * series_scaled(nu, z)
}

fn series_scaled(nu: f64, z: f64) -> f64 {
    let rgamma = 1.0 / libm::tgamma(nu + 1.0);
    if z <= SERIES_PLAIN_LIMIT {
        let y = 0.25 * z * z;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut m = 1.0;
        loop {
            term *= -y / (m * (m + nu));
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() || m > 400.0 {
                break;
            }
            m += 1.0;
        }
        return rgamma * sum;
    }
    let half = 0.5 * z;
    let y = DoubleDouble::product(half, half).neg();
    let mut term = DoubleDouble::from(1.0);
    let mut sum = DoubleDouble::from(1.0);
    let mut m = 1.0;
    loop {
        let denom = DoubleDouble::sum(m, nu).mul_f64(m);
        term = term.mul(y).div(denom);
        sum = sum.add(term);
        if (term.hi.abs() <= 1e-33 * sum.hi.abs() && m > 0.25 * z * z) || m > 600.0 {
            break;
        }
        m += 1.0;
    }
    rgamma * sum.to_f64()
}

/// Hankel asymptotic expansion, accurate for `z` well above `ν²`.
pub fn bessel_j_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k / z^k
    let mut prev = f64::INFINITY;
    for k in 0..64 {
        if k > 0 {
            let j = k as f64;
            a *= (mu - (2.0 * j - 1.0).powi(2)) / (j * 8.0 * z);
        }
        let size = a.abs();
        if size > prev {
            break;
        }
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if size < 1e-17 * p.abs().max(1e-300) {
            break;
        }
        prev = size;
    }
    let chi = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
}

impl DoubleDouble {
    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self { hi: s, lo: b - (s - a) }
    }

    fn sum(a: f64, b: f64) -> Self {
        Self::two_sum(a, b)
    }

    fn product(a: f64, b: f64) -> Self {
        let p = a * b;
        Self {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn add(self, other: Self) -> Self {
        let s = Self::two_sum(self.hi, other.hi);
        let t = Self::two_sum(self.lo, other.lo);
        let u = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(u.hi, u.lo + t.lo)
    }

    fn mul(self, other: Self) -> Self {
        let p = Self::product(self.hi, other.hi);
        let lo = p.lo + (self.hi * other.lo + self.lo * other.hi);
        Self::quick_two_sum(p.hi, lo)
    }

    fn mul_f64(self, b: f64) -> Self {
        let p = Self::product(self.hi, b);
        Self::quick_two_sum(p.hi, p.lo + self.lo * b)
    }

    fn div(self, other: Self) -> Self {
        let q1 = self.hi / other.hi;
        let r = self.add(other.mul_f64(q1).neg());
        let q2 = r.hi / other.hi;
        let r = r.add(other.mul_f64(q2).neg());
        let q3 = r.hi / other.hi;
        Self::quick_two_sum(q1, q2).add(Self::from(q3))
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}
