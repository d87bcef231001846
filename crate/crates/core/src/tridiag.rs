//! Tridiagonal storage, products, the Thomas solve and a Sturm-sequence
//! bound on the top eigenvalue.

/// Row-wise band storage. `sub[i]` couples row `i + 1` to column `i`,
/// `sup[i]` couples row `i` to column `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Self {
        assert_eq!(sub.len() + 1, diag.len());
        assert_eq!(sup.len() + 1, diag.len());
        Self { sub, diag, sup }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn transpose(&self) -> Self {
        Self {
            sub: self.sup.clone(),
            diag: self.diag.clone(),
            sup: self.sub.clone(),
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.sub
            .iter()
            .chain(&self.diag)
            .chain(&self.sup)
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `out = self · u`, summed in a fixed order (sub, diag, sup).
    pub fn apply_into<T>(&self, u: &[T], out: &mut [T])
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let n = self.len();
        assert_eq!(u.len(), n);
        assert_eq!(out.len(), n);
        for i in 0..n {
            let mut acc = u[i] * self.diag[i];
            if i > 0 {
                acc = u[i - 1] * self.sub[i - 1] + acc;
            }
            if i + 1 < n {
                acc = acc + u[i + 1] * self.sup[i];
            }
            out[i] = acc;
        }
    }

    pub fn apply<T>(&self, u: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let mut out = vec![T::default(); self.len()];
        self.apply_into(u, &mut out);
        out
    }

    /// `scale_diag · I + scale · self`.
    pub fn shifted(&self, scale_diag: f64, scale: f64) -> Self {
        Self {
            sub: self.sub.iter().map(|v| scale * v).collect(),
            diag: self.diag.iter().map(|v| scale_diag + scale * v).collect(),
            sup: self.sup.iter().map(|v| scale * v).collect(),
        }
    }
}

/// Reusable Thomas-algorithm workspace for repeated solves with one matrix.
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    sub: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper: Vec<f64>,
}

impl ThomasFactor {
    /// LU factorization without pivoting. Returns `None` on a zero or
    /// non-finite pivot; matrices handled here are diagonally dominant.
    pub fn new(m: &Tridiagonal) -> Option<Self> {
        let n = m.len();
        let mut inv_pivot = vec![0.0; n];
        let mut upper = vec![0.0; n.saturating_sub(1)];
        let mut pivot = m.diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = m.diag[i] - m.sub[i - 1] * upper[i - 1];
            }
            if pivot == 0.0 || !pivot.is_finite() {
                return None;
            }
            inv_pivot[i] = 1.0 / pivot;
            if i + 1 < n {
                upper[i] = m.sup[i] * inv_pivot[i];
            }
        }
        Some(Self {
            sub: m.sub.clone(),
            inv_pivot,
            upper,
        })
    }

    /// Solves in place: `rhs` is overwritten with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i - 1] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper[i] * rhs[i + 1];
        }
    }
}

/// Number of eigenvalues strictly below `lambda` for the symmetric
/// tridiagonal matrix with diagonal `diag` and squared off-diagonal `offsq`.
fn sturm_count(diag: &[f64], offsq: &[f64], lambda: f64, tiny: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let prev = if q.abs() < tiny { -tiny } else { q };
        q = diag[i] - lambda - offsq[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of a tridiagonal matrix whose off-diagonal pairs have
/// non-negative products (hence similar to a symmetric one). Bisection with
/// Sturm counts down to an absolute width of `1e-15 · ‖band‖`.
pub fn max_eigenvalue(m: &Tridiagonal) -> Option<f64> {
    let n = m.len();
    let mut offsq = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let p = m.sub[i] * m.sup[i];
        if !(p >= 0.0) || !p.is_finite() {
            return None;
        }
        offsq.push(p);
    }
    if m.diag.iter().any(|d| !d.is_finite()) {
        return None;
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offsq[i - 1].sqrt() } else { 0.0 };
        let right = if i + 1 < n { offsq[i].sqrt() } else { 0.0 };
        lo = lo.min(m.diag[i] - left - right);
        hi = hi.max(m.diag[i] + left + right);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale * 1e-3;
    while hi - lo > 1e-15 * scale {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if sturm_count(&m.diag, &offsq, mid, tiny) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> Tridiagonal {
        Tridiagonal::new(vec![1.0; n - 1], vec![-2.0; n], vec![1.0; n - 1])
    }

    #[test]
    fn thomas_recovers_known_solution() {
        let n = 50;
        let m = laplacian(n).shifted(3.0, -1.0);
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = m.apply(&x);
        ThomasFactor::new(&m).unwrap().solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn dirichlet_laplacian_top_eigenvalue() {
        let n = 64;
        let top = max_eigenvalue(&laplacian(n)).unwrap();
        let exact = -4.0 * (std::f64::consts::PI / (2.0 * (n as f64 + 1.0))).sin().powi(2);
        assert!((top - exact).abs() < 1e-13, "{top} vs {exact}");
    }

    #[test]
    fn nonsymmetric_but_similar() {
        // Off-diagonal pairs (2, 0.5) have product 1, like the unit Laplacian.
        let n = 20;
        let m = Tridiagonal::new(vec![0.5; n - 1], vec![-2.0; n], vec![2.0; n - 1]);
        let a = max_eigenvalue(&m).unwrap();
        let b = max_eigenvalue(&laplacian(n)).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn sign_mismatch_is_rejected() {
        let m = Tridiagonal::new(vec![-1.0], vec![0.0, 0.0], vec![1.0]);
        assert!(max_eigenvalue(&m).is_none());
    }
}
