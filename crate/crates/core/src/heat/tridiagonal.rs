use crate::error::{Error, Result};

/// Square tridiagonal matrix stored by diagonals.
///
/// `lower[i]` is entry `(i + 1, i)`, `upper[i]` is entry `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            lower: vec![0.0; n - 1],
            diag: vec![0.0; n],
            upper: vec![0.0; n - 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Row `i` as `[a(i,i-1), a(i,i), a(i,i+1)]`, zero-padded at the ends.
    pub fn row(&self, i: usize) -> [f64; 3] {
        let n = self.dim();
        let left = if i > 0 { self.lower[i - 1] } else { 0.0 };
        let right = if i + 1 < n { self.upper[i] } else { 0.0 };
        [left, self.diag[i], right]
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Tridiagonal) -> Tridiagonal {
        assert_eq!(self.dim(), other.dim());
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + s * y).collect();
        Tridiagonal {
            lower: zip(&self.lower, &other.lower),
            diag: zip(&self.diag, &other.diag),
            upper: zip(&self.upper, &other.upper),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        assert!(x.len() == n && y.len() == n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    /// `(A x)_i` for a single row.
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let [l, d, u] = self.row(i);
        let mut acc = d * x[i];
        if i > 0 {
            acc += l * x[i - 1];
        }
        if i + 1 < self.dim() {
            acc += u * x[i + 1];
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.lower
            .iter()
            .chain(&self.diag)
            .chain(&self.upper)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a(i,i+1) - a(i+1,i)|` relative to [`Self::max_abs`].
    pub fn asymmetry(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        self.lower
            .iter()
            .zip(&self.upper)
            .fold(0.0f64, |m, (l, u)| m.max((l - u).abs()))
            / scale
    }

    /// LU factorization without pivoting (Thomas algorithm).
    pub fn factor(&self) -> Result<ThomasFactor> {
        let n = self.dim();
        let mut pivots = vec![0.0; n];
        let mut multipliers = vec![0.0; n.saturating_sub(1)];
        pivots[0] = self.diag[0];
        for i in 1..n {
            if pivots[i - 1] == 0.0 || !pivots[i - 1].is_finite() {
                return Err(Error::SingularSystem { row: i - 1 });
            }
            let m = self.lower[i - 1] / pivots[i - 1];
            multipliers[i - 1] = m;
            pivots[i] = self.diag[i] - m * self.upper[i - 1];
        }
        if pivots[n - 1] == 0.0 || !pivots[n - 1].is_finite() {
            return Err(Error::SingularSystem { row: n - 1 });
        }
        Ok(ThomasFactor {
            multipliers,
            pivots,
            upper: self.upper.clone(),
        })
    }
}

/// Prefactorized tridiagonal system.
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    multipliers: Vec<f64>,
    pivots: Vec<f64>,
    upper: Vec<f64>,
}

impl ThomasFactor {
    /// Solves in place.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.pivots.len();
        assert_eq!(rhs.len(), n);
        for i in 1..n {
            rhs[i] -= self.multipliers[i - 1] * rhs[i - 1];
        }
        rhs[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            rhs[i] = (rhs[i] - self.upper[i] * rhs[i + 1]) / self.pivots[i];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Tridiagonal {
        Tridiagonal {
            lower: vec![-1.0, -2.0, 0.5],
            diag: vec![4.0, 5.0, 6.0, 3.0],
            upper: vec![1.0, -1.0, 2.0],
        }
    }

    #[test]
    fn solve_recovers_known_vector() {
        let a = sample();
        let x = [1.0, -2.0, 3.5, 0.25];
        let b = a.matvec(&x);
        let y = a.factor().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn single_unknown() {
        let a = Tridiagonal {
            lower: vec![],
            diag: vec![2.0],
            upper: vec![],
        };
        assert_eq!(a.factor().unwrap().solve(&[3.0]), vec![1.5]);
    }

    #[test]
    fn zero_pivot_is_reported() {
        let a = Tridiagonal {
            lower: vec![1.0],
            diag: vec![0.0, 1.0],
            upper: vec![1.0],
        };
        assert_eq!(a.factor().unwrap_err(), Error::SingularSystem { row: 0 });
    }

    #[test]
    fn rows_and_symmetry() {
        let a = sample();
        assert_eq!(a.row(0), [0.0, 4.0, 1.0]);
        assert_eq!(a.row(3), [0.5, 3.0, 0.0]);
        assert!(a.asymmetry() > 0.0);
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = a.matvec(&x);
        for (i, yi) in y.iter().enumerate() {
            assert_eq!(a.row_dot(i, &x), *yi);
        }
    }
}
