use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{IbcError, Result};

/// Direct solver for `[[T, P], [Q, D]] x = r` where `T` is tridiagonal with
/// a constant off-diagonal and `P`, `Q`, `D` couple a few extra unknowns.
/// `T` is factorised once (Thomas, no pivoting) so repeated solves are `O(n)`.
pub(crate) struct BorderedSolver {
    off: Complex64,
    denom: Vec<Complex64>,
    upper: Vec<Complex64>,
    /// `(extra row, site, value)`
    q: Vec<(usize, usize, Complex64)>,
    /// Columns of `T⁻¹P`.
    z: Vec<Vec<Complex64>>,
    schur: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl BorderedSolver {
    /// `p` holds `(site, extra column, value)` and `q` holds `(extra row, site, value)`.
    pub(crate) fn new(
        diag: &[Complex64],
        off: Complex64,
        p: &[(usize, usize, Complex64)],
        q: &[(usize, usize, Complex64)],
        extra_diag: &[Complex64],
    ) -> Result<Self> {
        let n = diag.len();
        let m = extra_diag.len();
        let mut denom = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        let mut prev = Complex64::new(0.0, 0.0);
        for &d in diag {
            let den = d - off * prev;
            if den.norm() == 0.0 || !(den.re.is_finite() && den.im.is_finite()) {
                return Err(IbcError::LinearSolve("zero pivot in tridiagonal factorisation".into()));
            }
            prev = off / den;
            denom.push(den);
            upper.push(prev);
        }
        let mut solver = BorderedSolver {
            off,
            denom,
            upper,
            q: q.to_vec(),
            z: Vec::new(),
            schur: DMatrix::<Complex64>::identity(1, 1).lu(),
        };
        let mut z = vec![vec![Complex64::new(0.0, 0.0); n]; m];
        for (col, zc) in z.iter_mut().enumerate() {
            let mut rhs = vec![Complex64::new(0.0, 0.0); n];
            for &(site, c, v) in p {
                if c == col {
                    rhs[site] += v;
                }
            }
            *zc = solver.tri_solve(&rhs);
        }
        let mut s = DMatrix::<Complex64>::from_diagonal(&DVector::from_column_slice(extra_diag));
        for &(row, site, v) in q {
            for col in 0..m {
                s[(row, col)] -= v * z[col][site];
            }
        }
        solver.z = z;
        solver.schur = s.lu();
        Ok(solver)
    }

    /// Plain tridiagonal factorisation without border.
    pub(crate) fn tridiagonal(diag: &[Complex64], off: Complex64) -> Result<Self> {
        Self::new(diag, off, &[], &[], &[Complex64::new(1.0, 0.0)])
    }

    pub(crate) fn tri_solve(&self, r: &[Complex64]) -> Vec<Complex64> {
        let n = r.len();
        let mut g = Vec::with_capacity(n);
        let mut prev = Complex64::new(0.0, 0.0);
        for j in 0..n {
            prev = (r[j] - self.off * prev) / self.denom[j];
            g.push(prev);
        }
        for j in (0..n.saturating_sub(1)).rev() {
            let next = g[j + 1];
            g[j] -= self.upper[j] * next;
        }
        g
    }

    pub(crate) fn solve(&self, r1: &[Complex64], r0: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let mut y = self.tri_solve(r1);
        let mut rhs = DVector::from_column_slice(r0);
        for &(row, site, v) in &self.q {
            rhs[row] -= v * y[site];
        }
        let x0 = self.schur.solve(&rhs).ok_or_else(|| IbcError::LinearSolve("singular vacuum block".into()))?;
        for (col, zc) in self.z.iter().enumerate() {
            let a = x0[col];
            for (yj, zj) in y.iter_mut().zip(zc) {
                *yj -= zj * a;
            }
        }
        Ok((y, x0.iter().copied().collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_solve() {
        let c = |a: f64, b: f64| Complex64::new(a, b);
        let diag = [c(3.0, 0.1), c(2.5, -0.2), c(4.0, 0.0), c(3.3, 0.5)];
        let off = c(-1.0, 0.2);
        let p = [(1, 0, c(0.5, 0.5)), (3, 1, c(-0.7, 0.0))];
        let q = [(0, 1, c(0.5, -0.5)), (1, 3, c(0.2, 0.1))];
        let extra = [c(1.5, 0.0), c(-2.0, 0.3)];
        let solver = BorderedSolver::new(&diag, off, &p, &q, &extra).unwrap();
        let r1 = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.5), c(2.0, 0.0)];
        let r0 = [c(0.3, 0.0), c(0.0, -1.0)];
        let (x1, x0) = solver.solve(&r1, &r0).unwrap();

        let mut a = DMatrix::<Complex64>::zeros(6, 6);
        for j in 0..4 {
            a[(j, j)] = diag[j];
            if j > 0 {
                a[(j, j - 1)] = off;
                a[(j - 1, j)] = off;
            }
        }
        for &(s, v, val) in &p {
            a[(s, 4 + v)] = val;
        }
        for &(v, s, val) in &q {
            a[(4 + v, s)] = val;
        }
        a[(4, 4)] = extra[0];
        a[(5, 5)] = extra[1];
        let x = DVector::from_iterator(6, x1.iter().chain(&x0).copied());
        let r = DVector::from_iterator(6, r1.iter().chain(&r0).copied());
        assert!((a * x - r).norm() < 1e-13);
    }
}
