//! Small dense linear solves for the Newton kernels.
//!
//! The systems here are tiny (at most a few dozen unknowns), so a plain
//! partially-pivoted LU is plenty.

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            a: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.cols + j] = v;
    }
}

/// Solve `a x = b` in place by LU with partial pivoting. Returns `None` when
/// the matrix is numerically singular.
pub fn solve(mut a: Mat, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.rows;
    assert_eq!(a.cols, n);
    assert_eq!(b.len(), n);
    for col in 0..n {
        let mut piv = col;
        let mut best = a.at(col, col).abs();
        for r in col + 1..n {
            let v = a.at(r, col).abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let t = a.at(col, j);
                a.set(col, j, a.at(piv, j));
                a.set(piv, j, t);
            }
            b.swap(col, piv);
        }
        let d = a.at(col, col);
        for r in col + 1..n {
            let f = a.at(r, col) / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a.at(r, j) - f * a.at(col, j);
                a.set(r, j, v);
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a.at(i, j) * x[j];
        }
        x[i] = s / a.at(i, i);
    }
    Some(x)
}

/// Damped least-squares step: solves `(J^T J + mu * diag(J^T J)) dx = -J^T f`.
///
/// Used by the Levenberg-Marquardt loop of the cluster solver; `jac` is
/// `m x n` with `m >= n`.
pub fn lm_step(jac: &Mat, f: &[f64], mu: f64) -> Option<Vec<f64>> {
    let m = jac.rows;
    let n = jac.cols;
    assert_eq!(f.len(), m);
    let mut jtj = Mat::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for r in 0..m {
                s += jac.at(r, i) * jac.at(r, j);
            }
            jtj.set(i, j, s);
            jtj.set(j, i, s);
        }
        let mut s = 0.0;
        for r in 0..m {
            s += jac.at(r, i) * f[r];
        }
        rhs[i] = -s;
    }
    for i in 0..n {
        let d = jtj.at(i, i);
        // Keep the damping meaningful even for vanishing columns.
        jtj.set(i, i, d + mu * d.max(1e-12));
    }
    solve(jtj, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let mut a = Mat::zeros(3, 3);
        let vals = [[2.0, 1.0, -1.0], [-3.0, -1.0, 2.0], [-2.0, 1.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                a.set(i, j, vals[i][j]);
            }
        }
        let b = vec![8.0, -11.0, -3.0];
        let x = solve(a, b).unwrap();
        let expect = [2.0, 3.0, -1.0];
        for i in 0..3 {
            assert!((x[i] - expect[i]).abs() < 1e-12);
        }
    }
}
