//! Small dense linear algebra: eigenvalues of a symmetric tridiagonal
//! matrix (QL with implicit shifts) and a Cholesky factorization.
//!
//! The tridiagonal solver is what turns recurrence coefficients into
//! orthogonal-polynomial zeros; Cholesky is the Newton-step solver for the
//! node optimizer and doubles as the positive-definiteness certificate.

use crate::error::{Error, Result};

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off` (`off.len() == diag.len() - 1`), ascending.
///
/// Classic QL with implicit Wilkinson shifts, eigenvalues only.
pub fn tridiag_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "tridiag_eigenvalues: off length {} does not match diag length {}",
            off.len(),
            n
        )));
    }
    let mut d = diag.to_vec();
    // Sentinel zero at the end simplifies the sweep.
    let mut e: Vec<f64> = off.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Look for a negligible off-diagonal element.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence(format!(
                    "tridiag_eigenvalues: QL sweep stalled at row {l} of {n}"
                )));
            }
            // Wilkinson shift.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            let mut underflow_restart = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Deflate and retry the whole sweep.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow_restart = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + 2.0 * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;
            }
            if underflow_restart {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Cholesky factorization `A = L L^T` of a symmetric positive definite
/// matrix, stored row-major.
///
/// Fails with [`Error::Domain`] when a pivot is not strictly positive,
/// which is exactly the test the optimizer uses to certify that the
/// negated Hessian is positive definite.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &[f64], n: usize) -> Result<Cholesky> {
        if a.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "cholesky: matrix buffer has {} entries, expected {}",
                a.len(),
                n * n
            )));
        }
        let mut l = vec![0.0_f64; n * n];
        for j in 0..n {
            let mut s = a[j * n + j];
            for k in 0..j {
                s -= l[j * n + k] * l[j * n + k];
            }
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::Domain(format!(
                    "cholesky: pivot {j} is {s:e}; matrix is not positive definite"
                )));
            }
            let piv = s.sqrt();
            l[j * n + j] = piv;
            for i in (j + 1)..n {
                let mut t = a[i * n + j];
                for k in 0..j {
                    t -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = t / piv;
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Solve `A x = b` using the stored factor.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n, "cholesky solve: rhs length mismatch");
        let n = self.n;
        let mut y = b.to_vec();
        // L y = b
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        // L^T x = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}
