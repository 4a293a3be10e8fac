//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each rotation zeroes one off-diagonal pair `(p, q)` with a complex Givens
//! rotation `J` (a phase change that makes `a_pq` real, followed by the real
//! symmetric rotation). Sweeps visit all pairs in row order and stop when the
//! off-diagonal Frobenius mass falls below `EPSILON * ||A||_F`.

use serde::{Deserialize, Serialize};

use super::matrix::{DenseMatrix, C64};
use crate::error::{Error, Result};

/// Relative Hermitian tolerance: `max |M - M^H| <= TOL_HERM * max |M|`.
pub const TOL_HERM: f64 = 1e-10;

pub const MAX_SWEEPS: usize = 64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` is the eigenvector of `eigenvalues[k]`.
    pub basis: DenseMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(D) V^H` for a real spectral function `f`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.dim();
        let v = &self.basis;
        let fd: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        DenseMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * fd[k])
                .sum::<C64>()
        })
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.apply(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Largest eigenvalue modulus, i.e. the spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()))
    }
}

pub(crate) fn check_hermitian(m: &DenseMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let allowed = TOL_HERM * m.max_abs();
    let asymmetry = m.hermitian_defect();
    if asymmetry > allowed {
        return Err(Error::NotHermitian { asymmetry, allowed });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &DenseMatrix) -> Result<EigenDecomposition> {
    check_hermitian(m)?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = DenseMatrix::identity(n);
    let frob = a.entry_norm();

    let mut converged = false;
    let mut off = off_diagonal_norm(&a);
    for _ in 0..MAX_SWEEPS {
        if off <= f64::EPSILON * frob {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&a);
    }
    if !converged && off > f64::EPSILON * frob {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            off_norm: off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let basis = DenseMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition { eigenvalues, basis })
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Applies `A <- J^H A J`, `V <- V J` with `J` chosen so that `a_pq = 0`.
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    } else {
        0.0
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    // J_pp = c, J_pq = s e^{i phi}, J_qp = -s e^{-i phi}, J_qq = c
    let jpq = phase * s;
    let jqp = -phase.conj() * s;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * jqp;
        a[(k, q)] = akp * jpq + akq * c;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * jqp.conj();
        a[(q, k)] = apk * jpq.conj() + aqk * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// `is_psd` iff `min_eigenvalue >= -tol * max(1, ||M||_2)`.
pub fn psd_check(m: &DenseMatrix, tol: f64) -> Result<PsdReport> {
    let eig = hermitian_eig(m)?;
    let min_eigenvalue = eig.min_eigenvalue();
    let threshold = -tol * eig.spectral_norm().max(1.0);
    Ok(PsdReport {
        is_psd: min_eigenvalue >= threshold,
        min_eigenvalue,
    })
}
