//! Singular values by one-sided (Hestenes) Jacobi.
//!
//! Columns of the working matrix are rotated pairwise until mutually
//! orthogonal; the singular values are then the column norms. This works on
//! `X` directly instead of `X^H X`, so small singular values keep their
//! relative accuracy.

use serde::{Deserialize, Serialize};

use super::matrix::{DenseMatrix, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Singular values in nonincreasing order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularValues(Vec<f64>);

impl SingularValues {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn largest(&self) -> f64 {
        self.0[0]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

pub fn singular_values(x: &DenseMatrix) -> Result<SingularValues> {
    if !x.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entries".into()));
    }
    let (m, n) = x.shape();
    // Work on the orientation with fewer columns.
    let mut cols: Vec<Vec<C64>> = if m >= n {
        (0..n).map(|j| (0..m).map(|i| x[(i, j)]).collect()).collect()
    } else {
        (0..m).map(|i| (0..n).map(|j| x[(i, j)].conj()).collect()).collect()
    };
    let k = cols.len();
    // Rounding in a rotated pair leaves |<c_p, c_q>| at a few ulps of the column
    // norms, growing with the column length.
    let tol = f64::EPSILON * (cols.first().map_or(1, Vec::len) as f64).max(4.0);

    let mut sweeps = 0;
    loop {
        let mut worst: f64 = 0.0;
        for p in 0..k {
            for q in (p + 1)..k {
                worst = worst.max(orthogonalize(&mut cols, p, q, tol));
            }
        }
        sweeps += 1;
        if worst <= tol {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: worst });
        }
    }

    let mut values: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(SingularValues(values))
}

/// Rotates columns `p` and `q` unless already orthogonal within `tol`;
/// returns `|<c_p, c_q>| / (|c_p| |c_q|)` before the rotation.
fn orthogonalize(cols: &mut [Vec<C64>], p: usize, q: usize, tol: f64) -> f64 {
    let (alpha, beta, gamma) = {
        let (cp, cq) = (&cols[p], &cols[q]);
        let mut alpha = 0.0;
        let mut beta = 0.0;
        let mut gamma = C64::new(0.0, 0.0);
        for (a, b) in cp.iter().zip(cq) {
            alpha += a.norm_sqr();
            beta += b.norm_sqr();
            gamma += a.conj() * b;
        }
        (alpha, beta, gamma)
    };
    let r = gamma.norm();
    let scale = (alpha * beta).sqrt();
    if r == 0.0 || r <= tol * scale {
        return 0.0;
    }
    let phase = gamma / r;
    let theta = (beta - alpha) / (2.0 * r);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    } else {
        0.0
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let jpq = phase * s;
    let jqp = -phase.conj() * s;

    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = x * c + y * jqp;
        *b = x * jpq + y * c;
    }
    r / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig::hermitian_eig;
    use crate::linalg::random::{random_instance, InstanceKind};

    /// Independent route: square roots of the eigenvalues of `X^H X`.
    fn gram_route(x: &DenseMatrix) -> Vec<f64> {
        let g = (&x.adjoint() * x).hermitian_part();
        let mut v: Vec<f64> = hermitian_eig(&g)
            .unwrap()
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v.truncate(x.rows().min(x.cols()));
        v
    }

    #[test]
    fn nilpotent_example() {
        let x = DenseMatrix::from_real_rows(&[[0.0, 2.0], [0.0, 0.0]]).unwrap();
        assert_eq!(singular_values(&x).unwrap().values(), &[2.0, 0.0]);
    }

    #[test]
    fn unitary_has_unit_singular_values() {
        for seed in 0..10 {
            let u = random_instance(5, seed, InstanceKind::Unitary, 1.0).unwrap();
            for s in singular_values(&u).unwrap().values() {
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frobenius_identity_and_gram_route() {
        for seed in 0..40 {
            let m = 1 + (seed as usize % 7);
            let n = 1 + (seed as usize / 7 % 6);
            let g = random_instance(m.max(n), seed, InstanceKind::Dense, 1.0).unwrap();
            let x = DenseMatrix::from_fn(m, n, |i, j| g[(i, j)]);
            let sv = singular_values(&x).unwrap();
            assert_eq!(sv.values().len(), m.min(n));
            assert!(sv.values().windows(2).all(|w| w[0] >= w[1]));
            let sum_sq: f64 = sv.values().iter().map(|s| s * s).sum();
            let entry_sq = x.entry_norm().powi(2);
            assert!((sum_sq - entry_sq).abs() <= 1e-10 * entry_sq);
            for (a, b) in sv.values().iter().zip(gram_route(&x)) {
                assert!((a - b).abs() <= 1e-7 * sv.largest(), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_matrix() {
        let sv = singular_values(&DenseMatrix::zeros(3, 2)).unwrap();
        assert_eq!(sv.values(), &[0.0, 0.0]);
    }
}
