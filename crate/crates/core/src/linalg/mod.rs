//! Dense complex matrix substrate: Hermitian eigendecomposition, singular
//! values, fractional powers, Schur products, PSD certification and seeded
//! instance generation. Desk-scale only (n up to a few dozen).

pub mod eig;
pub mod kernel;
pub mod matrix;
pub mod power;
pub mod random;
pub mod svd;

pub use eig::{hermitian_eig, psd_check, EigenDecomposition, PsdReport};
pub use kernel::{kernel_matrix, KernelSpec};
pub use matrix::{DenseMatrix, C64};
pub use power::{fractional_power, PdMatrix};
pub use random::{derive_seed, random_instance, random_pd, InstanceKind, SeededRng};
pub use svd::{singular_values, SingularValues};

use crate::error::Result;

/// Entrywise product `A o B`.
pub fn schur_product(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    a.schur(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schur_identities() {
        let a = random_instance(3, 5, InstanceKind::Dense, 1.0).unwrap();
        let ones = DenseMatrix::from_fn(3, 3, |_, _| C64::new(1.0, 0.0));
        assert_eq!(schur_product(&a, &ones).unwrap(), a);
        let d = schur_product(
            &DenseMatrix::from_real_diag(&[1.0, 2.0, 3.0]),
            &DenseMatrix::from_real_diag(&[4.0, 5.0, 6.0]),
        )
        .unwrap();
        assert_eq!(d, DenseMatrix::from_real_diag(&[4.0, 10.0, 18.0]));
        assert!(schur_product(&a, &DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn schur_of_psd_pair_is_psd() {
        let a = random_pd(4, 1, 10.0).unwrap();
        let b = random_pd(4, 2, 10.0).unwrap();
        let c = schur_product(a.matrix(), b.matrix()).unwrap();
        let r = psd_check(&c, 1e-12).unwrap();
        assert!(r.is_psd && r.min_eigenvalue > 0.0);
    }
}
