use serde::{Deserialize, Serialize};

use super::eig::{hermitian_eig, EigenDecomposition};
use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Relative PD certification threshold:
/// `min eigenvalue > PD_THRESHOLD * max(1, ||M||_2)`.
pub const PD_THRESHOLD: f64 = 1e-10;

/// Hermitian positive definite matrix with its eigendecomposition.
///
/// Positivity is certified once at construction; the decomposition is kept so
/// that every spectral function (powers in particular) costs one `V f(D) V^H`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PdMatrix {
    matrix: DenseMatrix,
    eig: EigenDecomposition,
}

impl PdMatrix {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        let eig = hermitian_eig(&matrix)?;
        let threshold = PD_THRESHOLD * eig.spectral_norm().max(1.0);
        let min_eigenvalue = eig.min_eigenvalue();
        if !(min_eigenvalue > threshold) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue,
                threshold,
            });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            eig,
        })
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(DenseMatrix::from_real_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    /// `A^nu` for any real `nu`.
    pub fn power(&self, nu: f64) -> PdMatrix {
        let eig = EigenDecomposition {
            eigenvalues: self.eig.eigenvalues.iter().map(|l| l.powf(nu)).collect(),
            basis: self.eig.basis.clone(),
        };
        // Powers of a positive spectrum stay positive; no re-certification.
        PdMatrix {
            matrix: self.eig.apply(|l| l.powf(nu)),
            eig,
        }
    }
}

pub fn fractional_power(a: &PdMatrix, nu: f64) -> PdMatrix {
    a.power(nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_pd;

    fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        (a - b).max_abs() / b.max_abs()
    }

    #[test]
    fn square_root_of_diagonal() {
        let a = PdMatrix::new(DenseMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        let r = fractional_power(&a, 0.5);
        assert!(rel_diff(r.matrix(), &DenseMatrix::from_real_diag(&[2.0, 3.0])) < 1e-15);
    }

    #[test]
    fn zero_and_unit_exponents() {
        let a = random_pd(4, 11, 20.0).unwrap();
        assert!((fractional_power(&a, 0.0).matrix() - &DenseMatrix::identity(4)).max_abs() < 1e-13);
        assert!(rel_diff(fractional_power(&a, 1.0).matrix(), a.matrix()) < 1e-12);
    }

    #[test]
    fn exponent_addition() {
        let a = random_pd(4, 3, 20.0).unwrap();
        let prod = fractional_power(&a, 0.3).matrix() * fractional_power(&a, 0.7).matrix();
        assert!(rel_diff(&prod, a.matrix()) < 1e-10);
    }

    #[test]
    fn rejects_indefinite_and_singular() {
        assert!(matches!(
            PdMatrix::new(DenseMatrix::from_real_diag(&[1.0, -1.0])),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            PdMatrix::new(DenseMatrix::from_real_diag(&[1.0, 1e-12])),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(PdMatrix::new(DenseMatrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap()).is_err());
    }
}
