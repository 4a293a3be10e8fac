//! Heinz means and the matrix norm function
//! `F(nu) = |||A^nu X B^(1-nu) + A^(1-nu) X B^nu|||`.
//!
//! [`HeinzProfile`] diagonalizes `A` and `B` once. In their eigenbases every
//! product `A^p X B^q` becomes the Schur product of `X~ = V_A^H X V_B` with
//! `[lambda_i^p mu_j^q]`, and unitarily invariant norms are unchanged, so each
//! evaluation costs one Schur product and one SVD.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite_hadamard::ConvexFn;
use crate::linalg::{DenseMatrix, PdMatrix};
use crate::norms::{unorm, NormKind};
use crate::quadrature::{integrate_matrix, try_integrate_matrix, MatrixEstimate, QuadratureConfig};

/// `min(nu, 1 - nu)`.
pub fn r0(nu: f64) -> f64 {
    nu.min(1.0 - nu)
}

/// `min(nu, |1/2 - nu|, 1 - nu)`; at most `1/4` on `[0, 1]`.
pub fn r1(nu: f64) -> f64 {
    nu.min((0.5 - nu).abs()).min(1.0 - nu)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param(name, v, "must be positive and finite"));
    }
    Ok(())
}

/// `(a^nu b^(1-nu) + a^(1-nu) b^nu) / 2`.
pub fn heinz_scalar(a: f64, b: f64, nu: f64) -> Result<f64> {
    positive("a", a)?;
    positive("b", b)?;
    Ok(0.5 * (a.powf(nu) * b.powf(1.0 - nu) + a.powf(1.0 - nu) * b.powf(nu)))
}

/// `(a - b) / (ln a - ln b)`, and `a` when `a == b`.
pub fn log_mean(a: f64, b: f64) -> Result<f64> {
    positive("a", a)?;
    positive("b", b)?;
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let u = (hi / lo).ln();
    if u == 0.0 {
        return Ok(a);
    }
    // lo * (e^u - 1) / u keeps full precision for nearby arguments.
    Ok(lo * u.exp_m1() / u)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeinzInstance {
    a: PdMatrix,
    b: PdMatrix,
    x: DenseMatrix,
    norm: NormKind,
}

impl HeinzInstance {
    /// `X` may be rectangular: `A` acts on its rows, `B` on its columns.
    pub fn new(a: PdMatrix, b: PdMatrix, x: DenseMatrix, norm: NormKind) -> Result<Self> {
        if a.dim() != x.rows() || b.dim() != x.cols() {
            return Err(Error::DimensionMismatch {
                expected: (a.dim(), b.dim()),
                found: x.shape(),
            });
        }
        norm.validate()?;
        if let NormKind::KyFan(k) = norm {
            let rank = x.rows().min(x.cols());
            if k > rank {
                return Err(Error::InvalidNorm(format!(
                    "Ky Fan index {k} exceeds the {rank} singular values of a {}x{} matrix",
                    x.rows(),
                    x.cols()
                )));
            }
        }
        Ok(Self { a, b, x, norm })
    }

    pub fn a(&self) -> &PdMatrix {
        &self.a
    }

    pub fn b(&self) -> &PdMatrix {
        &self.b
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn with_norm(&self, norm: NormKind) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), self.x.clone(), norm)
    }
}

/// `A^nu X B^(1-nu) + A^(1-nu) X B^nu`, assembled from fractional powers.
pub fn heinz_term(inst: &HeinzInstance, nu: f64) -> Result<DenseMatrix> {
    let left = &(inst.a.power(nu).matrix() * &inst.x) * inst.b.power(1.0 - nu).matrix();
    let right = &(inst.a.power(1.0 - nu).matrix() * &inst.x) * inst.b.power(nu).matrix();
    Ok(&left + &right)
}

fn ordered(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha > beta {
        return Err(Error::param("beta", beta, format!("must be finite and >= alpha = {alpha}")));
    }
    Ok(())
}

/// `int_alpha^beta heinz_term(nu) dnu` for `alpha <= beta`.
pub fn heinz_integral(inst: &HeinzInstance, alpha: f64, beta: f64, cfg: &QuadratureConfig) -> Result<DenseMatrix> {
    ordered(alpha, beta)?;
    Ok(try_integrate_matrix(|nu| heinz_term(inst, nu), alpha, beta, cfg)?.value)
}

/// `int_0^1 A^nu X B^(1-nu) dnu`.
pub fn hk_one_sided_integral(inst: &HeinzInstance, cfg: &QuadratureConfig) -> Result<DenseMatrix> {
    let g = |nu: f64| &(inst.a.power(nu).matrix() * &inst.x) * inst.b.power(1.0 - nu).matrix();
    Ok(integrate_matrix(g, 0.0, 1.0, cfg)?.value)
}

/// One summand `coef * A^a_exp X B^b_exp` of a power combination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerTerm {
    pub coef: f64,
    pub a_exp: f64,
    pub b_exp: f64,
}

impl PowerTerm {
    pub const fn new(coef: f64, a_exp: f64, b_exp: f64) -> Self {
        Self { coef, a_exp, b_exp }
    }
}

/// The two summands of the Heinz term at `nu`.
pub fn heinz_pair(nu: f64) -> [PowerTerm; 2] {
    [PowerTerm::new(1.0, nu, 1.0 - nu), PowerTerm::new(1.0, 1.0 - nu, nu)]
}

/// An instance with `A` and `B` diagonalized once.
#[derive(Clone, Debug)]
pub struct HeinzProfile {
    instance: HeinzInstance,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    x_eig: DenseMatrix,
}

impl HeinzProfile {
    pub fn new(instance: HeinzInstance) -> Self {
        let ea = instance.a.eigen();
        let eb = instance.b.eigen();
        let x_eig = &(&ea.basis.adjoint() * &instance.x) * &eb.basis;
        Self {
            lambda: ea.eigenvalues.clone(),
            mu: eb.eigenvalues.clone(),
            x_eig,
            instance,
        }
    }

    pub fn instance(&self) -> &HeinzInstance {
        &self.instance
    }

    pub fn norm(&self) -> NormKind {
        self.instance.norm
    }

    /// The combination in eigen coordinates; unitarily equivalent to
    /// `sum coef A^a_exp X B^b_exp`.
    pub fn combination_eigen(&self, terms: &[PowerTerm]) -> DenseMatrix {
        let (rows, cols) = self.x_eig.shape();
        DenseMatrix::from_fn(rows, cols, |i, j| {
            let w: f64 = terms
                .iter()
                .map(|t| t.coef * self.lambda[i].powf(t.a_exp) * self.mu[j].powf(t.b_exp))
                .sum();
            self.x_eig[(i, j)] * w
        })
    }

    /// `||| sum coef A^a_exp X B^b_exp |||`.
    pub fn combination_norm(&self, terms: &[PowerTerm]) -> Result<f64> {
        unorm(&self.combination_eigen(terms), self.norm())
    }

    /// `F(nu)`; any real `nu` is accepted.
    pub fn value(&self, nu: f64) -> Result<f64> {
        self.combination_norm(&heinz_pair(nu))
    }

    /// `|||A^(1/2) X B^(1/2)|||`.
    pub fn sqrt_term(&self) -> Result<f64> {
        self.combination_norm(&[PowerTerm::new(1.0, 0.5, 0.5)])
    }

    /// `|||AX + XB|||`.
    pub fn sum_term(&self) -> Result<f64> {
        self.combination_norm(&[PowerTerm::new(1.0, 1.0, 0.0), PowerTerm::new(1.0, 0.0, 1.0)])
    }

    /// `int_lo^hi` of the Heinz term in eigen coordinates, `lo <= hi`.
    pub fn integral_eigen(&self, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<MatrixEstimate> {
        ordered(lo, hi)?;
        integrate_matrix(|nu| self.combination_eigen(&heinz_pair(nu)), lo, hi, cfg)
    }

    /// `||| int_lo^hi (A^nu X B^(1-nu) + A^(1-nu) X B^nu) dnu |||`, `lo <= hi`.
    pub fn integral_norm(&self, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
        let est = self.integral_eigen(lo, hi, cfg)?;
        Ok((unorm(&est.value, self.norm())?, est.err_estimate))
    }

    /// `||| int_0^1 A^nu X B^(1-nu) dnu |||`.
    pub fn one_sided_integral_norm(&self, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
        let est = integrate_matrix(
            |nu| self.combination_eigen(&[PowerTerm::new(1.0, nu, 1.0 - nu)]),
            0.0,
            1.0,
            cfg,
        )?;
        Ok((unorm(&est.value, self.norm())?, est.err_estimate))
    }

    /// `F` as a function on `[0, 1]` for the scalar refinement functionals.
    pub fn as_convex_fn(&self) -> ConvexFn<'_> {
        ConvexFn::fallible("F", 0.0, 1.0, move |nu| self.value(nu)).expect("[0, 1] is a valid domain")
    }
}
