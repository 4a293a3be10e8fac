//! Schur-multiplier kernels built from a positive spectrum.
//!
//! With `c = beta - alpha` and spectrum `lambda_1..lambda_n`:
//!
//! * `LoewnerLog`: divided differences of `log` in the variable
//!   `s = lambda^c`, `(ln l_i - ln l_j) / (l_i^c - l_j^c)`, diagonal
//!   `1 / (c l_i^c)`;
//! * `TanhRatio`: `tanh(d/2) / (d/2)` with `d = c (ln l_i - ln l_j)`,
//!   diagonal 1;
//! * `EndpointAverage`: `(l_i^c - l_j^c) / ((ln l_i - ln l_j)(l_i^c + l_j^c))`,
//!   diagonal `c / 2`; this is `c/2` times `TanhRatio`;
//! * `R1Bound`: the multiplier taking `4 r1 A^{1/2}XA^{1/2} + (1 - 2 r1)(AX + XA)`
//!   to `A^nu X A^{1-nu} + A^{1-nu} X A^nu` in the eigenbasis, for
//!   `nu` in `[0, 1/2]`.
//!
//! Pairs with `|l_i - l_j| < COINCIDENCE * max(l_i, l_j)` take the analytic
//! limit at the geometric mean of the pair.

use serde::{Deserialize, Serialize};

use super::matrix::{DenseMatrix, C64};
use crate::error::{Error, Result};
use crate::heinz::r1;

pub const COINCIDENCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelSpec {
    LoewnerLog { eigenvalues: Vec<f64>, alpha: f64, beta: f64 },
    TanhRatio { eigenvalues: Vec<f64>, alpha: f64, beta: f64 },
    EndpointAverage { eigenvalues: Vec<f64>, alpha: f64, beta: f64 },
    R1Bound { eigenvalues: Vec<f64>, nu: f64 },
}

impl KernelSpec {
    pub fn eigenvalues(&self) -> &[f64] {
        match self {
            KernelSpec::LoewnerLog { eigenvalues, .. }
            | KernelSpec::TanhRatio { eigenvalues, .. }
            | KernelSpec::EndpointAverage { eigenvalues, .. }
            | KernelSpec::R1Bound { eigenvalues, .. } => eigenvalues,
        }
    }

    fn validate(&self) -> Result<()> {
        let ev = self.eigenvalues();
        if ev.is_empty() {
            return Err(Error::InvalidMatrix("kernel needs at least one eigenvalue".into()));
        }
        if let Some(&bad) = ev.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::param("eigenvalue", bad, "must be positive and finite"));
        }
        match *self {
            KernelSpec::LoewnerLog { alpha, beta, .. }
            | KernelSpec::TanhRatio { alpha, beta, .. }
            | KernelSpec::EndpointAverage { alpha, beta, .. } => {
                if !(alpha.is_finite() && beta.is_finite()) || beta == alpha {
                    return Err(Error::param("beta", beta, "must be finite and differ from alpha"));
                }
            }
            KernelSpec::R1Bound { nu, .. } => {
                if !(0.0..=0.5).contains(&nu) {
                    return Err(Error::param("nu", nu, "must lie in [0, 1/2]"));
                }
            }
        }
        Ok(())
    }
}

fn coincident(a: f64, b: f64) -> bool {
    (a - b).abs() < COINCIDENCE * a.max(b)
}

pub fn kernel_matrix(spec: &KernelSpec) -> Result<DenseMatrix> {
    spec.validate()?;
    let ev = spec.eigenvalues();
    let n = ev.len();
    let entry: Box<dyn Fn(f64, f64) -> f64> = match *spec {
        KernelSpec::LoewnerLog { alpha, beta, .. } => {
            let c = beta - alpha;
            Box::new(move |li, lj| {
                if coincident(li, lj) {
                    1.0 / (c * (li * lj).sqrt().powf(c))
                } else {
                    (li.ln() - lj.ln()) / (li.powf(c) - lj.powf(c))
                }
            })
        }
        KernelSpec::TanhRatio { alpha, beta, .. } => {
            let c = beta - alpha;
            Box::new(move |li, lj| {
                if coincident(li, lj) {
                    1.0
                } else {
                    let half = 0.5 * c * (li.ln() - lj.ln());
                    half.tanh() / half
                }
            })
        }
        KernelSpec::EndpointAverage { alpha, beta, .. } => {
            let c = beta - alpha;
            Box::new(move |li, lj| {
                if coincident(li, lj) {
                    0.5 * c
                } else {
                    let (pi, pj) = (li.powf(c), lj.powf(c));
                    (pi - pj) / ((li.ln() - lj.ln()) * (pi + pj))
                }
            })
        }
        KernelSpec::R1Bound { nu, .. } => {
            let r = r1(nu);
            Box::new(move |li, lj| {
                let num = li.powf(nu) * (li.powf(1.0 - 2.0 * nu) + lj.powf(1.0 - 2.0 * nu)) * lj.powf(nu);
                let den = 4.0 * r * (li * lj).sqrt() + (1.0 - 2.0 * r) * (li + lj);
                num / den
            })
        }
    };
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        let v = if i == j {
            diagonal(spec, ev[i])
        } else {
            entry(ev[i], ev[j])
        };
        C64::new(v, 0.0)
    }))
}

fn diagonal(spec: &KernelSpec, l: f64) -> f64 {
    match *spec {
        KernelSpec::LoewnerLog { alpha, beta, .. } => {
            let c = beta - alpha;
            1.0 / (c * l.powf(c))
        }
        KernelSpec::TanhRatio { .. } | KernelSpec::R1Bound { .. } => 1.0,
        KernelSpec::EndpointAverage { alpha, beta, .. } => 0.5 * (beta - alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig::psd_check;

    #[test]
    fn loewner_equal_spectrum_is_rank_one() {
        let k = kernel_matrix(&KernelSpec::LoewnerLog {
            eigenvalues: vec![2.0; 3],
            alpha: 0.0,
            beta: 1.5,
        })
        .unwrap();
        let want = 1.0 / (1.5 * 2.0_f64.powf(1.5));
        for z in k.as_slice() {
            assert!((z.re - want).abs() < 1e-15 * want);
        }
        assert!(psd_check(&k, 1e-12).unwrap().is_psd);
    }

    #[test]
    fn loewner_closed_form_entry() {
        let e = std::f64::consts::E;
        let k = kernel_matrix(&KernelSpec::LoewnerLog {
            eigenvalues: vec![1.0, e],
            alpha: 0.0,
            beta: 1.0,
        })
        .unwrap();
        assert!((k[(0, 1)].re - 1.0 / (e - 1.0)).abs() < 1e-15);
        assert!((k[(0, 1)].re - 0.58198).abs() < 1e-5);
    }

    #[test]
    fn tanh_diagonal_is_one() {
        let k = kernel_matrix(&KernelSpec::TanhRatio {
            eigenvalues: vec![0.5, 0.5, 3.0],
            alpha: 0.2,
            beta: 0.9,
        })
        .unwrap();
        assert_eq!(k[(0, 0)].re, 1.0);
        assert_eq!(k[(0, 1)].re, 1.0);
        assert!(k[(0, 2)].re < 1.0);
    }

    #[test]
    fn endpoint_average_is_scaled_tanh() {
        let ev = vec![0.3, 1.0, 2.5, 7.0];
        let (alpha, beta) = (-0.25, 1.1);
        let z = kernel_matrix(&KernelSpec::EndpointAverage { eigenvalues: ev.clone(), alpha, beta }).unwrap();
        let t = kernel_matrix(&KernelSpec::TanhRatio { eigenvalues: ev, alpha, beta }).unwrap();
        let scaled = t.scale(0.5 * (beta - alpha));
        assert!((&z - &scaled).max_abs() < 1e-14);
    }

    #[test]
    fn coincident_limit_is_continuous() {
        let l = 1.7;
        let near = kernel_matrix(&KernelSpec::LoewnerLog {
            eigenvalues: vec![l, l * (1.0 + 1e-6)],
            alpha: 0.0,
            beta: 0.8,
        })
        .unwrap();
        let at = kernel_matrix(&KernelSpec::LoewnerLog {
            eigenvalues: vec![l, l * (1.0 + 1e-9)],
            alpha: 0.0,
            beta: 0.8,
        })
        .unwrap();
        assert!((near[(0, 1)].re - at[(0, 1)].re).abs() < 1e-6 * at[(0, 1)].re);
    }

    #[test]
    fn loewner_named_example_is_psd() {
        let k = kernel_matrix(&KernelSpec::LoewnerLog {
            eigenvalues: vec![0.5, 1.0, 2.0, 5.0],
            alpha: 0.0,
            beta: 1.0,
        })
        .unwrap();
        assert!(psd_check(&k, 1e-12).unwrap().is_psd);
    }

    #[test]
    fn r1_bound_endpoints() {
        let ev = vec![0.4, 2.0, 9.0];
        let w0 = kernel_matrix(&KernelSpec::R1Bound { eigenvalues: ev.clone(), nu: 0.0 }).unwrap();
        assert!(w0.as_slice().iter().all(|z| (z.re - 1.0).abs() < 1e-15));
        let w = kernel_matrix(&KernelSpec::R1Bound { eigenvalues: ev, nu: 0.3 }).unwrap();
        assert!((0..3).all(|i| w[(i, i)].re == 1.0));
    }

    #[test]
    fn invalid_specs() {
        assert!(kernel_matrix(&KernelSpec::LoewnerLog { eigenvalues: vec![], alpha: 0.0, beta: 1.0 }).is_err());
        assert!(kernel_matrix(&KernelSpec::LoewnerLog { eigenvalues: vec![1.0], alpha: 1.0, beta: 1.0 }).is_err());
        assert!(kernel_matrix(&KernelSpec::TanhRatio { eigenvalues: vec![-1.0], alpha: 0.0, beta: 1.0 }).is_err());
        assert!(kernel_matrix(&KernelSpec::R1Bound { eigenvalues: vec![1.0], nu: 0.7 }).is_err());
    }
}
