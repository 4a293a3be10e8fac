//! Unitarily invariant norms, all evaluated as symmetric gauge functions of
//! the singular values.
//!
//! CLI grammar: `op | tr | fro | sch:<p> | kyfan:<k>`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{singular_values, DenseMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    /// Largest singular value.
    Operator,
    /// Sum of singular values (Schatten 1).
    Trace,
    /// Schatten 2.
    Frobenius,
    /// `(sum s^p)^(1/p)`, `p >= 1`.
    Schatten(f64),
    /// Sum of the `k` largest singular values.
    KyFan(usize),
}

impl NormKind {
    /// The catalog used by the seeded suites.
    pub fn suite_default() -> Vec<NormKind> {
        vec![
            NormKind::Trace,
            NormKind::Frobenius,
            NormKind::Operator,
            NormKind::Schatten(3.0),
            NormKind::KyFan(2),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NormKind::Schatten(p) if !(p >= 1.0) => {
                Err(Error::InvalidNorm(format!("Schatten exponent {p} < 1 is not a norm")))
            }
            NormKind::KyFan(0) => Err(Error::InvalidNorm("Ky Fan index must be at least 1".into())),
            _ => Ok(()),
        }
    }

    /// Evaluates the gauge on a nonincreasing, nonnegative vector.
    pub fn gauge(&self, s: &[f64]) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            NormKind::Operator => s.first().copied().unwrap_or(0.0),
            NormKind::Trace => s.iter().sum(),
            NormKind::Frobenius => schatten(s, 2.0),
            NormKind::Schatten(p) => schatten(s, p),
            NormKind::KyFan(k) => {
                if k > s.len() {
                    return Err(Error::InvalidNorm(format!(
                        "Ky Fan index {k} exceeds the {} available singular values",
                        s.len()
                    )));
                }
                s[..k].iter().sum()
            }
        })
    }
}

/// Scaled by the largest value so that large `p` cannot overflow.
fn schatten(s: &[f64], p: f64) -> f64 {
    let top = s.iter().fold(0.0_f64, |m, &v| m.max(v));
    if top == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return top;
    }
    top * s.iter().map(|v| (v / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn unorm(x: &DenseMatrix, kind: NormKind) -> Result<f64> {
    kind.validate()?;
    let sv = singular_values(x)?;
    kind.gauge(sv.values())
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Operator => f.write_str("op"),
            NormKind::Trace => f.write_str("tr"),
            NormKind::Frobenius => f.write_str("fro"),
            NormKind::Schatten(p) => write!(f, "sch:{p}"),
            NormKind::KyFan(k) => write!(f, "kyfan:{k}"),
        }
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.trim() {
            "op" => NormKind::Operator,
            "tr" => NormKind::Trace,
            "fro" => NormKind::Frobenius,
            other => match other.split_once(':') {
                Some(("sch", p)) => NormKind::Schatten(
                    p.parse()
                        .map_err(|_| Error::InvalidNorm(format!("bad Schatten exponent `{p}`")))?,
                ),
                Some(("kyfan", k)) => NormKind::KyFan(
                    k.parse()
                        .map_err(|_| Error::InvalidNorm(format!("bad Ky Fan index `{k}`")))?,
                ),
                _ => return Err(Error::InvalidNorm(format!("unknown norm `{other}`"))),
            },
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl Serialize for NormKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_instance, InstanceKind};

    #[test]
    fn named_examples() {
        assert_eq!(unorm(&DenseMatrix::identity(3), NormKind::Trace).unwrap(), 3.0);
        let d = DenseMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        assert_eq!(unorm(&d, NormKind::Operator).unwrap(), 3.0);
    }

    #[test]
    fn schatten_two_is_entry_norm() {
        for seed in 0..10 {
            let x = random_instance(5, seed, InstanceKind::Dense, 1.0).unwrap();
            let s2 = unorm(&x, NormKind::Schatten(2.0)).unwrap();
            let rss = x.entry_norm();
            assert!((s2 - rss).abs() <= 1e-10 * rss);
        }
    }

    #[test]
    fn catalog_relations() {
        let x = random_instance(4, 9, InstanceKind::Dense, 1.0).unwrap();
        let n = |k| unorm(&x, k).unwrap();
        assert!(n(NormKind::Operator) <= n(NormKind::Frobenius));
        assert!(n(NormKind::Frobenius) <= n(NormKind::Trace));
        assert_eq!(n(NormKind::KyFan(1)), n(NormKind::Operator));
        assert!((n(NormKind::KyFan(4)) - n(NormKind::Trace)).abs() < 1e-14);
        assert!((n(NormKind::Schatten(1.0)) - n(NormKind::Trace)).abs() < 1e-13);
        assert!((n(NormKind::Schatten(2.0)) - n(NormKind::Frobenius)).abs() < 1e-13);
    }

    #[test]
    fn grammar_round_trip_and_rejections() {
        for s in ["op", "tr", "fro", "sch:3", "sch:1.5", "kyfan:2"] {
            let k: NormKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("sch:0.5".parse::<NormKind>().is_err());
        assert!("kyfan:0".parse::<NormKind>().is_err());
        assert!("nuclear".parse::<NormKind>().is_err());
        assert!("sch:x".parse::<NormKind>().is_err());
        let x = DenseMatrix::identity(2);
        assert!(unorm(&x, NormKind::KyFan(3)).is_err());
        assert!(unorm(&x, NormKind::Schatten(0.5)).is_err());
    }
}
