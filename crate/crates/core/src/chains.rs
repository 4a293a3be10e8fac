//! Registry and evaluator of the inequality chains.
//!
//! Each chain is a list of labelled terms that should be nondecreasing. A
//! report carries the terms in display order, the consecutive margins
//! `next - current`, and a verdict against `tol_chain * max |term|`.
//!
//! Removable singularities (`1/|hi - lo|` factors) are guarded: when the
//! interval is shorter than [`GUARD`], the affected terms take their limit
//! value and the report is marked degenerate.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::heinz::{heinz_pair, log_mean, r0, r1, HeinzInstance, HeinzProfile, PowerTerm};
use crate::hermite_hadamard::{
    contracted_mean, contracted_mean_integral, dyadic_sums, endpoint_pulled_mean, endpoint_pulled_mean_integral,
    mean_crossing, mean_value, midpoint_convexity_violation, spread_pair_average, split_bounds,
    weighted_window_bounds, ConvexFn, DYADIC_CAP,
};
use crate::linalg::{DenseMatrix, PdMatrix};
use crate::norms::NormKind;
use crate::quadrature::{integrate_scalar, QuadratureConfig};

/// Interval length below which limit values replace singular terms.
pub const GUARD: f64 = 1e-6;
pub const DEFAULT_TOL_CHAIN: f64 = 1e-8;
/// Environment variable overriding [`DEFAULT_TOL_CHAIN`].
pub const TOL_ENV: &str = "HEINZ_TOL_CHAIN";
/// Offset used for the limit-proximity diagnostics.
pub const LIMIT_PROBE: f64 = 1e-4;
const PROBE_GRID: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    T3_1,
    T3_2,
    T3_3,
    T3_4,
    T3_5,
    T3_6,
    T4_1,
    C4_2a,
    C4_2b,
    C4_3,
    KR0,
    T4_5,
    C4_6,
    C4_7,
    HK,
    GLA,
    FalsifyR0,
}

impl TheoremId {
    pub const ALL: [TheoremId; 17] = [
        TheoremId::T3_1,
        TheoremId::T3_2,
        TheoremId::T3_3,
        TheoremId::T3_4,
        TheoremId::T3_5,
        TheoremId::T3_6,
        TheoremId::T4_1,
        TheoremId::C4_2a,
        TheoremId::C4_2b,
        TheoremId::C4_3,
        TheoremId::KR0,
        TheoremId::T4_5,
        TheoremId::C4_6,
        TheoremId::C4_7,
        TheoremId::HK,
        TheoremId::GLA,
        TheoremId::FalsifyR0,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T3_1 => "T3.1",
            TheoremId::T3_2 => "T3.2",
            TheoremId::T3_3 => "T3.3",
            TheoremId::T3_4 => "T3.4",
            TheoremId::T3_5 => "T3.5",
            TheoremId::T3_6 => "T3.6",
            TheoremId::T4_1 => "T4.1",
            TheoremId::C4_2a => "C4.2a",
            TheoremId::C4_2b => "C4.2b",
            TheoremId::C4_3 => "C4.3",
            TheoremId::KR0 => "K-r0",
            TheoremId::T4_5 => "T4.5",
            TheoremId::C4_6 => "C4.6",
            TheoremId::C4_7 => "C4.7",
            TheoremId::HK => "HK",
            TheoremId::GLA => "GLA",
            TheoremId::FalsifyR0 => "FALSIFY-r0",
        }
    }

    pub fn info(self) -> &'static TheoremInfo {
        &REGISTRY[self as usize]
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TheoremId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Degenerate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub range: &'static str,
    /// `None`: required, or derived from other parameters when noted in `range`.
    pub default: Option<f64>,
}

const fn param(name: &'static str, range: &'static str, default: Option<f64>) -> ParamSpec {
    ParamSpec { name, range, default }
}

#[derive(Clone, Copy, Debug)]
pub struct TheoremInfo {
    pub id: TheoremId,
    pub summary: &'static str,
    pub params: &'static [ParamSpec],
    /// Verdict that counts as success.
    pub expected: Verdict,
    pub uses_instance: bool,
}

const MU: ParamSpec = param("mu", "[0, 1]", Some(0.2));
const NU: ParamSpec = param("nu", "[0, 1]", Some(0.3));

static REGISTRY: [TheoremInfo; 17] = [
    TheoremInfo {
        id: TheoremId::T3_1,
        summary: "2|||A^1/2XB^1/2||| <= contracted mean <= mean of F <= endpoint-pulled mean <= F(mu) on [mu, 1-mu]",
        params: &[MU, param("t", "[0, 1]", Some(0.5))],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::T3_2,
        summary: "ten-term refinement from 2|||A^1/2XB^1/2||| to F(mu) on [mu, 1/2]",
        params: &[MU],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::T3_3,
        summary: "dyadic midpoint sums increase and trapezoid sums decrease toward the mean of F on [mu, 1-mu]",
        params: &[MU, param("n", "integer in [0, 20]", Some(4.0))],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::T3_4,
        summary: "split bounds l(lambda) <= mean of F <= L(lambda) on [alpha, beta]",
        params: &[
            param("alpha", "[0, 1]", Some(0.1)),
            param("beta", "[0, 1]", Some(0.9)),
            param("lambda", "[0, 1]", Some(0.5)),
        ],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::T3_5,
        summary: "spread pair averages bracket the mean of F on [mu, 1-mu] around the crossing xi",
        params: &[
            param("mu", "(0, 1)", Some(0.2)),
            param("eta", "[0, xi]; default xi/2", None),
            param("lambda", "[xi, 1]; default (1+xi)/2", None),
        ],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::T3_6,
        summary: "F(c) <= window mean of F <= (pF(alpha)+qF(beta))/(p+q) for y <= y_max",
        params: &[
            param("alpha", "0 <= alpha < beta", Some(0.1)),
            param("beta", "alpha < beta <= 1", Some(0.9)),
            param("p", "> 0", Some(1.0)),
            param("q", "> 0", Some(2.0)),
            param("y", "(0, y_max]; default y_max", None),
        ],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::T4_1,
        summary: "midpoint term <= normalized integral term <= endpoint average term, any real alpha, beta",
        params: &[param("alpha", "real", Some(0.0)), param("beta", "real", Some(1.0))],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::C4_2a,
        summary: "integral chain on [mu, 1/2]",
        params: &[param("mu", "real", Some(0.2))],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::C4_2b,
        summary: "integral chain on [0, mu]",
        params: &[param("mu", "real", Some(0.3))],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::C4_3,
        summary: "six-term chain from 2|||A^1/2XB^1/2||| to |||AX+XB|||",
        params: &[param("alpha", "[0, 1]", Some(0.2)), param("beta", "[0, 1]", Some(0.9))],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::KR0,
        summary: "F(nu) <= 4 r0 |||A^1/2XB^1/2||| + (1-2 r0) |||AX+XB|||",
        params: &[NU],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::T4_5,
        summary: "F(nu) <= |||4 r1 A^1/2XB^1/2 + (1-2 r1)(AX+XB)|||",
        params: &[NU],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::C4_6,
        summary: "four-step chain from F(nu) to |||AX+XB||| through the r1 bound",
        params: &[NU],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::C4_7,
        summary: "five-step chain ending (2/(t+2)) |||A^2X + tAXB + XB^2|||",
        params: &[param("r", "[1/2, 3/2]", Some(0.8)), param("t", "(-2, 2]", Some(1.0))],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::HK,
        summary: "|||A^1/2XB^1/2||| <= |||int_0^1 A^nu X B^(1-nu) dnu||| <= |||AX+XB|||/2",
        params: &[],
        expected: Verdict::Holds,
        uses_instance: true,
    },
    TheoremInfo {
        id: TheoremId::GLA,
        summary: "sqrt(ab) <= L(a, b) <= (a+b)/2",
        params: &[param("a", "> 0", Some(2.0)), param("b", "> 0", Some(3.0))],
        expected: Verdict::Holds,
        uses_instance: false,
    },
    TheoremInfo {
        id: TheoremId::FalsifyR0,
        summary: "F(nu) <= |||4 r0 A^1/2XB^1/2 + (1-2 r0)(AX+XB)||| fails on the embedded 3x3 data (trace norm)",
        params: &[param("nu", "[0, 1]", Some(0.468))],
        expected: Verdict::Violated,
        uses_instance: false,
    },
];

pub fn list_theorems() -> &'static [TheoremInfo] {
    &REGISTRY
}

/// Named scalar parameters of one chain evaluation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChainParams(BTreeMap<String, f64>);

impl ChainParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub quadrature: QuadratureConfig,
    /// Relative chain tolerance; margins must be `>= -tol_chain * max |term|`.
    pub tol_chain: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            tol_chain: DEFAULT_TOL_CHAIN,
        }
    }
}

impl EvalConfig {
    /// Defaults, with `tol_chain` taken from [`TOL_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = Self::default();
        if let Ok(raw) = std::env::var(TOL_ENV) {
            cfg.tol_chain = raw.trim().parse().map_err(|_| Error::InvalidParameter {
                name: TOL_ENV.into(),
                value: f64::NAN,
                reason: format!("cannot parse `{raw}` as a number"),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_chain >= 0.0 && self.tol_chain.is_finite()) {
            return Err(Error::param("tol_chain", self.tol_chain, "must be finite and nonnegative"));
        }
        self.quadrature.validate()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub theorem_id: TheoremId,
    pub instance_seed: Option<u64>,
    pub norm: Option<NormKind>,
    /// Inputs after defaults, plus derived scalars.
    pub params: ChainParams,
    pub terms: Vec<Term>,
    /// `terms[i + 1] - terms[i]`.
    pub margins: Vec<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub expected: Verdict,
    pub diagnostics: BTreeMap<String, f64>,
}

impl ChainReport {
    /// Degenerate reports count as success for chains expected to hold.
    pub fn is_expected(&self) -> bool {
        self.verdict == self.expected || (self.expected == Verdict::Holds && self.verdict == Verdict::Degenerate)
    }

    /// Smallest margin, or `None` for single-term chains.
    pub fn worst_margin(&self) -> Option<f64> {
        self.margins.iter().copied().reduce(f64::min)
    }

    pub fn scale(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.value.abs()))
    }

    pub fn term(&self, label: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.label == label).map(|t| t.value)
    }
}

struct Chain {
    terms: Vec<Term>,
    params: ChainParams,
    degenerate: bool,
    diagnostics: BTreeMap<String, f64>,
}

impl Chain {
    fn new(params: ChainParams) -> Self {
        Self {
            terms: Vec::new(),
            params,
            degenerate: false,
            diagnostics: BTreeMap::new(),
        }
    }

    fn push(&mut self, label: impl Into<String>, value: f64) {
        self.terms.push(Term {
            label: label.into(),
            value,
        });
    }

    fn diag(&mut self, name: &str, value: f64) {
        self.diagnostics.insert(name.to_string(), value);
    }

    fn finish(self, id: TheoremId, norm: Option<NormKind>, cfg: &EvalConfig) -> ChainReport {
        let margins: Vec<f64> = self.terms.windows(2).map(|w| w[1].value - w[0].value).collect();
        let scale = self.terms.iter().fold(0.0_f64, |m, t| m.max(t.value.abs()));
        let tolerance = cfg.tol_chain * scale;
        let verdict = if margins.iter().any(|&m| m < -tolerance) {
            Verdict::Violated
        } else if self.degenerate {
            Verdict::Degenerate
        } else {
            Verdict::Holds
        };
        ChainReport {
            theorem_id: id,
            instance_seed: None,
            norm,
            params: self.params,
            terms: self.terms,
            margins,
            tolerance,
            verdict,
            expected: id.info().expected,
            diagnostics: self.diagnostics,
        }
    }
}

/// Fills defaults and rejects parameter names the theorem does not take.
fn resolve(id: TheoremId, given: &ChainParams) -> Result<ChainParams> {
    let specs = id.info().params;
    for (name, value) in given.iter() {
        if !specs.iter().any(|s| s.name == name) {
            return Err(Error::InvalidParameter {
                name: name.to_string(),
                value,
                reason: format!("{id} takes no such parameter"),
            });
        }
        if !value.is_finite() {
            return Err(Error::param(name, value, "must be finite"));
        }
    }
    let mut out = given.clone();
    for s in specs {
        if out.get(s.name).is_none() {
            if let Some(d) = s.default {
                out.set(s.name, d);
            }
        }
    }
    Ok(out)
}

fn req(p: &ChainParams, name: &str) -> Result<f64> {
    p.get(name)
        .ok_or_else(|| Error::param(name, f64::NAN, "is required"))
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(lo..=hi).contains(&v) {
        return Err(Error::param(name, v, format!("must lie in [{lo}, {hi}]")));
    }
    Ok(v)
}

fn oriented(a: f64, b: f64) -> (f64, f64) {
    (a.min(b), a.max(b))
}

/// Evaluates one chain. `profile` is required for every theorem that uses an
/// instance; `GLA` and `FALSIFY-r0` ignore it.
pub fn evaluate_chain(
    id: TheoremId,
    profile: Option<&HeinzProfile>,
    params: &ChainParams,
    cfg: &EvalConfig,
) -> Result<ChainReport> {
    cfg.validate()?;
    let params = resolve(id, params)?;
    match id {
        TheoremId::GLA => return scalar_means(params, cfg),
        TheoremId::FalsifyR0 => {
            let nu = in_range("nu", req(&params, "nu")?, 0.0, 1.0)?;
            return falsify_r0_generalization_at(nu, cfg);
        }
        _ => {}
    }
    let p = profile.ok_or_else(|| Error::InvalidMatrix(format!("{id} needs a matrix instance")))?;
    let q = &cfg.quadrature;
    let chain = match id {
        TheoremId::T3_1 => contracted_pulled_chain(p, params, q)?,
        TheoremId::T3_2 => half_interval_chain(p, params, q)?,
        TheoremId::T3_3 => dyadic_chain(p, params, q)?,
        TheoremId::T3_4 => split_chain(p, params, q)?,
        TheoremId::T3_5 => crossing_chain(p, params, q)?,
        TheoremId::T3_6 => window_chain(p, params, q)?,
        TheoremId::T4_1 => {
            let (alpha, beta) = (req(&params, "alpha")?, req(&params, "beta")?);
            integral_chain(p, params, alpha, beta, q, Labels::GENERAL)?
        }
        TheoremId::C4_2a => {
            let mu = req(&params, "mu")?;
            let mut c = integral_chain(p, params, mu, 0.5, q, Labels::TO_HALF)?;
            let target = 2.0 * p.sqrt_term()?;
            let scale = max_abs(&c.terms).max(target.abs());
            let mut gap = 0.0_f64;
            for lo in [0.5 - LIMIT_PROBE, 0.5] {
                let normalized = p.integral_norm(lo, lo + LIMIT_PROBE, q)?.0 / LIMIT_PROBE;
                gap = gap.max((normalized - target).abs() / scale);
            }
            c.diag("limit_gap_at_half", gap);
            c
        }
        TheoremId::C4_2b => {
            let mu = req(&params, "mu")?;
            let mut c = integral_chain(p, params, 0.0, mu, q, Labels::FROM_ZERO)?;
            let target = p.sum_term()?;
            let scale = max_abs(&c.terms).max(target.abs());
            let normalized = p.integral_norm(0.0, LIMIT_PROBE, q)?.0 / LIMIT_PROBE;
            c.diag("limit_gap_at_zero", (normalized - target).abs() / scale);
            c
        }
        TheoremId::C4_3 => heinz_sandwich_chain(p, params, q)?,
        TheoremId::KR0 => {
            let nu = in_range("nu", req(&params, "nu")?, 0.0, 1.0)?;
            let r = r0(nu);
            let mut c = Chain::new(params);
            c.params.set("r0", r);
            c.push("F(nu)", p.value(nu)?);
            c.push(
                "4 r0 |||A^1/2XB^1/2||| + (1-2 r0) |||AX+XB|||",
                4.0 * r * p.sqrt_term()? + (1.0 - 2.0 * r) * p.sum_term()?,
            );
            c
        }
        TheoremId::T4_5 => {
            let nu = in_range("nu", req(&params, "nu")?, 0.0, 1.0)?;
            let r = r1(nu);
            let mut c = Chain::new(params);
            c.params.set("r1", r);
            c.push("F(nu)", p.value(nu)?);
            c.push("|||4 r1 A^1/2XB^1/2 + (1-2 r1)(AX+XB)|||", p.combination_norm(&mixed_bound(r))?);
            c
        }
        TheoremId::C4_6 => r1_refinement_chain(p, params)?,
        TheoremId::C4_7 => shifted_r1_chain(p, params)?,
        TheoremId::HK => {
            let mut c = Chain::new(params);
            let (hk, err) = p.one_sided_integral_norm(q)?;
            c.push("|||A^1/2XB^1/2|||", p.sqrt_term()?);
            c.push("|||int_0^1 A^nu X B^(1-nu) dnu|||", hk);
            c.push("|||AX+XB|||/2", 0.5 * p.sum_term()?);
            c.diag("quadrature_error", err);
            c
        }
        TheoremId::GLA | TheoremId::FalsifyR0 => unreachable!("handled above"),
    };
    Ok(chain.finish(id, Some(p.norm()), cfg))
}

fn max_abs(terms: &[Term]) -> f64 {
    terms.iter().fold(0.0, |m, t| m.max(t.value.abs()))
}

/// `4 r A^1/2 X B^1/2 + (1 - 2r)(AX + XB)`.
fn mixed_bound(r: f64) -> [PowerTerm; 3] {
    [
        PowerTerm::new(4.0 * r, 0.5, 0.5),
        PowerTerm::new(1.0 - 2.0 * r, 1.0, 0.0),
        PowerTerm::new(1.0 - 2.0 * r, 0.0, 1.0),
    ]
}

fn probe_convexity(c: &mut Chain, f: &ConvexFn, lo: f64, hi: f64) -> Result<()> {
    if hi - lo >= GUARD {
        c.diag("convexity_defect", midpoint_convexity_violation(f, lo, hi, PROBE_GRID)?);
    }
    Ok(())
}

fn contracted_pulled_chain(p: &HeinzProfile, params: ChainParams, q: &QuadratureConfig) -> Result<Chain> {
    let mu = in_range("mu", req(&params, "mu")?, 0.0, 1.0)?;
    let t = in_range("t", req(&params, "t")?, 0.0, 1.0)?;
    let (lo, hi) = oriented(mu, 1.0 - mu);
    let f = p.as_convex_fn();
    let mut c = Chain::new(params);
    let (contracted, mean, pulled) = if hi - lo < GUARD {
        c.degenerate = true;
        let limit = p.value(0.5)?;
        (limit, limit, limit)
    } else {
        (
            contracted_mean(&f, lo, hi, t, q)?,
            mean_value(&f, lo, hi, q)?,
            endpoint_pulled_mean(&f, lo, hi, t, q)?,
        )
    };
    c.push("2|||A^1/2XB^1/2|||", 2.0 * p.sqrt_term()?);
    c.push("(1/w) int F([1/2,x]_t) dx", contracted);
    c.push("(1/w) int F(x) dx", mean);
    c.push("(1/2w) int F([x,mu]_t) + F([x,1-mu]_t) dx", pulled);
    c.push("F(mu)", p.value(mu)?);
    probe_convexity(&mut c, &f, lo, hi)?;
    Ok(c)
}

fn half_interval_chain(p: &HeinzProfile, params: ChainParams, q: &QuadratureConfig) -> Result<Chain> {
    let mu = in_range("mu", req(&params, "mu")?, 0.0, 1.0)?;
    let (lo, hi) = oriented(mu, 0.5);
    let f = p.as_convex_fn();
    let mut c = Chain::new(params);
    let f_mid = p.value(0.5 * (mu + 0.5))?;
    let (f_mu, f_half) = (p.value(mu)?, p.value(0.5)?);
    let (middle_half, contracted_int, mean, pulled_int) = if hi - lo < GUARD {
        c.degenerate = true;
        (f_half, f_half, f_half, f_half)
    } else {
        (
            mean_value(&f, (3.0 * lo + hi) / 4.0, (lo + 3.0 * hi) / 4.0, q)?,
            contracted_mean_integral(&f, lo, hi, q)?,
            mean_value(&f, lo, hi, q)?,
            endpoint_pulled_mean_integral(&f, lo, hi, q)?,
        )
    };
    let ends = 0.5 * (f_mu + f_half);
    c.push("2|||A^1/2XB^1/2|||", 2.0 * p.sqrt_term()?);
    c.push("F((2mu+1)/4)", f_mid);
    c.push("mean of F over the middle half of [mu,1/2]", middle_half);
    c.push("int_0^1 H_t dt", contracted_int);
    c.push("(F((2mu+1)/4) + mean of F)/2", 0.5 * (f_mid + mean));
    c.push("mean of F over [mu,1/2]", mean);
    c.push("int_0^1 G_t dt", pulled_int);
    c.push("(F((2mu+1)/4) + (F(mu)+F(1/2))/2)/2", 0.5 * (f_mid + ends));
    c.push("F(mu)/2 + |||A^1/2XB^1/2|||", 0.5 * f_mu + p.sqrt_term()?);
    c.push("F(mu)", f_mu);
    probe_convexity(&mut c, &f, lo, hi)?;
    Ok(c)
}

fn dyadic_chain(p: &HeinzProfile, params: ChainParams, q: &QuadratureConfig) -> Result<Chain> {
    let mu = in_range("mu", req(&params, "mu")?, 0.0, 1.0)?;
    let n_raw = in_range("n", req(&params, "n")?, 0.0, DYADIC_CAP as f64)?;
    if n_raw.fract() != 0.0 {
        return Err(Error::param("n", n_raw, "must be an integer"));
    }
    let n = n_raw as u32;
    let (lo, hi) = oriented(mu, 1.0 - mu);
    let f = p.as_convex_fn();
    let mut c = Chain::new(params);
    let sums = (0..=n).map(|k| dyadic_sums(&f, lo, hi, k)).collect::<Result<Vec<_>>>()?;
    let mean = if hi - lo < GUARD {
        c.degenerate = true;
        p.value(0.5)?
    } else {
        mean_value(&f, lo, hi, q)?
    };
    c.push("2|||A^1/2XB^1/2|||", 2.0 * p.sqrt_term()?);
    for (k, s) in sums.iter().enumerate() {
        c.push(format!("x_{k}"), s.midpoint);
    }
    c.push("(1/w) int F(x) dx", mean);
    for (k, s) in sums.iter().enumerate().rev() {
        c.push(format!("y_{k}"), s.trapezoid);
    }
    c.push("F(mu)", p.value(mu)?);
    Ok(c)
}

fn split_chain(p: &HeinzProfile, params: ChainParams, q: &QuadratureConfig) -> Result<Chain> {
    let alpha = in_range("alpha", req(&params, "alpha")?, 0.0, 1.0)?;
    let beta = in_range("beta", req(&params, "beta")?, 0.0, 1.0)?;
    let lambda = in_range("lambda", req(&params, "lambda")?, 0.0, 1.0)?;
    let (lo, hi) = oriented(alpha, beta);
    let f = p.as_convex_fn();
    let mut c = Chain::new(params);
    let bounds = split_bounds(&f, lo, hi, lambda)?;
    let mean = if hi - lo < GUARD {
        c.degenerate = true;
        p.value(lo)?
    } else {
        mean_value(&f, lo, hi, q)?
    };
    c.push("F((alpha+beta)/2)", p.value(0.5 * (alpha + beta))?);
    c.push("l(lambda)", bounds.lower);
    c.push("mean of F over [alpha,beta]", mean);
    c.push("L(lambda)", bounds.upper);
    c.push("(F(alpha)+F(beta))/2", 0.5 * (p.value(alpha)? + p.value(beta)?));
    probe_convexity(&mut c, &f, lo, hi)?;
    Ok(c)
}

fn crossing_chain(p: &HeinzProfile, params: ChainParams, q: &QuadratureConfig) -> Result<Chain> {
    let mu = req(&params, "mu")?;
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::param("mu", mu, "must lie in (0, 1)"));
    }
    let (lo, hi) = oriented(mu, 1.0 - mu);
    let f = p.as_convex_fn();
    let mut c = Chain::new(params);
    let degenerate = hi - lo < GUARD;
    let (xi, mean) = if degenerate {
        (0.0, p.value(0.5)?)
    } else {
        (mean_crossing(&f, lo, hi, q)?, mean_value(&f, lo, hi, q)?)
    };
    c.degenerate = degenerate;
    let eta = c.params.get("eta").unwrap_or(0.5 * xi);
    let lambda = c.params.get("lambda").unwrap_or(0.5 * (1.0 + xi));
    if !degenerate {
        in_range("eta", eta, 0.0, xi)?;
        in_range("lambda", lambda, xi, 1.0)?;
    }
    c.params.set("xi", xi);
    c.params.set("eta", eta);
    c.params.set("lambda", lambda);
    c.push("2|||A^1/2XB^1/2|||", 2.0 * p.sqrt_term()?);
    c.push("T_eta", spread_pair_average(&f, lo, hi, eta)?);
    c.push("T_xi", spread_pair_average(&f, lo, hi, xi)?);
    c.push("(1/w) int F(x) dx", mean);
    c.push("T_lambda", spread_pair_average(&f, lo, hi, lambda)?);
    c.push("F(mu)", p.value(mu)?);
    Ok(c)
}

fn window_chain(p: &HeinzProfile, params: ChainParams, q: &QuadratureConfig) -> Result<Chain> {
    let alpha = in_range("alpha", req(&params, "alpha")?, 0.0, 1.0)?;
    let beta = in_range("beta", req(&params, "beta")?, 0.0, 1.0)?;
    if !(alpha < beta) {
        return Err(Error::param("beta", beta, format!("must exceed alpha = {alpha}")));
    }
    let (pw, qw) = (req(&params, "p")?, req(&params, "q")?);
    for (name, v) in [("p", pw), ("q", qw)] {
        if !(v > 0.0) {
            return Err(Error::param(name, v, "must be positive"));
        }
    }
    let y_max = (beta - alpha) / (pw + qw) * pw.min(qw);
    let y = params.get("y").unwrap_or(y_max);
    if !(y > 0.0) {
        return Err(Error::param("y", y, "must be positive"));
    }
    if y > y_max * (1.0 + 1e-12) {
        return Err(Error::param(
            "y",
            y,
            format!("exceeds y_max = {y_max}; only y <= y_max is checked for the matrix norm function"),
        ));
    }
    let y = y.min(y_max);
    let f = p.as_convex_fn();
    let center = (pw * alpha + qw * beta) / (pw + qw);
    let mut c = Chain::new(params);
    c.params.set("y", y);
    c.params.set("y_max", y_max);
    c.params.set("c", center);
    let (f_c, window, ends) = if y < GUARD {
        c.degenerate = true;
        let f_c = p.value(center)?;
        (f_c, f_c, (pw * p.value(alpha)? + qw * p.value(beta)?) / (pw + qw))
    } else {
        let w = weighted_window_bounds(&f, alpha, beta, pw, qw, y, q)?;
        (w.center, w.window_mean, w.weighted_ends)
    };
    c.push("F(c)", f_c);
    c.push("(1/2y) int_{c-y}^{c+y} F", window);
    c.push("(p F(alpha) + q F(beta))/(p+q)", ends);
    Ok(c)
}

struct Labels {
    first: &'static str,
    middle: &'static str,
    last: &'static str,
}

impl Labels {
    const GENERAL: Labels = Labels {
        first: "F((alpha+beta)/2)",
        middle: "(1/|beta-alpha|) |||int_alpha^beta H(nu) dnu|||",
        last: "|||H(alpha) + H(beta)|||/2",
    };
    const TO_HALF: Labels = Labels {
        first: "F((2mu+1)/4)",
        middle: "(2/|1-2mu|) |||int_mu^1/2 H(nu) dnu|||",
        last: "|||H(mu) + 2A^1/2XB^1/2|||/2",
    };
    const FROM_ZERO: Labels = Labels {
        first: "F(mu/2)",
        middle: "(1/|mu|) |||int_0^mu H(nu) dnu|||",
        last: "|||AX+XB + H(mu)|||/2",
    };
}

/// Midpoint term, normalized integral term, endpoint-average term on the
/// oriented interval between `alpha` and `beta`.
fn integral_chain(
    p: &HeinzProfile,
    params: ChainParams,
    alpha: f64,
    beta: f64,
    q: &QuadratureConfig,
    labels: Labels,
) -> Result<Chain> {
    let (lo, hi) = oriented(alpha, beta);
    let mid = 0.5 * (alpha + beta);
    let mut c = Chain::new(params);
    let f_mid = p.value(mid)?;
    let normalized = if hi - lo < GUARD {
        c.degenerate = true;
        f_mid
    } else {
        let (norm, err) = p.integral_norm(lo, hi, q)?;
        c.diag("quadrature_error", err / (hi - lo));
        norm / (hi - lo)
    };
    let [a1, a2] = heinz_pair(alpha);
    let [b1, b2] = heinz_pair(beta);
    c.push(labels.first, f_mid);
    c.push(labels.middle, normalized);
    c.push(labels.last, 0.5 * p.combination_norm(&[a1, a2, b1, b2])?);
    Ok(c)
}

fn heinz_sandwich_chain(p: &HeinzProfile, params: ChainParams, q: &QuadratureConfig) -> Result<Chain> {
    let alpha = in_range("alpha", req(&params, "alpha")?, 0.0, 1.0)?;
    let beta = in_range("beta", req(&params, "beta")?, 0.0, 1.0)?;
    let inner = integral_chain(p, params, alpha, beta, q, Labels::GENERAL)?;
    let mut c = Chain::new(inner.params);
    c.degenerate = inner.degenerate;
    c.diagnostics = inner.diagnostics;
    c.push("2|||A^1/2XB^1/2|||", 2.0 * p.sqrt_term()?);
    c.terms.extend(inner.terms);
    c.push("(F(alpha)+F(beta))/2", 0.5 * (p.value(alpha)? + p.value(beta)?));
    c.push("|||AX+XB|||", p.sum_term()?);
    Ok(c)
}

fn r1_refinement_chain(p: &HeinzProfile, params: ChainParams) -> Result<Chain> {
    let nu = in_range("nu", req(&params, "nu")?, 0.0, 1.0)?;
    let r = r1(nu);
    let (g, s) = (p.sqrt_term()?, p.sum_term()?);
    let mut c = Chain::new(params);
    c.params.set("r1", r);
    c.push("F(nu)", p.value(nu)?);
    c.push("|||4 r1 A^1/2XB^1/2 + (1-2 r1)(AX+XB)|||", p.combination_norm(&mixed_bound(r))?);
    c.push("4 r1 |||A^1/2XB^1/2||| + (1-2 r1) |||AX+XB|||", 4.0 * r * g + (1.0 - 2.0 * r) * s);
    c.push(
        "2(2 r1 - 1) |||A^1/2XB^1/2||| + 2(1 - r1) |||AX+XB|||",
        2.0 * (2.0 * r - 1.0) * g + 2.0 * (1.0 - r) * s,
    );
    c.push("|||AX+XB|||", s);
    Ok(c)
}

fn shifted_r1_chain(p: &HeinzProfile, params: ChainParams) -> Result<Chain> {
    let r = in_range("r", req(&params, "r")?, 0.5, 1.5)?;
    let t = req(&params, "t")?;
    if !(t > -2.0 && t <= 2.0) {
        return Err(Error::param("t", t, "must lie in (-2, 2]"));
    }
    let s = r1(r - 0.5);
    let axb = p.combination_norm(&[PowerTerm::new(1.0, 1.0, 1.0)])?;
    let split = p.combination_norm(&[PowerTerm::new(1.0, 1.5, 0.5), PowerTerm::new(1.0, 0.5, 1.5)])?;
    let quad = p.combination_norm(&[
        PowerTerm::new(1.0, 2.0, 0.0),
        PowerTerm::new(t, 1.0, 1.0),
        PowerTerm::new(1.0, 0.0, 2.0),
    ])?;
    let zhan = 2.0 / (t + 2.0);
    let mut c = Chain::new(params);
    c.params.set("s", s);
    c.push(
        "|||A^r X B^(2-r) + A^(2-r) X B^r|||",
        p.combination_norm(&[PowerTerm::new(1.0, r, 2.0 - r), PowerTerm::new(1.0, 2.0 - r, r)])?,
    );
    c.push(
        "|||4s AXB + (1-2s)(A^3/2XB^1/2 + A^1/2XB^3/2)|||",
        p.combination_norm(&[
            PowerTerm::new(4.0 * s, 1.0, 1.0),
            PowerTerm::new(1.0 - 2.0 * s, 1.5, 0.5),
            PowerTerm::new(1.0 - 2.0 * s, 0.5, 1.5),
        ])?,
    );
    c.push("4s |||AXB||| + (1-2s) |||A^3/2XB^1/2 + A^1/2XB^3/2|||", 4.0 * s * axb + (1.0 - 2.0 * s) * split);
    c.push("4s |||AXB||| + (1-2s) (2/(t+2)) |||A^2X + tAXB + XB^2|||", 4.0 * s * axb + (1.0 - 2.0 * s) * zhan * quad);
    c.push(
        "2(2s-1) |||AXB||| + (4(1-s)/(t+2)) |||A^2X + tAXB + XB^2|||",
        2.0 * (2.0 * s - 1.0) * axb + 4.0 * (1.0 - s) / (t + 2.0) * quad,
    );
    c.push("(2/(t+2)) |||A^2X + tAXB + XB^2|||", zhan * quad);
    Ok(c)
}

fn scalar_means(params: ChainParams, cfg: &EvalConfig) -> Result<ChainReport> {
    let (a, b) = (req(&params, "a")?, req(&params, "b")?);
    let closed = log_mean(a, b)?;
    let integral = integrate_scalar(|t| a.powf(t) * b.powf(1.0 - t), 0.0, 1.0, &cfg.quadrature)?.value;
    let mut c = Chain::new(params);
    c.push("sqrt(ab)", (a * b).sqrt());
    c.push("int_0^1 a^t b^(1-t) dt", integral);
    c.push("(a+b)/2", 0.5 * (a + b));
    c.diag("closed_form_gap", (integral - closed).abs());
    Ok(c.finish(TheoremId::GLA, None, cfg))
}

/// Trace norms reported for the embedded data at `nu = 0.468`, given to one
/// decimal place.
pub const REFERENCE_LHS: f64 = 78135.5;
pub const REFERENCE_RHS: f64 = 78125.4;
pub const REFERENCE_TOL: f64 = 0.5;
pub const COUNTEREXAMPLE_NU: f64 = 0.468;

const COUNTEREXAMPLE_X: [[f64; 3]; 3] = [[52.39, 38.71, 12.36], [32.86, 35.38, 64.82], [91.79, 99.45, 66.10]];
const COUNTEREXAMPLE_A: [[f64; 3]; 3] = [
    [92.315, 87.791, 71.090],
    [87.791, 120.130, 83.340],
    [71.090, 83.340, 103.610],
];
const COUNTEREXAMPLE_B: [[f64; 3]; 3] = [
    [118.482, 23.249, 112.676],
    [23.249, 10.343, 38.224],
    [112.676, 38.224, 156.551],
];

/// The embedded 3x3 data under the trace norm.
pub fn counterexample_instance() -> Result<HeinzInstance> {
    HeinzInstance::new(
        PdMatrix::from_real_rows(&COUNTEREXAMPLE_A)?,
        PdMatrix::from_real_rows(&COUNTEREXAMPLE_B)?,
        DenseMatrix::from_real_rows(&COUNTEREXAMPLE_X)?,
        NormKind::Trace,
    )
}

/// Checks `F(nu) <= |||4 r0 A^1/2XB^1/2 + (1-2 r0)(AX+XB)|||` on the embedded
/// data at `nu = 0.468`; the expected verdict is `violated`.
pub fn falsify_r0_generalization(cfg: &EvalConfig) -> Result<ChainReport> {
    falsify_r0_generalization_at(COUNTEREXAMPLE_NU, cfg)
}

pub fn falsify_r0_generalization_at(nu: f64, cfg: &EvalConfig) -> Result<ChainReport> {
    let p = HeinzProfile::new(counterexample_instance()?);
    let r = r0(nu);
    let mut c = Chain::new(ChainParams::new().with("nu", nu));
    c.params.set("r0", r);
    c.push("F(nu)", p.value(nu)?);
    c.push("|||4 r0 A^1/2XB^1/2 + (1-2 r0)(AX+XB)|||", p.combination_norm(&mixed_bound(r))?);
    Ok(c.finish(TheoremId::FalsifyR0, Some(NormKind::Trace), cfg))
}

/// `(nu, F(nu))` rows for a grid inside `[0, 1]`.
pub fn sweep_f(profile: &HeinzProfile, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&nu| {
            in_range("nu", nu, 0.0, 1.0)?;
            Ok((nu, profile.value(nu)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_instance, random_pd, InstanceKind};

    fn seeded(n: usize, seed: u64, norm: NormKind) -> HeinzProfile {
        HeinzProfile::new(
            HeinzInstance::new(
                random_pd(n, 3 * seed, 20.0).unwrap(),
                random_pd(n, 3 * seed + 1, 20.0).unwrap(),
                random_instance(n, 3 * seed + 2, InstanceKind::Dense, 1.0).unwrap(),
                norm,
            )
            .unwrap(),
        )
    }

    fn identity_profile(n: usize) -> HeinzProfile {
        let id = || PdMatrix::new(DenseMatrix::identity(n)).unwrap();
        let x = random_instance(n, 8, InstanceKind::Dense, 1.0).unwrap();
        HeinzProfile::new(HeinzInstance::new(id(), id(), x, NormKind::Trace).unwrap())
    }

    fn eval(id: TheoremId, p: &HeinzProfile, params: ChainParams) -> ChainReport {
        evaluate_chain(id, Some(p), &params, &EvalConfig::default()).unwrap()
    }

    #[test]
    fn registry_is_complete_and_ordered() {
        assert_eq!(list_theorems().len(), 17);
        for (k, info) in list_theorems().iter().enumerate() {
            assert_eq!(info.id, TheoremId::ALL[k]);
            assert_eq!(info.id.as_str().parse::<TheoremId>().unwrap(), info.id);
        }
        assert!("T9.9".parse::<TheoremId>().is_err());
        assert_eq!(TheoremId::FalsifyR0.info().expected, Verdict::Violated);
    }

    #[test]
    fn identity_weights_collapse_the_integral_chain() {
        let p = identity_profile(3);
        let r = eval(TheoremId::T4_1, &p, ChainParams::new());
        let two_x = 2.0 * crate::norms::unorm(p.instance().x(), NormKind::Trace).unwrap();
        for t in &r.terms {
            assert!((t.value - two_x).abs() < 1e-10 * two_x);
        }
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn counterexample_reports() {
        let r = falsify_r0_generalization(&EvalConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.is_expected());
        // High-precision reference evaluation of the embedded data.
        let (lhs, rhs) = (r.terms[0].value, r.terms[1].value);
        assert!((lhs - 78_135.998_174_654_53).abs() < 1e-6 * lhs, "{lhs}");
        assert!((rhs - 78_125.947_813_534_25).abs() < 1e-6 * rhs, "{rhs}");

        let half = falsify_r0_generalization_at(0.5, &EvalConfig::default()).unwrap();
        assert!(half.margins[0].abs() <= half.tolerance);
        assert_eq!(half.verdict, Verdict::Holds);

        let p = HeinzProfile::new(counterexample_instance().unwrap());
        let r1_bound = eval(TheoremId::T4_5, &p, ChainParams::new().with("nu", COUNTEREXAMPLE_NU));
        assert_eq!(r1_bound.verdict, Verdict::Holds);
        let main = eval(TheoremId::T4_1, &p, ChainParams::new());
        assert_eq!(main.verdict, Verdict::Holds);
        assert!(main.margins.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn r1_refinement_last_step_closed_form() {
        let p = seeded(4, 2, NormKind::Frobenius);
        let (g, s) = (p.sqrt_term().unwrap(), p.sum_term().unwrap());
        for nu in [0.1, 0.3, 0.5, 0.9] {
            let r = eval(TheoremId::C4_6, &p, ChainParams::new().with("nu", nu));
            let r1v = r1(nu);
            assert!((r.margins[2] - (s - 2.0 * g)).abs() < 1e-12 * s);
            assert!((r.margins[3] - (1.0 - 2.0 * r1v) * (2.0 * g - s)).abs() < 1e-12 * s);
            assert!(r.margins[..3].iter().all(|&m| m >= -r.tolerance));
        }
    }

    #[test]
    fn shifted_chain_last_step_and_zhan_factor() {
        let p = seeded(3, 5, NormKind::Trace);
        for t in [-1.0, 0.0, 1.0, 2.0] {
            let rep = eval(TheoremId::C4_7, &p, ChainParams::new().with("r", 0.9).with("t", t));
            let s = r1(0.4);
            // Zhan step and the two before it hold.
            assert!(rep.margins[..3].iter().all(|&m| m >= -rep.tolerance), "{t} {:?}", rep.margins);
            let quad = rep.terms[5].value * (t + 2.0) / 2.0;
            let axb = p.combination_norm(&[PowerTerm::new(1.0, 1.0, 1.0)]).unwrap();
            let want = (2.0 * s - 1.0) * (2.0 * quad / (t + 2.0) - 2.0 * axb);
            assert!((rep.margins[4] - want).abs() < 1e-10 * rep.scale());
        }
    }

    #[test]
    fn integral_chains_hold_on_seeded_instances() {
        for seed in 0..4 {
            for norm in NormKind::suite_default() {
                let p = seeded(3, seed, norm);
                for (id, params) in [
                    (TheoremId::T4_1, ChainParams::new().with("alpha", -0.3).with("beta", 1.2)),
                    (TheoremId::C4_2a, ChainParams::new().with("mu", 0.1)),
                    (TheoremId::C4_2b, ChainParams::new().with("mu", 0.7)),
                    (TheoremId::C4_3, ChainParams::new()),
                    (TheoremId::HK, ChainParams::new()),
                    (TheoremId::T4_5, ChainParams::new().with("nu", 0.35)),
                    (TheoremId::KR0, ChainParams::new().with("nu", 0.35)),
                ] {
                    let r = eval(id, &p, params);
                    assert_eq!(r.verdict, Verdict::Holds, "{id} {norm} {:?}", r.margins);
                }
            }
        }
    }

    #[test]
    fn scalar_refinement_chains_hold() {
        let p = seeded(3, 1, NormKind::Trace);
        for (id, params) in [
            (TheoremId::T3_2, ChainParams::new().with("mu", 0.15)),
            (TheoremId::T3_3, ChainParams::new().with("mu", 0.8)),
            (TheoremId::T3_4, ChainParams::new()),
            (TheoremId::T3_5, ChainParams::new()),
            (TheoremId::T3_6, ChainParams::new()),
        ] {
            let r = eval(id, &p, params);
            assert_eq!(r.verdict, Verdict::Holds, "{id} {:?}", r.margins);
            if let Some(d) = r.diagnostics.get("convexity_defect") {
                assert!(*d <= 1e-10 * r.scale());
            }
        }
        let r = eval(TheoremId::T3_1, &p, ChainParams::new().with("t", 1.0));
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn pulled_mean_term_drops_below_mean_for_small_t() {
        let p = seeded(3, 1, NormKind::Trace);
        let r = eval(TheoremId::T3_1, &p, ChainParams::new().with("mu", 0.1).with("t", 0.1));
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.margins[2] < -r.tolerance);
        assert!(r.margins.iter().enumerate().all(|(k, &m)| k == 2 || m >= -r.tolerance));
    }

    #[test]
    fn mirrored_parameter_gives_same_terms() {
        let p = seeded(4, 3, NormKind::Operator);
        for (id, extra) in [
            (TheoremId::T3_1, ChainParams::new().with("t", 0.6)),
            (TheoremId::T3_2, ChainParams::new()),
            (TheoremId::T3_3, ChainParams::new().with("n", 3.0)),
            (TheoremId::T3_5, ChainParams::new()),
        ] {
            let a = eval(id, &p, extra.clone().with("mu", 0.3));
            let b = eval(id, &p, extra.with("mu", 0.7));
            for (x, y) in a.terms.iter().zip(&b.terms) {
                assert!((x.value - y.value).abs() <= 1e-9 * a.scale(), "{id} {}", x.label);
            }
        }
    }

    #[test]
    fn limit_diagnostics_and_guard() {
        let p = seeded(3, 4, NormKind::Trace);
        let a = eval(TheoremId::C4_2a, &p, ChainParams::new().with("mu", 0.2));
        assert!(a.diagnostics["limit_gap_at_half"] <= 1e-3);
        let b = eval(TheoremId::C4_2b, &p, ChainParams::new().with("mu", 0.2));
        assert!(b.diagnostics["limit_gap_at_zero"] <= 1e-3);
        let d = eval(TheoremId::C4_2a, &p, ChainParams::new().with("mu", 0.5));
        assert_eq!(d.verdict, Verdict::Degenerate);
        assert!(d.is_expected());
        let d = eval(TheoremId::T3_1, &p, ChainParams::new().with("mu", 0.5 + 1e-8));
        assert_eq!(d.verdict, Verdict::Degenerate);
    }

    #[test]
    fn window_chain_full_interval_matches_mean() {
        let p = seeded(3, 6, NormKind::Frobenius);
        let r = eval(
            TheoremId::T3_6,
            &p,
            ChainParams::new().with("alpha", 0.0).with("beta", 1.0).with("p", 1.0).with("q", 1.0),
        );
        let f = p.as_convex_fn();
        let mean = mean_value(&f, 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert!((r.terms[1].value - mean).abs() < 1e-12 * mean);
        assert_eq!(r.verdict, Verdict::Holds);
        let over = evaluate_chain(
            TheoremId::T3_6,
            Some(&p),
            &ChainParams::new().with("y", 0.6).with("alpha", 0.0).with("beta", 1.0),
            &EvalConfig::default(),
        );
        assert!(over.is_err());
    }

    #[test]
    fn parameter_validation() {
        let p = seeded(2, 0, NormKind::Trace);
        let cfg = EvalConfig::default();
        let bad = |id, params: ChainParams| evaluate_chain(id, Some(&p), &params, &cfg).is_err();
        assert!(bad(TheoremId::T3_1, ChainParams::new().with("mu", 1.5)));
        assert!(bad(TheoremId::T4_1, ChainParams::new().with("gamma", 1.0)));
        assert!(bad(TheoremId::C4_7, ChainParams::new().with("t", -2.0)));
        assert!(bad(TheoremId::T3_3, ChainParams::new().with("n", 2.5)));
        assert!(evaluate_chain(TheoremId::T4_1, None, &ChainParams::new(), &cfg).is_err());
        let gla = evaluate_chain(TheoremId::GLA, None, &ChainParams::new(), &cfg).unwrap();
        assert_eq!(gla.verdict, Verdict::Holds);
        assert!((gla.terms[1].value - 2.46630).abs() < 1e-5);
    }

    #[test]
    fn sweep_is_palindromic() {
        let p = seeded(3, 7, NormKind::KyFan(2));
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let rows = sweep_f(&p, &grid).unwrap();
        for k in 0..=10 {
            assert!((rows[k].1 - rows[10 - k].1).abs() <= 1e-10 * rows[0].1);
        }
        let flat = sweep_f(&identity_profile(2), &grid).unwrap();
        assert!(flat.iter().all(|r| (r.1 - flat[0].1).abs() < 1e-12 * flat[0].1));
        assert!(sweep_f(&p, &[1.2]).is_err());
    }
}
