//! Seeded suite runner.
//!
//! Instance `i` of a suite with master seed `s` uses the child seed
//! `derive_seed(s, i)`; its `A`, `B` and `X` come from the child streams
//! `0`, `1` and `2`, and the parameters of the theorem at registry position
//! `k` from stream `3 + k`. Dimension and norm cycle through the configured
//! lists: `dims[i % len]`, then `norms[(i / len(dims)) % len]`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::{
    evaluate_chain, falsify_r0_generalization, ChainParams, ChainReport, EvalConfig, TheoremId, Verdict,
    DEFAULT_TOL_CHAIN,
};
use crate::error::{Error, Result};
use crate::heinz::{HeinzInstance, HeinzProfile};
use crate::linalg::{derive_seed, random_instance, random_pd, InstanceKind, SeededRng};
use crate::norms::NormKind;
use crate::quadrature::QuadratureConfig;
use crate::report::ReportFormat;

/// Default `1/spread` shift for the seeded positive definite draws.
pub const DEFAULT_SPREAD: f64 = 20.0;

const MIN_GAP: f64 = 0.05;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub trials: usize,
    pub dims: Vec<usize>,
    pub norms: Vec<NormKind>,
    pub seed: u64,
    pub tol_chain: f64,
    /// Empty means every registered theorem.
    pub theorems: Vec<TheoremId>,
    pub spread: f64,
    pub quadrature: QuadratureConfig,
    pub output: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            dims: (2..=6).collect(),
            norms: NormKind::suite_default(),
            seed: 0,
            tol_chain: DEFAULT_TOL_CHAIN,
            theorems: Vec::new(),
            spread: DEFAULT_SPREAD,
            quadrature: QuadratureConfig::default(),
            output: None,
            format: ReportFormat::Json,
        }
    }
}

impl SuiteConfig {
    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            quadrature: self.quadrature,
            tol_chain: self.tol_chain,
        }
    }

    pub fn selected(&self) -> Vec<TheoremId> {
        if self.theorems.is_empty() {
            TheoremId::ALL.to_vec()
        } else {
            let mut ids = self.theorems.clone();
            ids.sort();
            ids.dedup();
            ids
        }
    }

    /// `(seed, n, norm)` of instance `index`.
    pub fn instance_spec(&self, index: usize) -> (u64, usize, NormKind) {
        let n = self.dims[index % self.dims.len()];
        let norm = self.norms[(index / self.dims.len()) % self.norms.len()];
        (derive_seed(self.seed, index as u64), n, norm)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidMatrix("dims must be a nonempty list of positive sizes".into()));
        }
        if self.norms.is_empty() {
            return Err(Error::InvalidNorm("norm list is empty".into()));
        }
        for norm in &self.norms {
            norm.validate()?;
        }
        if !(self.spread > 0.0 && self.spread.is_finite()) {
            return Err(Error::param("spread", self.spread, "must be positive and finite"));
        }
        self.eval_config().validate()
    }
}

/// The instance drawn for `seed`: `A`, `B` positive definite, `X` dense.
pub fn seeded_instance(n: usize, seed: u64, norm: NormKind, spread: f64) -> Result<HeinzInstance> {
    HeinzInstance::new(
        random_pd(n, derive_seed(seed, 0), spread)?,
        random_pd(n, derive_seed(seed, 1), spread)?,
        random_instance(n, derive_seed(seed, 2), InstanceKind::Dense, spread)?,
        norm,
    )
}

fn away_from(rng: &mut SeededRng, lo: f64, hi: f64, bad: f64, gap: f64) -> f64 {
    loop {
        let v = rng.uniform_in(lo, hi);
        if (v - bad).abs() >= gap {
            return v;
        }
    }
}

fn spaced_pair(rng: &mut SeededRng, lo: f64, hi: f64) -> (f64, f64) {
    let a = rng.uniform_in(lo, hi);
    let b = away_from(rng, lo, hi, a, MIN_GAP);
    (a, b)
}

/// Parameters drawn from the legal range of `id`.
pub fn sample_params(id: TheoremId, seed: u64) -> ChainParams {
    let mut rng = SeededRng::new(seed);
    let p = ChainParams::new();
    match id {
        TheoremId::T3_1 => p.with("mu", rng.uniform()).with("t", rng.uniform()),
        TheoremId::T3_2 => p.with("mu", rng.uniform()),
        TheoremId::T3_3 => p.with("mu", rng.uniform()).with("n", rng.int_in(0, 6) as f64),
        TheoremId::T3_4 => {
            let (alpha, beta) = (rng.uniform(), rng.uniform());
            p.with("alpha", alpha).with("beta", beta).with("lambda", rng.uniform())
        }
        TheoremId::T3_5 => p.with("mu", rng.uniform_in(0.01, 0.99)),
        TheoremId::T3_6 => {
            let (a, b) = spaced_pair(&mut rng, 0.0, 1.0);
            let (alpha, beta) = (a.min(b), a.max(b));
            let (pw, qw) = (rng.uniform_in(0.2, 5.0), rng.uniform_in(0.2, 5.0));
            let y_max = (beta - alpha) / (pw + qw) * pw.min(qw);
            let y = (1.0 - rng.uniform()) * y_max;
            p.with("alpha", alpha).with("beta", beta).with("p", pw).with("q", qw).with("y", y)
        }
        TheoremId::T4_1 => {
            let (alpha, beta) = spaced_pair(&mut rng, -0.5, 1.5);
            p.with("alpha", alpha).with("beta", beta)
        }
        TheoremId::C4_2a => p.with("mu", away_from(&mut rng, -0.5, 1.5, 0.5, MIN_GAP)),
        TheoremId::C4_2b => p.with("mu", away_from(&mut rng, -0.5, 1.5, 0.0, MIN_GAP)),
        TheoremId::C4_3 => p.with("alpha", rng.uniform()).with("beta", rng.uniform()),
        TheoremId::KR0 | TheoremId::T4_5 | TheoremId::C4_6 => p.with("nu", rng.uniform()),
        TheoremId::C4_7 => p.with("r", rng.uniform_in(0.5, 1.5)).with("t", rng.uniform_in(-1.9, 2.0)),
        TheoremId::HK => p,
        TheoremId::GLA => p.with("a", rng.uniform_in(-3.0, 3.0).exp()).with("b", rng.uniform_in(-3.0, 3.0).exp()),
        TheoremId::FalsifyR0 => p,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub holds: usize,
    pub violated: usize,
    pub degenerate: usize,
}

impl VerdictCounts {
    pub fn total(&self) -> usize {
        self.holds + self.violated + self.degenerate
    }

    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Holds => self.holds += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::Degenerate => self.degenerate += 1,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteResult {
    /// Ordered by (theorem, instance index).
    pub reports: Vec<ChainReport>,
    pub counts: VerdictCounts,
    /// Reports whose verdict differs from the registered expectation.
    pub unexpected: usize,
    /// Per theorem, the smallest `margin / max |term|`.
    pub worst_margins: BTreeMap<TheoremId, f64>,
    pub wall_time_secs: f64,
}

impl SuiteResult {
    fn assemble(reports: Vec<ChainReport>, wall_time_secs: f64) -> Self {
        let mut counts = VerdictCounts::default();
        let mut worst_margins = BTreeMap::new();
        let mut unexpected = 0;
        for r in &reports {
            counts.add(r.verdict);
            unexpected += usize::from(!r.is_expected());
            if let Some(m) = r.worst_margin() {
                let scale = r.scale();
                let rel = if scale > 0.0 { m / scale } else { m };
                let slot = worst_margins.entry(r.theorem_id).or_insert(f64::INFINITY);
                *slot = f64::min(*slot, rel);
            }
        }
        Self {
            reports,
            counts,
            unexpected,
            worst_margins,
            wall_time_secs,
        }
    }

    pub fn for_theorem(&self, id: TheoremId) -> impl Iterator<Item = &ChainReport> {
        self.reports.iter().filter(move |r| r.theorem_id == id)
    }
}

fn wrap(what: impl ToString, index: usize, seed: u64) -> impl FnOnce(Error) -> Error {
    let theorem = what.to_string();
    move |e| Error::Chain {
        theorem,
        index,
        seed,
        source: Box::new(e),
    }
}

/// Runs every selected theorem on every seeded instance. `FALSIFY-r0` runs
/// once, on its embedded data.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    cfg.validate()?;
    let start = Instant::now();
    let eval = cfg.eval_config();
    let ids = cfg.selected();
    let needs_instances = ids.iter().any(|id| id.info().uses_instance);

    let profiles: Vec<(u64, HeinzProfile)> = if needs_instances {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let (seed, n, norm) = cfg.instance_spec(i);
                let inst = seeded_instance(n, seed, norm, cfg.spread).map_err(wrap("instance generation", i, seed))?;
                Ok((seed, HeinzProfile::new(inst)))
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut jobs = Vec::new();
    for &id in &ids {
        match id {
            TheoremId::FalsifyR0 => jobs.push((id, 0)),
            _ => jobs.extend((0..cfg.trials).map(|i| (id, i))),
        }
    }

    let reports = jobs
        .into_par_iter()
        .map(|(id, i)| {
            if id == TheoremId::FalsifyR0 {
                return falsify_r0_generalization(&eval).map_err(wrap(id, 0, 0));
            }
            let seed = derive_seed(cfg.seed, i as u64);
            let params = sample_params(id, derive_seed(seed, 3 + id as u64));
            let profile = id.info().uses_instance.then(|| &profiles[i].1);
            let mut report = evaluate_chain(id, profile, &params, &eval).map_err(wrap(id, i, seed))?;
            report.instance_seed = Some(seed);
            Ok(report)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SuiteResult::assemble(reports, start.elapsed().as_secs_f64()))
}
