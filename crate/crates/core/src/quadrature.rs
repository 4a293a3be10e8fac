//! Globally adaptive Gauss-Kronrod quadrature on finite intervals.
//!
//! Each panel is evaluated with a Kronrod rule and its embedded Gauss rule;
//! the difference, rescaled as in QUADPACK, is the panel error. The panel with
//! the largest error is bisected until the summed error drops below
//! `max(abs_tol, rel_tol * scale)`, where `scale` is `|value|` for scalars and
//! the largest entry modulus for matrices.
//!
//! Matrix integrands are handled as vectors of real components, so a single
//! panel schedule serves every entry.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Kronrod points per panel: 15 (G7-K15) or 21 (G10-K21).
    pub base_rule_points: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 1 << 14,
            base_rule_points: 21,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(QuadratureError::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidConfig("max_subdivisions must be at least 1".into()));
        }
        if self.base_rule_points != 15 && self.base_rule_points != 21 {
            return Err(QuadratureError::InvalidConfig(format!(
                "base_rule_points must be 15 or 21, got {}",
                self.base_rule_points
            )));
        }
        Ok(())
    }

    fn rule(&self) -> &'static KronrodRule {
        if self.base_rule_points == 15 {
            &K15
        } else {
            &K21
        }
    }
}

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    #[error("integration interval [{a}, {b}] needs finite endpoints with a <= b")]
    BadInterval { a: f64, b: f64 },

    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },

    #[error("integrand shape changed from {expected:?} to {found:?} at x = {x}")]
    ShapeChanged {
        expected: (usize, usize),
        found: (usize, usize),
        x: f64,
    },

    #[error("subdivision budget of {subdivisions} exhausted: best estimate {value:e}, error estimate {err_estimate:e}")]
    BudgetExhausted {
        value: f64,
        err_estimate: f64,
        subdivisions: usize,
    },

    #[error("subdivision budget of {subdivisions} exhausted for a matrix integrand: error estimate {err_estimate:e}")]
    MatrixBudgetExhausted {
        value: Box<DenseMatrix>,
        err_estimate: f64,
        subdivisions: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err_estimate: f64,
}

#[derive(Clone, Debug)]
pub struct MatrixEstimate {
    pub value: DenseMatrix,
    pub err_estimate: f64,
}

pub fn integrate_scalar(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    try_integrate_scalar(|x| Ok(f(x)), a, b, cfg)
}

/// Like [`integrate_scalar`] for integrands that can fail, e.g. an inner
/// integral in a nested quadrature.
pub fn try_integrate_scalar(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let outcome = adaptive(
        |x, out| {
            out[0] = f(x)?;
            Ok(())
        },
        1,
        a,
        b,
        cfg,
    )?;
    match outcome {
        Outcome::Converged { value, err } => Ok(Estimate {
            value: value[0],
            err_estimate: err,
        }),
        Outcome::Exhausted { value, err, subdivisions } => Err(QuadratureError::BudgetExhausted {
            value: value[0],
            err_estimate: err,
            subdivisions,
        }
        .into()),
    }
}

pub fn integrate_matrix(
    g: impl Fn(f64) -> DenseMatrix,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<MatrixEstimate> {
    try_integrate_matrix(|x| Ok(g(x)), a, b, cfg)
}

pub fn try_integrate_matrix(
    mut g: impl FnMut(f64) -> Result<DenseMatrix>,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<MatrixEstimate> {
    check_interval(a, b)?;
    let first = g(a)?;
    let shape = first.shape();
    let dim = 2 * shape.0 * shape.1;
    let to_matrix = |v: &[f64]| {
        DenseMatrix::from_raw(
            shape.0,
            shape.1,
            v.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect(),
        )
    };
    let outcome = adaptive(
        |x, out| {
            let m = g(x)?;
            if m.shape() != shape {
                return Err(QuadratureError::ShapeChanged {
                    expected: shape,
                    found: m.shape(),
                    x,
                }
                .into());
            }
            for (dst, z) in out.chunks_exact_mut(2).zip(m.as_slice()) {
                dst[0] = z.re;
                dst[1] = z.im;
            }
            Ok(())
        },
        dim,
        a,
        b,
        cfg,
    )?;
    match outcome {
        Outcome::Converged { value, err } => Ok(MatrixEstimate {
            value: to_matrix(&value),
            err_estimate: err,
        }),
        Outcome::Exhausted { value, err, subdivisions } => Err(QuadratureError::MatrixBudgetExhausted {
            value: Box::new(to_matrix(&value)),
            err_estimate: err,
            subdivisions,
        }
        .into()),
    }
}

fn check_interval(a: f64, b: f64) -> Result<(), QuadratureError> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(QuadratureError::BadInterval { a, b });
    }
    Ok(())
}

enum Outcome {
    Converged { value: Vec<f64>, err: f64 },
    Exhausted { value: Vec<f64>, err: f64, subdivisions: usize },
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    err: f64,
}

struct Worst(f64, usize);

impl PartialEq for Worst {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Worst {}
impl PartialOrd for Worst {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Worst {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

fn adaptive(
    mut f: impl FnMut(f64, &mut [f64]) -> Result<()>,
    dim: usize,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Outcome> {
    cfg.validate()?;
    check_interval(a, b)?;
    if a == b {
        return Ok(Outcome::Converged {
            value: vec![0.0; dim],
            err: 0.0,
        });
    }
    let rule = cfg.rule();
    let mut scratch = Scratch::new(rule, dim);

    let first = rule.apply(&mut f, a, b, &mut scratch)?;
    let mut panels = vec![first];
    let mut heap = BinaryHeap::new();
    heap.push(Worst(panels[0].err, 0));

    loop {
        let (value, err) = totals(&panels, dim);
        let scale = value.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tol = cfg.abs_tol.max(cfg.rel_tol * scale);
        if err <= tol {
            return Ok(Outcome::Converged { value, err });
        }
        let exhausted = Outcome::Exhausted {
            value: value.clone(),
            err,
            subdivisions: panels.len(),
        };
        if panels.len() >= cfg.max_subdivisions {
            return Ok(exhausted);
        }
        let Some(Worst(_, idx)) = heap.pop() else {
            return Ok(exhausted);
        };
        let (pa, pb) = (panels[idx].a, panels[idx].b);
        let mid = 0.5 * (pa + pb);
        if !(pa < mid && mid < pb) {
            // Panel is at floating-point resolution; cannot refine further.
            return Ok(exhausted);
        }
        let left = rule.apply(&mut f, pa, mid, &mut scratch)?;
        let right = rule.apply(&mut f, mid, pb, &mut scratch)?;
        heap.push(Worst(left.err, idx));
        heap.push(Worst(right.err, panels.len()));
        panels[idx] = left;
        panels.push(right);
    }
}

fn totals(panels: &[Panel], dim: usize) -> (Vec<f64>, f64) {
    let mut value = vec![0.0; dim];
    let mut err = 0.0;
    for p in panels {
        for (acc, v) in value.iter_mut().zip(&p.value) {
            *acc += v;
        }
        err += p.err;
    }
    (value, err)
}

struct KronrodRule {
    /// Nodes on [0, 1] in decreasing order, center (0) last. Odd positions
    /// are shared with the embedded Gauss rule.
    xgk: &'static [f64],
    wgk: &'static [f64],
    /// Gauss weights for the odd positions of `xgk`, plus the center weight
    /// when the Gauss rule has an odd number of points.
    wg: &'static [f64],
    gauss_has_center: bool,
}

struct Scratch {
    fc: Vec<f64>,
    f1: Vec<Vec<f64>>,
    f2: Vec<Vec<f64>>,
}

impl Scratch {
    fn new(rule: &KronrodRule, dim: usize) -> Self {
        let pairs = rule.xgk.len() - 1;
        Self {
            fc: vec![0.0; dim],
            f1: vec![vec![0.0; dim]; pairs],
            f2: vec![vec![0.0; dim]; pairs],
        }
    }
}

impl KronrodRule {
    #[allow(clippy::needless_range_loop)]
    fn apply(
        &self,
        f: &mut impl FnMut(f64, &mut [f64]) -> Result<()>,
        a: f64,
        b: f64,
        s: &mut Scratch,
    ) -> Result<Panel> {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let pairs = self.xgk.len() - 1;
        eval(f, center, &mut s.fc)?;
        for j in 0..pairs {
            let dx = half * self.xgk[j];
            eval(f, center - dx, &mut s.f1[j])?;
            eval(f, center + dx, &mut s.f2[j])?;
        }

        let dim = s.fc.len();
        let mut value = vec![0.0; dim];
        let mut worst = 0.0_f64;
        for c in 0..dim {
            let fc = s.fc[c];
            let mut resk = self.wgk[pairs] * fc;
            let mut resg = if self.gauss_has_center {
                self.wg[self.wg.len() - 1] * fc
            } else {
                0.0
            };
            let mut resabs = resk.abs();
            for j in 0..pairs {
                let (v1, v2) = (s.f1[j][c], s.f2[j][c]);
                resk += self.wgk[j] * (v1 + v2);
                resabs += self.wgk[j] * (v1.abs() + v2.abs());
                if j % 2 == 1 {
                    resg += self.wg[j / 2] * (v1 + v2);
                }
            }
            let mean = 0.5 * resk;
            let mut resasc = self.wgk[pairs] * (fc - mean).abs();
            for j in 0..pairs {
                resasc += self.wgk[j] * ((s.f1[j][c] - mean).abs() + (s.f2[j][c] - mean).abs());
            }
            let h = half.abs();
            let mut err = ((resk - resg) * half).abs();
            let (resabs, resasc) = (resabs * h, resasc * h);
            if resasc != 0.0 && err != 0.0 {
                err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
            }
            if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
                err = err.max(50.0 * f64::EPSILON * resabs);
            }
            value[c] = resk * half;
            worst = worst.max(err);
        }
        Ok(Panel { a, b, value, err: worst })
    }
}

fn eval(f: &mut impl FnMut(f64, &mut [f64]) -> Result<()>, x: f64, out: &mut [f64]) -> Result<()> {
    f(x, out)?;
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Quadrature(QuadratureError::NonFinite { x }));
    }
    Ok(())
}

#[allow(clippy::excessive_precision)]
static K15: KronrodRule = KronrodRule {
    xgk: &[
        0.991_455_371_120_812_639_206_854_697_526_329,
        0.949_107_912_342_758_524_526_189_684_047_851,
        0.864_864_423_359_769_072_789_712_788_640_926,
        0.741_531_185_599_394_439_863_864_773_280_788,
        0.586_087_235_467_691_130_294_144_845_693_013,
        0.405_845_151_377_397_166_906_606_412_076_961,
        0.207_784_955_007_898_467_600_689_403_773_245,
        0.0,
    ],
    wgk: &[
        0.022_935_322_010_529_224_963_732_008_058_970,
        0.063_092_092_629_978_553_290_700_663_189_204,
        0.104_790_010_322_250_183_839_876_322_541_518,
        0.140_653_259_715_525_918_745_189_590_510_238,
        0.169_004_726_639_267_902_826_583_426_598_550,
        0.190_350_578_064_785_409_913_256_402_421_014,
        0.204_432_940_075_298_892_414_161_999_234_649,
        0.209_482_141_084_727_828_012_999_174_891_714,
    ],
    wg: &[
        0.129_484_966_168_869_693_270_611_432_679_082,
        0.279_705_391_489_276_667_901_467_771_423_780,
        0.381_830_050_505_118_944_950_369_775_488_975,
        0.417_959_183_673_469_387_755_102_040_816_327,
    ],
    gauss_has_center: true,
};

#[allow(clippy::excessive_precision)]
static K21: KronrodRule = KronrodRule {
    xgk: &[
        0.995_657_163_025_808_080_735_527_280_689_003,
        0.973_906_528_517_171_720_077_964_012_084_452,
        0.930_157_491_355_708_226_001_207_180_059_508,
        0.865_063_366_688_984_510_732_096_688_423_493,
        0.780_817_726_586_416_897_063_717_578_345_042,
        0.679_409_568_299_024_406_234_327_365_114_874,
        0.562_757_134_668_604_683_339_000_099_272_694,
        0.433_395_394_129_247_190_799_265_943_165_784,
        0.294_392_862_701_460_198_131_126_603_103_866,
        0.148_874_338_981_631_210_884_826_001_129_720,
        0.0,
    ],
    wgk: &[
        0.011_694_638_867_371_874_278_064_396_062_192,
        0.032_558_162_307_964_727_478_818_972_459_390,
        0.054_755_896_574_351_996_031_381_300_244_580,
        0.075_039_674_810_919_952_767_043_140_916_190,
        0.093_125_454_583_697_605_535_065_465_083_366,
        0.109_387_158_802_297_641_899_210_590_325_805,
        0.123_491_976_262_065_851_077_208_067_052_903,
        0.134_709_217_311_473_325_928_054_001_771_707,
        0.142_775_938_577_060_080_797_094_273_138_717,
        0.147_739_104_901_338_491_374_841_515_972_068,
        0.149_445_554_002_916_905_664_936_468_389_821,
    ],
    wg: &[
        0.066_671_344_308_688_137_593_568_809_893_332,
        0.149_451_349_150_580_593_145_776_339_657_697,
        0.219_086_362_515_982_043_995_534_934_228_163,
        0.269_266_719_309_996_355_091_226_921_569_469,
        0.295_524_224_714_752_870_173_892_994_651_338,
    ],
    gauss_has_center: false,
};
