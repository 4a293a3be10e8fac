//! Hermite-Hadamard refinement functionals of a convex function on `[a, b]`.
//!
//! Every functional sits between the midpoint value `f((a+b)/2)` and the
//! endpoint average `(f(a)+f(b))/2` when `f` is convex. Convexity is not
//! checked on construction; [`midpoint_convexity_violation`] probes it.
//!
//! Degenerate intervals `a == b` return `f(a)` throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate_scalar, QuadratureConfig};

/// Largest `n` accepted by [`dyadic_sums`] (`2^n` evaluations).
pub const DYADIC_CAP: u32 = 20;

type Eval<'a> = Box<dyn Fn(f64) -> Result<f64> + Send + Sync + 'a>;

/// A real function on a closed domain, assumed convex by the caller.
pub struct ConvexFn<'a> {
    eval: Eval<'a>,
    lo: f64,
    hi: f64,
    label: String,
}

impl<'a> ConvexFn<'a> {
    /// `lo` and `hi` may be infinite.
    pub fn new(
        label: impl Into<String>,
        lo: f64,
        hi: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'a,
    ) -> Result<Self> {
        Self::fallible(label, lo, hi, move |x| Ok(f(x)))
    }

    pub fn fallible(
        label: impl Into<String>,
        lo: f64,
        hi: f64,
        f: impl Fn(f64) -> Result<f64> + Send + Sync + 'a,
    ) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::param("hi", hi, format!("domain must satisfy lo < hi (lo = {lo})")));
        }
        Ok(Self {
            eval: Box::new(f),
            lo,
            hi,
            label: label.into(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn slack(&self) -> f64 {
        let scale = [1.0, self.lo.abs(), self.hi.abs()]
            .into_iter()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        1e-12 * scale
    }

    /// Points within rounding distance of the domain are clamped onto it.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let s = self.slack();
        if !(x >= self.lo - s && x <= self.hi + s) {
            return Err(self.out_of_domain(x, x));
        }
        let x = x.clamp(self.lo, self.hi);
        let v = (self.eval)(x)?;
        if !v.is_finite() {
            return Err(Error::param("x", x, format!("{} is not finite here", self.label)));
        }
        Ok(v)
    }

    pub fn check_interval(&self, a: f64, b: f64) -> Result<()> {
        let s = self.slack();
        if !(a <= b) || a < self.lo - s || b > self.hi + s {
            return Err(self.out_of_domain(a, b));
        }
        Ok(())
    }

    fn out_of_domain(&self, lo: f64, hi: f64) -> Error {
        Error::OutOfDomain {
            label: self.label.clone(),
            lo,
            hi,
            domain_lo: self.lo,
            domain_hi: self.hi,
        }
    }

    fn integrate(&self, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
        Ok(try_integrate_scalar(|x| self.eval(x), a, b, cfg)?.value)
    }
}

impl std::fmt::Debug for ConvexFn<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConvexFn")
            .field("label", &self.label)
            .field("domain", &(self.lo, self.hi))
            .finish()
    }
}

fn unit(name: &str, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::param(name, t, "must lie in [0, 1]"));
    }
    Ok(())
}

/// `(1 - t) a + t b`.
pub fn affine_mix(a: f64, b: f64, t: f64) -> f64 {
    (1.0 - t) * a + t * b
}

/// Integral mean of `f` over `[a, b]`.
pub fn mean_value(f: &ConvexFn, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    f.check_interval(a, b)?;
    if a == b {
        return f.eval(a);
    }
    Ok(f.integrate(a, b, cfg)? / (b - a))
}

/// `(f(a + t(b-a)/2) + f(b - t(b-a)/2)) / 2`: endpoint average at `t = 0`,
/// midpoint value at `t = 1`. Integrates over `t` to the mean value.
pub fn folded_pair_average(f: &ConvexFn, a: f64, b: f64, t: f64) -> Result<f64> {
    unit("t", t)?;
    f.check_interval(a, b)?;
    let h = 0.5 * t * (b - a);
    Ok(0.5 * (f.eval(a + h)? + f.eval(b - h)?))
}

/// Mean of `f` over the integration variable pulled toward the midpoint:
/// `(1/(b-a)) * int_a^b f([(a+b)/2, x]_t) dx`. Increases from the midpoint
/// value (`t = 0`) to the mean value (`t = 1`).
pub fn contracted_mean(f: &ConvexFn, a: f64, b: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    unit("t", t)?;
    f.check_interval(a, b)?;
    let mid = 0.5 * (a + b);
    if a == b || t == 0.0 {
        return f.eval(mid);
    }
    let v = try_integrate_scalar(|x| f.eval(affine_mix(mid, x, t)), a, b, cfg)?.value;
    Ok(v / (b - a))
}

/// `(1/(2(b-a))) * int_a^b [f([x, a]_t) + f([x, b]_t)] dx`: the mean value
/// at `t = 0`, the endpoint average at `t = 1`. Not monotone in `t` in
/// general; for `x^2` on `[0, 1]` it equals `1/3 - t/6 + t^2/3`.
pub fn endpoint_pulled_mean(f: &ConvexFn, a: f64, b: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    unit("t", t)?;
    f.check_interval(a, b)?;
    if a == b {
        return f.eval(a);
    }
    if t == 1.0 {
        return Ok(0.5 * (f.eval(a)? + f.eval(b)?));
    }
    let v = try_integrate_scalar(
        |x| Ok(f.eval(affine_mix(x, a, t))? + f.eval(affine_mix(x, b, t))?),
        a,
        b,
        cfg,
    )?
    .value;
    Ok(v / (2.0 * (b - a)))
}

/// `int_0^1` of [`contracted_mean`] over `t`.
pub fn contracted_mean_integral(f: &ConvexFn, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    f.check_interval(a, b)?;
    if a == b {
        return f.eval(a);
    }
    Ok(try_integrate_scalar(|t| contracted_mean(f, a, b, t, cfg), 0.0, 1.0, cfg)?.value)
}

/// `int_0^1` of [`endpoint_pulled_mean`] over `t`.
pub fn endpoint_pulled_mean_integral(f: &ConvexFn, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    f.check_interval(a, b)?;
    if a == b {
        return f.eval(a);
    }
    Ok(try_integrate_scalar(|t| endpoint_pulled_mean(f, a, b, t, cfg), 0.0, 1.0, cfg)?.value)
}

/// Average of `f` at the two points `(1 -+ t)/2 * a + (1 +- t)/2 * b`,
/// symmetric about the midpoint at half-spread `t`. Increases from the
/// midpoint value to the endpoint average.
pub fn spread_pair_average(f: &ConvexFn, a: f64, b: f64, t: f64) -> Result<f64> {
    unit("t", t)?;
    f.check_interval(a, b)?;
    let (p, q) = (0.5 * (1.0 + t), 0.5 * (1.0 - t));
    Ok(0.5 * (f.eval(p * a + q * b)? + f.eval(q * a + p * b)?))
}

/// The spread `t` at which [`spread_pair_average`] meets the mean value.
///
/// Bisects on the sign of `T_t - mean`, which is nondecreasing in `t`. When
/// the midpoint value already matches the mean within tolerance (e.g. `f`
/// affine), the leftmost solution `0` is returned.
pub fn mean_crossing(f: &ConvexFn, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(a < b) {
        return Err(Error::param("b", b, format!("must exceed a = {a}")));
    }
    let mean = mean_value(f, a, b, cfg)?;
    let tol = cfg.abs_tol.max(cfg.rel_tol * mean.abs());
    let gap = |t: f64| Ok::<_, Error>(spread_pair_average(f, a, b, t)? - mean);
    let (g0, g1) = (gap(0.0)?, gap(1.0)?);
    if g0.abs() <= tol {
        return Ok(0.0);
    }
    if g0 > 0.0 || g1 < -tol {
        return Err(Error::NoSignChange { at_zero: g0, at_one: g1 });
    }
    if g1 <= 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 4.0 * f64::EPSILON {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitBounds {
    /// Lower companion of the mean value.
    pub lower: f64,
    /// Upper companion of the mean value.
    pub upper: f64,
}

/// Lower and upper bounds obtained by splitting `[a, b]` at
/// `[a, b]_lambda` and applying the midpoint and trapezoid bounds to each
/// piece.
pub fn split_bounds(f: &ConvexFn, a: f64, b: f64, lambda: f64) -> Result<SplitBounds> {
    unit("lambda", lambda)?;
    f.check_interval(a, b)?;
    let l = lambda;
    let lower = l * f.eval(0.5 * (l * b + (2.0 - l) * a))?
        + (1.0 - l) * f.eval(0.5 * ((1.0 + l) * b + (1.0 - l) * a))?;
    let upper = 0.5 * (f.eval(l * b + (1.0 - l) * a)? + l * f.eval(a)? + (1.0 - l) * f.eval(b)?);
    Ok(SplitBounds { lower, upper })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicSums {
    /// Composite midpoint rule on `2^n` panels.
    pub midpoint: f64,
    /// Composite trapezoid rule on `2^n` panels.
    pub trapezoid: f64,
}

pub fn dyadic_sums(f: &ConvexFn, a: f64, b: f64, n: u32) -> Result<DyadicSums> {
    if n > DYADIC_CAP {
        return Err(Error::param("n", n as f64, format!("must not exceed {DYADIC_CAP}")));
    }
    f.check_interval(a, b)?;
    let k = 1u64 << n;
    let h = (b - a) / k as f64;
    let mut mid = 0.0;
    for i in 1..=k {
        mid += f.eval(a + (i as f64 - 0.5) * h)?;
    }
    let mut trap = 0.5 * (f.eval(a)? + f.eval(b)?);
    for i in 1..k {
        trap += f.eval(affine_mix(a, b, i as f64 / k as f64))?;
    }
    Ok(DyadicSums {
        midpoint: mid / k as f64,
        trapezoid: trap / k as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowBounds {
    /// `f(c)` at the weighted center `c = (p a + q b)/(p + q)`.
    pub center: f64,
    /// Mean of `f` over `[c - y, c + y]`.
    pub window_mean: f64,
    /// `(p f(a) + q f(b)) / (p + q)`.
    pub weighted_ends: f64,
    /// Largest half-width for which the bounds hold for every convex `f`.
    pub y_max: f64,
}

/// Weighted Hermite-Hadamard bounds around `c = (p a + q b)/(p + q)` with
/// half-width `y`.
///
/// The window may leave `[a, b]`; it only has to stay inside the domain of
/// `f`. That is what allows probing `y > y_max`, where the upper bound is no
/// longer guaranteed.
pub fn weighted_window_bounds(
    f: &ConvexFn,
    a: f64,
    b: f64,
    p: f64,
    q: f64,
    y: f64,
    cfg: &QuadratureConfig,
) -> Result<WindowBounds> {
    if !(a < b) {
        return Err(Error::param("b", b, format!("must exceed a = {a}")));
    }
    for (name, v) in [("p", p), ("q", q), ("y", y)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, v, "must be positive and finite"));
        }
    }
    f.check_interval(a, b)?;
    let c = (p * a + q * b) / (p + q);
    f.check_interval(c - y, c + y)?;
    let window_mean = f.integrate(c - y, c + y, cfg)? / (2.0 * y);
    Ok(WindowBounds {
        center: f.eval(c)?,
        window_mean,
        weighted_ends: (p * f.eval(a)? + q * f.eval(b)?) / (p + q),
        y_max: (b - a) / (p + q) * p.min(q),
    })
}

/// Largest midpoint-convexity defect `f((s+t)/2) - (f(s)+f(t))/2` over all
/// pairs of a uniform grid on `[a, b]`. Nonpositive for convex `f`.
pub fn midpoint_convexity_violation(f: &ConvexFn, a: f64, b: f64, grid_points: usize) -> Result<f64> {
    if grid_points < 3 {
        return Err(Error::param("grid_points", grid_points as f64, "must be at least 3"));
    }
    f.check_interval(a, b)?;
    let last = (grid_points - 1) as f64;
    let xs: Vec<f64> = (0..grid_points).map(|i| affine_mix(a, b, i as f64 / last)).collect();
    let fx = xs.iter().map(|&x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..grid_points {
        for j in i + 1..grid_points {
            let defect = f.eval(0.5 * (xs[i] + xs[j]))? - 0.5 * (fx[i] + fx[j]);
            worst = worst.max(defect);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexFn<'static> {
        ConvexFn::new("x^2", -10.0, 10.0, |x| x * x).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn affine_mix_endpoints() {
        assert_eq!(affine_mix(3.0, 7.0, 0.0), 3.0);
        assert_eq!(affine_mix(3.0, 7.0, 1.0), 7.0);
        assert_eq!(affine_mix(0.0, 1.0, 0.25), 0.25);
    }

    #[test]
    fn mean_values() {
        let f = square();
        assert!((mean_value(&f, 0.0, 1.0, &cfg()).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let c = ConvexFn::new("const", 0.0, 5.0, |_| 2.5).unwrap();
        assert_eq!(mean_value(&c, 1.0, 4.0, &cfg()).unwrap(), 2.5);
        assert_eq!(mean_value(&f, 2.0, 2.0, &cfg()).unwrap(), 4.0);
        let e = ConvexFn::new("exp", -5.0, 5.0, f64::exp).unwrap();
        assert!((mean_value(&e, 0.0, 1.0, &cfg()).unwrap() - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn folded_pair_average_values() {
        let f = square();
        assert_eq!(folded_pair_average(&f, 0.0, 1.0, 0.0).unwrap(), 0.5);
        assert_eq!(folded_pair_average(&f, 0.0, 1.0, 1.0).unwrap(), 0.25);
        assert_eq!(folded_pair_average(&f, 0.0, 1.0, 0.5).unwrap(), 5.0 / 16.0);
        assert!(folded_pair_average(&f, 0.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn contracted_and_pulled_means_on_square() {
        let f = square();
        // (1-t)/2 mix of the midpoint: H_t = 1/4 + t^2/12 on [0, 1].
        for t in [0.0, 0.3, 0.5, 1.0] {
            let h = contracted_mean(&f, 0.0, 1.0, t, &cfg()).unwrap();
            assert!((h - (0.25 + t * t / 12.0)).abs() < 1e-14, "{t}");
        }
        assert!((contracted_mean(&f, 0.0, 1.0, 0.5, &cfg()).unwrap() - 13.0 / 48.0).abs() < 1e-15);
        // Average of the means over [0, 1-t] and [t, 1].
        for t in [0.0, 0.25, 0.4, 1.0] {
            let g = endpoint_pulled_mean(&f, 0.0, 1.0, t, &cfg()).unwrap();
            assert!((g - (1.0 / 3.0 - t / 6.0 + t * t / 3.0)).abs() < 1e-14, "{t}");
        }
        assert!(endpoint_pulled_mean(&f, 0.0, 1.0, 0.25, &cfg()).unwrap() < 1.0 / 3.0);
    }

    #[test]
    fn integrated_means_on_square() {
        let f = square();
        let h = contracted_mean_integral(&f, 0.0, 1.0, &cfg()).unwrap();
        assert!((h - (0.25 + 1.0 / 36.0)).abs() < 1e-13);
        let g = endpoint_pulled_mean_integral(&f, 0.0, 1.0, &cfg()).unwrap();
        assert!((g - 13.0 / 36.0).abs() < 1e-13);
        let c = ConvexFn::new("const", 0.0, 1.0, |_| 1.25).unwrap();
        assert!((contracted_mean_integral(&c, 0.0, 1.0, &cfg()).unwrap() - 1.25).abs() < 1e-14);
        assert!((endpoint_pulled_mean_integral(&c, 0.0, 1.0, &cfg()).unwrap() - 1.25).abs() < 1e-14);
    }

    #[test]
    fn spread_pair_average_on_square() {
        let f = square();
        for t in [0.0, 0.25, 0.5, 1.0] {
            let v = spread_pair_average(&f, 0.0, 1.0, t).unwrap();
            assert!((v - (1.0 + t * t) / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn crossing_points() {
        let xi = mean_crossing(&square(), 0.0, 1.0, &cfg()).unwrap();
        assert!((xi - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let lin = ConvexFn::new("affine", -1.0, 2.0, |x| 3.0 * x - 1.0).unwrap();
        assert_eq!(mean_crossing(&lin, 0.0, 1.0, &cfg()).unwrap(), 0.0);
        // cosh((xi)/2) e^{1/2} = e - 1
        let e = std::f64::consts::E;
        let want = 2.0 * ((e - 1.0) / e.sqrt()).acosh();
        let exp = ConvexFn::new("exp", -5.0, 5.0, f64::exp).unwrap();
        let xi = mean_crossing(&exp, 0.0, 1.0, &cfg()).unwrap();
        assert!((xi - want).abs() < 1e-12, "{xi} vs {want}");
    }

    #[test]
    fn split_bounds_values() {
        let f = square();
        let half = split_bounds(&f, 0.0, 1.0, 0.5).unwrap();
        assert_eq!(half, SplitBounds { lower: 5.0 / 16.0, upper: 3.0 / 8.0 });
        let zero = split_bounds(&f, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(zero, SplitBounds { lower: 0.25, upper: 0.5 });
        let one = split_bounds(&f, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(one, SplitBounds { lower: 0.25, upper: 0.5 });
        assert!(split_bounds(&f, 0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn dyadic_sum_values() {
        let f = square();
        assert_eq!(dyadic_sums(&f, 0.0, 1.0, 0).unwrap(), DyadicSums { midpoint: 0.25, trapezoid: 0.5 });
        assert_eq!(dyadic_sums(&f, 0.0, 1.0, 1).unwrap(), DyadicSums { midpoint: 5.0 / 16.0, trapezoid: 3.0 / 8.0 });
        assert!(dyadic_sums(&f, 0.0, 1.0, DYADIC_CAP + 1).is_err());
    }

    #[test]
    fn window_bounds_on_square() {
        let w = weighted_window_bounds(&square(), 0.0, 1.0, 1.0, 1.0, 0.25, &cfg()).unwrap();
        assert_eq!(w.center, 0.25);
        assert!((w.window_mean - 13.0 / 48.0).abs() < 1e-15);
        assert_eq!(w.weighted_ends, 0.5);
        assert_eq!(w.y_max, 0.5);
        let full = weighted_window_bounds(&square(), 0.0, 1.0, 2.0, 2.0, 0.5, &cfg()).unwrap();
        assert!((full.window_mean - 1.0 / 3.0).abs() < 1e-15);
        let tight = ConvexFn::new("x^2", 0.0, 1.0, |x| x * x).unwrap();
        assert!(weighted_window_bounds(&tight, 0.0, 1.0, 1.0, 2.0, 0.4, &cfg()).is_err());
        assert!(weighted_window_bounds(&tight, 0.0, 1.0, 1.0, 2.0, 0.0, &cfg()).is_err());
    }

    #[test]
    fn convexity_probe() {
        assert!(midpoint_convexity_violation(&square(), -1.0, 1.0, 11).unwrap() <= 0.0);
        let concave = ConvexFn::new("-x^2", -1.0, 1.0, |x| -x * x).unwrap();
        assert!(midpoint_convexity_violation(&concave, -1.0, 1.0, 11).unwrap() > 0.0);
        assert!(midpoint_convexity_violation(&square(), 0.0, 1.0, 2).is_err());
    }

    #[test]
    fn domain_is_enforced() {
        let f = ConvexFn::new("x^2", 0.0, 1.0, |x| x * x).unwrap();
        assert!(matches!(mean_value(&f, -0.5, 1.0, &cfg()), Err(Error::OutOfDomain { .. })));
        assert!(mean_value(&f, 1.0, 0.0, &cfg()).is_err());
        assert_eq!(f.eval(1.0 + 1e-15).unwrap(), 1.0);
        assert!(ConvexFn::new("bad", 1.0, 1.0, |x| x).is_err());
    }
}
