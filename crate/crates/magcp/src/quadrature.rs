//! Globally adaptive Gauss–Kronrod (10/21) integration on finite, semi-infinite,
//! nested and split oscillatory domains.
//!
//! Semi-infinite tails are mapped with x = B + L·t/(1 − t). Interior
//! breakpoints come from the config and from the caller, and the gaps between
//! them are filled with logarithmic decades so that every kernel scale starts
//! on its own panel.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable overriding the default relative tolerance.
pub const REL_TOL_ENV: &str = "MAGCP_REL_TOL";

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525500710,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Values the integrator can accumulate.
pub trait QuadValue:
    Copy + Send + Sync + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A value carried together with an accumulated error bound; adaptivity is
/// driven by the value only.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tracked<T> {
    pub value: T,
    pub error: f64,
}

impl<T: QuadValue> Add for Tracked<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Tracked { value: self.value + o.value, error: self.error + o.error }
    }
}

impl<T: QuadValue> Sub for Tracked<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Tracked { value: self.value - o.value, error: self.error - o.error }
    }
}

impl<T: QuadValue> Mul<f64> for Tracked<T> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Tracked { value: self.value * s, error: self.error * s }
    }
}

impl<T: QuadValue> QuadValue for Tracked<T> {
    fn magnitude(self) -> f64 {
        self.value.magnitude()
    }
    fn finite(self) -> bool {
        self.value.finite() && self.error.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Decade panels placed beyond the largest breakpoint before the mapped tail.
    pub tail_decades: u32,
    pub split_points: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 200,
            tail_decades: 6,
            split_points: Vec::new(),
        }
    }
}

impl QuadratureConfig {
    /// Defaults, with `rel_tol` taken from [`REL_TOL_ENV`] when set.
    pub fn from_env() -> Result<Self, QuadratureError> {
        let mut c = QuadratureConfig::default();
        if let Ok(v) = std::env::var(REL_TOL_ENV) {
            c.rel_tol = v
                .trim()
                .parse()
                .map_err(|_| QuadratureError::InvalidConfig(format!("{REL_TOL_ENV}={v} is not a number")))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QuadratureError::InvalidConfig(format!("rel_tol = {} must be positive", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadratureError::InvalidConfig(format!("abs_tol = {} must be >= 0", self.abs_tol)));
        }
        if self.max_subdivisions < 10 {
            return Err(QuadratureError::InvalidConfig(format!(
                "max_subdivisions = {} must be >= 10",
                self.max_subdivisions
            )));
        }
        if self.split_points.iter().any(|p| !p.is_finite()) {
            return Err(QuadratureError::InvalidConfig("split_points must be finite".into()));
        }
        Ok(())
    }

    pub fn with_points(&self, extra: impl IntoIterator<Item = f64>) -> QuadratureConfig {
        let mut c = self.clone();
        c.split_points.extend(extra);
        c
    }

    pub fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Outer,
    Inner,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature config: {0}")]
    InvalidConfig(String),
    #[error("non-finite integrand at x = {at} ({level:?} level)")]
    NonFiniteIntegrand { at: f64, level: Level },
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
}

impl QuadratureError {
    fn at_level(self, level: Level) -> Self {
        match self {
            QuadratureError::NonFiniteIntegrand { at, .. } => QuadratureError::NonFiniteIntegrand { at, level },
            e => e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// Set only when the error estimate met the tolerance.
    pub converged: bool,
    /// Which level stopped short when not converged.
    pub failed_level: Option<Level>,
}

impl<T: QuadValue> IntegralResult<T> {
    fn combine(self, o: IntegralResult<T>) -> IntegralResult<T> {
        IntegralResult {
            value: self.value + o.value,
            error_estimate: self.error_estimate + o.error_estimate,
            evaluations: self.evaluations + o.evaluations,
            converged: self.converged && o.converged,
            failed_level: self.failed_level.or(o.failed_level),
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> IntegralResult<U> {
        IntegralResult {
            value: f(self.value),
            error_estimate: self.error_estimate,
            evaluations: self.evaluations,
            converged: self.converged,
            failed_level: self.failed_level,
        }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn kronrod<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Result<(T, f64), QuadratureError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [T::default(); 21];
    let mut eval = |x: f64| -> Result<T, QuadratureError> {
        let v = f(x);
        if v.finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFiniteIntegrand { at: x, level: Level::Outer })
        }
    };
    fv[10] = eval(c)?;
    for j in 0..10 {
        let dx = h * XGK[j];
        fv[j] = eval(c - dx)?;
        fv[20 - j] = eval(c + dx)?;
    }
    let mut resk = fv[10] * WGK[10];
    let mut resg = T::default();
    let mut resabs = fv[10].magnitude() * WGK[10];
    for j in 0..10 {
        let pair = fv[j] + fv[20 - j];
        resk = resk + pair * WGK[j];
        resabs += WGK[j] * (fv[j].magnitude() + fv[20 - j].magnitude());
        if j % 2 == 1 {
            resg = resg + pair * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fv[10] - mean).magnitude();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[j] - mean).magnitude() + (fv[20 - j] - mean).magnitude());
    }
    let ah = h.abs();
    resabs *= ah;
    resasc *= ah;
    let mut err = ((resk - resg) * h).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((resk * h, err))
}

/// Adaptive refinement over a fixed initial partition.
pub fn integrate_panels<T, F>(mut f: F, edges: &[f64], cfg: &QuadratureConfig) -> Result<IntegralResult<T>, QuadratureError>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    cfg.validate()?;
    if edges.len() < 2 {
        return Err(QuadratureError::InvalidInterval(f64::NAN, f64::NAN));
    }
    let mut panels: Vec<Panel<T>> = Vec::with_capacity(edges.len() + cfg.max_subdivisions);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            return Err(QuadratureError::InvalidInterval(a, b));
        }
        let (value, error) = kronrod(&mut f, a, b)?;
        panels.push(Panel { a, b, value, error });
    }
    let mut evaluations = 21 * panels.len();
    let mut subdivisions = 0;
    loop {
        let total = sum_value(&panels);
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let converged = err <= cfg.tolerance(total.magnitude());
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error).then(y.0.cmp(&x.0)))
            .map(|(i, _)| i)
            .unwrap();
        let (a, b) = (panels[worst].a, panels[worst].b);
        let m = 0.5 * (a + b);
        let too_narrow = !(m > a && m < b) || (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs());
        if converged || subdivisions >= cfg.max_subdivisions || too_narrow {
            return Ok(IntegralResult {
                value: total,
                error_estimate: err,
                evaluations,
                converged,
                failed_level: if converged { None } else { Some(Level::Outer) },
            });
        }
        let (v1, e1) = kronrod(&mut f, a, m)?;
        let (v2, e2) = kronrod(&mut f, m, b)?;
        evaluations += 42;
        subdivisions += 1;
        panels[worst] = Panel { a, b: m, value: v1, error: e1 };
        panels.push(Panel { a: m, b, value: v2, error: e2 });
    }
}

fn sum_value<T: QuadValue>(panels: &[Panel<T>]) -> T {
    // left-to-right order keeps the sum independent of refinement history
    let mut idx: Vec<usize> = (0..panels.len()).collect();
    idx.sort_by(|&i, &j| panels[i].a.total_cmp(&panels[j].a));
    idx.into_iter().fold(T::default(), |acc, i| acc + panels[i].value)
}

/// Breakpoints from `lower` through `points`, with decade fill.
fn breakpoints(lower: f64, upper: f64, points: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = points
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > lower && *p < upper)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    let mut out = vec![lower];
    for p in pts {
        decade_fill(&mut out, p);
        out.push(p);
    }
    out
}

fn decade_fill(out: &mut Vec<f64>, to: f64) {
    let from = *out.last().unwrap();
    if from > 0.0 {
        let mut x = from * 10.0;
        while x * 2.0 < to {
            out.push(x);
            x *= 10.0;
        }
    }
}

pub fn integrate_finite<T, F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegralResult<T>, QuadratureError>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::InvalidInterval(a, b));
    }
    let mut edges = breakpoints(a, b, &cfg.split_points);
    decade_fill(&mut edges, b);
    edges.push(b);
    integrate_panels(f, &edges, cfg)
}

/// ∫_lower^∞ f.
pub fn integrate_semi_infinite<T, F>(mut f: F, lower: f64, cfg: &QuadratureConfig) -> Result<IntegralResult<T>, QuadratureError>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !lower.is_finite() {
        return Err(QuadratureError::InvalidInterval(lower, f64::INFINITY));
    }
    let mut edges = breakpoints(lower, f64::INFINITY, &cfg.split_points);
    let last = *edges.last().unwrap();
    let (start, scale) = if last > 0.0 && edges.len() > 1 || last > 0.0 && lower > 0.0 {
        let mut x = last;
        for _ in 0..cfg.tail_decades {
            x *= 10.0;
            edges.push(x);
        }
        (x, x - lower)
    } else {
        (last, 1.0)
    };
    // finite part in x, tail in t ∈ [0, 1)
    let n_finite = edges.len() - 1;
    let mut t_edges: Vec<f64> = Vec::with_capacity(edges.len() + 1);
    // the finite panels are handled by the same adaptive pass through an
    // identity map on [−n, 0) glued to the tail map on [0, 1)
    for (i, _) in edges.iter().enumerate() {
        t_edges.push(i as f64 - n_finite as f64);
    }
    t_edges.push(1.0);
    let to_x = |t: f64| -> (f64, f64) {
        if t < 0.0 {
            let k = t + n_finite as f64;
            let i = (k.floor() as usize).min(n_finite - 1);
            let (a, b) = (edges[i], edges[i + 1]);
            (a + (k - i as f64) * (b - a), b - a)
        } else {
            let om = 1.0 - t;
            (start + scale * t / om, scale / (om * om))
        }
    };
    let g = |t: f64| -> T {
        let (x, jac) = to_x(t);
        if !jac.is_finite() {
            return T::default();
        }
        let v = f(x);
        if v.magnitude() == 0.0 { v } else { v * jac }
    };
    integrate_panels(g, &t_edges, cfg).map_err(|e| match e {
        QuadratureError::NonFiniteIntegrand { at, level } => QuadratureError::NonFiniteIntegrand { at: to_x(at).0, level },
        e => e,
    })
}

/// Integrand family for ∫_{outer_lower}^∞ dx ∫_{lower(x)}^∞ dy f(x, y).
pub trait InnerFamily<T>: Sync {
    fn lower(&self, x: f64) -> f64;
    fn split_points(&self, _x: f64) -> Vec<f64> {
        Vec::new()
    }
    fn eval(&self, x: f64, y: f64) -> T;
}

/// Nested semi-infinite integral. The reported error is the outer estimate
/// plus the outer integral of the inner estimates, and convergence is judged
/// on that sum against the outer tolerance. The outer refinement targets half
/// of that tolerance, leaving the rest for the propagated inner error.
pub fn integrate_nested<T, I>(
    family: &I,
    outer_lower: f64,
    outer: &QuadratureConfig,
    inner: &QuadratureConfig,
) -> Result<IntegralResult<T>, QuadratureError>
where
    T: QuadValue,
    I: InnerFamily<T>,
{
    let mut inner_failed = false;
    let mut inner_error: Option<QuadratureError> = None;
    let mut inner_evals = 0usize;
    let outer_run = QuadratureConfig { rel_tol: outer.rel_tol / 2.0, abs_tol: outer.abs_tol / 2.0, ..outer.clone() };
    let res = integrate_semi_infinite(
        |x: f64| -> Tracked<T> {
            if inner_error.is_some() {
                return Tracked::default();
            }
            let cfg = inner.with_points(family.split_points(x));
            match integrate_semi_infinite(|y| family.eval(x, y), family.lower(x), &cfg) {
                Ok(r) => {
                    inner_evals += r.evaluations;
                    inner_failed |= !r.converged;
                    Tracked { value: r.value, error: r.error_estimate }
                }
                Err(e) => {
                    inner_error = Some(e.at_level(Level::Inner));
                    Tracked::default()
                }
            }
        },
        outer_lower,
        &outer_run,
    );
    if let Some(e) = inner_error {
        return Err(e);
    }
    let r = res?;
    // an inner miss is tolerated when its propagated error still fits
    let error_estimate = r.error_estimate + r.value.error.abs();
    let converged = r.converged && error_estimate <= outer.tolerance(r.value.value.magnitude());
    Ok(IntegralResult {
        value: r.value.value,
        error_estimate,
        evaluations: r.evaluations + inner_evals,
        converged,
        failed_level: match (converged, inner_failed) {
            (true, _) => None,
            (false, true) => Some(Level::Inner),
            (false, false) => Some(Level::Outer),
        },
    })
}

/// ∫_0^∞ f(k) dk for an integrand that oscillates on [0, split_at) and decays
/// beyond it, with at most inverse-square-root behaviour at the split.
///
/// Both sectors are mapped with k = split_at ∓ w², which removes the endpoint
/// singularity. `phase_span` is the total oscillation phase (radians) across
/// the oscillatory sector; the initial panels there cover at most half a
/// period each, allowing the phase rate to vary by a factor 2 over the sector.
pub fn integrate_oscillatory_split<T, F>(
    f: F,
    split_at: f64,
    phase_span: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>, QuadratureError>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if !(split_at > 0.0 && split_at.is_finite()) {
        return Err(QuadratureError::InvalidInterval(0.0, split_at));
    }
    let s = split_at;
    let wmax = s.sqrt();
    let n = ((2.0 * phase_span.abs() / std::f64::consts::PI).ceil() as usize).max(1);
    let mut edges: Vec<f64> = (0..=n).map(|i| wmax * i as f64 / n as f64).collect();
    edges.extend(cfg.split_points.iter().filter(|&&k| k > 0.0 && k < s).map(|&k| (s - k).sqrt()));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * wmax);
    let prop_cfg = QuadratureConfig {
        max_subdivisions: cfg.max_subdivisions.max(4 * n),
        ..cfg.clone()
    };
    let prop = integrate_panels(|w| f(s - w * w) * (2.0 * w), &edges, &prop_cfg)?;

    let ev_cfg = QuadratureConfig {
        split_points: cfg.split_points.iter().filter(|&&k| k > s).map(|&k| (k - s).sqrt()).collect(),
        ..cfg.clone()
    };
    let evan = integrate_semi_infinite(|w| f(s + w * w) * (2.0 * w), 0.0, &ev_cfg)?;
    Ok(prop.combine(evan))
}
