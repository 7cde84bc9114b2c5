//! Oscillatory integrals `os-∬ e^{-iy·η} a(y, η) dy đη` over `ℝⁿ × ℝⁿ`,
//! by χ-regularization with extrapolation in ε and by integration by parts.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{bracket, C64};
use crate::spaces::smooth_step;

pub type AmplitudeFn = Arc<dyn Fn(&[f64], &[f64]) -> C64 + Send + Sync>;

/// Radius beyond which `e^{-r²/2}` is below roundoff for our purposes.
const GAUSS_REACH: f64 = 7.5;
/// Extra quadrature bandwidth covering the non-band-limited but analytic
/// factors `⟨y⟩^{-l}`, `⟨η⟩^{-l}` produced by integration by parts.
const IBP_BAND: f64 = 24.0;
/// Window half-width for integration by parts when the amplitude does not decay.
const IBP_WINDOW: f64 = 40.0;
const OVERSAMPLE: f64 = 1.1;
const MAX_POINTS: f64 = 4e8;
const FD_STEP: f64 = 0.05;

/// Amplitude `a(y, η)` on `ℝⁿ × ℝⁿ` with class metadata and quadrature hints.
#[derive(Clone)]
pub struct Amplitude {
    dim: usize,
    f: AmplitudeFn,
    pub label: String,
    /// Growth order `m` in η.
    pub order: f64,
    /// Growth order `τ` in y.
    pub tau: f64,
    /// η-smoothness budget `N` (`None` = unlimited).
    pub budget: Option<u32>,
    /// Radius in y (resp. η) outside which the amplitude is negligible.
    pub y_extent: Option<f64>,
    pub eta_extent: Option<f64>,
    /// Largest frequency of the amplitude as a function of y (resp. η).
    pub y_band: f64,
    pub eta_band: f64,
    factors: Option<Arc<(Amplitude, Amplitude)>>,
}

impl fmt::Debug for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Amplitude")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("order", &self.order)
            .field("tau", &self.tau)
            .field("budget", &self.budget)
            .finish()
    }
}

impl Amplitude {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        f: impl Fn(&[f64], &[f64]) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            f: Arc::new(f),
            label: label.into(),
            order: 0.0,
            tau: 0.0,
            budget: None,
            y_extent: None,
            eta_extent: None,
            y_band: 0.0,
            eta_band: 0.0,
            factors: None,
        }
    }

    pub fn with_orders(mut self, order: f64, tau: f64) -> Self {
        self.order = order;
        self.tau = tau;
        self
    }

    pub fn with_budget(mut self, budget: Option<u32>) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_extents(mut self, y: Option<f64>, eta: Option<f64>) -> Self {
        self.y_extent = y;
        self.eta_extent = eta;
        self
    }

    pub fn with_bands(mut self, y: f64, eta: f64) -> Self {
        self.y_band = y;
        self.eta_band = eta;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, y: &[f64], eta: &[f64]) -> C64 {
        (self.f)(y, eta)
    }

    /// `e^{-(|y|²+|η|²)/2}`.
    pub fn gaussian(dim: usize) -> Self {
        Self::new(dim, "gaussian", |y, eta| {
            let r2: f64 = y.iter().chain(eta).map(|t| t * t).sum();
            C64::new((-0.5 * r2).exp(), 0.0)
        })
        .with_extents(Some(GAUSS_REACH), Some(GAUSS_REACH))
        .with_bands(GAUSS_REACH, GAUSS_REACH)
    }

    /// `a ≡ 1`.
    pub fn one(dim: usize) -> Self {
        Self::new(dim, "one", |_, _| C64::new(1.0, 0.0))
    }

    /// `a(y, η) = g(y)` for `g` negligible outside `|y| ≤ extent` with
    /// frequencies up to `band`.
    pub fn from_y(
        dim: usize,
        label: impl Into<String>,
        extent: f64,
        band: f64,
        g: impl Fn(&[f64]) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(dim, label, move |y, _| g(y))
            .with_extents(Some(extent), None)
            .with_bands(band, 0.0)
    }

    /// `e^{iy·η} e^{-i(y+y₀)·(η+η₀)} a(y+y₀, η+η₀)`, whose oscillatory
    /// integral equals that of `a`.
    pub fn translated(&self, y0: &[f64], eta0: &[f64]) -> Self {
        let a = self.clone();
        let (y0v, e0v) = (y0.to_vec(), eta0.to_vec());
        let ny = y0.iter().map(|t| t * t).sum::<f64>().sqrt();
        let ne = eta0.iter().map(|t| t * t).sum::<f64>().sqrt();
        let mut out = Self::new(self.dim, format!("translate({}, {y0:?}, {eta0:?})", self.label), move |y, eta| {
            let ys: Vec<f64> = y.iter().zip(&y0v).map(|(a, b)| a + b).collect();
            let es: Vec<f64> = eta.iter().zip(&e0v).map(|(a, b)| a + b).collect();
            let phase: f64 = y.iter().zip(eta).map(|(a, b)| a * b).sum::<f64>()
                - ys.iter().zip(&es).map(|(a, b)| a * b).sum::<f64>();
            C64::from_polar(1.0, phase) * a.eval(&ys, &es)
        });
        out.order = self.order;
        out.tau = self.tau;
        out.budget = self.budget;
        out.y_extent = self.y_extent.map(|e| e + ny);
        out.eta_extent = self.eta_extent.map(|e| e + ne);
        out.y_band = self.y_band + ne;
        out.eta_band = self.eta_band + ny;
        out
    }

    /// `a(y, y′, η, η′) = outer(y, η)·inner(y′, η′)`.
    pub fn product(outer: &Amplitude, inner: &Amplitude) -> Self {
        let (p, q) = (outer.clone(), inner.clone());
        let n = outer.dim;
        let mut out = Self::new(outer.dim + inner.dim, format!("({})*({})", outer.label, inner.label), move |y, eta| {
            p.eval(&y[..n], &eta[..n]) * q.eval(&y[n..], &eta[n..])
        });
        out.order = outer.order.max(0.0) + inner.order.max(0.0);
        out.tau = outer.tau.max(0.0) + inner.tau.max(0.0);
        out.budget = match (outer.budget, inner.budget) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        out.y_extent = outer.y_extent.zip(inner.y_extent).map(|(a, b)| a.max(b));
        out.eta_extent = outer.eta_extent.zip(inner.eta_extent).map(|(a, b)| a.max(b));
        out.y_band = outer.y_band.max(inner.y_band);
        out.eta_band = outer.eta_band.max(inner.eta_band);
        out.factors = Some(Arc::new((outer.clone(), inner.clone())));
        out
    }

    /// `self + c·other`.
    pub fn combine(&self, c: C64, other: &Amplitude) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::InvalidParameter("amplitude dimensions differ".into()));
        }
        let (a, b) = (self.clone(), other.clone());
        let mut out = Self::new(self.dim, format!("{} + ({c})*{}", self.label, other.label), move |y, eta| {
            a.eval(y, eta) + c * b.eval(y, eta)
        });
        out.order = self.order.max(other.order);
        out.tau = self.tau.max(other.tau);
        out.budget = match (self.budget, other.budget) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        out.y_extent = self.y_extent.zip(other.y_extent).map(|(a, b)| a.max(b));
        out.eta_extent = self.eta_extent.zip(other.eta_extent).map(|(a, b)| a.max(b));
        out.y_band = self.y_band.max(other.y_band);
        out.eta_band = self.eta_band.max(other.eta_band);
        Ok(out)
    }

    /// Largest sampled ratio `|∂ a| / (⟨η⟩^m ⟨y⟩^τ)` over `a` and its first
    /// derivatives, on a fixed spread of sample points.
    pub fn growth_ratio(&self) -> f64 {
        let n = self.dim;
        let radii = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0];
        let mut worst: f64 = 0.0;
        for &ry in &radii {
            for &re in &radii {
                let y = vec![ry; n];
                let eta = vec![-re; n];
                let weight = bracket(&eta).powf(self.order) * bracket(&y).powf(self.tau);
                worst = worst.max(self.eval(&y, &eta).norm() / weight);
                for axis in 0..n {
                    let dy = first_difference(&|v: &[f64]| self.eval(v, &eta), &y, axis, FD_STEP);
                    let de = first_difference(&|v: &[f64]| self.eval(&y, v), &eta, axis, FD_STEP);
                    worst = worst.max(dy.norm() / weight).max(de.norm() / weight);
                }
            }
        }
        worst
    }
}

/// Smooth cutoff `χ` on `ℝ^{2n}` with `χ(0, 0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    /// `e^{-(|y|²+|η|²)/2}`
    Gaussian,
    /// Radial, 1 on `r ≤ 1/2` and 0 on `r ≥ 1`.
    Compact,
}

impl Cutoff {
    pub fn value(self, r2: f64) -> f64 {
        match self {
            Cutoff::Gaussian => (-0.5 * r2).exp(),
            Cutoff::Compact => 1.0 - smooth_step((r2.sqrt() - 0.5) / 0.5),
        }
    }

    fn reach(self) -> f64 {
        match self {
            Cutoff::Gaussian => GAUSS_REACH,
            Cutoff::Compact => 1.0,
        }
    }

    /// Bandwidth of `χ(ε·)`, per unit ε.
    fn band(self) -> f64 {
        match self {
            Cutoff::Gaussian => GAUSS_REACH,
            Cutoff::Compact => 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regularizer {
    pub cutoff: Cutoff,
    pub schedule: Vec<f64>,
}

impl Default for Regularizer {
    fn default() -> Self {
        Self { cutoff: Cutoff::Gaussian, schedule: vec![0.4, 0.2, 0.1, 0.05] }
    }
}

impl Regularizer {
    pub fn with_cutoff(cutoff: Cutoff) -> Self {
        Self { cutoff, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schedule.len() < 3 {
            return Err(Error::InvalidParameter("ε-schedule needs at least three points".into()));
        }
        if self.schedule.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidParameter("ε-schedule must be positive".into()));
        }
        if self.schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter("ε-schedule must be strictly decreasing".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub epsilon: f64,
    pub value: C64,
    /// `|I(ε_i) − I(ε_{i−1})|`; absent on the first row.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    /// Fit `I₀ + c₁ε² + c₂ε⁴` through the last three points.
    Richardson,
    /// Differences shrink faster than any power law; the last value is kept.
    LastValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscintResult {
    pub value: C64,
    pub trace: Vec<TraceRow>,
    pub extrapolation: Extrapolation,
    /// False when successive differences fail to decrease.
    pub converged: bool,
    /// False when halving the quadrature spacing at the first ε moved the value.
    pub resolved: bool,
}

/// Symmetric trapezoid nodes on `[-half, half]` with spacing at most `step`.
fn nodes(half: f64, step: f64) -> (Vec<f64>, f64) {
    let k = (half / step).ceil().max(1.0) as usize;
    let h = half / k as f64;
    ((0..=2 * k).map(|i| -half + i as f64 * h).collect(), h)
}

/// All points of the tensor lattice `axis^dim`, with trapezoid weights.
fn tensor(axis: &[f64], dim: usize) -> Vec<(Vec<f64>, f64)> {
    let last = axis.len() - 1;
    let w1 = |i: usize| if i == 0 || i == last { 0.5 } else { 1.0 };
    let mut out: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|(p, w)| {
                axis.iter().enumerate().map(move |(i, &t)| {
                    let mut q = p.clone();
                    q.push(t);
                    (q, w * w1(i))
                })
            })
            .collect();
    }
    out
}

/// Trapezoid sum of `e^{-iy·η} f(y, η)` over `[-ybox, ybox]ⁿ × [-ebox, ebox]ⁿ`.
fn trapezoid(
    dim: usize,
    ybox: f64,
    ystep: f64,
    ebox: f64,
    estep: f64,
    f: &(dyn Fn(&[f64], &[f64]) -> C64 + Sync),
) -> Result<C64> {
    let (ya, hy) = nodes(ybox, ystep);
    let (ea, he) = nodes(ebox, estep);
    let count = (ya.len() as f64).powi(dim as i32) * (ea.len() as f64).powi(dim as i32);
    if count > MAX_POINTS {
        return Err(Error::InvalidParameter(format!(
            "oscillatory integral needs {count:.2e} quadrature points; the amplitude is beyond the resolvable range"
        )));
    }
    let ys = tensor(&ya, dim);
    let es = tensor(&ea, dim);
    let sum: C64 = ys
        .par_iter()
        .map(|(y, wy)| {
            let mut s = C64::new(0.0, 0.0);
            for (eta, we) in &es {
                let phase: f64 = y.iter().zip(eta).map(|(a, b)| a * b).sum();
                s += C64::from_polar(*we, -phase) * f(y, eta);
            }
            s * wy
        })
        .sum();
    Ok(sum * (hy * he / (2.0 * PI)).powi(dim as i32))
}

/// `∬ e^{-iy·η} χ(εy, εη) a(y, η) dy đη` by the trapezoid rule; `refine`
/// scales the spacing.
fn regularized_at(a: &Amplitude, cutoff: Cutoff, eps: f64, refine: f64) -> Result<C64> {
    if let (Cutoff::Gaussian, Some(f)) = (cutoff, &a.factors) {
        return Ok(regularized_at(&f.0, cutoff, eps, refine)? * regularized_at(&f.1, cutoff, eps, refine)?);
    }
    let reach = cutoff.reach() / eps;
    let ybox = a.y_extent.map_or(reach, |e| e.min(reach));
    let ebox = a.eta_extent.map_or(reach, |e| e.min(reach));
    let cb = cutoff.band() * eps;
    let ystep = refine * 2.0 * PI / ((ebox + a.y_band + cb) * OVERSAMPLE);
    let estep = refine * 2.0 * PI / ((ybox + a.eta_band + cb) * OVERSAMPLE);
    let e2 = eps * eps;
    trapezoid(a.dim, ybox, ystep, ebox, estep, &|y, eta| {
        let r2: f64 = y.iter().chain(eta).map(|t| t * t).sum();
        a.eval(y, eta) * cutoff.value(e2 * r2)
    })
}

/// Value at `t = 0` of the quadratic through `(t_i, v_i)`.
fn extrapolate_to_zero(t: [f64; 3], v: [C64; 3]) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if j != i {
                w *= t[j] / (t[j] - t[i]);
            }
        }
        s += v[i] * w;
    }
    s
}

fn finish(trace: Vec<TraceRow>, resolved: bool) -> OscintResult {
    let k = trace.len();
    let last = trace[k - 1].value;
    let d1 = trace[k - 2].delta.unwrap_or(0.0);
    let d2 = trace[k - 1].delta.unwrap_or(0.0);
    let floor = 1e-12 * last.norm().max(1.0);
    let deltas: Vec<f64> = trace.iter().filter_map(|r| r.delta).collect();
    let converged = deltas.windows(2).all(|w| w[1] <= w[0] || w[1] <= floor);
    let (value, extrapolation) = if d2 <= floor || d2 < d1 / 64.0 {
        (last, Extrapolation::LastValue)
    } else {
        let t = [trace[k - 3].epsilon, trace[k - 2].epsilon, trace[k - 1].epsilon].map(|e| e * e);
        let v = [trace[k - 3].value, trace[k - 2].value, last];
        (extrapolate_to_zero(t, v), Extrapolation::Richardson)
    };
    OscintResult { value, trace, extrapolation, converged, resolved }
}

fn trace_rows(eps: &[f64], values: Vec<C64>) -> Vec<TraceRow> {
    eps.iter()
        .enumerate()
        .map(|(i, &e)| TraceRow {
            epsilon: e,
            value: values[i],
            delta: (i > 0).then(|| (values[i] - values[i - 1]).norm()),
        })
        .collect()
}

fn regularized(a: &Amplitude, reg: &Regularizer, check: bool) -> Result<OscintResult> {
    reg.validate()?;
    let values: Vec<C64> = reg
        .schedule
        .par_iter()
        .map(|&e| regularized_at(a, reg.cutoff, e, 1.0))
        .collect::<Result<_>>()?;
    let resolved = if check {
        let fine = regularized_at(a, reg.cutoff, reg.schedule[0], 0.5)?;
        (fine - values[0]).norm() <= 1e-9 * values[0].norm().max(1.0)
    } else {
        true
    };
    Ok(finish(trace_rows(&reg.schedule, values), resolved))
}

/// χ-regularized oscillatory integral, extrapolated to ε → 0.
pub fn oscint_regularized(a: &Amplitude, reg: &Regularizer) -> Result<OscintResult> {
    regularized(a, reg, true)
}

fn first_difference(f: &dyn Fn(&[f64]) -> C64, x: &[f64], axis: usize, h: f64) -> C64 {
    const W: [f64; 3] = [45.0, -9.0, 1.0];
    let mut p = x.to_vec();
    let mut s = C64::new(0.0, 0.0);
    for (k, w) in W.iter().enumerate() {
        let d = (k + 1) as f64 * h;
        p[axis] = x[axis] + d;
        let plus = f(&p);
        p[axis] = x[axis] - d;
        s += (plus - f(&p)) * *w;
    }
    s / (60.0 * h)
}

fn second_difference(f: &dyn Fn(&[f64]) -> C64, x: &[f64], axis: usize, h: f64, center: C64) -> C64 {
    const W: [f64; 3] = [270.0, -27.0, 2.0];
    let mut p = x.to_vec();
    let mut s = center * -490.0;
    for (k, w) in W.iter().enumerate() {
        let d = (k + 1) as f64 * h;
        p[axis] = x[axis] + d;
        let plus = f(&p);
        p[axis] = x[axis] - d;
        s += (plus + f(&p)) * *w;
    }
    s / (180.0 * h * h)
}

/// `(1 − Δ)^k f` at `x`.
fn one_minus_laplacian(f: &dyn Fn(&[f64]) -> C64, x: &[f64], k: u32) -> C64 {
    if k == 0 {
        return f(x);
    }
    let inner = |z: &[f64]| one_minus_laplacian(f, z, k - 1);
    let center = inner(x);
    let mut s = center;
    for axis in 0..x.len() {
        s -= second_difference(&inner, x, axis, FD_STEP, center);
    }
    s
}

/// `A^k(D, p) f` at `x`, transposed onto the amplitude for the phase `e^{-iy·η}`:
/// `⟨p⟩^{-k}⟨D⟩^k` for even `k`, `⟨p⟩^{-k-1}⟨D⟩^{k-1}(1 + p·D)` for odd `k`.
fn a_operator(k: u32, f: &dyn Fn(&[f64]) -> C64, x: &[f64], p: &[f64]) -> C64 {
    let b = bracket(p);
    if k.is_multiple_of(2) {
        return one_minus_laplacian(f, x, k / 2) * b.powi(-(k as i32));
    }
    let base = |z: &[f64]| one_minus_laplacian(f, z, (k - 1) / 2);
    let mut s = base(x);
    for (axis, &pj) in p.iter().enumerate() {
        // D_j = −i∂_j
        s += first_difference(&base, x, axis, FD_STEP) * C64::new(0.0, -pj);
    }
    s * b.powi(-(k as i32) - 1)
}

/// `A^{l′}(D_η, y)[A^l(D_y, η) a]`, with metadata `(m − l, τ − l′)`.
pub fn ibp_apply(a: &Amplitude, l: u32, lp: u32) -> Result<Amplitude> {
    if let Some(n) = a.budget {
        if lp > n {
            return Err(Error::BudgetExceeded { requested: lp, available: n });
        }
    }
    let src = a.clone();
    let inner = move |y: &[f64], eta: &[f64]| -> C64 {
        if l == 0 {
            return src.eval(y, eta);
        }
        a_operator(l, &|v: &[f64]| src.eval(v, eta), y, eta)
    };
    let f = move |y: &[f64], eta: &[f64]| -> C64 {
        if lp == 0 {
            return inner(y, eta);
        }
        a_operator(lp, &|w: &[f64]| inner(y, w), eta, y)
    };
    let mut out = Amplitude::new(a.dim, format!("ibp({}, {l}, {lp})", a.label), f);
    out.order = a.order - l as f64;
    out.tau = a.tau - lp as f64;
    out.budget = a.budget.map(|n| n - lp);
    out.y_extent = a.y_extent;
    out.eta_extent = a.eta_extent;
    out.y_band = a.y_band;
    out.eta_band = a.eta_band;
    Ok(out)
}

fn window(t: f64) -> f64 {
    1.0 - smooth_step((t.abs() - 0.5) / 0.5)
}

/// Absolutely convergent form `∬ e^{-iy·η} A^{l′}(D_η, y)[A^l(D_y, η) a] dy đη`,
/// valid for `l > n + m` and `N ≥ l′ > n + τ`.
pub fn oscint_ibp(a: &Amplitude, l: u32, lp: u32) -> Result<C64> {
    let n = a.dim as f64;
    if (l as f64) <= n + a.order {
        return Err(Error::Conditions(format!("l = {l} must exceed n + m = {}", n + a.order)));
    }
    if (lp as f64) <= n + a.tau {
        return Err(Error::Conditions(format!("l' = {lp} must exceed n + τ = {}", n + a.tau)));
    }
    if let Some(budget) = a.budget {
        if lp > budget {
            return Err(Error::Conditions(format!("l' = {lp} exceeds the η-budget N = {budget}")));
        }
    }
    let b = ibp_apply(a, l, lp)?;
    // Flat-top window: super-algebraically small truncation error.
    let wy = a.y_extent.map_or(IBP_WINDOW, |e| 2.0 * e);
    let we = a.eta_extent.map_or(IBP_WINDOW, |e| 2.0 * e);
    let ystep = 2.0 * PI / ((we + a.y_band + IBP_BAND) * OVERSAMPLE);
    let estep = 2.0 * PI / ((wy + a.eta_band + IBP_BAND) * OVERSAMPLE);
    trapezoid(a.dim, wy, ystep, we, estep, &|y, eta| {
        let w: f64 = y.iter().map(|t| window(t / wy)).product::<f64>()
            * eta.iter().map(|t| window(t / we)).product::<f64>();
        if w == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            b.eval(y, eta) * w
        }
    })
}

/// Exponent bookkeeping for iterated integrals over `ℝ^{n+k} × ℝ^{n+k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IteratedConditions {
    pub tau_tilde: f64,
    pub tau_hat: f64,
    /// η-budget of the inner value as an amplitude in `(y, η)`; `None` = unlimited.
    pub inner_budget: Option<u32>,
    /// Smallest admissible `l̃`, if any.
    pub l_tilde: Option<u32>,
}

pub fn iterated_conditions(tau: f64, budget: Option<u32>, n: usize, k: usize) -> IteratedConditions {
    let kf = k as f64;
    let tau_tilde = if tau >= -kf {
        tau
    } else if tau.fract() == 0.0 {
        -kf - 0.5
    } else {
        -kf - (tau.abs() - (-tau).floor()) / 2.0
    };
    let tau_hat = if tau >= -kf { tau.max(0.0) } else { tau - tau_tilde };
    let threshold = kf + tau_tilde;
    let l0 = if threshold < 0.0 { 0 } else { threshold.floor() as u32 + 1 };
    let inner_budget = budget.map(|nb| nb.checked_sub(l0));
    let lower = n as f64 + tau_hat;
    let l_min = if lower < 0.0 { 0 } else { lower.floor() as u32 + 1 };
    let l_tilde = match inner_budget {
        None => Some(l_min),
        Some(None) => None,
        Some(Some(mb)) => (mb >= l_min).then_some(l_min),
    };
    IteratedConditions { tau_tilde, tau_hat, inner_budget: inner_budget.flatten(), l_tilde }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IteratedResult {
    pub iterated: C64,
    pub joint: C64,
    pub conditions: IteratedConditions,
}

/// Inner integral over the last `k` variable pairs, then the outer one, compared
/// with the joint integral over all `n + k` pairs.
pub fn oscint_iterated(a: &Amplitude, k: usize, reg: &Regularizer) -> Result<IteratedResult> {
    if k == 0 || k >= a.dim {
        return Err(Error::InvalidParameter(format!("split k = {k} must lie in 1..{}", a.dim)));
    }
    let n = a.dim - k;
    let conditions = iterated_conditions(a.tau, a.budget, n, k);
    if conditions.l_tilde.is_none() {
        return Err(Error::Conditions(format!(
            "no l̃ with M ≥ l̃ > n + τ̂ (τ̂ = {}, M = {:?})",
            conditions.tau_hat, conditions.inner_budget
        )));
    }
    let iterated = match &a.factors {
        Some(f) if f.0.dim == n => {
            let inner = regularized(&f.1, reg, false)?.value;
            regularized(&f.0, reg, true)?.value * inner
        }
        _ => {
            let (src, reg_inner) = (a.clone(), reg.clone());
            let mut outer = Amplitude::new(n, format!("inner({})", a.label), move |y, eta| {
                let (s, y0, e0) = (src.clone(), y.to_vec(), eta.to_vec());
                let inner = Amplitude::new(k, "inner", move |yp, ep| {
                    let yy: Vec<f64> = y0.iter().chain(yp).copied().collect();
                    let ee: Vec<f64> = e0.iter().chain(ep).copied().collect();
                    s.eval(&yy, &ee)
                })
                .with_extents(src.y_extent, src.eta_extent)
                .with_bands(src.y_band, src.eta_band);
                regularized(&inner, &reg_inner, false).map(|r| r.value).unwrap_or(C64::new(f64::NAN, f64::NAN))
            });
            outer.order = a.order.max(0.0);
            outer.tau = conditions.tau_hat;
            outer = outer.with_extents(a.y_extent, a.eta_extent).with_bands(a.y_band, a.eta_band);
            let v = regularized(&outer, reg, false)?.value;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite(0));
            }
            v
        }
    };
    let joint = oscint_regularized(a, reg)?.value;
    Ok(IteratedResult { iterated, joint, conditions })
}
