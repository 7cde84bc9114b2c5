//! Symbol recovery for black-box operators: the smoothing family `T_ε`,
//! probing of double symbols, reduction of double symbols to single ones,
//! and the composition classifier.

use std::sync::Arc;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{forward_raw, forward_transform, shift_by, Grid, GridFunction, C64};
use crate::operators::{
    ad_d, apply_many, boundary_taper, compose, op_norm_compressed, FourierMultiplier, Multiplication, Operator, Quantized,
    ZERO_NORM,
};
use crate::oscint::{oscint_regularized, Amplitude, OscintResult, Regularizer};
use crate::spaces::smooth_step;
use crate::symbols::{
    hoelder_class_table, ClassParams, Coefficient, DoubleClass, DoubleSymbol, DoubleTable, Multiplier,
    SeminormTable, Symbol, SymbolClass, SymbolTable, MAX_MEASURED_ORDER,
};

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_SCHEDULE: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
/// Relative size of `ĝ` from half the Nyquist frequency on below which the
/// probe lattice in `y` skips every other node.
pub const WINDOW_TAIL: f64 = 1e-10;
pub const MIN_REPLAY_PROBES: usize = 8;
/// Growth per doubling of `N` above which a commutator is flagged as unbounded.
pub const BLOWUP_THRESHOLD: f64 = 1.5;
/// Largest probe table, in complex entries.
const PROBE_LIMIT: usize = 1 << 25;
const SEED: u64 = 0x5eed_0002;

/// `φ(t) = 1` for `|t| ≤ 1/2`, `0` for `|t| ≥ 1`.
pub fn cutoff(t: f64) -> f64 {
    1.0 - smooth_step(2.0 * t.abs() - 1.0)
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1], got {eps}")));
    }
    Ok(())
}

/// `T_ε = P_ε Q_ε T P_ε Q_ε` with `P_ε = φ(ε|x|)` and `Q_ε = φ(ε|D|)`.
pub fn smoothed(t: &Operator, eps: f64) -> Result<Operator> {
    check_epsilon(eps)?;
    let grid = *t.grid();
    let p: Operator =
        Arc::new(Multiplication::from_fn(grid, format!("phi({eps}x)"), |x| C64::new(cutoff(eps * euclid(x)), 0.0)));
    let q: Operator = Arc::new(FourierMultiplier::from_fn(grid, format!("phi({eps}D)"), |xi| {
        C64::new(cutoff(eps * euclid(xi)), 0.0)
    }));
    compose(vec![p.clone(), q.clone(), t.clone(), p, q])
}

/// Largest `ε ≤ 0.05` for which both cutoffs equal one on the whole grid.
pub fn inert_epsilon(grid: &Grid) -> f64 {
    let reach = (grid.half_length * (grid.dim as f64).sqrt()).max(grid.max_radial_frequency());
    DEFAULT_EPSILON.min(0.5 / reach)
}

#[derive(Clone)]
pub struct SmoothingFamily {
    base: Operator,
    schedule: Vec<f64>,
}

impl SmoothingFamily {
    pub fn new(base: Operator, schedule: Vec<f64>) -> Result<Self> {
        if schedule.is_empty() {
            return Err(Error::InvalidParameter("empty epsilon schedule".into()));
        }
        for &e in &schedule {
            check_epsilon(e)?;
        }
        Ok(Self { base, schedule })
    }

    pub fn with_default_schedule(base: Operator) -> Self {
        Self { base, schedule: DEFAULT_SCHEDULE.to_vec() }
    }

    pub fn base(&self) -> &Operator {
        &self.base
    }

    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    pub fn member(&self, eps: f64) -> Result<Operator> {
        if !self.schedule.iter().any(|&e| (e - eps).abs() <= 1e-12 * e) {
            return Err(Error::InvalidParameter(format!("epsilon {eps} is not in the schedule {:?}", self.schedule)));
        }
        smoothed(&self.base, eps)
    }
}

pub fn smooth_member(fam: &SmoothingFamily, eps: f64) -> Result<Operator> {
    fam.member(eps)
}

fn origin_index(grid: &Grid) -> usize {
    grid.flatten([grid.n / 2, grid.n / 2])
}

fn check_window(g: &GridFunction, grid: &Grid) -> Result<()> {
    grid.check_same(g.grid())?;
    if g.is_spectral() {
        return Err(Error::InvalidWindow("window must be a spatial grid function".into()));
    }
    let g0 = g.values()[origin_index(grid)];
    if (g0 - C64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::InvalidWindow(format!("g(0) = {g0}")));
    }
    let n = grid.n;
    let tol = 1e-12 * g.sup_norm().max(1.0);
    for (i, v) in g.values().iter().enumerate() {
        let idx = grid.unflatten(i);
        let mirror = grid.flatten([(n - idx[0]) % n, (n - idx[1]) % n]);
        if (v - g.values()[mirror]).norm() > tol {
            return Err(Error::InvalidWindow(format!("g is not even at node {i}")));
        }
    }
    Ok(())
}

/// 2 when `ĝ` is negligible from half the Nyquist frequency on, else 1.
pub fn auto_stride(g: &GridFunction) -> Result<usize> {
    let grid = *g.grid();
    if !grid.n.is_multiple_of(2) || grid.n < 4 {
        return Ok(1);
    }
    let ghat = forward_transform(g)?;
    let half = grid.nyquist() / 2.0;
    let peak = ghat.sup_norm();
    let tail = (0..grid.len())
        .filter(|&k| grid.frequency(k)[..grid.dim].iter().any(|c| c.abs() >= half - 1e-12))
        .map(|k| ghat.values()[k].norm())
        .fold(0.0, f64::max);
    Ok(if tail <= WINDOW_TAIL * peak { 2 } else { 1 })
}

fn phase(x: &[f64], xi: &[f64]) -> C64 {
    C64::from_polar(1.0, x.iter().zip(xi).map(|(a, b)| a * b).sum())
}

/// Tabulates `p(x, ξ, y) = e^{-ix·ξ} T_ε(e_ξ g_y)(x)` for every grid `(x, ξ)`
/// and every `stride`-th node `y` per axis (`None`: chosen from `ĝ`).
pub fn probe_double_symbol(t: &Operator, g: &GridFunction, eps: f64, stride: Option<usize>) -> Result<DoubleSymbol> {
    let grid = *t.grid();
    check_window(g, &grid)?;
    let s = match stride {
        Some(s) => s,
        None => auto_stride(g)?,
    };
    if s == 0 || !grid.n.is_multiple_of(s) || grid.n / s < 2 {
        return Err(Error::InvalidParameter(format!("invalid y-stride {s}")));
    }
    let te = smoothed(t, eps)?;
    let (dim, len, n) = (grid.dim, grid.len(), grid.n);
    let m = n / s;
    let ylen = m.pow(dim as u32);
    if len * len * ylen > PROBE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "probe table of {} entries exceeds the limit {PROBE_LIMIT}",
            len * len * ylen
        )));
    }
    let windows: Vec<GridFunction> = (0..ylen)
        .map(|l| {
            let c = if dim == 1 { [l, 0] } else { [l / m, l % m] };
            let mut shift = [0i64; 2];
            for a in 0..dim {
                shift[a] = (c[a] * s) as i64 - (n / 2) as i64;
            }
            shift_by(g, shift)
        })
        .collect();
    let xs = grid.points();
    let mut values = vec![C64::new(0.0, 0.0); len * len * ylen];
    for k in 0..len {
        let xi = grid.frequency(k);
        let wave: Vec<C64> = xs.iter().map(|x| phase(&x[..dim], &xi[..dim])).collect();
        let inputs: Vec<GridFunction> = windows
            .iter()
            .map(|w| GridFunction::from_parts(grid, w.values().iter().zip(&wave).map(|(a, b)| a * b).collect(), false))
            .collect();
        let outputs = apply_many(te.as_ref(), &inputs)?;
        for (l, out) in outputs.iter().enumerate() {
            for (j, v) in out.values().iter().enumerate() {
                values[(j * len + k) * ylen + l] = wave[j].conj() * v;
            }
        }
    }
    let table = DoubleTable::new(grid, s, values)?;
    let class = DoubleClass { order: 0.0, rho: 1.0, tau: 0.0, budget: None };
    Ok(DoubleSymbol::from_table(format!("probe({}, eps={eps})", t.label()), class, table))
}

/// ξ-budget left after reduction: `N − (n + 1)`; needs `N > n`.
pub fn reduced_budget(budget: Option<u32>, dim: usize) -> Result<Option<u32>> {
    match budget {
        None => Ok(None),
        Some(b) if b as usize <= dim => Err(Error::BudgetExceeded { requested: dim as u32 + 1, available: b }),
        Some(b) => Ok(Some(b - (dim as u32 + 1))),
    }
}

/// `a_L(x, ξ)` on the lattice: the single symbol with
/// `a_L(x, D) = a(x, D, x′)`, computed from the Fourier series of `a` in `x′`.
/// The `x`-regularity of the result is not tracked (`m̃ = 0`, `τ = 1/2`).
pub fn reduce(a: &DoubleSymbol, grid: &Grid) -> Result<Symbol> {
    let (dim, len, n) = (grid.dim, grid.len(), grid.n);
    let budget = reduced_budget(a.class.budget, dim)?;
    let s = a.y_stride();
    let m = n / s;
    let ylen = m.pow(dim as u32);
    let coarse_weight = grid.cell_volume() * (s as f64).powi(dim as i32);
    let c = grid.spectral_weight();
    let dxi = grid.freq_spacing();
    let offsets: Vec<[i64; 2]> = (0..ylen)
        .map(|d| {
            let idx = if dim == 1 { [d, 0] } else { [d / m, d % m] };
            let mut o = [0i64; 2];
            for a in 0..dim {
                o[a] = idx[a] as i64 - (m / 2) as i64;
            }
            o
        })
        .collect();
    let shifted = |k: usize, o: &[i64; 2]| -> usize {
        let idx = grid.unflatten(k);
        let mut out = [0usize; 2];
        for a in 0..dim {
            out[a] = (idx[a] as i64 + o[a]).rem_euclid(n as i64) as usize;
        }
        grid.flatten(out)
    };
    let xs = grid.points();
    let rows: Vec<Vec<C64>> = (0..len)
        .into_par_iter()
        .map(|j| {
            let slab = a.slab(grid, j)?;
            let hats: Vec<Vec<C64>> =
                (0..len).map(|k| forward_raw(&slab[k * ylen..(k + 1) * ylen], m, dim, coarse_weight)).collect();
            let waves: Vec<C64> = offsets
                .iter()
                .map(|o| {
                    let w: f64 = (0..dim).map(|a| xs[j][a] * o[a] as f64 * dxi).sum();
                    c * C64::from_polar(1.0, w)
                })
                .collect();
            Ok((0..len)
                .map(|k| offsets.iter().enumerate().map(|(d, o)| waves[d] * hats[shifted(k, o)][d]).sum())
                .collect())
        })
        .collect::<Result<_>>()?;
    let values = rows.into_iter().flatten().collect();
    let table = SymbolTable::new(*grid, values)?;
    let class = SymbolClass { order: a.class.order, rho: a.class.rho, mtilde: 0, tau: 0.5, budget };
    Ok(Symbol::from_table(format!("reduce({})", a.label), class, table))
}

/// `a_L(x, ξ) = os-∬ e^{-iy·η} a(x, ξ+η, x+y) dy đη` at one point, by
/// regularized quadrature. `bands` are the largest frequencies of the
/// amplitude in `y` and `η`.
pub fn reduce_at(a: &DoubleSymbol, x: &[f64], xi: &[f64], bands: (f64, f64), reg: &Regularizer) -> Result<OscintResult> {
    reduced_budget(a.class.budget, x.len())?;
    if x.len() != xi.len() || a.eval(x, xi, x).is_none() {
        return Err(Error::InvalidParameter("pointwise reduction needs an evaluable double symbol".into()));
    }
    let (x0, xi0, sym) = (x.to_vec(), xi.to_vec(), a.clone());
    let amp = Amplitude::new(x.len(), format!("reduce({})", a.label), move |y, eta| {
        let xs: Vec<f64> = x0.iter().zip(y).map(|(p, q)| p + q).collect();
        let es: Vec<f64> = xi0.iter().zip(eta).map(|(p, q)| p + q).collect();
        sym.eval(&x0, &es, &xs).unwrap_or_default()
    })
    .with_orders(a.class.order.max(0.0), a.class.tau)
    .with_budget(a.class.budget)
    .with_bands(bands.0, bands.1);
    oscint_regularized(&amp, reg)
}

#[derive(Debug, Clone)]
pub struct RecoveryOptions {
    /// Probe window; `None` uses `e^{-|x|²/2}`.
    pub window: Option<GridFunction>,
    /// `None` uses [`inert_epsilon`].
    pub epsilon: Option<f64>,
    /// Order `m`: the operator is probed as `T Λ^{-m}`.
    pub order: f64,
    /// Replay error above which the recovery is flagged failed.
    pub tolerance: f64,
    pub class: Option<ClassParams>,
    pub probes: usize,
    pub stride: Option<usize>,
    pub seed: u64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        Self {
            window: None,
            epsilon: None,
            order: 0.0,
            tolerance: 5e-3,
            class: None,
            probes: MIN_REPLAY_PROBES,
            stride: None,
            seed: SEED,
        }
    }
}

impl RecoveryOptions {
    pub fn with_order(mut self, m: f64) -> Self {
        self.order = m;
        self
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = Some(eps);
        self
    }

    pub fn with_class(mut self, class: ClassParams) -> Self {
        self.class = Some(class);
        self
    }
}

/// Part of phase space on which `T_ε` and `T` have the same symbol up to
/// the spread of `T`: all of the grid when a cutoff is identically one,
/// else `0.4/ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedRegion {
    pub x_radius: f64,
    pub xi_radius: f64,
}

impl ResolvedRegion {
    pub fn new(grid: &Grid, eps: f64) -> Self {
        let d = (grid.dim as f64).sqrt();
        let radius = |extent: f64, axis_max: f64| {
            if eps * extent * d <= 0.5 {
                axis_max
            } else {
                axis_max.min(0.4 / eps)
            }
        };
        Self {
            x_radius: radius(grid.half_length, grid.half_length),
            xi_radius: radius(grid.nyquist(), grid.nyquist()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RecoveredSymbol {
    pub symbol: Symbol,
    pub table: SymbolTable,
    pub window: GridFunction,
    pub epsilon: f64,
    pub order: f64,
    pub stride: usize,
    pub resolved: ResolvedRegion,
    /// `‖Op(p)u − Tu‖ / ‖Tu‖` per replay probe.
    pub replay: Vec<f64>,
    pub replay_error: f64,
    pub failed: bool,
    pub class_report: Option<SeminormTable>,
}

impl RecoveredSymbol {
    pub fn verdict(&self) -> Option<bool> {
        self.class_report.as_ref().map(|t| t.verdict)
    }

    pub fn diagnostics(&self) -> RecoveryDiagnostics {
        RecoveryDiagnostics {
            symbol: self.symbol.label.clone(),
            window: "gaussian e^{-|x|^2/2}".into(),
            epsilon: self.epsilon,
            order: self.order,
            y_stride: self.stride,
            resolved: self.resolved,
            replay: self.replay.clone(),
            replay_error: self.replay_error,
            failed: self.failed,
            verdict: self.verdict(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryDiagnostics {
    pub symbol: String,
    pub window: String,
    pub epsilon: f64,
    pub order: f64,
    pub y_stride: usize,
    pub resolved: ResolvedRegion,
    pub replay: Vec<f64>,
    pub replay_error: f64,
    pub failed: bool,
    pub verdict: Option<bool>,
}

/// Seeded Gaussian wave packets centred in the inner half of the resolved region.
pub fn replay_probes(grid: Grid, resolved: ResolvedRegion, count: usize, seed: u64) -> Vec<GridFunction> {
    let dim = grid.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = ((resolved.xi_radius / 2.0) / grid.freq_spacing()).floor() as i64;
    let cmax = resolved.x_radius / 2.0;
    (0..count)
        .map(|_| {
            let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-cmax..=cmax)).collect();
            let k: Vec<f64> = (0..dim).map(|_| rng.random_range(-kmax..=kmax) as f64 * grid.freq_spacing()).collect();
            let width = rng.random_range(0.5..2.0);
            let u = GridFunction::from_fn(grid, |x| {
                let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
                C64::from_polar((-r2 / (2.0 * width * width)).exp(), phase(x, &k).arg())
            });
            boundary_taper(&u)
        })
        .collect()
}

fn replay_errors(t: &Operator, op: &Operator, probes: &[GridFunction]) -> Result<Vec<f64>> {
    let (want, got) = (apply_many(t.as_ref(), probes)?, apply_many(op.as_ref(), probes)?);
    probes
        .iter()
        .zip(want.iter().zip(&got))
        .map(|(u, (w, g))| {
            let diff = g.try_sub(w)?.l2_norm();
            let scale = w.l2_norm();
            Ok(if scale <= ZERO_NORM * u.l2_norm() { diff / u.l2_norm() } else { diff / scale })
        })
        .collect()
}

/// Probe `T Λ^{-m}`, reduce, multiply by `⟨ξ⟩^m`, replay on wave packets and
/// classify against `opts.class`.
pub fn recover_symbol(t: &Operator, opts: &RecoveryOptions) -> Result<RecoveredSymbol> {
    let grid = *t.grid();
    let eps = opts.epsilon.unwrap_or_else(|| inert_epsilon(&grid));
    check_epsilon(eps)?;
    if opts.probes < MIN_REPLAY_PROBES {
        return Err(Error::InvalidParameter(format!("at least {MIN_REPLAY_PROBES} replay probes are needed")));
    }
    let window = opts.window.clone().unwrap_or_else(|| GridFunction::gaussian(grid));
    let lowered = if opts.order == 0.0 {
        t.clone()
    } else {
        compose(vec![t.clone(), Arc::new(FourierMultiplier::bessel(grid, -opts.order))])?
    };
    let probed = probe_double_symbol(&lowered, &window, eps, opts.stride)?;
    let stride = probed.y_stride();
    let reduced = reduce(&probed, &grid)?;
    let table = reduced.table(&grid)?.times_bracket(opts.order);
    let mut class = SymbolClass { order: opts.order, ..reduced.class };
    if let Some(cp) = opts.class {
        class.order = cp.order;
        class.rho = cp.rho;
        class.budget = Some(cp.budget);
    }
    let symbol = Symbol::from_table(format!("recovered({})", t.label()), class, table.clone());
    let resolved = ResolvedRegion::new(&grid, eps);
    let probes = replay_probes(grid, resolved, opts.probes, opts.seed);
    let op: Operator = Arc::new(Quantized::from_table(table.clone(), format!("Op({})", symbol.label)));
    let replay = replay_errors(t, &op, &probes)?;
    let replay_error = replay.iter().cloned().fold(0.0, f64::max);
    if !replay_error.is_finite() {
        return Err(Error::NonFinite(0));
    }
    let failed = replay_error > opts.tolerance;
    if failed {
        warn!("replay error {replay_error:.3e} exceeds tolerance {:.1e} for {}", opts.tolerance, t.label());
    }
    let class_report = match opts.class {
        Some(cp) => Some(hoelder_class_table(&symbol, &grid, cp.tau, cp.order, cp.rho, cp.budget)?),
        None => None,
    };
    Ok(RecoveredSymbol {
        symbol,
        table,
        window,
        epsilon: eps,
        order: opts.order,
        stride,
        resolved,
        replay,
        replay_error,
        failed,
        class_report,
    })
}

/// Exponents `(m̃, M, q)` for the target class of a composition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionParams {
    pub mtilde: u32,
    pub budget: u32,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionConditions {
    pub checks: Vec<ConditionCheck>,
    pub k1: f64,
    pub k2: f64,
    /// `m₁ + m₂ + k₁ + k₂`.
    pub order: f64,
    pub rho: f64,
    /// Target class `C^{m̃ − n/q} S^m_{ρ,0}` with budget `M − (n+1) − 1`.
    pub target: ClassParams,
}

impl CompositionConditions {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn budget_value(b: Option<u32>) -> f64 {
    b.map_or(f64::INFINITY, |v| v as f64)
}

/// Checks the hypotheses on `(p₁, p₂)` and `(m̃, M, q)` for a composition in `n` dimensions.
pub fn composition_conditions(c1: &SymbolClass, c2: &SymbolClass, params: &CompositionParams, n: usize) -> CompositionConditions {
    let nf = n as f64;
    let (mt, big_m, q) = (params.mtilde as f64, params.budget as f64, params.q);
    let k1 = (1.0 - c1.rho) * nf / 2.0;
    let k2 = (1.0 - c2.rho) * nf / 2.0;
    let rho = c1.rho.min(c2.rho);
    let mut checks = Vec::new();
    let mut check = |name: &str, holds: bool, detail: String| {
        checks.push(ConditionCheck { name: name.into(), holds, detail });
    };
    for (i, (c, k)) in [(c1, k1), (c2, k2)].into_iter().enumerate() {
        let lhs = c.tau + c.mtilde as f64;
        check(&format!("regularity_{}", i + 1), lhs > k, format!("tau + mtilde = {lhs} > k = {k}"));
    }
    check("q_range", q > 1.0 && q.is_finite(), format!("1 < q = {q} < inf"));
    let cap = budget_value(c1.budget).min(budget_value(c2.budget)) - (nf / q).max(nf / 2.0);
    check("i", big_m <= cap, format!("M = {big_m} <= {cap}"));
    let mt_cap = c1.mtilde.min(c2.mtilde) as f64;
    check("ii", nf / q < mt && mt <= mt_cap, format!("{} < mtilde = {mt} <= {mt_cap}", nf / q));
    let rhs3 = c2.mtilde as f64 + c2.tau - c1.order - k1;
    check("iii", mt < rhs3, format!("mtilde = {mt} < {rhs3}"));
    let rhs4 = c2.mtilde as f64 + c2.tau + c1.order + k1;
    check("iv", rho * big_m + mt < rhs4, format!("rho M + mtilde = {} < {rhs4}", rho * big_m + mt));
    let reduced = big_m - (nf + 1.0);
    check("v", reduced >= 1.0, format!("M - (n+1) = {reduced} >= 1"));
    let both_one = c1.rho == 1.0 && c2.rho == 1.0;
    check("vi", both_one || q == 2.0, format!("q = {q}, rho = ({}, {})", c1.rho, c2.rho));
    let target = ClassParams {
        order: c1.order + c2.order + k1 + k2,
        rho,
        tau: mt - nf / q,
        budget: (reduced - 1.0).max(0.0) as u32,
    };
    CompositionConditions { checks, k1, k2, order: target.order, rho, target }
}

#[derive(Debug, Clone)]
pub struct CompositionReport {
    pub conditions: CompositionConditions,
    pub recovered: RecoveredSymbol,
}

/// Recovers the symbol of `Op(p₁) Op(p₂)` and classifies it against the
/// class the composition theorem predicts. Failed conditions are reported,
/// not fatal.
pub fn compose_and_classify(
    p1: &Symbol,
    p2: &Symbol,
    grid: &Grid,
    params: &CompositionParams,
    opts: &RecoveryOptions,
) -> Result<CompositionReport> {
    let conditions = composition_conditions(&p1.class, &p2.class, params, grid.dim);
    for c in conditions.checks.iter().filter(|c| !c.holds) {
        warn!("composition condition {} fails: {}", c.name, c.detail);
    }
    let t = compose(vec![Arc::new(Quantized::new(*grid, p1)?), Arc::new(Quantized::new(*grid, p2)?)])?;
    let mut target = conditions.target;
    if target.budget > MAX_MEASURED_ORDER {
        warn!("class budget {} capped at {MAX_MEASURED_ORDER}", target.budget);
        target.budget = MAX_MEASURED_ORDER;
    }
    let mut o = opts.clone().with_order(conditions.order);
    o.class = if target.tau > 0.0 { Some(target) } else { None };
    let recovered = recover_symbol(&t, &o)?;
    Ok(CompositionReport { conditions, recovered })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupParams {
    pub dim: usize,
    pub axis: usize,
    /// Hölder exponent of the coefficient, used for the expected growth `2^{1−τ}`.
    pub tau: f64,
    pub order: f64,
    pub sizes: Vec<usize>,
    pub half_length: f64,
}

impl Default for BlowupParams {
    fn default() -> Self {
        Self { dim: 1, axis: 0, tau: 0.5, order: 0.0, sizes: vec![32, 64, 128], half_length: std::f64::consts::PI }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub n: usize,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub coefficient: String,
    pub params: BlowupParams,
    pub rows: Vec<BlowupRow>,
    /// Ratio of successive norms; 0 when the coarser norm vanishes.
    pub ratios: Vec<f64>,
    /// Geometric mean of the ratios.
    pub growth: f64,
    pub expected_growth: f64,
    /// Growth at least [`BLOWUP_THRESHOLD`] per doubling.
    pub flagged: bool,
}

/// `‖ad(D_{x_j}) Op(a(x)⟨ξ⟩^m)‖_{H^m → L²}` over a sequence of grids, on the
/// compressed operator (products alias at the Nyquist edge otherwise).
pub fn blowup_probe(a: &Coefficient, params: &BlowupParams) -> Result<BlowupReport> {
    if params.sizes.len() < 2 {
        return Err(Error::InvalidParameter("blow-up probe needs at least two grid sizes".into()));
    }
    let symbol = Symbol::separable(a.clone(), Multiplier::bracket_power(params.order));
    let rows = params
        .sizes
        .iter()
        .map(|&n| {
            let grid = Grid::new(params.dim, n, params.half_length)?;
            let t = ad_d(Arc::new(Quantized::new(grid, &symbol)?), params.axis)?;
            Ok(BlowupRow { n, norm: op_norm_compressed(&t, params.order, 2.0)?.value })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = rows
        .windows(2)
        .map(|w| if w[0].norm <= ZERO_NORM { 0.0 } else { w[1].norm / w[0].norm })
        .collect();
    let growth = if ratios.contains(&0.0) {
        0.0
    } else {
        ratios.iter().map(|r| r.ln()).sum::<f64>().exp().powf(1.0 / ratios.len() as f64)
    };
    Ok(BlowupReport {
        coefficient: a.to_string(),
        params: params.clone(),
        rows,
        ratios,
        growth,
        expected_growth: 2f64.powf(1.0 - params.tau),
        flagged: growth >= BLOWUP_THRESHOLD,
    })
}
