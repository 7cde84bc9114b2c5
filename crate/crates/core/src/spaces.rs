//! Function-space norms: Hölder–Zygmund via a dyadic partition of unity,
//! Hölder `C^{m,s}` by grid-pair maximization, Bessel potential `H^s_q`, and
//! the order-reducing multipliers `Λ^m = ⟨D⟩^m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    apply_multiplier, apply_multiplier_table, bracket, forward_transform, inverse_transform,
    lp_norm, modulate, partial, Grid, GridFunction, C64,
};

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    fn f(t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (-1.0 / t).exp()
        }
    }
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = f(t);
        a / (a + f(1.0 - t))
    }
}

/// Radial profile `ψ`: 1 on `|ξ| ≤ 1`, 0 on `|ξ| ≥ 2`.
pub fn profile(r: f64) -> f64 {
    1.0 - smooth_step(r - 1.0)
}

pub const PROFILE_LABEL: &str =
    "psi(r) = 1 - S(r - 1), S(t) = f(t) / (f(t) + f(1 - t)), f(t) = exp(-1/t)";

/// Pieces `φ_0 = ψ`, `φ_j = ψ(2^{-j}·) - ψ(2^{1-j}·)` sampled on a frequency lattice.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: Grid,
    pieces: Vec<Vec<f64>>,
}

impl DyadicPartition {
    pub fn new(grid: Grid) -> Self {
        let radii: Vec<f64> = (0..grid.len())
            .map(|i| radius(&grid.frequency(i)[..grid.dim]))
            .collect();
        let rmax = grid.max_radial_frequency();
        let j_max = if rmax <= 1.0 { 0 } else { rmax.log2().ceil() as usize };
        let mut pieces = Vec::with_capacity(j_max + 1);
        pieces.push(radii.iter().map(|&r| profile(r)).collect());
        for j in 1..=j_max {
            let s = 0.5f64.powi(j as i32);
            pieces.push(radii.iter().map(|&r| profile(s * r) - profile(2.0 * s * r)).collect());
        }
        Self { grid, pieces }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_max(&self) -> usize {
        self.pieces.len() - 1
    }

    pub fn piece(&self, j: usize) -> &[f64] {
        &self.pieces[j]
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    /// The band `𝓕^{-1}[φ_j f̂]`.
    pub fn band(&self, fhat: &GridFunction, j: usize) -> GridFunction {
        let values = fhat.values().iter().zip(&self.pieces[j]).map(|(a, &p)| a * p).collect();
        crate::grid::inverse_unchecked(&GridFunction::from_parts(*fhat.grid(), values, true))
    }
}

fn radius(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceTag {
    Zygmund,
    Hoelder,
    Bessel,
    Lebesgue,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandEntry {
    pub j: usize,
    pub weight: f64,
    pub sup: f64,
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub coarse_n: usize,
    pub coarse_value: f64,
    pub fine_n: usize,
    pub fine_value: f64,
    pub change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub space: SpaceTag,
    pub params: NormParams,
    pub grid: Grid,
    pub profile: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement: Option<Refinement>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bands: Vec<BandEntry>,
    /// Set when the value is a lower bound (grid-pair Hölder seminorms).
    pub lower_bound: bool,
}

/// Restriction to every second node of each axis, same box.
pub fn decimate(f: &GridFunction) -> Result<GridFunction> {
    let grid = f.grid();
    let coarse = grid.coarsened()?;
    let values = (0..coarse.len())
        .map(|i| {
            let idx = coarse.unflatten(i);
            f.values()[grid.flatten([2 * idx[0], 2 * idx[1]])]
        })
        .collect();
    GridFunction::new(coarse, values, false)
}

fn refine_trace(f: &GridFunction, fine_value: f64, eval: impl Fn(&GridFunction) -> Result<f64>) -> Option<Refinement> {
    let coarse = decimate(f).ok()?;
    let coarse_value = eval(&coarse).ok()?;
    Some(Refinement {
        coarse_n: coarse.grid().n,
        coarse_value,
        fine_n: f.grid().n,
        fine_value,
        change: fine_value - coarse_value,
    })
}

fn zygmund_bands(f: &GridFunction, tau: f64) -> Result<Vec<BandEntry>> {
    let partition = DyadicPartition::new(*f.grid());
    let fhat = forward_transform(f)?;
    Ok((0..=partition.j_max())
        .map(|j| {
            let sup = partition.band(&fhat, j).sup_norm();
            let weight = 2f64.powf(j as f64 * tau);
            BandEntry { j, weight, sup, weighted: weight * sup }
        })
        .collect())
}

/// `sup_j 2^{jτ} ‖𝓕^{-1}[φ_j f̂]‖_∞`.
pub fn zygmund_value(f: &GridFunction, tau: f64) -> Result<f64> {
    Ok(zygmund_bands(f, tau)?.iter().map(|b| b.weighted).fold(0.0, f64::max))
}

pub fn zygmund_norm(f: &GridFunction, tau: f64) -> Result<NormReport> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    let bands = zygmund_bands(f, tau)?;
    let value = bands.iter().map(|b| b.weighted).fold(0.0, f64::max);
    Ok(NormReport {
        value,
        space: SpaceTag::Zygmund,
        params: NormParams { tau: Some(tau), ..Default::default() },
        grid: *f.grid(),
        profile: PROFILE_LABEL.to_string(),
        refinement: refine_trace(f, value, |c| zygmund_value(c, tau)),
        bands,
        lower_bound: false,
    })
}

fn multi_indices(dim: usize, order: u32) -> Vec<Vec<u32>> {
    if dim == 1 {
        vec![vec![order]]
    } else {
        (0..=order).map(|a| vec![a, order - a]).collect()
    }
}

/// Largest `|g(x) - g(y)| / |x - y|^s` over node pairs at distance `≤ 1`,
/// plus a decimated sample of far pairs.
fn hoelder_seminorm(g: &GridFunction, s: f64) -> f64 {
    let grid = g.grid();
    let h = grid.spacing();
    let n = grid.n as i64;
    let reach = ((1.0 / h).floor() as i64).max(1);
    let vals = g.values();
    let mut best = 0.0f64;
    let mut consider = |i: usize, j: usize, dist: f64| {
        let q = (vals[i] - vals[j]).norm() / dist.powf(s);
        if q > best {
            best = q;
        }
    };
    let offsets: Vec<[i64; 2]> = if grid.dim == 1 {
        (1..=reach).map(|d| [d, 0]).collect()
    } else {
        let mut v = Vec::new();
        for a in 0..=reach {
            for b in -reach..=reach {
                if (a == 0 && b <= 0) || ((a * a + b * b) as f64).sqrt() * h > 1.0 + 1e-12 {
                    continue;
                }
                v.push([a, b]);
            }
        }
        v
    };
    for i in 0..grid.len() {
        let idx = grid.unflatten(i);
        for off in &offsets {
            let a = idx[0] as i64 + off[0];
            let b = idx[1] as i64 + off[1];
            if a >= n || (grid.dim == 2 && (b < 0 || b >= n)) {
                continue;
            }
            let j = grid.flatten([a as usize, b.max(0) as usize]);
            let dist = h * ((off[0] * off[0] + off[1] * off[1]) as f64).sqrt();
            consider(i, j, dist);
        }
    }
    let stride = (grid.n / 32).max(1);
    let sample: Vec<usize> = (0..grid.len())
        .filter(|&i| grid.unflatten(i).iter().take(grid.dim).all(|c| c % stride == 0))
        .collect();
    for (p, &i) in sample.iter().enumerate() {
        for &j in &sample[p + 1..] {
            let (xi, xj) = (grid.point(i), grid.point(j));
            let dist = ((xi[0] - xj[0]).powi(2) + (xi[1] - xj[1]).powi(2)).sqrt();
            if dist > 1.0 {
                consider(i, j, dist);
            }
        }
    }
    best
}

fn hoelder_value(f: &GridFunction, m: u32, s: f64) -> Result<f64> {
    let dim = f.grid().dim;
    let mut sup = 0.0f64;
    let mut semi = 0.0f64;
    for order in 0..=m {
        for alpha in multi_indices(dim, order) {
            let d = partial(f, &alpha)?;
            sup = sup.max(d.sup_norm());
            if order == m {
                semi = semi.max(hoelder_seminorm(&d, s));
            }
        }
    }
    Ok(sup + semi)
}

/// `max_{|α|≤m} sup|∂^α f| + max_{|α|=m} [∂^α f]_s`, a lower bound on the `C^{m,s}` norm.
pub fn hoelder_norm(f: &GridFunction, m: u32, s: f64) -> Result<NormReport> {
    if m > 4 {
        return Err(Error::BudgetExceeded { requested: m, available: 4 });
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter(format!("s must lie in (0, 1], got {s}")));
    }
    let value = hoelder_value(f, m, s)?;
    Ok(NormReport {
        value,
        space: SpaceTag::Hoelder,
        params: NormParams { m: Some(m as f64), s: Some(s), ..Default::default() },
        grid: *f.grid(),
        profile: PROFILE_LABEL.to_string(),
        refinement: refine_trace(f, value, |c| hoelder_value(c, m, s)),
        bands: Vec::new(),
        lower_bound: true,
    })
}

/// `Λ^m f = ⟨D⟩^m f`.
pub fn order_reduce(f: &GridFunction, m: f64) -> Result<GridFunction> {
    if m == 0.0 {
        return Ok(f.clone());
    }
    apply_multiplier(f, |xi| C64::new(bracket(xi).powf(m), 0.0))
}

/// Lattice values of `⟨ξ⟩^m`.
pub fn bracket_table(grid: &Grid, m: f64) -> Vec<C64> {
    (0..grid.len())
        .map(|i| C64::new(bracket(&grid.frequency(i)[..grid.dim]).powf(m), 0.0))
        .collect()
}

fn bessel_value(f: &GridFunction, s: f64, q: f64) -> Result<f64> {
    if s == 0.0 {
        return lp_norm(f, q);
    }
    lp_norm(&apply_multiplier_table(f, &bracket_table(f.grid(), s)), q)
}

/// `‖⟨D⟩^s f‖_{L^q}`.
pub fn bessel_norm(f: &GridFunction, s: f64, q: f64) -> Result<NormReport> {
    let value = bessel_value(f, s, q)?;
    Ok(NormReport {
        value,
        space: SpaceTag::Bessel,
        params: NormParams { s: Some(s), q: Some(q), ..Default::default() },
        grid: *f.grid(),
        profile: PROFILE_LABEL.to_string(),
        refinement: refine_trace(f, value, |c| bessel_value(c, s, q)),
        bands: Vec::new(),
        lower_bound: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthSpace {
    /// `C^{m̃,τ}`
    Hoelder,
    /// `C^{m̃+τ}_*`
    Zygmund,
    /// `H^{m̃}_2`
    Bessel,
}

impl GrowthSpace {
    /// Growth exponent allowed for `‖e_ξ f‖_X ≲ ⟨ξ⟩^N ‖f‖_X`.
    pub fn exponent_bound(self, mtilde: u32) -> f64 {
        let m = mtilde as f64;
        match self {
            GrowthSpace::Zygmund => m + 2.0,
            GrowthSpace::Hoelder => m + 1.0,
            GrowthSpace::Bessel => m,
        }
    }
}

/// Slack added to the exponent bound when judging a least-squares fit.
pub const GROWTH_SLACK: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub xi: Vec<f64>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub space: GrowthSpace,
    pub mtilde: u32,
    pub tau: f64,
    pub rows: Vec<GrowthRow>,
    pub exponent: Option<f64>,
    pub bound: f64,
    pub passes: bool,
}

/// Least-squares slope of `ys` against `xs`, with the residual norm.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum::<f64>()
        .sqrt();
    Some((slope, resid))
}

/// Measures `‖e_ξ f‖_X / ‖f‖_X` over `xis` and fits the growth exponent in `⟨ξ⟩`.
pub fn modulation_growth_check(
    f: &GridFunction,
    space: GrowthSpace,
    mtilde: u32,
    tau: f64,
    xis: &[Vec<f64>],
) -> Result<GrowthTable> {
    if xis.is_empty() {
        return Err(Error::EmptyFrequencyList);
    }
    let norm = |u: &GridFunction| -> Result<f64> {
        match space {
            GrowthSpace::Hoelder => hoelder_value(u, mtilde, tau),
            GrowthSpace::Zygmund => zygmund_value(u, mtilde as f64 + tau),
            GrowthSpace::Bessel => bessel_value(u, mtilde as f64, 2.0),
        }
    };
    let base = norm(f)?;
    if base == 0.0 {
        return Err(Error::InvalidParameter("function has zero norm".into()));
    }
    let mut rows = Vec::with_capacity(xis.len());
    for xi in xis {
        let ratio = norm(&modulate(f, xi)?)? / base;
        rows.push(GrowthRow { xi: xi.clone(), ratio });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.xi.iter().any(|v| *v != 0.0))
        .map(|r| (bracket(&r.xi).ln(), r.ratio.ln()))
        .unzip();
    let exponent = fit_slope(&xs, &ys).map(|(s, _)| s);
    let bound = space.exponent_bound(mtilde);
    Ok(GrowthTable {
        space,
        mtilde,
        tau,
        rows,
        exponent,
        bound,
        passes: exponent.is_none_or(|e| e <= bound + GROWTH_SLACK),
    })
}

/// Inverse transform helper used by tests and reports.
pub fn band_limited(grid: Grid, coefficients: &[(f64, C64)]) -> Result<GridFunction> {
    let mut spec = vec![C64::new(0.0, 0.0); grid.len()];
    for &(xi, c) in coefficients {
        let k = grid.frequency_index(&[xi]).ok_or(Error::OffLattice(vec![xi]))?;
        spec[k] += c;
    }
    inverse_transform(&GridFunction::new(grid, spec, true)?)
}
