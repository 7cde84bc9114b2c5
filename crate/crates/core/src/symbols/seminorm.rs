use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Symbol, SymbolTable};
use crate::error::{Error, Result};
use crate::grid::{bracket, partial, Grid, C64};
use crate::spaces::{fit_slope, zygmund_value};

/// Slack on fitted decay exponents in class verdicts.
pub const CLASS_SLACK: f64 = 0.15;

/// Seminorms below this fraction of `sup |p|` are rounding noise.
const ROUNDOFF_FLOOR: f64 = 1e-10;

/// Largest derivative order measured in ξ.
pub const MAX_MEASURED_ORDER: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassParams {
    pub order: f64,
    pub rho: f64,
    pub tau: f64,
    pub budget: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormEntry {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub value: f64,
    pub exponent: Option<f64>,
    pub residual: Option<f64>,
    /// Exponent allowed by the class, `m - ρ|α|`.
    pub allowed: f64,
    pub fits: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormTable {
    pub symbol: String,
    pub params: ClassParams,
    pub entries: Vec<SeminormEntry>,
    pub verdict: bool,
}

pub(crate) fn multi_indices_up_to(dim: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for order in 0..=k {
        if dim == 1 {
            out.push(vec![order]);
        } else {
            for a in (0..=order).rev() {
                out.push(vec![a, order - a]);
            }
        }
    }
    out
}

fn stencil(order: u32) -> Result<(&'static [f64], usize)> {
    Ok(match order {
        0 => (&[1.0], 0),
        1 => (&[-0.5, 0.0, 0.5], 1),
        2 => (&[1.0, -2.0, 1.0], 1),
        3 => (&[-0.5, 1.0, 0.0, -1.0, 0.5], 2),
        4 => (&[1.0, -4.0, 6.0, -4.0, 1.0], 2),
        _ => {
            return Err(Error::BudgetExceeded { requested: order, available: MAX_MEASURED_ORDER })
        }
    })
}

/// Centered finite differences `∂_ξ^α` on the frequency lattice (step `Δξ`).
/// Returns the differenced table and a mask of frequency nodes away from the
/// boundary ring where the stencil fits.
pub fn xi_difference(table: &SymbolTable, alpha: &[u32]) -> Result<(Vec<C64>, Vec<bool>)> {
    let grid = *table.grid();
    let len = grid.len();
    let n = grid.n;
    let step = grid.freq_spacing();
    let mut values = table.values().to_vec();
    let mut mask = vec![true; len];
    for (axis, &order) in alpha.iter().enumerate().take(grid.dim) {
        if order == 0 {
            continue;
        }
        let (weights, width) = stencil(order)?;
        let scale = step.powi(order as i32);
        let mut next = vec![C64::new(0.0, 0.0); values.len()];
        for k in 0..len {
            let idx = grid.unflatten(k);
            if idx[axis] < width || idx[axis] + width >= n {
                mask[k] = false;
                continue;
            }
            for j in 0..len {
                let mut acc = C64::new(0.0, 0.0);
                for (s, &w) in weights.iter().enumerate() {
                    let mut shifted = idx;
                    shifted[axis] = idx[axis] + s - width;
                    acc += values[j * len + grid.flatten(shifted)] * w;
                }
                next[j * len + k] = acc / scale;
            }
        }
        values = next;
    }
    Ok((values, mask))
}

fn x_partial(table_values: &[C64], grid: &Grid, beta: &[u32]) -> Result<Vec<C64>> {
    if beta.iter().all(|&b| b == 0) {
        return Ok(table_values.to_vec());
    }
    let len = grid.len();
    let slabs: Vec<Vec<C64>> = (0..len)
        .into_par_iter()
        .map(|k| {
            let slab = crate::grid::GridFunction::from_parts(
                *grid,
                (0..len).map(|j| table_values[j * len + k]).collect(),
                false,
            );
            partial(&slab, beta).map(|d| d.into_values())
        })
        .collect::<Result<_>>()?;
    let mut out = vec![C64::new(0.0, 0.0); len * len];
    for (k, slab) in slabs.iter().enumerate() {
        for (j, v) in slab.iter().enumerate() {
            out[j * len + k] = *v;
        }
    }
    Ok(out)
}

/// `|p|^{(m)}_k = max_{|α|,|β| ≤ k} sup |∂_ξ^α ∂_x^β p| ⟨ξ⟩^{-(m - ρ|α| + δ|β|)}`.
pub fn smooth_seminorm(p: &Symbol, grid: &Grid, k: u32, m: f64, rho: f64, delta: f64) -> Result<f64> {
    let available = p.class.budget.unwrap_or(MAX_MEASURED_ORDER).min(MAX_MEASURED_ORDER);
    if k > available {
        return Err(Error::BudgetExceeded { requested: k, available });
    }
    let table = p.table(grid)?;
    let len = grid.len();
    let brackets: Vec<f64> = (0..len).map(|i| bracket(&grid.frequency(i)[..grid.dim])).collect();
    let mut best = 0.0f64;
    for beta in multi_indices_up_to(grid.dim, k) {
        let dx = SymbolTable::new(*grid, x_partial(table.values(), grid, &beta)?)?;
        let b: f64 = beta.iter().sum::<u32>() as f64;
        for alpha in multi_indices_up_to(grid.dim, k) {
            let (vals, mask) = xi_difference(&dx, &alpha)?;
            let a: f64 = alpha.iter().sum::<u32>() as f64;
            let weight = -(m - rho * a + delta * b);
            for kk in (0..len).filter(|&kk| mask[kk]) {
                let w = brackets[kk].powf(weight);
                for j in 0..len {
                    best = best.max(vals[j * len + kk].norm() * w);
                }
            }
        }
    }
    Ok(best)
}

/// Measures `sup_ξ ‖∂_ξ^α p(·, ξ)‖_{C^τ_*} ⟨ξ⟩^{-(m - ρ|α|)}` for `|α| ≤ M` and
/// fits the growth exponent of `‖∂_ξ^α p(·, ξ)‖_{C^τ_*}` in `⟨ξ⟩` over dyadic shells.
pub fn hoelder_class_table(p: &Symbol, grid: &Grid, tau: f64, m: f64, rho: f64, budget: u32) -> Result<SeminormTable> {
    if budget > MAX_MEASURED_ORDER {
        return Err(Error::BudgetExceeded { requested: budget, available: MAX_MEASURED_ORDER });
    }
    let table = p.table(grid)?;
    let floor = ROUNDOFF_FLOOR * table.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let len = grid.len();
    let freq: Vec<[f64; 2]> = grid.frequencies();
    let mut entries = Vec::new();
    for alpha in multi_indices_up_to(grid.dim, budget) {
        let a: f64 = alpha.iter().sum::<u32>() as f64;
        let allowed = m - rho * a;
        let (vals, mask) = xi_difference(&table, &alpha)?;
        let norms: Vec<Option<(f64, f64)>> = (0..len)
            .into_par_iter()
            .map(|k| {
                if !mask[k] {
                    return Ok(None);
                }
                let slab = crate::grid::GridFunction::from_parts(
                    *grid,
                    (0..len).map(|j| vals[j * len + k]).collect(),
                    false,
                );
                let xi = &freq[k][..grid.dim];
                Ok(Some((zygmund_value(&slab, tau)?, bracket(xi))))
            })
            .collect::<Result<_>>()?;
        let value = norms
            .iter()
            .flatten()
            .map(|(z, b)| z * b.powf(-allowed))
            .fold(0.0, f64::max);
        let (exponent, residual) = fit_shells(&norms, floor);
        let fits = value.is_finite() && exponent.is_none_or(|e| e <= allowed + CLASS_SLACK);
        entries.push(SeminormEntry {
            alpha: alpha.clone(),
            beta: vec![0; grid.dim],
            value,
            exponent,
            residual,
            allowed,
            fits,
        });
    }
    let verdict = entries.iter().all(|e| e.fits);
    Ok(SeminormTable {
        symbol: p.label.clone(),
        params: ClassParams { order: m, rho, tau, budget },
        entries,
        verdict,
    })
}

/// Least-squares slope of `log(shell max)` against `log⟨ξ⟩` over shells
/// `2^s ≤ |ξ| < 2^{s+1}`; norms at or below `floor` count as zero and
/// numerically zero shells are ignored.
fn fit_shells(norms: &[Option<(f64, f64)>], floor: f64) -> (Option<f64>, Option<f64>) {
    let overall = norms.iter().flatten().map(|(z, _)| *z).fold(0.0, f64::max);
    if overall <= floor.max(1e-300) {
        return (None, None);
    }
    let mut shells: Vec<(f64, f64)> = Vec::new();
    let mut shell_of = std::collections::BTreeMap::new();
    for &(z, b) in norms.iter().flatten() {
        let r = (b * b - 1.0).max(0.0).sqrt();
        if r < 1.0 {
            continue;
        }
        let s = r.log2().floor() as i64;
        let e = shell_of.entry(s).or_insert((0.0f64, b));
        if z > e.0 {
            *e = (z, b);
        }
    }
    // the first shell is pre-asymptotic; drop it when two others remain
    let live: Vec<(i64, f64, f64)> =
        shell_of.into_iter().filter(|(_, (z, _))| *z > (1e-12 * overall).max(floor)).map(|(s, (z, b))| (s, z, b)).collect();
    let skip_first = live.iter().filter(|(s, _, _)| *s >= 1).count() >= 2;
    for (s, z, b) in live {
        if !(skip_first && s < 1) {
            shells.push((b.ln(), z.ln()));
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = shells.into_iter().unzip();
    match fit_slope(&xs, &ys) {
        Some((s, r)) => (Some(s), Some(r)),
        None => (None, None),
    }
}

/// `max{k ∈ ℕ₀ : τ - k > n/2}`.
pub fn example_regularity_budget(tau: f64, n: usize) -> Result<u32> {
    let half = n as f64 / 2.0;
    if !(tau > half) {
        return Err(Error::NoRegularityIndex { tau, n });
    }
    let mut k = (tau - half).floor() as i64;
    while k >= 0 && tau - k as f64 <= half {
        k -= 1;
    }
    Ok(k.max(0) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{Coefficient, Multiplier};
    use std::f64::consts::PI;

    #[test]
    fn seminorm_examples() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let one = Symbol::bracket_power(0.0);
        assert!((smooth_seminorm(&one, &g, 0, 0.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let b = Symbol::bracket_power(1.0);
        let v = smooth_seminorm(&b, &g, 2, 1.0, 1.0, 0.0).unwrap();
        assert!((1.0 - 1e-12..=1.05).contains(&v), "{v}");
        let g = Grid::new(1, 64, 8.0 * PI).unwrap();
        let s = smooth_seminorm(&Symbol::sin_coeff(1.0), &g, 1, 1.0, 1.0, 0.0).unwrap();
        assert!((s - 1.0).abs() <= 0.05, "{s}");
    }

    #[test]
    fn seminorm_monotone_in_k() {
        let g = Grid::new(1, 32, 4.0 * PI).unwrap();
        let p = Symbol::sin_coeff(-1.0);
        let vals: Vec<f64> = (0..=3).map(|k| smooth_seminorm(&p, &g, k, -1.0, 1.0, 0.0).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0]), "{vals:?}");
    }

    #[test]
    fn budget_is_enforced() {
        let g = Grid::new(1, 16, 4.0).unwrap();
        let p = Symbol::bracket_power(0.0).with_class(crate::symbols::SymbolClass {
            budget: Some(1),
            ..crate::symbols::SymbolClass::smooth(0.0)
        });
        assert!(matches!(
            smooth_seminorm(&p, &g, 2, 0.0, 1.0, 0.0),
            Err(Error::BudgetExceeded { requested: 2, available: 1 })
        ));
    }

    #[test]
    fn class_table_examples() {
        let g = Grid::new(1, 128, PI).unwrap();
        let w = Symbol::weierstrass_times_bracket(0.5, 1.0, None);
        let t = hoelder_class_table(&w, &g, 0.5, 1.0, 1.0, 2).unwrap();
        assert!(t.verdict, "{t:#?}");
        let wz = zygmund_value(
            &crate::grid::GridFunction::from_fn(g, |x| {
                Coefficient::Weierstrass { tau: 0.5, terms: None }.expand(&g).value(x)
            }),
            0.5,
        )
        .unwrap();
        assert!((t.entries[0].value - wz).abs() < 1e-9);
        let wrong = hoelder_class_table(&w, &g, 0.5, 0.0, 1.0, 2).unwrap();
        assert!(!wrong.verdict);
        let e0 = wrong.entries[0].exponent.unwrap();
        assert!((e0 - 1.0).abs() < 0.1, "{e0}");

        let one = hoelder_class_table(&Symbol::bracket_power(0.0), &g, 0.5, 0.0, 1.0, 2).unwrap();
        assert!((one.entries[0].value - 1.0).abs() < 1e-12);
        assert!(one.entries[1..].iter().all(|e| e.value == 0.0));
        assert!(one.verdict);
    }

    #[test]
    fn separable_tables_factor() {
        let g = Grid::new(1, 64, PI).unwrap();
        let a = Coefficient::Weierstrass { tau: 0.5, terms: None };
        let q = Multiplier::bracket_power(-1.0);
        let p = Symbol::separable(a.clone(), q.clone());
        let t = hoelder_class_table(&p, &g, 0.5, -1.0, 1.0, 2).unwrap();
        let az = zygmund_value(&crate::grid::GridFunction::from_fn(g, |x| a.expand(&g).value(x)), 0.5).unwrap();
        let qt = Symbol::separable(Coefficient::One, q).table(&g).unwrap();
        for e in &t.entries {
            let (vals, mask) = xi_difference(&qt, &e.alpha).unwrap();
            let allowed = -1.0 - e.alpha[0] as f64;
            let sup = (0..g.len())
                .filter(|&k| mask[k])
                .map(|k| vals[k].norm() * bracket(&[g.frequency(k)[0]]).powf(-allowed))
                .fold(0.0, f64::max);
            assert!((e.value - az * sup).abs() <= 1e-6, "{e:?}");
        }
    }

    #[test]
    fn regularity_budget_examples() {
        // 2.5 - 2 = 0.5 is not > 1/2, so the maximum is 1.
        assert_eq!(example_regularity_budget(2.5, 1).unwrap(), 1);
        assert_eq!(example_regularity_budget(2.6, 1).unwrap(), 2);
        assert_eq!(example_regularity_budget(0.6, 1).unwrap(), 0);
        assert!(example_regularity_budget(0.4, 1).is_err());
        assert_eq!(example_regularity_budget(3.0, 2).unwrap(), 1);
    }
}
