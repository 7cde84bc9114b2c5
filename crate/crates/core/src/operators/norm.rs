use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{apply_many, compose, FourierMultiplier, LinearOperator, Multiplication, Operator};
use crate::error::{Error, Result};
use crate::grid::{lp_norm, Grid, GridFunction, C64};
use crate::spaces::smooth_step;

/// Largest node count for which an operator is materialized and its norm
/// taken from a dense SVD.
pub const DENSE_LIMIT: usize = 512;
pub const POWER_ITERATION_LIMIT: usize = 500;
const POWER_TOLERANCE: f64 = 1e-11;
const PROBE_COUNT: usize = 64;
const SEED: u64 = 0x5eed_0001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    DenseSvd,
    Lanczos,
    Probes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub method: NormMethod,
    /// Probe-based estimates only bound the norm from below.
    pub lower_bound: bool,
    pub iterations: usize,
}

/// Matrix of `op` acting on node values, built column by column.
pub fn materialize(op: &dyn LinearOperator) -> Result<DMatrix<C64>> {
    let grid = *op.grid();
    let len = grid.len();
    let units: Vec<GridFunction> = (0..len)
        .map(|l| {
            let mut v = vec![C64::new(0.0, 0.0); len];
            v[l] = C64::new(1.0, 0.0);
            GridFunction::from_parts(grid, v, false)
        })
        .collect();
    let cols = apply_many(op, &units)?;
    Ok(DMatrix::from_fn(len, len, |j, l| cols[l].values()[j]))
}

/// `‖T‖` as a map `H^{s_from}_q → L^q`, i.e. the norm of `T Λ^{-s_from}` on `L^q`.
pub fn op_norm(t: &Operator, s_from: f64, q: f64) -> Result<NormEstimate> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidParameter(format!("q must lie in [1, ∞], got {q}")));
    }
    let grid = *t.grid();
    let s = if s_from == 0.0 {
        t.clone()
    } else {
        compose(vec![t.clone(), Arc::new(FourierMultiplier::bessel(grid, -s_from))])?
    };
    if q != 2.0 {
        return probe_norm(s.as_ref(), q);
    }
    if grid.len() <= DENSE_LIMIT || !s.has_adjoint() {
        let m = materialize(s.as_ref())?;
        let value = m.singular_values().iter().cloned().fold(0.0, f64::max);
        return Ok(NormEstimate { value, method: NormMethod::DenseSvd, lower_bound: false, iterations: 0 });
    }
    lanczos(s.as_ref())
}

fn random_function(grid: Grid, rng: &mut ChaCha8Rng) -> GridFunction {
    let values = (0..grid.len())
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    GridFunction::from_parts(grid, values, false)
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Lanczos on `S*S` with full reorthogonalization; `σ_max = √θ_max`.
fn lanczos(s: &dyn LinearOperator) -> Result<NormEstimate> {
    let grid = *s.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = random_function(grid, &mut rng).into_values();
    let nrm = dot(&start, &start).re.sqrt();
    let mut basis: Vec<Vec<C64>> = vec![start.iter().map(|v| v / nrm).collect()];
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    let mut previous = 0.0;
    let limit = POWER_ITERATION_LIMIT.min(grid.len());
    for it in 1..=limit {
        let q = GridFunction::from_parts(grid, basis[it - 1].clone(), false);
        let mut w = s.apply_adjoint(&s.apply(&q)?)?.into_values();
        alphas.push(dot(&basis[it - 1], &w).re);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let beta = dot(&w, &w).re.sqrt();
        let theta = top_ritz_value(&alphas, &betas);
        let done = beta <= 1e-13 * theta.max(f64::MIN_POSITIVE) || it == grid.len();
        if done || (theta - previous).abs() <= POWER_TOLERANCE * theta {
            return Ok(NormEstimate {
                value: theta.max(0.0).sqrt(),
                method: NormMethod::Lanczos,
                lower_bound: false,
                iterations: it,
            });
        }
        previous = theta;
        betas.push(beta);
        basis.push(w.iter().map(|v| v / beta).collect());
    }
    Err(Error::NonConvergence(POWER_ITERATION_LIMIT))
}

fn top_ritz_value(alphas: &[f64], betas: &[f64]) -> f64 {
    let k = alphas.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    t.symmetric_eigenvalues().iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Multiplies `u` by a window that vanishes at the box edge when more than
/// `1e-10` of its mass sits in the outer eighth of the box.
pub fn boundary_taper(u: &GridFunction) -> GridFunction {
    let l = u.grid().half_length;
    if u.wraparound_mass(l / 8.0) <= 1e-10 {
        return u.clone();
    }
    u.multiply_by(|x| C64::new(x.iter().map(|c| 1.0 - smooth_step((c.abs() / l - 0.75) / 0.25)).product(), 0.0))
}

fn probe_norm(s: &dyn LinearOperator, q: f64) -> Result<NormEstimate> {
    let grid = *s.grid();
    let dim = grid.dim;
    let l = grid.half_length;
    let kmax = (grid.n / 4) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let probes: Vec<GridFunction> = (0..PROBE_COUNT)
        .map(|_| {
            let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-l / 2.0..l / 2.0)).collect();
            let k: Vec<f64> = (0..dim).map(|_| rng.random_range(-kmax..=kmax) as f64 * grid.freq_spacing()).collect();
            let width = rng.random_range(0.5..2.0);
            let p = GridFunction::from_fn(grid, |x| {
                let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
                let ph: f64 = x.iter().zip(&k).map(|(a, b)| a * b).sum();
                C64::from_polar((-r2 / (2.0 * width * width)).exp(), ph)
            });
            boundary_taper(&p)
        })
        .collect();
    let images = apply_many(s, &probes)?;
    let ratio = |u: &GridFunction, v: &GridFunction| -> Result<f64> {
        let d = lp_norm(u, q)?;
        Ok(if d == 0.0 { 0.0 } else { lp_norm(v, q)? / d })
    };
    let mut scored: Vec<(f64, usize)> =
        (0..PROBE_COUNT).map(|i| Ok((ratio(&probes[i], &images[i])?, i))).collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut best, first) = scored[0];
    let (mut u, mut v) = (probes[first].clone(), images[first].clone());
    for &(_, i) in &scored[1..] {
        for sign in [1.0, -1.0] {
            let c = C64::new(sign, 0.0);
            let cu = u.zip_with(&probes[i], |a, b| a + c * b)?;
            let cv = v.zip_with(&images[i], |a, b| a + c * b)?;
            let r = ratio(&cu, &cv)?;
            if r > best {
                best = r;
                u = cu;
                v = cv;
            }
        }
    }
    Ok(NormEstimate { value: best, method: NormMethod::Probes, lower_bound: true, iterations: PROBE_COUNT })
}

/// Spatial window, 1 on `|x| ≤ L/4` and 0 from `|x| = L/2` on.
fn spatial_window(grid: Grid) -> Multiplication {
    let l = grid.half_length;
    Multiplication::from_fn(grid, "theta_x", move |x| {
        C64::new(x.iter().map(|c| 1.0 - smooth_step((c.abs() / l - 0.25) / 0.25)).product(), 0.0)
    })
}

/// Frequency window, 1 on `|ξ| ≤ ξ_max/2` and 0 from `3ξ_max/4` on.
fn frequency_window(grid: Grid) -> FourierMultiplier {
    let m = grid.nyquist();
    FourierMultiplier::from_fn(grid, "theta_xi", move |xi| {
        C64::new(xi.iter().map(|c| 1.0 - smooth_step((c.abs() / m - 0.5) / 0.25)).product(), 0.0)
    })
}

/// `Θ_ξ(D) Θ_x · T · Θ_ξ(D) Θ_x`: restricts `T` to the part of phase space
/// the grid resolves, away from the periodic seam and the Nyquist edge.
pub fn compressed(t: &Operator) -> Result<Operator> {
    let grid = *t.grid();
    let (x, xi): (Operator, Operator) = (Arc::new(spatial_window(grid)), Arc::new(frequency_window(grid)));
    compose(vec![xi.clone(), x.clone(), t.clone(), xi, x])
}

pub fn op_norm_compressed(t: &Operator, s_from: f64, q: f64) -> Result<NormEstimate> {
    op_norm(&compressed(t)?, s_from, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{Identity, Quantized};
    use crate::symbols::Symbol;

    #[test]
    fn identity_and_bessel_norms() {
        let g = Grid::new(1, 32, 4.0).unwrap();
        let id: Operator = Arc::new(Identity::new(g));
        let n = op_norm(&id, 0.0, 2.0).unwrap();
        assert!((n.value - 1.0).abs() < 1e-12);
        assert_eq!(n.method, NormMethod::DenseSvd);
        // ‖I‖_{H^{-1} → L²} = max ⟨ξ⟩ = ⟨ξ_max⟩
        let xmax = g.nyquist();
        let n = op_norm(&id, -1.0, 2.0).unwrap();
        assert!((n.value - (1.0 + xmax * xmax).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn lanczos_agrees_with_svd() {
        let g = Grid::new(1, 1024, 40.0).unwrap();
        let t: Operator = Arc::new(crate::operators::Multiplication::from_fn(g, "m", |x| {
            C64::new(1.0 + 0.5 * (-x[0] * x[0]).exp(), 0.0)
        }));
        let n = op_norm(&t, 0.0, 2.0).unwrap();
        assert_eq!(n.method, NormMethod::Lanczos);
        assert!((n.value - 1.5).abs() < 1e-3, "{}", n.value);
        let small = Grid::new(1, 64, 4.0).unwrap();
        let q: Operator = Arc::new(Quantized::new(small, &Symbol::sin_coeff(-1.0)).unwrap());
        let dense = op_norm(&q, 0.0, 2.0).unwrap().value;
        let power = lanczos(q.as_ref()).unwrap().value;
        assert!((dense - power).abs() < 1e-6 * dense);
    }

    #[test]
    fn probes_bound_from_below() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let t: Operator = Arc::new(Quantized::new(g, &Symbol::sin_coeff(0.0)).unwrap());
        let p = op_norm(&t, 0.0, 3.0).unwrap();
        assert!(p.lower_bound);
        assert!(p.value > 0.5 && p.value <= 1.0 + 1e-9, "{}", p.value);
    }
}
