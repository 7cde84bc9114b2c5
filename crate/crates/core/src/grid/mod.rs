//! Truncated-box grids, discrete Fourier transforms and pointwise primitives.
//!
//! A [`Grid`] samples the box `[-L, L)^dim` with `N` points per axis. Frequency
//! nodes are `ξ_k = kπ/L` for `k = -N/2..N/2-1` and spectral arrays are stored
//! in that centered order. The forward transform is the Riemann sum
//! `û(ξ) = h^dim Σ e^{-ix·ξ} u(x)`, the inverse carries the weight
//! `(Δξ/2π)^dim`, so continuous formulas transcribe literally.

mod fft;
pub mod io;
pub(crate) use fft::forward_raw;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Coordinates of a node; only the first `dim` entries are meaningful.
pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub n: usize,
    pub half_length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, half_length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half length must be positive, got {half_length}"
            )));
        }
        Ok(Self { dim, n, half_length })
    }

    /// Default grid for the given dimension: `N=64, L=8π` in 1-d, `N=32, L=4π` in 2-d.
    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, 64, 8.0 * PI),
            2 => Self::new(2, 32, 4.0 * PI),
            _ => Err(Error::InvalidGrid(format!("dim must be 1 or 2, got {dim}"))),
        }
    }

    /// Number of nodes, `N^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn freq_spacing(&self) -> f64 {
        PI / self.half_length
    }

    /// Largest frequency magnitude on an axis, `π/h` (attained by the unpaired node).
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Largest radial frequency over the lattice.
    pub fn max_radial_frequency(&self) -> f64 {
        self.nyquist() * (self.dim as f64).sqrt()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Spectral measure `(Δξ/2π)^dim`, equal to `(2L)^{-dim}`.
    pub fn spectral_weight(&self) -> f64 {
        (self.freq_spacing() / (2.0 * PI)).powi(self.dim as i32)
    }

    pub fn axis_nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n).map(|j| -self.half_length + j as f64 * h).collect()
    }

    pub fn axis_frequencies(&self) -> Vec<f64> {
        let dxi = self.freq_spacing();
        let half = (self.n / 2) as f64;
        (0..self.n).map(|k| (k as f64 - half) * dxi).collect()
    }

    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.n, flat % self.n]
        }
    }

    pub fn flatten(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.n + idx[1]
        }
    }

    pub fn point(&self, flat: usize) -> Point {
        let h = self.spacing();
        let idx = self.unflatten(flat);
        let mut p = [0.0; 2];
        for a in 0..self.dim {
            p[a] = -self.half_length + idx[a] as f64 * h;
        }
        p
    }

    pub fn frequency(&self, flat: usize) -> Point {
        let dxi = self.freq_spacing();
        let half = (self.n / 2) as f64;
        let idx = self.unflatten(flat);
        let mut p = [0.0; 2];
        for a in 0..self.dim {
            p[a] = (idx[a] as f64 - half) * dxi;
        }
        p
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn frequencies(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.frequency(i)).collect()
    }

    /// Flat index of the frequency node `xi`, if it is one.
    pub fn frequency_index(&self, xi: &[f64]) -> Option<usize> {
        self.lattice_offsets(xi, self.freq_spacing()).and_then(|off| {
            let half = (self.n / 2) as i64;
            let mut idx = [0usize; 2];
            for a in 0..self.dim {
                let k = off[a] + half;
                if k < 0 || k >= self.n as i64 {
                    return None;
                }
                idx[a] = k as usize;
            }
            Some(self.flatten(idx))
        })
    }

    /// Flat index of the spatial node `x`, if it is one.
    pub fn node_index(&self, x: &[f64]) -> Option<usize> {
        let shifted: Vec<f64> = x.iter().map(|v| v + self.half_length).collect();
        self.lattice_offsets(&shifted, self.spacing()).and_then(|off| {
            let mut idx = [0usize; 2];
            for a in 0..self.dim {
                if off[a] < 0 || off[a] >= self.n as i64 {
                    return None;
                }
                idx[a] = off[a] as usize;
            }
            Some(self.flatten(idx))
        })
    }

    fn lattice_offsets(&self, v: &[f64], step: f64) -> Option<[i64; 2]> {
        if v.len() != self.dim {
            return None;
        }
        let mut off = [0i64; 2];
        for a in 0..self.dim {
            let t = v[a] / step;
            let r = t.round();
            if (t - r).abs() > 1e-9 * (1.0 + r.abs()) {
                return None;
            }
            off[a] = r as i64;
        }
        Some(off)
    }

    /// The grid with half as many points per axis on the same box.
    pub fn coarsened(&self) -> Result<Self> {
        Self::new(self.dim, self.n / 2, self.half_length)
    }

    /// The grid with twice as many points per axis on the same box.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.dim, self.n * 2, self.half_length)
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// `⟨v⟩ = (1 + |v|²)^{1/2}`.
pub fn bracket(v: &[f64]) -> f64 {
    (1.0 + v.iter().map(|t| t * t).sum::<f64>()).sqrt()
}

/// A complex field sampled on the nodes of a grid, or on its frequency
/// lattice when `spectral` is set. Values are row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<C64>,
    spectral: bool,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<C64>, spectral: bool) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values, spectral })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<C64>, spectral: bool) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values, spectral }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_parts(grid, vec![C64::new(0.0, 0.0); grid.len()], false)
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> C64) -> Self {
        let values = (0..grid.len())
            .map(|i| f(&grid.point(i)[..grid.dim]))
            .collect();
        Self::from_parts(grid, values, false)
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn from_spectral_fn(grid: Grid, f: impl Fn(&[f64]) -> C64) -> Self {
        let values = (0..grid.len())
            .map(|i| f(&grid.frequency(i)[..grid.dim]))
            .collect();
        Self::from_parts(grid, values, true)
    }

    /// `e^{-|x|²/2}`.
    pub fn gaussian(grid: Grid) -> Self {
        Self::from_real_fn(grid, |x| (-0.5 * x.iter().map(|t| t * t).sum::<f64>()).exp())
    }

    /// `e^{ik·x}` for a wave vector `k` of length `dim`.
    pub fn plane_wave(grid: Grid, k: &[f64]) -> Self {
        Self::from_fn(grid, |x| {
            let phase: f64 = x.iter().zip(k).map(|(a, b)| a * b).sum();
            C64::from_polar(1.0, phase)
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn is_spectral(&self) -> bool {
        self.spectral
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            Some(i) => Err(Error::NonFinite(i)),
            None => Ok(()),
        }
    }

    fn require_spatial(&self) -> Result<()> {
        if self.spectral {
            Err(Error::SpectralFlag { expected: "spatial" })
        } else {
            Ok(())
        }
    }

    fn require_spectral(&self) -> Result<()> {
        if self.spectral {
            Ok(())
        } else {
            Err(Error::SpectralFlag { expected: "spectral" })
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|&v| f(v)).collect(), self.spectral)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }

    /// Pointwise product with `f` evaluated at the nodes (or frequencies, if spectral).
    pub fn multiply_by(&self, f: impl Fn(&[f64]) -> C64) -> Self {
        let dim = self.grid.dim;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let p = if self.spectral { self.grid.frequency(i) } else { self.grid.point(i) };
                v * f(&p[..dim])
            })
            .collect();
        Self::from_parts(self.grid, values, self.spectral)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        if self.spectral != other.spectral {
            return Err(Error::SpectralFlag {
                expected: if self.spectral { "spectral" } else { "spatial" },
            });
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_parts(self.grid, values, self.spectral))
    }

    /// Discrete `L²` norm with the measure matching the flag (`dx` or `đξ`).
    pub fn l2_norm(&self) -> f64 {
        let w = if self.spectral { self.grid.spectral_weight() } else { self.grid.cell_volume() };
        (w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Fraction of the `L²` mass in the outermost `width` layer of the box.
    pub fn wraparound_mass(&self, width: f64) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let dim = self.grid.dim;
        let edge = self.grid.half_length - width;
        let outer: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.point(*i)[..dim].iter().any(|c| c.abs() >= edge))
            .map(|(_, v)| v.norm_sqr())
            .sum();
        (outer / total).sqrt()
    }
}

/// `û(ξ_k) = h^dim Σ_j e^{-ix_j·ξ_k} u(x_j)`, in centered order.
pub fn forward_transform(u: &GridFunction) -> Result<GridFunction> {
    u.require_spatial()?;
    u.check_finite()?;
    Ok(forward_unchecked(u))
}

pub(crate) fn forward_unchecked(u: &GridFunction) -> GridFunction {
    let g = u.grid;
    let values = fft::forward_centered(&u.values, g.n, g.dim, g.cell_volume());
    GridFunction::from_parts(g, values, true)
}

/// `u(x_j) = (Δξ/2π)^dim Σ_k e^{ix_j·ξ_k} û(ξ_k)`.
pub fn inverse_transform(uhat: &GridFunction) -> Result<GridFunction> {
    uhat.require_spectral()?;
    uhat.check_finite()?;
    Ok(inverse_unchecked(uhat))
}

pub(crate) fn inverse_unchecked(uhat: &GridFunction) -> GridFunction {
    let g = uhat.grid;
    let values = fft::inverse_centered(&uhat.values, g.n, g.dim, g.spectral_weight());
    GridFunction::from_parts(g, values, false)
}

/// Applies the Fourier multiplier `f(ξ)` to a spatial function.
pub fn apply_multiplier(u: &GridFunction, f: impl Fn(&[f64]) -> C64) -> Result<GridFunction> {
    u.require_spatial()?;
    Ok(inverse_unchecked(&forward_unchecked(u).multiply_by(f)))
}

/// Applies a multiplier given by its values on the frequency lattice.
pub(crate) fn apply_multiplier_table(u: &GridFunction, table: &[C64]) -> GridFunction {
    let mut uhat = forward_unchecked(u);
    for (v, m) in uhat.values.iter_mut().zip(table) {
        *v *= m;
    }
    inverse_unchecked(&uhat)
}

/// `e^{ix·ξ0} u(x)`; `ξ0` must be a lattice frequency.
pub fn modulate(u: &GridFunction, xi0: &[f64]) -> Result<GridFunction> {
    u.require_spatial()?;
    if u.grid.frequency_index(xi0).is_none() {
        return Err(Error::OffLattice(xi0.to_vec()));
    }
    Ok(u.multiply_by(|x| {
        let phase: f64 = x.iter().zip(xi0).map(|(a, b)| a * b).sum();
        C64::from_polar(1.0, phase)
    }))
}

/// Circular shift `g(x - y)`; `y` must be a multiple of the spacing on each axis.
pub fn translate(g: &GridFunction, y: &[f64]) -> Result<GridFunction> {
    g.require_spatial()?;
    let grid = g.grid;
    if y.len() != grid.dim {
        return Err(Error::OffGrid(y.to_vec()));
    }
    let h = grid.spacing();
    let mut shift = [0i64; 2];
    for a in 0..grid.dim {
        let t = y[a] / h;
        if (t - t.round()).abs() > 1e-9 * (1.0 + t.abs()) {
            return Err(Error::OffGrid(y.to_vec()));
        }
        shift[a] = t.round() as i64;
    }
    Ok(shift_by(g, shift))
}

pub(crate) fn shift_by(g: &GridFunction, shift: [i64; 2]) -> GridFunction {
    let grid = g.grid;
    let n = grid.n as i64;
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let idx = grid.unflatten(i);
        let mut src = [0usize; 2];
        for a in 0..grid.dim {
            src[a] = (idx[a] as i64 - shift[a]).rem_euclid(n) as usize;
        }
        *o = g.values[grid.flatten(src)];
    }
    GridFunction::from_parts(grid, out, g.spectral)
}

/// Largest multi-index order accepted by [`derivative`].
pub const MAX_DERIVATIVE_ORDER: u32 = 8;

/// Spectral derivative `D^α u = (-i)^{|α|} ∂^α u`.
pub fn derivative(u: &GridFunction, alpha: &[u32]) -> Result<GridFunction> {
    check_multi_index(&u.grid, alpha)?;
    apply_multiplier(u, |xi| {
        let mut p = 1.0;
        for (a, &k) in alpha.iter().enumerate() {
            p *= xi[a].powi(k as i32);
        }
        C64::new(p, 0.0)
    })
}

/// Spectral partial derivative `∂^α u`.
pub fn partial(u: &GridFunction, alpha: &[u32]) -> Result<GridFunction> {
    let order: u32 = alpha.iter().sum();
    let d = derivative(u, alpha)?;
    Ok(d.scale(C64::i().powu(order)))
}

fn check_multi_index(grid: &Grid, alpha: &[u32]) -> Result<()> {
    if alpha.len() != grid.dim {
        return Err(Error::InvalidParameter(format!(
            "multi-index {alpha:?} has the wrong length for dim {}",
            grid.dim
        )));
    }
    let order: u32 = alpha.iter().sum();
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::BudgetExceeded { requested: order, available: MAX_DERIVATIVE_ORDER });
    }
    Ok(())
}

/// `(h^dim Σ|u|^q)^{1/q}`, or the sup norm for `q = ∞`. Spectral functions use `đξ`.
pub fn lp_norm(u: &GridFunction, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidParameter(format!("q must lie in [1, ∞], got {q}")));
    }
    if q.is_infinite() {
        return Ok(u.sup_norm());
    }
    let w = if u.spectral { u.grid.spectral_weight() } else { u.grid.cell_volume() };
    if q == 2.0 {
        return Ok(u.l2_norm());
    }
    Ok((w * u.values.iter().map(|v| v.norm().powf(q)).sum::<f64>()).powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, l: f64) -> Grid {
        Grid::new(1, n, l).unwrap()
    }

    fn rel_err(a: &GridFunction, b: &GridFunction) -> f64 {
        a.try_sub(b).unwrap().l2_norm() / b.l2_norm()
    }

    #[test]
    fn grid_invariants() {
        let g = line(64, 8.0 * PI);
        assert!((g.spacing() * g.freq_spacing() - 2.0 * PI / 64.0).abs() < 1e-15);
        assert!(Grid::new(1, 12, 1.0).is_err());
        assert!(Grid::new(1, 4, 1.0).is_err());
        assert!(Grid::new(3, 8, 1.0).is_err());
        let xi = g.axis_frequencies();
        assert_eq!(xi[32], 0.0);
        assert!((xi[0] + g.nyquist()).abs() < 1e-12);
        assert!((xi[1] + xi[63]).abs() < 1e-12);
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let g = line(64, 8.0);
        let uhat = forward_transform(&GridFunction::gaussian(g)).unwrap();
        for (k, xi) in g.axis_frequencies().iter().enumerate() {
            if xi.abs() <= 4.0 {
                let exact = (2.0 * PI).sqrt() * (-xi * xi / 2.0).exp();
                assert!((uhat.values()[k].re - exact).abs() <= 1e-10 * exact);
                assert!(uhat.values()[k].im.abs() <= 1e-10 * exact);
            }
        }
    }

    #[test]
    fn mode_transforms_to_spike() {
        let g = line(32, PI);
        let uhat = forward_transform(&GridFunction::plane_wave(g, &[3.0])).unwrap();
        let k3 = g.frequency_index(&[3.0]).unwrap();
        for (k, v) in uhat.values().iter().enumerate() {
            let expect = if k == k3 { 2.0 * PI } else { 0.0 };
            assert!((v - C64::new(expect, 0.0)).norm() < 1e-12);
        }
        let back = inverse_transform(&uhat).unwrap();
        assert!(rel_err(&back, &GridFunction::plane_wave(g, &[3.0])) < 1e-14);
    }

    #[test]
    fn zero_and_flag_errors() {
        let g = line(16, 2.0);
        let z = GridFunction::zeros(g);
        assert_eq!(forward_transform(&z).unwrap().sup_norm(), 0.0);
        assert!(inverse_transform(&z).is_err());
        let spec = forward_transform(&z).unwrap();
        assert!(forward_transform(&spec).is_err());
        let bad = GridFunction::new(g, vec![C64::new(f64::NAN, 0.0); 16], false);
        assert!(matches!(bad, Err(Error::NonFinite(0))));
    }

    #[test]
    fn round_trip_two_dimensional() {
        let g = Grid::new(2, 16, 3.0).unwrap();
        let u = GridFunction::from_fn(g, |x| C64::new((x[0] * 0.7).sin() * (-x[1] * x[1]).exp(), x[1]));
        let back = inverse_transform(&forward_transform(&u).unwrap()).unwrap();
        assert!(rel_err(&back, &u) < 1e-12);
    }

    #[test]
    fn modulation_shifts_spectrum() {
        let g = line(64, 8.0 * PI);
        let u = GridFunction::gaussian(g);
        assert_eq!(modulate(&u, &[0.0]).unwrap(), u);
        let xi0 = 2.0;
        let shifted = forward_transform(&modulate(&u, &[xi0]).unwrap()).unwrap();
        let uhat = forward_transform(&u).unwrap();
        let steps = (xi0 / g.freq_spacing()).round() as i64;
        let expected = shift_by(&uhat, [steps, 0]);
        assert!(rel_err(&shifted, &expected) < 1e-12);
        assert!(modulate(&u, &[0.1]).is_err());
        let one = GridFunction::from_real_fn(g, |_| 1.0);
        assert!(rel_err(&modulate(&one, &[2.0]).unwrap(), &GridFunction::plane_wave(g, &[2.0])) < 1e-15);
    }

    #[test]
    fn translation_moves_spikes() {
        let g = line(32, 4.0);
        let h = g.spacing();
        let mut v = vec![C64::new(0.0, 0.0); 32];
        v[16] = C64::new(1.0, 0.0);
        let spike = GridFunction::new(g, v, false).unwrap();
        let moved = translate(&spike, &[3.0 * h]).unwrap();
        assert_eq!(moved.values()[19], C64::new(1.0, 0.0));
        assert_eq!(translate(&spike, &[0.0]).unwrap(), spike);
        assert!(translate(&spike, &[0.3 * h]).is_err());
    }

    #[test]
    fn derivatives_match_closed_forms() {
        let g = line(32, PI);
        let e3 = GridFunction::plane_wave(g, &[3.0]);
        assert!(rel_err(&derivative(&e3, &[1]).unwrap(), &e3.scale(C64::new(3.0, 0.0))) < 1e-10);
        let c = GridFunction::from_real_fn(g, |_| 2.5);
        assert!(derivative(&c, &[1]).unwrap().sup_norm() < 1e-12);

        let g = line(64, 8.0);
        let d2 = derivative(&GridFunction::gaussian(g), &[2]).unwrap();
        // D² = -∂², and ∂² e^{-x²/2} = (x² - 1) e^{-x²/2}.
        let exact = GridFunction::from_real_fn(g, |x| (1.0 - x[0] * x[0]) * (-x[0] * x[0] / 2.0).exp());
        assert!(rel_err(&d2, &exact) < 1e-8);
        assert!(derivative(&e3, &[9]).is_err());
    }

    #[test]
    fn norms_and_brackets() {
        let g = line(64, PI);
        let e3 = GridFunction::plane_wave(g, &[3.0]);
        assert!((lp_norm(&e3, 2.0).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert_eq!(lp_norm(&GridFunction::zeros(g), 3.0).unwrap(), 0.0);
        assert!(lp_norm(&e3, 0.5).is_err());
        assert_eq!(lp_norm(&e3, f64::INFINITY).unwrap(), 1.0);
        let g = line(64, 8.0);
        let sq = lp_norm(&GridFunction::gaussian(g), 2.0).unwrap().powi(2);
        assert!((sq - PI.sqrt()).abs() < 1e-10 * PI.sqrt());
        assert_eq!(bracket(&[0.0]), 1.0);
        assert!((bracket(&[3.0, 4.0]) - 26f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lattice_lookup() {
        let g = Grid::new(2, 8, PI).unwrap();
        let k = g.frequency_index(&[-4.0, 3.0]).unwrap();
        assert_eq!(g.frequency(k), [-4.0, 3.0]);
        assert!(g.frequency_index(&[4.0, 0.0]).is_none());
        let j = g.node_index(&[-PI, 0.0]).unwrap();
        assert_eq!(g.point(j)[0], -PI);
    }
}
