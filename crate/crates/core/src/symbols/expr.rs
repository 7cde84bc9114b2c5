//! Closed-form building blocks for separable symbols `a(x) q(ξ)`: spatial
//! coefficients and Fourier multipliers that can be differentiated exactly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grid::{Grid, C64};

/// Spatial coefficient `a(x)`; waves run along the first axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    One,
    Constant(f64),
    Sin(f64),
    Cos(f64),
    Mode(f64),
    /// `e^{-|x|²/2}`
    Gaussian,
    /// `Σ_{j=1..J} 2^{-jτ} cos(2^j x)`; `terms = None` takes the largest `J`
    /// with `2^J ≤ ξ_max/2` on the sampling grid.
    Weierstrass { tau: f64, terms: Option<u32> },
}

impl Coefficient {
    pub fn is_smooth(&self) -> bool {
        !matches!(self, Coefficient::Weierstrass { .. })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::One | Coefficient::Constant(_))
    }

    /// Hölder exponent of a non-smooth coefficient.
    pub fn hoelder_exponent(&self) -> Option<f64> {
        match self {
            Coefficient::Weierstrass { tau, .. } => Some(*tau),
            _ => None,
        }
    }

    pub fn expand(&self, grid: &Grid) -> Expansion {
        let wave = |amp: C64, k: f64| (amp, [k, 0.0]);
        match *self {
            Coefficient::One => Expansion::waves(vec![wave(C64::new(1.0, 0.0), 0.0)]),
            Coefficient::Constant(c) => Expansion::waves(vec![wave(C64::new(c, 0.0), 0.0)]),
            Coefficient::Sin(k) => Expansion::waves(vec![
                wave(C64::new(0.0, -0.5), k),
                wave(C64::new(0.0, 0.5), -k),
            ]),
            Coefficient::Cos(k) => {
                Expansion::waves(vec![wave(C64::new(0.5, 0.0), k), wave(C64::new(0.5, 0.0), -k)])
            }
            Coefficient::Mode(k) => Expansion::waves(vec![wave(C64::new(1.0, 0.0), k)]),
            Coefficient::Gaussian => Expansion {
                waves: Vec::new(),
                gaussian: vec![(C64::new(1.0, 0.0), [0, 0])],
            },
            Coefficient::Weierstrass { tau, terms } => {
                let count = terms.unwrap_or_else(|| weierstrass_terms(grid));
                let mut waves = Vec::with_capacity(2 * count as usize);
                for j in 1..=count {
                    let amp = C64::new(0.5 * 2f64.powf(-(j as f64) * tau), 0.0);
                    let k = 2f64.powi(j as i32);
                    waves.push(wave(amp, k));
                    waves.push(wave(amp, -k));
                }
                Expansion::waves(waves)
            }
        }
    }
}

/// Largest `J` with `2^J ≤ ξ_max/2`.
pub fn weierstrass_terms(grid: &Grid) -> u32 {
    let limit = grid.nyquist() / 2.0;
    if limit < 2.0 {
        0
    } else {
        limit.log2().floor() as u32
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::One => write!(f, "one"),
            Coefficient::Constant(c) => write!(f, "const({c})"),
            Coefficient::Sin(k) => write!(f, "sin({k})"),
            Coefficient::Cos(k) => write!(f, "cos({k})"),
            Coefficient::Mode(k) => write!(f, "mode({k})"),
            Coefficient::Gaussian => write!(f, "gauss"),
            Coefficient::Weierstrass { tau, terms: Some(j) } => write!(f, "weierstrass({tau},{j})"),
            Coefficient::Weierstrass { tau, terms: None } => write!(f, "weierstrass({tau})"),
        }
    }
}

/// `Σ amp·e^{ik·x} + (Σ c·x^γ) e^{-|x|²/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub waves: Vec<(C64, [f64; 2])>,
    pub gaussian: Vec<(C64, [u32; 2])>,
}

impl Expansion {
    fn waves(waves: Vec<(C64, [f64; 2])>) -> Self {
        Self { waves, gaussian: Vec::new() }
    }

    pub fn value(&self, x: &[f64]) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (amp, k) in &self.waves {
            let phase: f64 = x.iter().zip(k).map(|(a, b)| a * b).sum();
            s += amp * C64::from_polar(1.0, phase);
        }
        if !self.gaussian.is_empty() {
            let r2: f64 = x.iter().map(|t| t * t).sum();
            let mut poly = C64::new(0.0, 0.0);
            for (c, g) in &self.gaussian {
                let mut mono = 1.0;
                for (a, &e) in g.iter().enumerate().take(x.len()) {
                    mono *= x[a].powi(e as i32);
                }
                poly += c * mono;
            }
            s += poly * (-0.5 * r2).exp();
        }
        s
    }

    /// `∂_{x_axis}`.
    pub fn partial(&self, axis: usize) -> Self {
        let waves = self
            .waves
            .iter()
            .filter(|(_, k)| k[axis] != 0.0)
            .map(|&(amp, k)| (amp * C64::new(0.0, k[axis]), k))
            .collect();
        let mut gaussian = Vec::new();
        for &(c, g) in &self.gaussian {
            if g[axis] > 0 {
                let mut lower = g;
                lower[axis] -= 1;
                gaussian.push((c * g[axis] as f64, lower));
            }
            let mut upper = g;
            upper[axis] += 1;
            gaussian.push((-c, upper));
        }
        Self { waves, gaussian }
    }

    /// `D^β = (-i)^{|β|} ∂^β`.
    pub fn d_derivative(&self, beta: &[u32]) -> Self {
        let mut e = self.clone();
        let mut order = 0;
        for (axis, &b) in beta.iter().enumerate() {
            for _ in 0..b {
                e = e.partial(axis);
                order += 1;
            }
        }
        let factor = C64::new(0.0, -1.0).powu(order);
        e.waves.iter_mut().for_each(|w| w.0 *= factor);
        e.gaussian.iter_mut().for_each(|g| g.0 *= factor);
        e
    }
}

/// `q(ξ) = Σ c·ξ^γ ⟨ξ⟩^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    pub terms: Vec<BracketTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketTerm {
    pub coefficient: f64,
    pub monomial: [u32; 2],
    pub power: f64,
}

impl Multiplier {
    pub fn one() -> Self {
        Self::bracket_power(0.0)
    }

    pub fn bracket_power(m: f64) -> Self {
        Self { terms: vec![BracketTerm { coefficient: 1.0, monomial: [0, 0], power: m }] }
    }

    /// `ξ_axis`.
    pub fn coordinate(axis: usize) -> Self {
        let mut monomial = [0, 0];
        monomial[axis] = 1;
        Self { terms: vec![BracketTerm { coefficient: 1.0, monomial, power: 0.0 }] }
    }

    pub fn value(&self, xi: &[f64]) -> f64 {
        let b2 = 1.0 + xi.iter().map(|t| t * t).sum::<f64>();
        self.terms
            .iter()
            .map(|t| {
                let mut mono = 1.0;
                for (a, &e) in t.monomial.iter().enumerate().take(xi.len()) {
                    mono *= xi[a].powi(e as i32);
                }
                t.coefficient * mono * b2.powf(0.5 * t.power)
            })
            .sum()
    }

    /// Growth order in `ξ`.
    pub fn order(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.power + t.monomial.iter().sum::<u32>() as f64)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∂_{ξ_axis}`: `∂(ξ^γ⟨ξ⟩^p) = γ ξ^{γ-e}⟨ξ⟩^p + p ξ^{γ+e}⟨ξ⟩^{p-2}`.
    pub fn partial(&self, axis: usize) -> Self {
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.monomial[axis] > 0 {
                let mut m = t.monomial;
                m[axis] -= 1;
                terms.push(BracketTerm {
                    coefficient: t.coefficient * t.monomial[axis] as f64,
                    monomial: m,
                    power: t.power,
                });
            }
            if t.power != 0.0 {
                let mut m = t.monomial;
                m[axis] += 1;
                terms.push(BracketTerm {
                    coefficient: t.coefficient * t.power,
                    monomial: m,
                    power: t.power - 2.0,
                });
            }
        }
        Self { terms }
    }

    pub fn derivative(&self, alpha: &[u32]) -> Self {
        let mut q = self.clone();
        for (axis, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                q = q.partial(axis);
            }
        }
        q
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coefficient == 0.0)
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mono = match t.monomial {
                [0, 0] => String::new(),
                [a, 0] => format!("*xi1^{a}"),
                [0, b] => format!("*xi2^{b}"),
                [a, b] => format!("*xi1^{a}*xi2^{b}"),
            };
            write!(f, "{}{}*<xi>^{}", t.coefficient, mono, t.power)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bracket(x: f64) -> f64 {
        (1.0 + x * x).sqrt()
    }

    #[test]
    fn multiplier_derivatives_match_hand_formulas() {
        let q = Multiplier::bracket_power(-2.0);
        for &x in &[-3.0, -0.5, 0.0, 1.25, 7.0] {
            let d1 = q.derivative(&[1]).value(&[x]);
            assert!((d1 - (-2.0 * x * bracket(x).powi(-4))).abs() < 1e-14);
            let d2 = q.derivative(&[2]).value(&[x]);
            let exact = -2.0 * bracket(x).powi(-4) + 8.0 * x * x * bracket(x).powi(-6);
            assert!((d2 - exact).abs() < 1e-14);
        }
        assert_eq!(Multiplier::coordinate(0).derivative(&[1]).value(&[4.0]), 1.0);
        assert!(Multiplier::one().derivative(&[1]).is_zero() || Multiplier::one().derivative(&[1]).terms.is_empty());
    }

    #[test]
    fn expansion_derivatives() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let sin = Coefficient::Sin(1.0).expand(&g);
        for &x in &[-1.0, 0.3, 2.0] {
            assert!((sin.value(&[x]) - C64::new(x.sin(), 0.0)).norm() < 1e-15);
            // D sin = -i cos
            let d = sin.d_derivative(&[1]).value(&[x]);
            assert!((d - C64::new(0.0, -x.cos())).norm() < 1e-15);
        }
        let gauss = Coefficient::Gaussian.expand(&g);
        let dd = gauss.partial(0).partial(0);
        for &x in &[-1.0f64, 0.0, 1.5] {
            let exact = (x * x - 1.0) * (-x * x / 2.0).exp();
            assert!((dd.value(&[x]).re - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn weierstrass_truncation_follows_grid() {
        let g = Grid::new(1, 128, std::f64::consts::PI).unwrap();
        assert_eq!(weierstrass_terms(&g), 5);
        let e = Coefficient::Weierstrass { tau: 0.5, terms: None }.expand(&g);
        assert_eq!(e.waves.len(), 10);
        let v = e.value(&[0.0]).re;
        let exact: f64 = (1..=5).map(|j| 2f64.powf(-0.5 * j as f64)).sum();
        assert!((v - exact).abs() < 1e-14);
    }
}
