//! Symbols `p(x, ξ)` and double symbols `a(x, ξ, x′)`, lattice tables, the
//! built-in test symbols, and seminorm / symbol-class measurements.

mod double;
pub mod expr;
mod seminorm;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use double::{DoubleClass, DoubleSymbol, DoubleTable};
pub use expr::{Coefficient, Multiplier};
pub(crate) use seminorm::multi_indices_up_to;
pub use seminorm::{
    example_regularity_budget, hoelder_class_table, smooth_seminorm, xi_difference, ClassParams,
    SeminormEntry, SeminormTable, CLASS_SLACK, MAX_MEASURED_ORDER,
};

use crate::error::{Error, Result};
use crate::grid::{bracket, Grid, GridFunction, C64};

/// Spatial regularity recorded for smooth coefficients.
pub const SMOOTH_REGULARITY: u32 = 4;

/// Declared class data: order `m`, type `ρ ∈ {0, 1}` (δ = 0), spatial
/// regularity `(m̃, τ)` and ξ-derivative budget `M` (`None` = unlimited).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolClass {
    pub order: f64,
    pub rho: f64,
    pub mtilde: u32,
    pub tau: f64,
    pub budget: Option<u32>,
}

impl SymbolClass {
    pub fn smooth(order: f64) -> Self {
        Self { order, rho: 1.0, mtilde: SMOOTH_REGULARITY, tau: 0.5, budget: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::InvalidParameter(format!("tau must lie in (0, 1), got {}", self.tau)));
        }
        if self.rho != 0.0 && self.rho != 1.0 {
            return Err(Error::InvalidParameter(format!("rho must be 0 or 1, got {}", self.rho)));
        }
        if !self.order.is_finite() {
            return Err(Error::InvalidParameter("order must be finite".into()));
        }
        Ok(())
    }

    pub fn budget_allows(&self, k: u32) -> bool {
        self.budget.is_none_or(|b| k <= b)
    }
}

pub type SymbolFn = Arc<dyn Fn(&[f64], &[f64]) -> C64 + Send + Sync>;

#[derive(Clone)]
pub enum SymbolKind {
    /// `D_x^{x_derivative} a(x) · q(ξ)`.
    Separable { coefficient: Coefficient, x_derivative: Vec<u32>, multiplier: Multiplier },
    Field(SymbolFn),
    Table(SymbolTable),
}

#[derive(Clone)]
pub struct Symbol {
    pub label: String,
    pub class: SymbolClass,
    kind: SymbolKind,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol").field("label", &self.label).field("class", &self.class).finish()
    }
}

impl Symbol {
    pub fn separable(coefficient: Coefficient, multiplier: Multiplier) -> Self {
        let order = multiplier.order();
        let class = match coefficient.hoelder_exponent() {
            Some(tau) => SymbolClass { order, rho: 1.0, mtilde: 0, tau, budget: None },
            None => SymbolClass::smooth(order),
        };
        let label = format!("separable({coefficient}, {multiplier})");
        Self {
            label,
            class,
            kind: SymbolKind::Separable { coefficient, x_derivative: Vec::new(), multiplier },
        }
    }

    pub fn from_fn(
        label: impl Into<String>,
        class: SymbolClass,
        f: impl Fn(&[f64], &[f64]) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), class, kind: SymbolKind::Field(Arc::new(f)) }
    }

    pub fn from_table(label: impl Into<String>, class: SymbolClass, table: SymbolTable) -> Self {
        Self { label: label.into(), class, kind: SymbolKind::Table(table) }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_class(mut self, class: SymbolClass) -> Self {
        self.class = class;
        self
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    /// `⟨ξ⟩^m`.
    pub fn bracket_power(m: f64) -> Self {
        Self::separable(Coefficient::One, Multiplier::bracket_power(m))
            .with_label(format!("bracket_power({m})"))
            .with_class(SymbolClass::smooth(m))
    }

    /// `e^{ikx_1}`.
    pub fn mode(k: f64) -> Self {
        Self::separable(Coefficient::Mode(k), Multiplier::one())
            .with_label(format!("mode({k})"))
            .with_class(SymbolClass::smooth(0.0))
    }

    /// `W_τ(x_1)⟨ξ⟩^m` with `J` terms.
    pub fn weierstrass_times_bracket(tau: f64, m: f64, terms: Option<u32>) -> Self {
        let label = match terms {
            Some(j) => format!("weierstrass_times_bracket({tau},{m},{j})"),
            None => format!("weierstrass_times_bracket({tau},{m})"),
        };
        Self::separable(Coefficient::Weierstrass { tau, terms }, Multiplier::bracket_power(m))
            .with_label(label)
            .with_class(SymbolClass { order: m, rho: 1.0, mtilde: 0, tau, budget: None })
    }

    /// `sin(x_1)⟨ξ⟩^m`.
    pub fn sin_coeff(m: f64) -> Self {
        Self::separable(Coefficient::Sin(1.0), Multiplier::bracket_power(m))
            .with_label(format!("sin_coeff({m})"))
            .with_class(SymbolClass::smooth(m))
    }

    /// `ξ_axis`.
    pub fn coordinate(axis: usize) -> Self {
        Self::separable(Coefficient::One, Multiplier::coordinate(axis))
            .with_label(format!("xi{}", axis + 1))
            .with_class(SymbolClass::smooth(1.0))
    }

    /// `a(x)`, a multiplication operator symbol.
    pub fn coefficient(a: Coefficient) -> Self {
        let label = a.to_string();
        Self::separable(a, Multiplier::one()).with_label(label)
    }

    /// `∂_ξ^α D_x^β p` when available in closed form.
    pub fn derivative(&self, alpha: &[u32], beta: &[u32]) -> Option<Symbol> {
        match &self.kind {
            SymbolKind::Separable { coefficient, x_derivative, multiplier } => {
                let dq = multiplier.derivative(alpha);
                let mut xd = x_derivative.clone();
                if xd.len() < beta.len() {
                    xd.resize(beta.len(), 0);
                }
                for (a, &b) in beta.iter().enumerate() {
                    xd[a] += b;
                }
                let class = SymbolClass {
                    order: self.class.order - self.class.rho * alpha.iter().sum::<u32>() as f64,
                    ..self.class
                };
                Some(Symbol {
                    label: format!("d_xi^{alpha:?} D_x^{beta:?} {}", self.label),
                    class,
                    kind: SymbolKind::Separable {
                        coefficient: coefficient.clone(),
                        x_derivative: xd,
                        multiplier: dq,
                    },
                })
            }
            _ => None,
        }
    }

    /// Samples the symbol on `grid × frequency lattice`.
    pub fn table(&self, grid: &Grid) -> Result<SymbolTable> {
        let dim = grid.dim;
        let len = grid.len();
        let xs = grid.points();
        let xis = grid.frequencies();
        let values = match &self.kind {
            SymbolKind::Table(t) => {
                t.grid.check_same(grid)?;
                return Ok(t.clone());
            }
            SymbolKind::Separable { coefficient, x_derivative, multiplier } => {
                let mut e = coefficient.expand(grid);
                if x_derivative.iter().any(|&b| b > 0) {
                    let mut beta = x_derivative.clone();
                    beta.resize(dim, 0);
                    e = e.d_derivative(&beta);
                }
                let a: Vec<C64> = xs.iter().map(|x| e.value(&x[..dim])).collect();
                let q: Vec<f64> = xis.iter().map(|xi| multiplier.value(&xi[..dim])).collect();
                let mut v = Vec::with_capacity(len * len);
                for ax in &a {
                    v.extend(q.iter().map(|&qk| ax * qk));
                }
                v
            }
            SymbolKind::Field(f) => {
                let mut v = Vec::with_capacity(len * len);
                for x in &xs {
                    v.extend(xis.iter().map(|xi| f(&x[..dim], &xi[..dim])));
                }
                v
            }
        };
        SymbolTable::new(*grid, values)
    }
}

/// Lattice samples `p(x_j, ξ_k)`, stored as `values[j * len + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    grid: Grid,
    values: Vec<C64>,
}

impl SymbolTable {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() * grid.len() {
            return Err(Error::GridMismatch(format!(
                "symbol table needs {} values, got {}",
                grid.len() * grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn get(&self, x: usize, xi: usize) -> C64 {
        self.values[x * self.grid.len() + xi]
    }

    /// `x ↦ p(x, ξ_k)`.
    pub fn x_slab(&self, xi: usize) -> GridFunction {
        let len = self.grid.len();
        let values = (0..len).map(|j| self.values[j * len + xi]).collect();
        GridFunction::from_parts(self.grid, values, false)
    }

    /// All x-slabs, one per frequency node.
    pub fn x_slabs(&self) -> Vec<Vec<C64>> {
        (0..self.grid.len()).map(|k| self.x_slab(k).into_values()).collect()
    }

    pub fn from_x_slabs(grid: Grid, slabs: &[Vec<C64>]) -> Result<Self> {
        let len = grid.len();
        if slabs.len() != len || slabs.iter().any(|s| s.len() != len) {
            return Err(Error::GridMismatch("slab count or size does not match the grid".into()));
        }
        let mut values = vec![C64::new(0.0, 0.0); len * len];
        for (k, slab) in slabs.iter().enumerate() {
            for (j, &v) in slab.iter().enumerate() {
                values[j * len + k] = v;
            }
        }
        Self::new(grid, values)
    }

    /// Multiplies by `⟨ξ⟩^m`.
    pub fn times_bracket(&self, m: f64) -> Self {
        let len = self.grid.len();
        let weights: Vec<f64> =
            (0..len).map(|k| bracket(&self.grid.frequency(k)[..self.grid.dim]).powf(m)).collect();
        let values = self.values.iter().enumerate().map(|(i, v)| v * weights[i % len]).collect();
        Self { grid: self.grid, values }
    }

    /// Largest `|p - q|` and `|q|` over nodes with `|x| ≤ x_radius`, `|ξ| ≤ xi_radius`
    /// (radii measured per axis).
    pub fn compare(&self, other: &SymbolTable, x_radius: f64, xi_radius: f64) -> Result<TableDifference> {
        self.grid.check_same(&other.grid)?;
        let len = self.grid.len();
        let dim = self.grid.dim;
        let inside = |p: [f64; 2], r: f64| p[..dim].iter().all(|c| c.abs() <= r + 1e-12);
        let mut diff = 0.0f64;
        let mut scale = 0.0f64;
        for j in (0..len).filter(|&j| inside(self.grid.point(j), x_radius)) {
            for k in (0..len).filter(|&k| inside(self.grid.frequency(k), xi_radius)) {
                let (a, b) = (self.get(j, k), other.get(j, k));
                diff = diff.max((a - b).norm());
                scale = scale.max(b.norm());
            }
        }
        Ok(TableDifference { sup_difference: diff, sup_reference: scale })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableDifference {
    pub sup_difference: f64,
    pub sup_reference: f64,
}

impl TableDifference {
    pub fn relative(&self) -> f64 {
        if self.sup_reference == 0.0 {
            self.sup_difference
        } else {
            self.sup_difference / self.sup_reference
        }
    }
}

/// Resolves a built-in symbol expression such as `weierstrass_times_bracket(0.5,1,6)`.
pub fn builtin(spec: &str) -> Result<Symbol> {
    crate::parse::symbol(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn builtins_carry_metadata() {
        let g = Grid::new(1, 16, PI).unwrap();
        let one = Symbol::bracket_power(0.0);
        assert!(one.table(&g).unwrap().values().iter().all(|v| *v == C64::new(1.0, 0.0)));
        assert_eq!(one.class.order, 0.0);
        let w = Symbol::weierstrass_times_bracket(0.5, 1.0, Some(6));
        assert_eq!((w.class.order, w.class.rho, w.class.tau, w.class.budget), (1.0, 1.0, 0.5, None));
        w.class.validate().unwrap();
        let s = Symbol::sin_coeff(1.0).table(&g).unwrap();
        let j = g.node_index(&[PI / 2.0]).unwrap();
        let k = g.frequency_index(&[3.0]).unwrap();
        assert!((s.get(j, k) - C64::new(10f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!(matches!(builtin("nonsense(1)"), Err(Error::UnknownBuiltin(_))));
    }

    #[test]
    fn closed_form_derivatives() {
        let g = Grid::new(1, 32, PI).unwrap();
        let p = Symbol::sin_coeff(1.0);
        let d = p.derivative(&[1], &[1]).unwrap().table(&g).unwrap();
        for j in 0..32 {
            for k in 0..32 {
                let (x, xi) = (g.point(j)[0], g.frequency(k)[0]);
                // ∂_ξ D_x (sin x ⟨ξ⟩) = -i cos x · ξ/⟨ξ⟩
                let exact = C64::new(0.0, -x.cos() * xi / (1.0 + xi * xi).sqrt());
                assert!((d.get(j, k) - exact).norm() < 1e-14);
            }
        }
        assert_eq!(p.derivative(&[2], &[0]).unwrap().class.order, -1.0);
    }

    #[test]
    fn slabs_round_trip() {
        let g = Grid::new(1, 8, 2.0).unwrap();
        let t = Symbol::sin_coeff(2.0).table(&g).unwrap();
        assert_eq!(SymbolTable::from_x_slabs(g, &t.x_slabs()).unwrap(), t);
    }
}
