use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Coefficient, Multiplier, Symbol, SymbolTable};
use crate::error::{Error, Result};
use crate::grid::{Grid, C64};

/// Metadata of a double symbol `a(x, ξ, x′)`: order in ξ, type, growth in `x′`
/// and ξ-smoothness budget `N` (`None` = unlimited). The second order `m′` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleClass {
    pub order: f64,
    pub rho: f64,
    pub tau: f64,
    pub budget: Option<u32>,
}

impl DoubleClass {
    pub fn bounded(order: f64) -> Self {
        Self { order, rho: 1.0, tau: 0.0, budget: None }
    }
}

pub type DoubleFn = Arc<dyn Fn(&[f64], &[f64], &[f64]) -> C64 + Send + Sync>;

#[derive(Clone)]
enum DoubleKind {
    Field(DoubleFn),
    Table(DoubleTable),
    Lifted(SymbolTable),
}

#[derive(Clone)]
pub struct DoubleSymbol {
    pub label: String,
    pub class: DoubleClass,
    kind: DoubleKind,
}

impl fmt::Debug for DoubleSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DoubleSymbol").field("label", &self.label).field("class", &self.class).finish()
    }
}

impl DoubleSymbol {
    pub fn from_fn(
        label: impl Into<String>,
        class: DoubleClass,
        f: impl Fn(&[f64], &[f64], &[f64]) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), class, kind: DoubleKind::Field(Arc::new(f)) }
    }

    pub fn from_table(label: impl Into<String>, class: DoubleClass, table: DoubleTable) -> Self {
        Self { label: label.into(), class, kind: DoubleKind::Table(table) }
    }

    /// `a(x, ξ, x′) = p(x, ξ)`, sampled on `grid`.
    pub fn from_symbol(p: &Symbol, grid: &Grid) -> Result<Self> {
        let table = p.table(grid)?;
        let class = DoubleClass { order: p.class.order, rho: p.class.rho, tau: 0.0, budget: p.class.budget };
        Ok(Self { label: format!("{} (x'-independent)", p.label), class, kind: DoubleKind::Lifted(table) })
    }

    /// `a(x) q(ξ) b(x′)`.
    pub fn separable(left: Coefficient, multiplier: Multiplier, right: Coefficient, grid: &Grid) -> Self {
        let (l, r) = (left.expand(grid), right.expand(grid));
        let label = format!("({left})*({multiplier})*({right})(x')");
        let class = DoubleClass::bounded(multiplier.order());
        Self::from_fn(label, class, move |x, xi, y| l.value(x) * multiplier.value(xi) * r.value(y))
    }

    /// `a(x, ξ, x′)` at arbitrary points; `None` for tabulated symbols.
    pub fn eval(&self, x: &[f64], xi: &[f64], y: &[f64]) -> Option<C64> {
        match &self.kind {
            DoubleKind::Field(f) => Some(f(x, xi, y)),
            _ => None,
        }
    }

    pub fn table(&self) -> Option<&DoubleTable> {
        match &self.kind {
            DoubleKind::Table(t) => Some(t),
            _ => None,
        }
    }

    /// Stride of the `x′`-lattice the symbol is known on (1 for evaluators).
    pub fn y_stride(&self) -> usize {
        self.table().map_or(1, |t| t.stride)
    }

    /// Values `a(x_j, ξ_k, y_l)` for fixed `x_j`, laid out `[k][l]` over the
    /// (possibly strided) `y`-lattice.
    pub fn slab(&self, grid: &Grid, x: usize) -> Result<Vec<C64>> {
        match &self.kind {
            DoubleKind::Table(t) => {
                t.grid.check_same(grid)?;
                Ok(t.slab(x).to_vec())
            }
            DoubleKind::Lifted(t) => {
                t.grid().check_same(grid)?;
                let len = grid.len();
                let mut out = Vec::with_capacity(len * len);
                for k in 0..len {
                    let v = t.get(x, k);
                    out.extend(std::iter::repeat_n(v, len));
                }
                Ok(out)
            }
            DoubleKind::Field(f) => {
                let dim = grid.dim;
                let xp = grid.point(x);
                let xis = grid.frequencies();
                let ys = grid.points();
                let mut out = Vec::with_capacity(grid.len() * grid.len());
                for xi in &xis {
                    for y in &ys {
                        out.push(f(&xp[..dim], &xi[..dim], &y[..dim]));
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Tabulated double symbol `values[(x * len + ξ) * ylen + y]` on a `y`-lattice
/// made of every `stride`-th grid node per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleTable {
    grid: Grid,
    stride: usize,
    values: Vec<C64>,
}

impl DoubleTable {
    pub fn new(grid: Grid, stride: usize, values: Vec<C64>) -> Result<Self> {
        if stride == 0 || !grid.n.is_multiple_of(stride) || grid.n / stride < 2 {
            return Err(Error::InvalidParameter(format!("invalid y-stride {stride}")));
        }
        let t = Self { grid, stride, values };
        if t.values.len() != grid.len() * grid.len() * t.y_len() {
            return Err(Error::GridMismatch("double table size does not match the grid".into()));
        }
        if let Some(i) = t.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(t)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn y_axis_len(&self) -> usize {
        self.grid.n / self.stride
    }

    pub fn y_len(&self) -> usize {
        self.y_axis_len().pow(self.grid.dim as u32)
    }

    /// Grid node of the `l`-th y-lattice point.
    pub fn y_node(&self, l: usize) -> usize {
        let m = self.y_axis_len();
        let idx = if self.grid.dim == 1 { [l, 0] } else { [l / m, l % m] };
        self.grid.flatten([idx[0] * self.stride, idx[1] * self.stride])
    }

    pub fn get(&self, x: usize, xi: usize, y: usize) -> C64 {
        self.values[(x * self.grid.len() + xi) * self.y_len() + y]
    }

    pub fn slab(&self, x: usize) -> &[C64] {
        let w = self.grid.len() * self.y_len();
        &self.values[x * w..(x + 1) * w]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}
