use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FourierMultiplier, LinearOperator, Multiplication, Operator};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, C64};

/// `ad_{-ix_j} T = [−ix_j, T]`, i.e. `u ↦ −ix_j·Tu + T(ix_j·u)`.
pub struct AdX {
    inner: Operator,
    x: Multiplication,
}

/// `ad_{D_j} T = [D_j, T]`.
pub struct AdD {
    inner: Operator,
    d: FourierMultiplier,
}

fn check_axis(grid: &Grid, axis: usize) -> Result<()> {
    if axis >= grid.dim {
        return Err(Error::InvalidParameter(format!("axis {axis} out of range for dim {}", grid.dim)));
    }
    Ok(())
}

pub fn ad_x(t: Operator, axis: usize) -> Result<Operator> {
    let grid = *t.grid();
    check_axis(&grid, axis)?;
    Ok(Arc::new(AdX { inner: t, x: Multiplication::coordinate(grid, axis) }))
}

pub fn ad_d(t: Operator, axis: usize) -> Result<Operator> {
    let grid = *t.grid();
    check_axis(&grid, axis)?;
    Ok(Arc::new(AdD { inner: t, d: FourierMultiplier::derivative(grid, axis) }))
}

fn times_ix(x: &Multiplication, u: &GridFunction, sign: f64) -> Result<GridFunction> {
    Ok(x.apply(u)?.scale(C64::new(0.0, sign)))
}

impl LinearOperator for AdX {
    fn grid(&self) -> &Grid {
        self.inner.grid()
    }
    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        let left = times_ix(&self.x, &self.inner.apply(u)?, -1.0)?;
        let right = self.inner.apply(&times_ix(&self.x, u, 1.0)?)?;
        left.try_add(&right)
    }
    fn has_adjoint(&self) -> bool {
        self.inner.has_adjoint()
    }
    /// `(ad_x T)* = ad_x(T*)`.
    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        let left = times_ix(&self.x, &self.inner.apply_adjoint(u)?, -1.0)?;
        let right = self.inner.apply_adjoint(&times_ix(&self.x, u, 1.0)?)?;
        left.try_add(&right)
    }
    fn concurrent(&self) -> bool {
        self.inner.concurrent()
    }
    fn label(&self) -> String {
        format!("ad_x{}({})", self.x.label().trim_start_matches('x'), self.inner.label())
    }
}

impl LinearOperator for AdD {
    fn grid(&self) -> &Grid {
        self.inner.grid()
    }
    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        let left = self.d.apply(&self.inner.apply(u)?)?;
        let right = self.inner.apply(&self.d.apply(u)?)?;
        left.try_sub(&right)
    }
    fn has_adjoint(&self) -> bool {
        self.inner.has_adjoint()
    }
    /// `(ad_D T)* = −ad_D(T*)`.
    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        let left = self.d.apply(&self.inner.apply_adjoint(u)?)?;
        let right = self.inner.apply_adjoint(&self.d.apply(u)?)?;
        right.try_sub(&left)
    }
    fn concurrent(&self) -> bool {
        self.inner.concurrent()
    }
    fn label(&self) -> String {
        format!("ad_{}({})", self.d.label(), self.inner.label())
    }
}

/// One unit step `(α_j, β_j)` with `|α_j| + |β_j| = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
}

impl Block {
    pub fn x(dim: usize, axis: usize) -> Self {
        let mut alpha = vec![0; dim];
        alpha[axis] = 1;
        Self { alpha, beta: vec![0; dim] }
    }

    pub fn d(dim: usize, axis: usize) -> Self {
        let mut beta = vec![0; dim];
        beta[axis] = 1;
        Self { alpha: vec![0; dim], beta }
    }

    /// Unit blocks making up `(α, β)`: all `x`-steps, then all `D`-steps.
    pub fn decompose(alpha: &[u32], beta: &[u32]) -> Vec<Block> {
        let dim = alpha.len();
        let mut out = Vec::new();
        for (axis, &k) in alpha.iter().enumerate() {
            out.extend((0..k).map(|_| Block::x(dim, axis)));
        }
        for (axis, &k) in beta.iter().enumerate() {
            out.extend((0..k).map(|_| Block::d(dim, axis)));
        }
        out
    }
}

/// `ad^{α_1}_{-ix} ad^{β_1}_D ⋯ ad^{α_k}_{-ix} ad^{β_k}_D T`; the last block is
/// applied first.
pub fn iterated_commutator(t: Operator, blocks: &[Block]) -> Result<Operator> {
    let dim = t.grid().dim;
    let mut op = t;
    for b in blocks.iter().rev() {
        if b.alpha.len() != dim || b.beta.len() != dim {
            return Err(Error::InvalidParameter(format!("block {b:?} does not match dim {dim}")));
        }
        let total: u32 = b.alpha.iter().chain(&b.beta).sum();
        if total != 1 {
            return Err(Error::InvalidParameter(format!("block {b:?} must have |α| + |β| = 1")));
        }
        op = match b.alpha.iter().position(|&a| a == 1) {
            Some(axis) => ad_x(op, axis)?,
            None => ad_d(op, b.beta.iter().position(|&v| v == 1).unwrap())?,
        };
    }
    Ok(op)
}
