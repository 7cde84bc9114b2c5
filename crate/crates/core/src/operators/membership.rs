use serde::{Deserialize, Serialize};

use super::{iterated_commutator, op_norm, op_norm_compressed, Block, NormMethod, OperatorFamily};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::symbols::multi_indices_up_to;

/// Norms below this are treated as exact zeros when comparing refinements.
pub const ZERO_NORM: f64 = 1e-9;
const DRIFT_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipParams {
    pub order: f64,
    pub rho: f64,
    /// x-regularity `m̃`: largest `|β|` tested.
    pub mtilde: u32,
    /// ξ-budget `M`: largest `|α|` tested.
    pub budget: u32,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipEntry {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    /// Source index `m − ρ|α|` of the norm `H^s_q → L^q`.
    pub s_from: f64,
    pub coarse: f64,
    pub fine: f64,
    /// `fine / coarse` (1 when both vanish).
    pub drift: f64,
    pub stable: bool,
    pub method: NormMethod,
    pub lower_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub operator: String,
    pub params: MembershipParams,
    pub coarse_grid: Grid,
    pub fine_grid: Grid,
    pub entries: Vec<MembershipEntry>,
    pub verdict: bool,
}

impl MembershipReport {
    pub fn entry(&self, alpha: &[u32], beta: &[u32]) -> Option<&MembershipEntry> {
        self.entries.iter().find(|e| e.alpha == alpha && e.beta == beta)
    }
}

fn drift(coarse: f64, fine: f64) -> (f64, bool) {
    if coarse <= ZERO_NORM && fine <= ZERO_NORM {
        return (1.0, true);
    }
    if coarse <= ZERO_NORM {
        return (f64::INFINITY, false);
    }
    let r = fine / coarse;
    (r, r.is_finite() && (1.0 / DRIFT_LIMIT..=DRIFT_LIMIT).contains(&r))
}

/// Measures `‖ad^α_{-ix} ad^β_D T‖_{H^{m−ρ|α|}_q → L^q}` for `|α| ≤ M`,
/// `|β| ≤ m̃` on `grid` and on its refinement, and calls every entry stable
/// when the two agree within a factor of 2. Nontrivial commutators are
/// measured on the resolved part of phase space.
pub fn membership(family: &OperatorFamily, grid: &Grid, params: MembershipParams) -> Result<MembershipReport> {
    if params.budget > 3 || params.mtilde > 2 {
        return Err(Error::InvalidParameter(format!(
            "membership supports M ≤ 3 and m̃ ≤ 2, got M = {}, m̃ = {}",
            params.budget, params.mtilde
        )));
    }
    let fine_grid = grid.refined()?;
    let (coarse_op, fine_op) = (family(grid)?, family(&fine_grid)?);
    let dim = grid.dim;
    let mut entries = Vec::new();
    for alpha in multi_indices_up_to(dim, params.budget) {
        for beta in multi_indices_up_to(dim, params.mtilde) {
            let s_from = params.order - params.rho * alpha.iter().sum::<u32>() as f64;
            let blocks = Block::decompose(&alpha, &beta);
            let measure = |op: &super::Operator| {
                if blocks.is_empty() {
                    op_norm(op, s_from, params.q)
                } else {
                    op_norm_compressed(&iterated_commutator(op.clone(), &blocks)?, s_from, params.q)
                }
            };
            let c = measure(&coarse_op)?;
            let f = measure(&fine_op)?;
            let (d, stable) = drift(c.value, f.value);
            entries.push(MembershipEntry {
                alpha: alpha.clone(),
                beta,
                s_from,
                coarse: c.value,
                fine: f.value,
                drift: d,
                stable,
                method: f.method,
                lower_bound: c.lower_bound || f.lower_bound,
            });
        }
    }
    let verdict = entries.iter().all(|e| e.stable);
    Ok(MembershipReport {
        operator: coarse_op.label(),
        params,
        coarse_grid: *grid,
        fine_grid,
        entries,
        verdict,
    })
}
