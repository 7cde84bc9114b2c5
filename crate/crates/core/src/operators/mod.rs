//! Linear operators on grid functions: a black-box trait, the concrete
//! operators built from symbols, commutators, operator norms and the
//! commutator-based membership test.

mod commutator;
mod membership;
mod norm;
mod quantize;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

pub use commutator::{ad_d, ad_x, iterated_commutator, AdD, AdX, Block};
pub use membership::{membership, MembershipEntry, MembershipParams, MembershipReport, ZERO_NORM};
pub use norm::{
    boundary_taper, compressed, materialize, op_norm, op_norm_compressed, NormEstimate, NormMethod,
    DENSE_LIMIT, POWER_ITERATION_LIMIT,
};
pub use quantize::{Quantized, QuantizedDouble};

use crate::error::{Error, Result};
use crate::grid::{apply_multiplier_table, Grid, GridFunction, C64};
use crate::spaces::bracket_table;
use crate::symbols::{Coefficient, Multiplier};

/// A linear map on functions sampled on one grid.
///
/// Implementations must be linear and deterministic; callers may probe them
/// concurrently when [`LinearOperator::concurrent`] is true.
pub trait LinearOperator: Send + Sync {
    fn grid(&self) -> &Grid;

    fn apply(&self, u: &GridFunction) -> Result<GridFunction>;

    fn has_adjoint(&self) -> bool {
        false
    }

    /// Adjoint with respect to the discrete `L²` inner product.
    fn apply_adjoint(&self, _u: &GridFunction) -> Result<GridFunction> {
        Err(Error::InvalidParameter(format!("{} has no adjoint", self.label())))
    }

    fn concurrent(&self) -> bool {
        true
    }

    fn label(&self) -> String;
}

pub type Operator = Arc<dyn LinearOperator>;

/// Operator builder parametrized by the grid, used for refinement checks.
pub type OperatorFamily = Arc<dyn Fn(&Grid) -> Result<Operator> + Send + Sync>;

impl fmt::Debug for dyn LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

pub(crate) fn check_input(grid: &Grid, u: &GridFunction) -> Result<()> {
    grid.check_same(u.grid())?;
    if u.is_spectral() {
        return Err(Error::SpectralFlag { expected: "spatial" });
    }
    u.check_finite()
}

pub struct Identity {
    grid: Grid,
}

impl Identity {
    pub fn new(grid: Grid) -> Self {
        Self { grid }
    }
}

impl LinearOperator for Identity {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        Ok(u.clone())
    }
    fn has_adjoint(&self) -> bool {
        true
    }
    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        self.apply(u)
    }
    fn label(&self) -> String {
        "identity".into()
    }
}

pub struct Zero {
    grid: Grid,
}

impl Zero {
    pub fn new(grid: Grid) -> Self {
        Self { grid }
    }
}

impl LinearOperator for Zero {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        Ok(GridFunction::zeros(self.grid))
    }
    fn has_adjoint(&self) -> bool {
        true
    }
    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        self.apply(u)
    }
    fn label(&self) -> String {
        "zero".into()
    }
}

/// Pointwise multiplication `u ↦ a·u`.
pub struct Multiplication {
    grid: Grid,
    values: Vec<C64>,
    label: String,
}

impl Multiplication {
    pub fn new(grid: Grid, values: Vec<C64>, label: impl Into<String>) -> Result<Self> {
        GridFunction::new(grid, values.clone(), false)?;
        Ok(Self { grid, values, label: label.into() })
    }

    pub fn from_fn(grid: Grid, label: impl Into<String>, f: impl Fn(&[f64]) -> C64) -> Self {
        let values = GridFunction::from_fn(grid, f).into_values();
        Self { grid, values, label: label.into() }
    }

    pub fn from_coefficient(grid: Grid, a: &Coefficient) -> Self {
        let e = a.expand(&grid);
        let dim = grid.dim;
        Self::from_fn(grid, format!("multiply:{a}"), |x| e.value(&x[..dim]))
    }

    /// Multiplication by `x_axis`.
    pub fn coordinate(grid: Grid, axis: usize) -> Self {
        Self::from_fn(grid, format!("x{}", axis + 1), |x| C64::new(x[axis], 0.0))
    }

    fn multiply(&self, u: &GridFunction, conjugate: bool) -> GridFunction {
        let values = u
            .values()
            .iter()
            .zip(&self.values)
            .map(|(v, a)| if conjugate { v * a.conj() } else { v * a })
            .collect();
        GridFunction::from_parts(self.grid, values, false)
    }
}

impl LinearOperator for Multiplication {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        Ok(self.multiply(u, false))
    }
    fn has_adjoint(&self) -> bool {
        true
    }
    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        Ok(self.multiply(u, true))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Fourier multiplier `u ↦ F⁻¹[q(ξ) û]`.
pub struct FourierMultiplier {
    grid: Grid,
    table: Vec<C64>,
    label: String,
}

impl FourierMultiplier {
    pub fn from_fn(grid: Grid, label: impl Into<String>, f: impl Fn(&[f64]) -> C64) -> Self {
        let table = (0..grid.len()).map(|k| f(&grid.frequency(k)[..grid.dim])).collect();
        Self { grid, table, label: label.into() }
    }

    pub fn from_multiplier(grid: Grid, q: &Multiplier) -> Self {
        Self::from_fn(grid, format!("multiplier:{q}"), |xi| C64::new(q.value(xi), 0.0))
    }

    /// `Λ^s = ⟨D⟩^s`.
    pub fn bessel(grid: Grid, s: f64) -> Self {
        Self { grid, table: bracket_table(&grid, s), label: format!("bessel({s})") }
    }

    /// `D_axis`.
    pub fn derivative(grid: Grid, axis: usize) -> Self {
        Self::from_fn(grid, format!("D{}", axis + 1), |xi| C64::new(xi[axis], 0.0))
    }
}

impl LinearOperator for FourierMultiplier {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        Ok(apply_multiplier_table(u, &self.table))
    }
    fn has_adjoint(&self) -> bool {
        true
    }
    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        let conj: Vec<C64> = self.table.iter().map(|v| v.conj()).collect();
        Ok(apply_multiplier_table(u, &conj))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `ops[0] ∘ ops[1] ∘ …`; the last operator acts first.
pub struct Composition {
    ops: Vec<Operator>,
}

pub fn compose(ops: Vec<Operator>) -> Result<Operator> {
    let Some(first) = ops.first() else {
        return Err(Error::InvalidParameter("empty composition".into()));
    };
    let grid = *first.grid();
    for op in &ops {
        grid.check_same(op.grid())?;
    }
    if ops.len() == 1 {
        return Ok(ops.into_iter().next().unwrap());
    }
    Ok(Arc::new(Composition { ops }))
}

impl LinearOperator for Composition {
    fn grid(&self) -> &Grid {
        self.ops[0].grid()
    }
    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        let mut v = u.clone();
        for op in self.ops.iter().rev() {
            v = op.apply(&v)?;
        }
        Ok(v)
    }
    fn has_adjoint(&self) -> bool {
        self.ops.iter().all(|o| o.has_adjoint())
    }
    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        let mut v = u.clone();
        for op in &self.ops {
            v = op.apply_adjoint(&v)?;
        }
        Ok(v)
    }
    fn concurrent(&self) -> bool {
        self.ops.iter().all(|o| o.concurrent())
    }
    fn label(&self) -> String {
        self.ops.iter().map(|o| o.label()).collect::<Vec<_>>().join(" . ")
    }
}

/// `Σ c_i T_i`.
pub struct Sum {
    terms: Vec<(C64, Operator)>,
}

impl Sum {
    pub fn new(terms: Vec<(C64, Operator)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidParameter("empty sum".into()));
        };
        let grid = *first.grid();
        for (_, op) in &terms {
            grid.check_same(op.grid())?;
        }
        Ok(Self { terms })
    }
}

impl LinearOperator for Sum {
    fn grid(&self) -> &Grid {
        self.terms[0].1.grid()
    }
    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        let mut acc = GridFunction::zeros(*self.grid());
        for (c, op) in &self.terms {
            acc = acc.zip_with(&op.apply(u)?, |a, b| a + c * b)?;
        }
        Ok(acc)
    }
    fn has_adjoint(&self) -> bool {
        self.terms.iter().all(|(_, o)| o.has_adjoint())
    }
    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        let mut acc = GridFunction::zeros(*self.grid());
        for (c, op) in &self.terms {
            let cc = c.conj();
            acc = acc.zip_with(&op.apply_adjoint(u)?, |a, b| a + cc * b)?;
        }
        Ok(acc)
    }
    fn concurrent(&self) -> bool {
        self.terms.iter().all(|(_, o)| o.concurrent())
    }
    fn label(&self) -> String {
        self.terms.iter().map(|(c, o)| format!("({c})*{}", o.label())).collect::<Vec<_>>().join(" + ")
    }
}

/// Explicit matrix acting on node values.
pub struct Dense {
    grid: Grid,
    matrix: DMatrix<C64>,
    label: String,
}

impl Dense {
    pub fn new(grid: Grid, matrix: DMatrix<C64>, label: impl Into<String>) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "matrix is {}x{}, grid has {} nodes",
                matrix.nrows(),
                matrix.ncols(),
                grid.len()
            )));
        }
        Ok(Self { grid, matrix, label: label.into() })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

impl LinearOperator for Dense {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        let v = &self.matrix * DVector::from_column_slice(u.values());
        Ok(GridFunction::from_parts(self.grid, v.as_slice().to_vec(), false))
    }
    fn has_adjoint(&self) -> bool {
        true
    }
    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        let v = self.matrix.ad_mul(&DVector::from_column_slice(u.values()));
        Ok(GridFunction::from_parts(self.grid, v.as_slice().to_vec(), false))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

pub type ApplyFn = Arc<dyn Fn(&GridFunction) -> Result<GridFunction> + Send + Sync>;

/// Black box given by a closure. Set `concurrent = false` for closures that
/// are not safe to call from several threads at once.
pub struct FnOperator {
    grid: Grid,
    apply: ApplyFn,
    adjoint: Option<ApplyFn>,
    concurrent: bool,
    label: String,
}

impl FnOperator {
    pub fn new(
        grid: Grid,
        label: impl Into<String>,
        f: impl Fn(&GridFunction) -> Result<GridFunction> + Send + Sync + 'static,
    ) -> Self {
        Self { grid, apply: Arc::new(f), adjoint: None, concurrent: true, label: label.into() }
    }

    pub fn with_adjoint(mut self, f: impl Fn(&GridFunction) -> Result<GridFunction> + Send + Sync + 'static) -> Self {
        self.adjoint = Some(Arc::new(f));
        self
    }

    pub fn sequential(mut self) -> Self {
        self.concurrent = false;
        self
    }
}

impl LinearOperator for FnOperator {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        let v = (self.apply)(u)?;
        self.grid.check_same(v.grid())?;
        v.check_finite()?;
        Ok(v)
    }
    fn has_adjoint(&self) -> bool {
        self.adjoint.is_some()
    }
    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        match &self.adjoint {
            Some(f) => f(u),
            None => Err(Error::InvalidParameter(format!("{} has no adjoint", self.label))),
        }
    }
    fn concurrent(&self) -> bool {
        self.concurrent
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Applies `op` to each input, in parallel when the operator allows it.
pub fn apply_many(op: &dyn LinearOperator, inputs: &[GridFunction]) -> Result<Vec<GridFunction>> {
    if op.concurrent() {
        inputs.par_iter().map(|u| op.apply(u)).collect()
    } else {
        inputs.iter().map(|u| op.apply(u)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inner(a: &GridFunction, b: &GridFunction) -> C64 {
        let h = a.grid().cell_volume();
        a.values().iter().zip(b.values()).map(|(x, y)| x * y.conj()).sum::<C64>() * h
    }

    pub(crate) fn check_adjoint(op: &dyn LinearOperator) {
        let g = *op.grid();
        let u = GridFunction::from_fn(g, |x| C64::new((-x[0] * x[0]).exp(), x[0].sin() * 0.3));
        let v = GridFunction::from_fn(g, |x| C64::new((x[0] * 0.7).cos(), (-(x[0] - 1.0).powi(2)).exp()));
        let lhs = inner(&op.apply(&u).unwrap(), &v);
        let rhs = inner(&u, &op.apply_adjoint(&v).unwrap());
        assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()), "{}: {lhs} vs {rhs}", op.label());
    }

    #[test]
    fn adjoints_are_consistent() {
        let g = Grid::new(1, 32, 5.0).unwrap();
        check_adjoint(&Multiplication::from_coefficient(g, &Coefficient::Mode(2.0)));
        check_adjoint(&FourierMultiplier::derivative(g, 0));
        let d = Dense::new(g, DMatrix::from_fn(32, 32, |i, j| C64::new(i as f64, j as f64 * 0.5)), "m").unwrap();
        check_adjoint(&d);
        let c = compose(vec![Arc::new(d), Arc::new(FourierMultiplier::bessel(g, -1.0))]).unwrap();
        check_adjoint(c.as_ref());
    }

    #[test]
    fn rejects_wrong_inputs() {
        let g = Grid::new(1, 16, 2.0).unwrap();
        let id = Identity::new(g);
        let other = GridFunction::zeros(Grid::new(1, 32, 2.0).unwrap());
        assert!(matches!(id.apply(&other), Err(Error::GridMismatch(_))));
        let spec = crate::grid::forward_transform(&GridFunction::gaussian(g)).unwrap();
        assert!(matches!(id.apply(&spec), Err(Error::SpectralFlag { .. })));
    }
}
