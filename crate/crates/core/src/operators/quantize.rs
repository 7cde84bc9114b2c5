use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{check_input, LinearOperator};
use crate::error::{Error, Result};
use crate::grid::{forward_unchecked, inverse_unchecked, Grid, GridFunction, C64};
use crate::symbols::{DoubleSymbol, Symbol, SymbolTable};

/// Periodic quantization `Op(p)u(x_j) = (Δξ/2π)^d Σ_k e^{ix_j·ξ_k} p(x_j, ξ_k) û(ξ_k)`.
pub struct Quantized {
    grid: Grid,
    kernel: DMatrix<C64>,
    table: SymbolTable,
    label: String,
}

fn phase(x: &[f64], xi: &[f64]) -> C64 {
    C64::from_polar(1.0, x.iter().zip(xi).map(|(a, b)| a * b).sum())
}

impl Quantized {
    pub fn new(grid: Grid, p: &Symbol) -> Result<Self> {
        let table = p.table(&grid)?;
        Ok(Self::from_table(table, format!("Op({})", p.label)))
    }

    pub fn from_table(table: SymbolTable, label: impl Into<String>) -> Self {
        let grid = *table.grid();
        let (dim, len) = (grid.dim, grid.len());
        let w = grid.spectral_weight();
        let xs = grid.points();
        let xis = grid.frequencies();
        let kernel = DMatrix::from_fn(len, len, |j, k| {
            w * phase(&xs[j][..dim], &xis[k][..dim]) * table.get(j, k)
        });
        Self { grid, kernel, table, label: label.into() }
    }

    pub fn table(&self) -> &SymbolTable {
        &self.table
    }
}

impl LinearOperator for Quantized {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        let uhat = forward_unchecked(u);
        let v = &self.kernel * DVector::from_column_slice(uhat.values());
        Ok(GridFunction::from_parts(self.grid, v.as_slice().to_vec(), false))
    }

    fn has_adjoint(&self) -> bool {
        true
    }

    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        let w = self.kernel.ad_mul(&DVector::from_column_slice(u.values()));
        let what = GridFunction::from_parts(self.grid, w.as_slice().to_vec(), true);
        let scale = self.grid.cell_volume() / self.grid.spectral_weight();
        Ok(inverse_unchecked(&what).scale(C64::new(scale, 0.0)))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Double-symbol quantization with the discrete kernel
/// `K(x_j, x_l) = (Δξ/2π)^d h^d Σ_k e^{i(x_j−x_l)·ξ_k} a(x_j, ξ_k, x_l)`.
pub struct QuantizedDouble {
    grid: Grid,
    kernel: DMatrix<C64>,
    label: String,
}

impl QuantizedDouble {
    pub fn new(grid: Grid, a: &DoubleSymbol) -> Result<Self> {
        if a.y_stride() != 1 {
            return Err(Error::InvalidParameter(format!(
                "double quantization needs the full x' lattice, got stride {}",
                a.y_stride()
            )));
        }
        let (dim, len) = (grid.dim, grid.len());
        let c = grid.spectral_weight() * grid.cell_volume();
        let xs = grid.points();
        let xis = grid.frequencies();
        let e: Vec<Vec<C64>> =
            xs.iter().map(|x| xis.iter().map(|xi| phase(&x[..dim], &xi[..dim])).collect()).collect();
        let rows: Vec<Vec<C64>> = (0..len)
            .into_par_iter()
            .map(|j| {
                let slab = a.slab(&grid, j)?;
                let mut row = vec![C64::new(0.0, 0.0); len];
                for (k, ejk) in e[j].iter().enumerate() {
                    let vals = &slab[k * len..(k + 1) * len];
                    for (l, r) in row.iter_mut().enumerate() {
                        *r += ejk * e[l][k].conj() * vals[l];
                    }
                }
                Ok(row.into_iter().map(|v| v * c).collect())
            })
            .collect::<Result<_>>()?;
        let kernel = DMatrix::from_fn(len, len, |j, l| rows[j][l]);
        Ok(Self { grid, kernel, label: format!("Op({})", a.label) })
    }

    pub fn kernel(&self) -> &DMatrix<C64> {
        &self.kernel
    }
}

impl LinearOperator for QuantizedDouble {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        let v = &self.kernel * DVector::from_column_slice(u.values());
        Ok(GridFunction::from_parts(self.grid, v.as_slice().to_vec(), false))
    }

    fn has_adjoint(&self) -> bool {
        true
    }

    fn apply_adjoint(&self, u: &GridFunction) -> Result<GridFunction> {
        check_input(&self.grid, u)?;
        let v = self.kernel.ad_mul(&DVector::from_column_slice(u.values()));
        Ok(GridFunction::from_parts(self.grid, v.as_slice().to_vec(), false))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{apply_multiplier, derivative};
    use crate::operators::tests::check_adjoint;
    use crate::symbols::{Coefficient, Multiplier};

    #[test]
    fn fourier_multiplier_symbols() {
        let g = Grid::new(1, 32, 6.0).unwrap();
        let u = GridFunction::from_fn(g, |x| C64::new((-x[0] * x[0]).exp(), 0.0));
        let d = Quantized::new(g, &Symbol::coordinate(0)).unwrap().apply(&u).unwrap();
        let exact = derivative(&u, &[1]).unwrap();
        assert!(d.try_sub(&exact).unwrap().sup_norm() < 1e-12);
        let b = Quantized::new(g, &Symbol::bracket_power(-2.0)).unwrap().apply(&u).unwrap();
        let exact = apply_multiplier(&u, |xi| C64::new(1.0 / (1.0 + xi[0] * xi[0]), 0.0)).unwrap();
        assert!(b.try_sub(&exact).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn coefficient_acts_pointwise() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        let u = GridFunction::gaussian(g);
        let v = Quantized::new(g, &Symbol::coefficient(Coefficient::Cos(1.0))).unwrap().apply(&u).unwrap();
        let exact = u.multiply_by(|x| C64::new(x[0].cos(), 0.0));
        assert!(v.try_sub(&exact).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn adjoint_identity() {
        let g = Grid::new(1, 16, 4.0).unwrap();
        check_adjoint(&Quantized::new(g, &Symbol::sin_coeff(1.0)).unwrap());
        let a = DoubleSymbol::separable(Coefficient::Sin(1.0), Multiplier::bracket_power(-1.0), Coefficient::Gaussian, &g);
        check_adjoint(&QuantizedDouble::new(g, &a).unwrap());
    }

    #[test]
    fn x_independent_double_matches_single() {
        let g = Grid::new(1, 16, 4.0).unwrap();
        let p = Symbol::sin_coeff(1.0);
        let single = Quantized::new(g, &p).unwrap();
        let double = QuantizedDouble::new(g, &DoubleSymbol::from_symbol(&p, &g).unwrap()).unwrap();
        let u = GridFunction::from_fn(g, |x| C64::new((-x[0] * x[0] / 2.0).exp(), x[0] * 0.1));
        let diff = single.apply(&u).unwrap().try_sub(&double.apply(&u).unwrap()).unwrap();
        assert!(diff.sup_norm() < 1e-12);
    }
}
