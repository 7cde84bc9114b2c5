// Quantize a rough symbol and apply it to a Gaussian.

use std::f64::consts::PI;

use psido::grid::{Grid, GridFunction};
use psido::operators::{LinearOperator, Quantized};
use psido::symbols::Symbol;

fn main() {
    let grid = Grid::new(1, 128, 4.0 * PI).unwrap();
    let p = Symbol::weierstrass_times_bracket(0.5, 1.0, None);
    let op = Quantized::new(grid, &p).unwrap();
    let u = GridFunction::gaussian(grid);
    let v = op.apply(&u).unwrap();
    println!("{}: |u| = {:.6}, |Op(p)u| = {:.6}", p.label, u.l2_norm(), v.l2_norm());
}
