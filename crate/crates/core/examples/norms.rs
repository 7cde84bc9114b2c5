// Zygmund, Hölder and Bessel-potential norms of a few test functions.

use std::f64::consts::PI;

use psido::grid::{Grid, GridFunction};
use psido::spaces::{bessel_norm, hoelder_norm, zygmund_norm};

fn main() {
    let grid = Grid::new(1, 128, PI).unwrap();
    for k in [4.0, 16.0, 32.0] {
        let f = GridFunction::from_real_fn(grid, |x| (k * x[0]).cos());
        let z = zygmund_norm(&f, 0.5).unwrap().value;
        let h = hoelder_norm(&f, 0, 0.5).unwrap().value;
        let b = bessel_norm(&f, 1.0, 2.0).unwrap().value;
        println!("cos({k}x): zygmund(1/2) {z:.4}, hoelder(1/2) {h:.4}, H^1 {b:.4}");
    }
}
