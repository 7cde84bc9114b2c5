// Recover the symbol of a black-box operator and classify it.

use std::f64::consts::PI;
use std::sync::Arc;

use psido::characterize::{recover_symbol, RecoveryOptions};
use psido::grid::Grid;
use psido::operators::{Operator, Quantized};
use psido::symbols::{ClassParams, Symbol};

fn main() {
    let grid = Grid::new(1, 128, 4.0 * PI).unwrap();
    let p = Symbol::weierstrass_times_bracket(0.5, 1.0, None);
    let t: Operator = Arc::new(Quantized::new(grid, &p).unwrap());
    let opts = RecoveryOptions::default()
        .with_order(1.0)
        .with_class(ClassParams { order: 1.0, rho: 1.0, tau: 0.5, budget: 1 });
    let r = recover_symbol(&t, &opts).unwrap();
    let err = r.table.compare(&p.table(&grid).unwrap(), r.resolved.x_radius, r.resolved.xi_radius).unwrap();
    println!("epsilon {}, replay {:.2e}, table error {:.2e}", r.epsilon, r.replay_error, err.relative());
    println!("class verdict {:?}", r.verdict());
}
