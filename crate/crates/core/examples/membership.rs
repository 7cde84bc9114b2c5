// Commutator norms of a rough operator across two grids.

use std::f64::consts::PI;
use std::sync::Arc;

use psido::grid::Grid;
use psido::operators::{membership, MembershipParams, Operator, OperatorFamily, Quantized};
use psido::symbols::Symbol;

fn main() {
    let family: OperatorFamily = Arc::new(|g: &Grid| {
        Ok(Arc::new(Quantized::new(*g, &Symbol::weierstrass_times_bracket(0.5, 1.0, None))?) as Operator)
    });
    let params = MembershipParams { order: 1.0, rho: 1.0, mtilde: 0, budget: 2, q: 2.0 };
    let r = membership(&family, &Grid::new(1, 32, 4.0 * PI).unwrap(), params).unwrap();
    for e in &r.entries {
        println!("alpha {:?} beta {:?}: {:.4} -> {:.4} stable {}", e.alpha, e.beta, e.coarse, e.fine, e.stable);
    }
    println!("verdict {}", r.verdict);
}
