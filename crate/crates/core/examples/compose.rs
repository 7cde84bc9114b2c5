// Compose two quantized symbols and read back the product symbol.

use std::f64::consts::PI;

use psido::characterize::{compose_and_classify, CompositionParams, RecoveryOptions};
use psido::grid::Grid;
use psido::symbols::Symbol;

fn main() {
    let grid = Grid::new(1, 128, 4.0 * PI).unwrap();
    let params = CompositionParams { mtilde: 1, budget: 3, q: 2.0 };
    let r = compose_and_classify(
        &Symbol::bracket_power(1.0),
        &Symbol::bracket_power(-1.0),
        &grid,
        &params,
        &RecoveryOptions::default(),
    )
    .unwrap();
    let off = r.recovered.table.values().iter().map(|v| (v - 1.0).norm()).fold(0.0, f64::max);
    println!("conditions hold: {}", r.conditions.all_hold());
    println!("sup |p - 1| = {off:.2e}, replay {:.2e}", r.recovered.replay_error);
}
