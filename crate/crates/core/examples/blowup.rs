// Commutator growth under refinement: smooth against rough coefficients.

use psido::characterize::{blowup_probe, BlowupParams};
use psido::symbols::Coefficient;

fn main() {
    for a in [Coefficient::Sin(1.0), Coefficient::Weierstrass { tau: 0.5, terms: None }] {
        let r = blowup_probe(&a, &BlowupParams::default()).unwrap();
        let norms: Vec<String> = r.rows.iter().map(|row| format!("N={} {:.3}", row.n, row.norm)).collect();
        println!("{}: {} growth {:.3} flagged {}", r.coefficient, norms.join(", "), r.growth, r.flagged);
    }
}
