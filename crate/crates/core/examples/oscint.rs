// Oscillatory integral of a Gaussian amplitude by both evaluators.

use psido::oscint::{oscint_ibp, oscint_regularized, Amplitude, Regularizer};

fn main() {
    let a = Amplitude::gaussian(1);
    let r = oscint_regularized(&a, &Regularizer::default()).unwrap();
    for row in &r.trace {
        println!("eps {:<5} value {:.10}", row.epsilon, row.value.re);
    }
    println!("extrapolated {:.10}", r.value.re);
    println!("by parts     {:.10}", oscint_ibp(&a, 2, 2).unwrap().re);
    println!("exact        {:.10}", 0.5f64.sqrt());
}
