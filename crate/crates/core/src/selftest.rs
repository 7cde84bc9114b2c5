//! Quick consistency suite made of exact identities (linearity, inversion,
//! eigenfunctions, trivial symbols); run by the `selftest` command.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::characterize::{blowup_probe, probe_double_symbol, reduce, BlowupParams};
use crate::error::Result;
use crate::grid::{
    bracket, derivative, forward_transform, inverse_transform, lp_norm, modulate, translate, Grid, GridFunction, C64,
};
use crate::operators::{
    ad_x, iterated_commutator, membership, op_norm, Block, Identity, LinearOperator, Multiplication, Operator,
    OperatorFamily, MembershipParams, Quantized, QuantizedDouble, Zero,
};
use crate::oscint::{oscint_ibp, oscint_regularized, Amplitude, Regularizer};
use crate::spaces::{bessel_norm, order_reduce};
use crate::symbols::{Coefficient, DoubleClass, DoubleSymbol, Symbol};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestRow {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub rows: Vec<SelftestRow>,
    pub pass: bool,
}

type Check = (&'static str, f64, fn() -> Result<f64>);

fn circle() -> Grid {
    Grid::new(1, 32, PI).unwrap()
}

fn wave(g: Grid, k: f64) -> GridFunction {
    GridFunction::plane_wave(g, &[k])
}

fn diff(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    Ok(a.try_sub(b)?.sup_norm())
}

fn gaussian_probe(g: Grid) -> GridFunction {
    GridFunction::from_fn(g, |x| C64::new((-x[0] * x[0] / 2.0).exp(), 0.2 * x[0] * (-x[0] * x[0]).exp()))
}

const CHECKS: &[Check] = &[
    ("forward of zero", 0.0, || Ok(forward_transform(&GridFunction::zeros(circle()))?.sup_norm())),
    ("mode transforms to a spike of mass 2L", 1e-12, || {
        let g = circle();
        let h = forward_transform(&wave(g, 3.0))?;
        let k = g.frequency_index(&[3.0]).unwrap();
        let spike = GridFunction::from_spectral_fn(g, |xi| C64::new(if xi[0] == 3.0 { 2.0 * PI } else { 0.0 }, 0.0));
        Ok(diff(&h, &spike)?.max((h.values()[k].re - 2.0 * PI).abs()))
    }),
    ("inverse after forward", 1e-12, || {
        let u = GridFunction::gaussian(Grid::new(1, 64, 8.0)?);
        diff(&inverse_transform(&forward_transform(&u)?)?, &u)
    }),
    ("modulating one gives a mode", 1e-12, || {
        let g = circle();
        diff(&modulate(&GridFunction::from_real_fn(g, |_| 1.0), &[2.0])?, &wave(g, 2.0))
    }),
    ("modulating by zero is the identity", 0.0, || {
        let u = GridFunction::gaussian(circle());
        diff(&modulate(&u, &[0.0])?, &u)
    }),
    ("translating by zero is the identity", 0.0, || {
        let u = GridFunction::gaussian(circle());
        diff(&translate(&u, &[0.0])?, &u)
    }),
    ("translation preserves the L2 norm", 1e-12, || {
        let g = Grid::new(1, 64, 8.0)?;
        let u = GridFunction::gaussian(g);
        Ok((translate(&u, &[2.0])?.l2_norm() - u.l2_norm()).abs())
    }),
    ("D e^{3ix} = 3 e^{3ix}", 1e-10, || {
        let u = wave(circle(), 3.0);
        diff(&derivative(&u, &[1])?, &u.scale(C64::new(3.0, 0.0)))
    }),
    ("D of a constant", 1e-12, || Ok(derivative(&GridFunction::from_real_fn(circle(), |_| 2.0), &[1])?.sup_norm())),
    ("L2 norm of a mode", 1e-12, || Ok((lp_norm(&wave(circle(), 3.0), 2.0)? - (2.0 * PI).sqrt()).abs())),
    ("bracket of (3, 4)", 1e-15, || Ok((bracket(&[3.0, 4.0]) - 26f64.sqrt()).abs() + (bracket(&[0.0]) - 1.0).abs())),
    ("H^2 norm of a mode", 1e-9, || {
        Ok((bessel_norm(&wave(circle(), 3.0), 2.0, 2.0)?.value - 10.0 * (2.0 * PI).sqrt()).abs())
    }),
    ("Bessel potential of a mode", 1e-12, || {
        let u = wave(circle(), 3.0);
        diff(&order_reduce(&u, 2.0)?, &u.scale(C64::new(10.0, 0.0)))
    }),
    ("order reduction round trip", 1e-12, || {
        let u = GridFunction::gaussian(Grid::new(1, 64, 8.0)?);
        diff(&order_reduce(&order_reduce(&u, 1.5)?, -1.5)?, &u)
    }),
    ("oscillatory integral of one", 1e-6, || {
        Ok((oscint_regularized(&Amplitude::one(1), &Regularizer::default())?.value - 1.0).norm())
    }),
    ("integration by parts on one", 1e-6, || Ok((oscint_ibp(&Amplitude::one(1), 2, 2)? - 1.0).norm())),
    ("quantized identity symbol", 1e-12, || {
        let g = circle();
        let u = gaussian_probe(g);
        diff(&Quantized::new(g, &Symbol::bracket_power(0.0))?.apply(&u)?, &u)
    }),
    ("quantized xi is D", 1e-10, || {
        let g = circle();
        let u = wave(g, 3.0);
        diff(&Quantized::new(g, &Symbol::coordinate(0))?.apply(&u)?, &u.scale(C64::new(3.0, 0.0)))
    }),
    ("x'-independent double symbol", 1e-8, || {
        let g = Grid::new(1, 16, 4.0)?;
        let p = Symbol::sin_coeff(1.0);
        let u = gaussian_probe(g);
        let a = QuantizedDouble::new(g, &DoubleSymbol::from_symbol(&p, &g)?)?;
        diff(&a.apply(&u)?, &Quantized::new(g, &p)?.apply(&u)?)
    }),
    ("commutator of -ix with D", 1e-8, || {
        let g = Grid::new(1, 64, 10.0)?;
        let u = GridFunction::from_real_fn(g, |x| (-x[0] * x[0]).exp());
        let c = ad_x(Arc::new(Quantized::new(g, &Symbol::coordinate(0))?), 0)?;
        Ok(diff(&c.apply(&u)?, &u)? / u.sup_norm())
    }),
    ("commutator of -ix with a multiplication", 1e-12, || {
        let g = circle();
        let m: Operator = Arc::new(Multiplication::from_coefficient(g, &Coefficient::Sin(1.0)));
        Ok(ad_x(m, 0)?.apply(&gaussian_probe(g))?.sup_norm())
    }),
    ("commutators of the identity", 1e-12, || {
        let g = circle();
        let id: Operator = Arc::new(Identity::new(g));
        let c = iterated_commutator(id, &Block::decompose(&[1], &[1]))?;
        Ok(c.apply(&gaussian_probe(g))?.sup_norm())
    }),
    ("norm of the identity", 1e-8, || {
        let id: Operator = Arc::new(Identity::new(circle()));
        Ok((op_norm(&id, 0.0, 2.0)?.value - 1.0).abs())
    }),
    ("membership of the identity", 1e-12, || {
        let family: OperatorFamily = Arc::new(|g: &Grid| Ok(Arc::new(Identity::new(*g)) as Operator));
        let params = MembershipParams { order: 0.0, rho: 1.0, mtilde: 1, budget: 1, q: 2.0 };
        let r = membership(&family, &Grid::new(1, 16, 4.0)?, params)?;
        let off = r.entries.iter().filter(|e| e.alpha != [0] || e.beta != [0]).map(|e| e.fine).fold(0.0, f64::max);
        let id = r.entry(&[0], &[0]).map_or(f64::INFINITY, |e| (e.fine - 1.0).abs());
        Ok(if r.verdict { off.max(id) } else { f64::INFINITY })
    }),
    ("zero operator probes to zero", 0.0, || {
        let g = Grid::new(1, 16, 4.0)?;
        let t: Operator = Arc::new(Zero::new(g));
        let a = probe_double_symbol(&t, &GridFunction::gaussian(g), 0.05, None)?;
        Ok(a.table().map_or(f64::INFINITY, |t| t.values().iter().map(|v| v.norm()).fold(0.0, f64::max)))
    }),
    ("reduction of m(x')", 1e-5, || {
        let g = Grid::new(1, 32, PI)?;
        let a = DoubleSymbol::from_fn("cos(x')", DoubleClass::bounded(0.0), |_, _, y| C64::new(y[0].cos(), 0.0));
        let t = reduce(&a, &g)?.table(&g)?;
        let truth = Symbol::coefficient(Coefficient::Cos(1.0)).table(&g)?;
        Ok(t.compare(&truth, g.half_length, g.nyquist())?.sup_difference)
    }),
    ("commutator with a constant coefficient", 1e-12, || {
        let r = blowup_probe(&Coefficient::Constant(1.0), &BlowupParams { sizes: vec![16, 32], ..Default::default() })?;
        Ok(r.rows.iter().map(|r| r.norm).fold(0.0, f64::max))
    }),
];

pub fn run_selftest() -> SelftestReport {
    let rows: Vec<SelftestRow> = CHECKS
        .iter()
        .map(|(name, tolerance, f)| {
            let error = f().unwrap_or(f64::INFINITY);
            SelftestRow { name: name.to_string(), error, tolerance: *tolerance, pass: error <= *tolerance }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    SelftestReport { rows, pass }
}
