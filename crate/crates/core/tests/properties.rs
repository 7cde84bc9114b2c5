//! Property tests for the invariants that hold for whole families of inputs.

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use psido::characterize::{recover_symbol, RecoveryOptions};
use psido::grid::{
    derivative, forward_transform, inverse_transform, lp_norm, modulate, translate, Grid, GridFunction, C64,
};
use psido::operators::{
    membership, op_norm, FourierMultiplier, LinearOperator, MembershipParams, Operator, OperatorFamily, Quantized,
};
use psido::oscint::{oscint_ibp, oscint_regularized, Amplitude, Cutoff, Regularizer};
use psido::spaces::{band_limited, bessel_norm, hoelder_norm, order_reduce, zygmund_norm};
use psido::symbols::{hoelder_class_table, Coefficient, Multiplier, Symbol};

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn values(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(c64(), n)
}

/// Random combination of the first few lattice modes.
fn band(grid: Grid, coefficients: &[C64]) -> GridFunction {
    let dxi = grid.freq_spacing();
    let half = coefficients.len() as i64 / 2;
    let modes: Vec<(f64, C64)> =
        coefficients.iter().enumerate().map(|(i, c)| ((i as i64 - half) as f64 * dxi, *c)).collect();
    band_limited(grid, &modes).unwrap()
}

fn probe(grid: Grid, c: f64, k: f64, w: f64) -> GridFunction {
    GridFunction::from_fn(grid, move |x| C64::from_polar((-(x[0] - c).powi(2) / (2.0 * w * w)).exp(), k * x[0]))
}

fn relative(a: &GridFunction, b: &GridFunction) -> f64 {
    a.try_sub(b).unwrap().l2_norm() / b.l2_norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn plancherel(v in values(32)) {
        let g = Grid::new(1, 32, PI).unwrap();
        let u = GridFunction::new(g, v, false).unwrap();
        let spectral = forward_transform(&u).unwrap().l2_norm();
        prop_assert!((spectral - u.l2_norm()).abs() <= 1e-10 * u.l2_norm().max(1e-300));
    }

    #[test]
    fn transforms_are_inverse_and_linear(a in values(32), b in values(32), s in c64()) {
        let g = Grid::new(1, 32, 3.0).unwrap();
        let (u, v) = (GridFunction::new(g, a, false).unwrap(), GridFunction::new(g, b, false).unwrap());
        prop_assert!(relative(&inverse_transform(&forward_transform(&u).unwrap()).unwrap(), &u) <= 1e-12);
        let combo = u.zip_with(&v, |p, q| p + s * q).unwrap();
        let lhs = forward_transform(&combo).unwrap();
        let rhs = forward_transform(&u).unwrap().zip_with(&forward_transform(&v).unwrap(), |p, q| p + s * q).unwrap();
        prop_assert!(relative(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn modulation_and_translation_are_isometries(v in values(32), k in -8i32..8, shift in -16i32..16) {
        let g = Grid::new(1, 32, 4.0).unwrap();
        let u = GridFunction::new(g, v, false).unwrap();
        let (xi0, y) = (k as f64 * g.freq_spacing(), shift as f64 * g.spacing());
        let n = u.l2_norm();
        prop_assert!((modulate(&u, &[xi0]).unwrap().l2_norm() - n).abs() <= 1e-12 * n);
        prop_assert!((translate(&u, &[y]).unwrap().l2_norm() - n).abs() <= 1e-12 * n);
    }

    #[test]
    fn derivative_commutes_with_translation(c in values(9), shift in -16i32..16) {
        let g = Grid::new(1, 32, PI).unwrap();
        let u = band(g, &c);
        let y = shift as f64 * g.spacing();
        let a = derivative(&translate(&u, &[y]).unwrap(), &[1]).unwrap();
        let b = translate(&derivative(&u, &[1]).unwrap(), &[y]).unwrap();
        prop_assert!(a.try_sub(&b).unwrap().sup_norm() <= 1e-10 * b.sup_norm().max(1.0));
    }

    #[test]
    fn bessel_of_order_zero_is_lebesgue(v in values(32), q in 1.0..4.0f64) {
        let g = Grid::new(1, 32, PI).unwrap();
        let u = GridFunction::new(g, v, false).unwrap();
        prop_assert_eq!(bessel_norm(&u, 0.0, q).unwrap().value, lp_norm(&u, q).unwrap());
    }

    #[test]
    fn bessel_potentials_compose(v in values(32), m in -2.0..2.0f64, mp in -2.0..2.0f64) {
        let g = Grid::new(1, 32, 5.0).unwrap();
        let u = GridFunction::new(g, v, false).unwrap();
        let two = order_reduce(&order_reduce(&u, mp).unwrap(), m).unwrap();
        prop_assert!(relative(&two, &order_reduce(&u, m + mp).unwrap()) <= 1e-12);
    }

    #[test]
    fn quantization_is_linear_in_the_symbol(c in -2.0..2.0f64, k in 0i32..4, center in -2.0..2.0f64) {
        let g = Grid::new(1, 32, 2.0 * PI).unwrap();
        let p = Symbol::sin_coeff(1.0);
        let q = Symbol::separable(Coefficient::Mode(k as f64), Multiplier::bracket_power(-1.0));
        let (tp, tq) = (p.table(&g).unwrap(), q.table(&g).unwrap());
        let sum = psido::symbols::SymbolTable::new(
            g,
            tp.values().iter().zip(tq.values()).map(|(a, b)| a + c * b).collect(),
        ).unwrap();
        let op_sum = Quantized::from_table(sum, "p + c q");
        let u = probe(g, center, 1.0, 1.0);
        let lhs = op_sum.apply(&u).unwrap();
        let rhs = Quantized::new(g, &p).unwrap().apply(&u).unwrap()
            .zip_with(&Quantized::new(g, &q).unwrap().apply(&u).unwrap(), |a, b| a + c * b).unwrap();
        prop_assert!(lhs.try_sub(&rhs).unwrap().sup_norm() <= 1e-10 * rhs.sup_norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn zygmund_and_hoelder_are_comparable(
        k in prop::sample::select(vec![1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 17.0, 24.0, 33.0, 45.0]),
        phase in 0.0..(2.0 * PI),
        tau in prop::sample::select(vec![0.3, 0.5, 0.7]),
    ) {
        let g = Grid::new(1, 128, PI).unwrap();
        let u = GridFunction::from_real_fn(g, |x| (k * x[0] + phase).cos());
        let z = zygmund_norm(&u, tau).unwrap().value;
        let h = hoelder_norm(&u, 0, tau).unwrap().value;
        prop_assert!(z <= 4.0 * h && h <= 4.0 * z, "zygmund {} hoelder {}", z, h);
    }

    #[test]
    fn oscillatory_integral_is_linear(c in c64(), y0 in -1.0..1.0f64, e0 in -1.0..1.0f64) {
        let a = Amplitude::gaussian(1);
        let b = a.translated(&[y0], &[e0]);
        let reg = Regularizer::default();
        let combined = oscint_regularized(&a.combine(c, &b).unwrap(), &reg).unwrap().value;
        let separate = oscint_regularized(&a, &reg).unwrap().value + c * oscint_regularized(&b, &reg).unwrap().value;
        prop_assert!((combined - separate).norm() <= 1e-9);
    }
}

fn amplitude_set() -> Vec<Amplitude> {
    ["gaussian", "y_gaussian", "translated_gaussian(0.5, -0.3)", "translated_gaussian(-1, 0.7)"]
        .iter()
        .map(|s| psido::parse::amplitude(s, 1).unwrap())
        .collect()
}

#[test]
fn cutoff_choice_does_not_matter() {
    for a in amplitude_set() {
        let g = oscint_regularized(&a, &Regularizer::with_cutoff(Cutoff::Gaussian)).unwrap().value;
        let c = oscint_regularized(&a, &Regularizer::with_cutoff(Cutoff::Compact)).unwrap().value;
        assert!((g - c).norm() <= 1e-5, "{}: {g} vs {c}", a.label);
    }
}

#[test]
fn regularized_and_ibp_agree() {
    for a in amplitude_set() {
        let r = oscint_regularized(&a, &Regularizer::default()).unwrap().value;
        let i = oscint_ibp(&a, 2, 2).unwrap();
        assert!((r - i).norm() <= 1e-5, "{}: {r} vs {i}", a.label);
    }
}

#[test]
fn mollified_amplitudes_converge() {
    // a(y, η) = e^{-y²/2} e^{-|η|} has value (1/π) ∫ e^{-y²/2} / (1 + y²) dy
    let (n, h) = (80_000, 1e-3);
    let exact: f64 = (-n..=n)
        .map(|i| {
            let y = i as f64 * h;
            (-y * y / 2.0).exp() / (1.0 + y * y)
        })
        .sum::<f64>()
        * h
        / PI;
    let reg = Regularizer { schedule: vec![0.1, 0.05, 0.025], ..Regularizer::default() };
    let errors: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
        .iter()
        .map(|&d: &f64| {
            let a = Amplitude::new(1, "mollified", move |y, eta| {
                C64::new((-y[0] * y[0] / 2.0 - (eta[0] * eta[0] + d * d).sqrt()).exp(), 0.0)
            })
            .with_extents(Some(10.0), Some(40.0))
            .with_bands(10.0, 10.0);
            (oscint_regularized(&a, &reg).unwrap().value - exact).norm()
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

fn bounded_builtins() -> Vec<Symbol> {
    vec![
        Symbol::bracket_power(0.0),
        Symbol::sin_coeff(0.0),
        Symbol::separable(Coefficient::Cos(1.0), Multiplier::bracket_power(0.0)),
        Symbol::mode(2.0),
    ]
}

/// `‖T‖_{H^s → H^s} = ‖Λ^s T Λ^{-s}‖_{L² → L²}`.
fn scale_norm(t: &Operator, s: f64) -> f64 {
    let g = *t.grid();
    let conj = psido::operators::compose(vec![
        Arc::new(FourierMultiplier::bessel(g, s)),
        t.clone(),
        Arc::new(FourierMultiplier::bessel(g, -s)),
    ])
    .unwrap();
    op_norm(&conj, 0.0, 2.0).unwrap().value
}

#[test]
fn order_zero_builtins_are_bounded_on_every_scale() {
    let (coarse, fine) = (Grid::new(1, 32, 2.0 * PI).unwrap(), Grid::new(1, 64, 2.0 * PI).unwrap());
    for p in bounded_builtins() {
        for s in [-1.0, 0.0, 1.0] {
            let a = scale_norm(&(Arc::new(Quantized::new(coarse, &p).unwrap()) as Operator), s);
            let b = scale_norm(&(Arc::new(Quantized::new(fine, &p).unwrap()) as Operator), s);
            assert!(a.is_finite() && b <= 1.05 * a, "{} at s = {s}: {a} -> {b}", p.label);
        }
    }
}

#[test]
fn membership_sets_are_nested_in_rho() {
    let family: OperatorFamily = Arc::new(|g: &Grid| {
        Ok(Arc::new(Quantized::new(*g, &Symbol::weierstrass_times_bracket(0.5, 1.0, None))?) as Operator)
    });
    let grid = Grid::new(1, 32, 4.0 * PI).unwrap();
    let rho1 = membership(&family, &grid, MembershipParams { order: 1.0, rho: 1.0, mtilde: 0, budget: 2, q: 2.0 }).unwrap();
    let rho0 = membership(&family, &grid, MembershipParams { order: 1.0, rho: 0.0, mtilde: 0, budget: 2, q: 2.0 }).unwrap();
    assert!(rho1.verdict);
    for e in &rho0.entries {
        let f = rho1.entry(&e.alpha, &e.beta).unwrap();
        assert!(e.fine <= f.fine * (1.0 + 1e-6), "{:?}: {} > {}", e.alpha, e.fine, f.fine);
    }
}

fn recoverable_builtins() -> Vec<(Symbol, bool)> {
    vec![
        (Symbol::bracket_power(1.0), true),
        (Symbol::bracket_power(-1.0), true),
        (Symbol::sin_coeff(1.0), true),
        (Symbol::mode(1.0), true),
        (Symbol::separable(Coefficient::Cos(0.5), Multiplier::bracket_power(-2.0)), true),
        (Symbol::weierstrass_times_bracket(0.5, 1.0, None), false),
    ]
}

#[test]
fn builtins_pass_their_declared_class() {
    let g = Grid::new(1, 128, 4.0 * PI).unwrap();
    for (p, _) in recoverable_builtins() {
        let c = p.class;
        let t = hoelder_class_table(&p, &g, c.tau.max(0.5), c.order, c.rho, 1).unwrap();
        assert!(t.verdict, "{}: {:?}", p.label, t.entries);
    }
}

#[test]
fn recovery_is_consistent_and_robust() {
    let g = Grid::new(1, 128, 4.0 * PI).unwrap();
    for (p, smooth) in recoverable_builtins() {
        let t: Operator = Arc::new(Quantized::new(g, &p).unwrap());
        let truth = p.table(&g).unwrap();
        let r = recover_symbol(&t, &RecoveryOptions::default().with_order(p.class.order)).unwrap();
        let d = r.table.compare(&truth, r.resolved.x_radius, r.resolved.xi_radius).unwrap();
        assert!(d.relative() <= 1e-2, "{}: {d:?}", p.label);
        if !smooth {
            continue;
        }
        assert!(r.replay_error <= 5e-3, "{}: replay {}", p.label, r.replay_error);
        let coarse = recover_symbol(&t, &RecoveryOptions::default().with_order(p.class.order).with_epsilon(0.05)).unwrap();
        let fine = recover_symbol(&t, &RecoveryOptions::default().with_order(p.class.order).with_epsilon(0.025)).unwrap();
        let region = coarse.resolved;
        let gap = coarse.table.compare(&fine.table, region.x_radius, region.xi_radius).unwrap().sup_difference;
        assert!(gap <= 2e-3, "{}: epsilon gap {gap}", p.label);
    }
}
