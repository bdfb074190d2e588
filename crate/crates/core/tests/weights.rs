use funvol::numerics::log_grid;
use funvol::weights::*;
use proptest::prelude::*;

fn tent() -> WeightFunction {
    WeightFunction::tent(1.0).unwrap()
}

/// Composite Simpson rule, an independent check on transform quadrature.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn forward_tent_matches_hand_formula() {
    for l in 1..=4u32 {
        let r = transform_r_power(&tent(), l);
        let lf = l as f64;
        for s in [1e-4f64, 0.01, 0.3, 0.77, 0.999] {
            let expect = s.powf(lf) * (1.0 - s) + (1.0 - s.powf(lf)) - lf / (lf + 1.0) * (1.0 - s.powf(lf + 1.0));
            assert!((r.eval(s) - expect).abs() < 1e-14, "l={l} s={s}");
        }
        assert!((r.limit_at_zero().unwrap() - 1.0 / (lf + 1.0)).abs() < 1e-14);
    }
}

#[test]
fn r_of_logcap_is_tent() {
    let r = transform_r(&WeightFunction::log_cap());
    for s in log_grid(1e-4, 1.0, 200) {
        assert!((r.eval(s) - (1.0 - s).max(0.0)).abs() < 1e-12, "s={s}");
    }
    for l in 1..4 {
        let r = transform_r_power(&WeightFunction::log_cap(), l);
        assert!((r.limit_at_zero().unwrap() - 1.0 / l as f64).abs() < 1e-13);
    }
}

#[test]
fn inverse_of_tent() {
    let r1 = transform_r_inverse(&tent(), 1).unwrap();
    let r2 = transform_r_inverse(&tent(), 2).unwrap();
    for s in log_grid(1e-3, 0.999, 100) {
        assert!((r1.eval(s) + s.ln()).abs() < 1e-10);
        assert!((r2.eval(s) - (1.0 / s - 1.0)).abs() < 1e-9 * (1.0 / s));
    }
}

#[test]
fn forward_bump_matches_simpson() {
    let b = WeightFunction::bump(0.2, 0.8).unwrap();
    for l in 1..=3 {
        let r = transform_r_power(&b, l);
        for s in [0.1f64, 0.25, 0.5, 0.7] {
            let tail = simpson(|t| t.powi(l as i32 - 1) * b.eval(t), s.max(0.2), 0.8, 20000);
            let expect = s.powi(l as i32) * b.eval(s) + l as f64 * tail;
            assert!((r.eval(s) - expect).abs() < 1e-10, "l={l} s={s}");
        }
    }
}

#[test]
fn round_trips_on_default_grid() {
    let weights = [
        tent(),
        WeightFunction::bump(0.2, 0.8).unwrap(),
        WeightFunction::poly_capped(vec![1.0, 0.0, -3.0, 2.0], 1.0).unwrap(),
    ];
    for w in &weights {
        for l in 1..=3 {
            let back = transform_r_inverse(&transform_r_power(w, l), l).unwrap();
            for s in log_grid(1e-4, w.s_max(), 200) {
                let d = (back.eval(s) - w.eval(s)).abs();
                assert!(d < 1e-7, "{w:?} l={l} s={s} d={d}");
            }
        }
    }
}

#[test]
fn composition_equals_power() {
    for w in [tent(), WeightFunction::log_cap(), WeightFunction::bump(0.1, 0.6).unwrap()] {
        let twice = transform_r(&transform_r(&w));
        let power = transform_r_power(&w, 2);
        for s in log_grid(1e-3, w.s_max(), 40) {
            assert!((twice.eval(s) - power.eval(s)).abs() < 1e-8, "{w:?} s={s}");
        }
    }
}

#[test]
fn coefficient_functions() {
    use std::f64::consts::PI;
    let a = alpha_from_zeta(&tent(), 1, 2).unwrap();
    // κ_1 R Tent(0) = 2 · 1/2
    assert!((a.limit_at_zero().unwrap() - 1.0).abs() < 1e-14);
    let x = xi_from_zeta(&tent(), 1, 2, 3).unwrap();
    // κ_1 / binom(2,1) · R Tent
    assert!((x.eval(0.5) - 0.375).abs() < 1e-14);
    let a0 = alpha_from_zeta(&tent(), 0, 2).unwrap();
    assert!((a0.limit_at_zero().unwrap() - PI / 3.0).abs() < 1e-13);
}

fn poly_strategy() -> impl Strategy<Value = WeightFunction> {
    (prop::collection::vec(-2.0f64..2.0, 1..5), 0.3f64..2.0)
        .prop_map(|(c, cut)| WeightFunction::poly_capped(c, cut).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, s0 in 0.2f64..2.0, s in 1e-3f64..2.0) {
        let t = WeightFunction::tent(s0).unwrap();
        let lc = WeightFunction::log_cap();
        let combo = WeightFunction::sum(vec![WeightFunction::scaled(t.clone(), a), WeightFunction::scaled(lc.clone(), b)]);
        let lhs = transform_r(&combo).eval(s);
        let rhs = a * transform_r(&t).eval(s) + b * transform_r(&lc).eval(s);
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn polynomial_round_trip(w in poly_strategy(), l in 1u32..4, frac in 0.01f64..0.99) {
        let s = frac * w.s_max();
        let back = transform_r_inverse(&transform_r_power(&w, l), l).unwrap();
        prop_assert!((back.eval(s) - w.eval(s)).abs() < 1e-8);
    }

    #[test]
    fn forward_then_inverse_is_identity_after_inverse(l in 1u32..3, frac in 0.05f64..0.95) {
        // R^l R^{-l} ρ = ρ for ρ = R^l Tent
        let rho = transform_r_power(&tent(), l);
        let there = transform_r_power(&transform_r_inverse(&rho, l).unwrap(), l);
        prop_assert!((there.eval(frac) - rho.eval(frac)).abs() < 1e-8);
    }

    #[test]
    fn vanishes_beyond_support(w in poly_strategy(), l in -2i32..4, extra in 0.0f64..3.0) {
        let r = WeightFunction::transform(w.clone(), l);
        prop_assert_eq!(r.eval(w.s_max() + extra), 0.0);
    }

    #[test]
    fn limit_matches_small_argument(l in 1u32..4, s0 in 0.5f64..2.0) {
        let r = transform_r_power(&WeightFunction::tent(s0).unwrap(), l);
        let lim = r.limit_at_zero().unwrap();
        prop_assert!((r.eval(1e-9) - lim).abs() < 1e-7);
    }
}

fn class_catalog() -> Vec<(&'static str, WeightFunction)> {
    vec![
        ("tent", tent()),
        ("log_cap", WeightFunction::log_cap()),
        ("bump", WeightFunction::bump(0.2, 0.8).unwrap()),
        ("poly", WeightFunction::poly_capped(vec![1.0, 0.0, -3.0, 2.0], 1.0).unwrap()),
        ("inverse_tent", transform_r_inverse(&tent(), 1).unwrap()),
        ("inverse2_tent", transform_r_inverse(&tent(), 2).unwrap()),
    ]
}

#[test]
fn transform_preserves_class_membership() {
    for (name, w) in class_catalog() {
        for n in 1..=4usize {
            for k in 0..n {
                if !HadClass::new(k, n).contains(&w).unwrap() {
                    continue;
                }
                for l in 0..=(n - k) as u32 {
                    let moved = transform_r_power(&w, l);
                    assert!(HadClass::new(k, n - l as usize).contains(&moved).unwrap(), "{name}: Had_{k}^{n} under R^{l}");
                }
            }
        }
    }
}

#[test]
fn tail_integral_limit_law() {
    for (name, w) in class_catalog() {
        for n in 2..=4usize {
            for k in 0..n - 1 {
                if !HadClass::new(k, n).contains(&w).unwrap() {
                    continue;
                }
                let q: Vec<f64> =
                    [1e-2, 1e-3, 1e-4].iter().map(|&s: &f64| s.powi((n - 1 - k) as i32) * w.partial_moment(0, s, f64::INFINITY).abs()).collect();
                assert!(q[0] > q[1] && q[1] > q[2], "{name} Had_{k}^{n}: {q:?}");
            }
        }
    }
}
