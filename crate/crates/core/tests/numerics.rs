use std::f64::consts::PI;

use funvol::numerics::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use statrs::function::gamma::gamma;

fn sym3() -> impl Strategy<Value = SymMatrix> {
    prop::array::uniform6(-2.0f64..2.0).prop_map(|e| SymMatrix::from_rows(&[vec![e[0], e[1], e[2]], vec![e[1], e[3], e[4]], vec![e[2], e[4], e[5]]]).unwrap())
}

#[test]
fn kappa_matches_gamma_function() {
    for j in 0..12 {
        let expect = PI.powf(j as f64 / 2.0) / gamma(j as f64 / 2.0 + 1.0);
        assert!((kappa(j) - expect).abs() <= 1e-13 * expect, "j = {j}");
    }
    assert_eq!(kappa(0), 1.0);
    assert!((kappa(2) - PI).abs() < 1e-15);
    assert!((kappa(3) - 4.0 * PI / 3.0).abs() < 1e-15);
}

#[test]
fn kappa_recursion() {
    for j in 1..12 {
        let x = j as f64;
        let step = PI.sqrt() * gamma((x + 1.0) / 2.0) / gamma(x / 2.0 + 1.0);
        assert!((kappa(j) - kappa(j - 1) * step).abs() <= 1e-12 * kappa(j));
    }
}

#[test]
fn flag_coefficient_values() {
    assert!((flag_coefficient(2, 1) - PI / 2.0).abs() < 1e-15);
    assert!((flag_coefficient(3, 2) - 2.0).abs() < 1e-15);
    for n in 0..7 {
        assert!((flag_coefficient(n, n) - 1.0).abs() < 1e-15);
        assert!((flag_coefficient(n, 0) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn elem_sym_examples() {
    assert_eq!(SymMatrix::identity(3).elem_sym(2), 3.0);
    assert!((SymMatrix::diagonal(&[1.0, 2.0, 3.0]).elem_sym(2) - 11.0).abs() < 1e-12);
    assert_eq!(SymMatrix::diagonal(&[4.0, -1.0]).elem_sym(0), 1.0);
}

#[test]
fn eigenvalue_examples() {
    assert_eq!(SymMatrix::diagonal(&[3.0, 1.0, 2.0]).eigenvalues(), vec![1.0, 2.0, 3.0]);
    assert_eq!(SymMatrix::identity(2).eigenvalues(), vec![1.0, 1.0]);
    let e = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap().eigenvalues();
    assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
}

#[test]
fn interval_examples() {
    let cfg = QuadratureConfig::default();
    let tent = integrate_pieces(|t| (1.0 - t).max(0.0), &[0.0, 1.0, 3.0], Endpoints::Regular, &cfg);
    assert!((tent.value - 0.5).abs() < 1e-13 && tent.converged);
    let log = integrate_pieces(|t| -t.ln(), &[0.0, 1.0], Endpoints::SingularLower, &cfg);
    assert!((log.value - 1.0).abs() < 1e-9 && log.converged);
    assert_eq!(integrate(|_| 0.0, 0.0, 5.0, &cfg).value, 0.0);
}

#[test]
fn box_examples() {
    let cfg = QuadratureConfig::default();
    let hints = BoxHints::default();
    let one = integrate_box(&|_: &[f64]| 1.0, &[0.0, 0.0], &[1.0, 1.0], &hints, &cfg);
    assert!((one.value - 1.0).abs() < 1e-14);
    let gauss = integrate_box(&|x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp(), &[-6.0, -6.0], &[6.0, 6.0], &hints, &cfg);
    assert!((gauss.value - PI).abs() < 1e-8, "{}", gauss.value);
}

#[test]
fn ellipsoid_example() {
    // ∫_{|x|<1} |x|^{-1} dx = 2π in the plane
    let cfg = QuadratureConfig::default();
    let e = integrate_ellipsoid(&|x: &[f64]| 1.0 / x[0].hypot(x[1]), &[0.0, 0.0], &SymMatrix::identity(2), 1.0, &[], &cfg).unwrap();
    assert!((e.value - 2.0 * PI).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elem_sym_generates_characteristic_polynomial(a in sym3()) {
        let m = a.to_dmatrix();
        for t in [1.0, 2.0, 5.0] {
            let det = (DMatrix::identity(3, 3) * t + &m).determinant();
            let poly: f64 = (0..=3).map(|i| a.elem_sym(i) * t.powi(3 - i as i32)).sum();
            let scale = (0..=3).map(|i| (a.elem_sym(i) * t.powi(3 - i as i32)).abs()).sum::<f64>().max(1.0);
            prop_assert!((det - poly).abs() <= 1e-10 * scale, "t={t}: {det} vs {poly}");
        }
    }

    #[test]
    fn elem_sym_is_homogeneous(a in sym3(), c in 0.1f64..4.0) {
        for i in 0..=3 {
            let lhs = a.scaled(c).elem_sym(i);
            let rhs = c.powi(i as i32) * a.elem_sym(i);
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn elementary_symmetric_of_eigenvalues(a in sym3()) {
        let ev = a.eigenvalues();
        for i in 0..=3 {
            prop_assert!((elementary_symmetric(&ev, i) - a.elem_sym(i)).abs() <= 1e-11 * (1.0 + a.elem_sym(i).abs()));
        }
    }

    #[test]
    fn interval_integral_is_linear(p in -3.0f64..3.0, q in -3.0f64..3.0, w in 0.5f64..5.0) {
        let cfg = QuadratureConfig::default();
        let f = |t: f64| (w * t).sin();
        let g = |t: f64| (1.0 - t).max(0.0).sqrt();
        let breaks = [0.0, 1.0, 2.0];
        let ef = integrate_pieces(f, &breaks, Endpoints::Regular, &cfg);
        let eg = integrate_pieces(g, &breaks, Endpoints::Regular, &cfg);
        let eh = integrate_pieces(|t| p * f(t) + q * g(t), &breaks, Endpoints::Regular, &cfg);
        let tol = 3.0 * (eh.error + p.abs() * ef.error + q.abs() * eg.error) + 1e-13;
        prop_assert!((eh.value - p * ef.value - q * eg.value).abs() <= tol);
    }

    #[test]
    fn interval_integral_is_monotone(shift in 0.0f64..2.0, w in 0.5f64..5.0) {
        let cfg = QuadratureConfig::default();
        let f = |t: f64| (w * t).cos() + 1.0;
        let lo = integrate(f, 0.0, 2.0, &cfg);
        let hi = integrate(|t| f(t) + shift * t * t, 0.0, 2.0, &cfg);
        prop_assert!(hi.value >= lo.value - 3.0 * (lo.error + hi.error) - 1e-14);
    }

    #[test]
    fn streams_are_schedule_independent(seed in any::<u64>(), i in 0u64..1000) {
        use rand::Rng;
        let s = RngStreams::new(seed);
        let a: [f64; 4] = std::array::from_fn({ let mut r = s.stream(i); move |_| r.random() });
        let b: [f64; 4] = std::array::from_fn({ let mut r = s.stream(i); move |_| r.random() });
        prop_assert_eq!(a, b);
    }
}
