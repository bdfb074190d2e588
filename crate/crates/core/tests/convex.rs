use funvol::convex::{discrete_conjugate, ConvexBody, ConvexFunction};
use funvol::numerics::SymMatrix;
use funvol::subspaces::sample_rotation;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn catalog() -> Vec<(&'static str, ConvexFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let q = sample_rotation(3, &mut rng);
    let aniso = ConvexFunction::quadratic(
        SymMatrix::from_rows(&[vec![2.0, 0.3, 0.1], vec![0.3, 1.0, -0.2], vec![0.1, -0.2, 0.7]]).unwrap(),
        vec![0.2, -0.1, 0.4],
        0.3,
    )
    .unwrap();
    vec![
        ("quadratic", aniso.clone()),
        ("radial_power_3", ConvexFunction::radial_power(3, 3.0, 1.5).unwrap()),
        ("radial_power_1.5", ConvexFunction::radial_power(2, 1.5, 1.0).unwrap()),
        ("cone", ConvexFunction::cone(3, 0.5, 1.2).unwrap()),
        ("ball_indicator", ConvexFunction::indicator(ConvexBody::ball(vec![0.1, -0.2], 1.5).unwrap())),
        ("box_indicator", ConvexFunction::indicator(ConvexBody::cuboid(&[(-1.0, 1.0), (0.0, 2.0), (-0.5, 0.5)]).unwrap())),
        ("epi_translated", ConvexFunction::radial_power(3, 4.0, 1.0).unwrap().epi_translate(vec![0.3, 0.0, -0.4], 1.2).unwrap()),
        ("rotated", aniso.clone().rotate(q).unwrap()),
        ("epi_scaled", ConvexFunction::cone(2, 0.3, 1.0).unwrap().epi_scale(1.7).unwrap()),
        ("plus_affine", ConvexFunction::half_square(2).plus_affine(vec![0.5, -1.0], 0.2).unwrap()),
        (
            "inf_conv",
            ConvexFunction::radial_power(2, 2.0, 1.0).unwrap().inf_conv(ConvexFunction::radial_power(2, 2.0, 2.0).unwrap()).unwrap(),
        ),
        ("sum", aniso.clone().sum(ConvexFunction::half_square(3)).unwrap()),
    ]
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| r * (2.0 * rng.random::<f64>() - 1.0)).collect()
}

/// A random point of the domain.
fn domain_point(u: &ConvexFunction, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = u.dim();
    loop {
        let x = random_point(rng, n, 2.0);
        if u.eval(&x).is_finite() {
            return x;
        }
    }
}

#[test]
fn subgradient_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, u) in catalog() {
        for _ in 0..10 {
            let x = domain_point(&u, &mut rng);
            let sub = u.subdifferential(&x).unwrap();
            let y = sub.sample(&mut rng, 1.0);
            for _ in 0..100 {
                let z = random_point(&mut rng, u.dim(), 3.0);
                let uz = u.eval(&z);
                let bound = u.eval(&x) + dot(&y, &z) - dot(&y, &x);
                assert!(uz >= bound - 1e-12 * (1.0 + bound.abs()), "{name}: u(z) = {uz} < {bound}");
            }
        }
    }
}

#[test]
fn subgradients_at_boundary_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let boxed = ConvexFunction::indicator(ConvexBody::cuboid(&[(0.0, 1.0), (0.0, 1.0)]).unwrap());
    let corner = [1.0, 0.0];
    let sub = boxed.subdifferential(&corner).unwrap();
    assert_eq!(sub.rays.len(), 2);
    for _ in 0..100 {
        let y = sub.sample(&mut rng, 3.0);
        let z = [rng.random::<f64>(), rng.random::<f64>()];
        assert!(dot(&y, &z) <= dot(&y, &corner) + 1e-12);
    }
    let cone = ConvexFunction::cone(2, 0.5, 1.0).unwrap();
    let apex = cone.subdifferential(&[0.0, 0.0]).unwrap();
    assert!(!apex.is_singleton());
    for _ in 0..100 {
        let y = apex.sample(&mut rng, 1.0);
        let z = random_point(&mut rng, 2, 1.0);
        assert!(cone.eval(&z) >= dot(&y, &z) - 1e-12);
    }
}

#[test]
fn double_conjugate_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (name, u) in catalog() {
        let Ok(uss) = u.conjugate().and_then(|c| c.conjugate()) else { continue };
        for _ in 0..100 {
            let x = random_point(&mut rng, u.dim(), 2.0);
            let (a, b) = (u.eval(&x), uss.eval(&x));
            if a.is_infinite() || b.is_infinite() {
                assert_eq!(a, b, "{name} at {x:?}");
            } else {
                assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{name} at {x:?}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn fenchel_young() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for (name, u) in catalog() {
        let Ok(us) = u.conjugate() else { continue };
        for _ in 0..50 {
            let x = domain_point(&u, &mut rng);
            let y = random_point(&mut rng, u.dim(), 3.0);
            assert!(u.eval(&x) + us.eval(&y) >= dot(&x, &y) - 1e-10, "{name}");
            let g = u.subdifferential(&x).unwrap().sample(&mut rng, 1.0);
            let gap = u.eval(&x) + us.eval(&g) - dot(&x, &g);
            assert!(gap.abs() <= 1e-10 * (1.0 + dot(&x, &g).abs()), "{name}: gap {gap} at {x:?}");
        }
    }
}

#[test]
fn super_coercivity_certificate() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for (name, u) in catalog() {
        assert!(u.is_super_coercive(), "{name}");
        for _ in 0..50 {
            let w = random_point(&mut rng, u.dim(), 1.0);
            let nw = dot(&w, &w).sqrt();
            let x: Vec<f64> = w.iter().map(|c| 1e3 * c / nw).collect();
            assert!(u.eval(&x) / 1e3 > 10.0, "{name}");
        }
    }
    assert!(!ConvexFunction::support(ConvexBody::unit_ball(2)).is_super_coercive());
}

#[test]
fn catalog_conjugates() {
    let ball = ConvexFunction::indicator(ConvexBody::unit_ball(2));
    assert!(matches!(ball.conjugate().unwrap(), ConvexFunction::Support(_)));
    let half = ConvexFunction::half_square(3);
    for y in [[0.3, -1.0, 2.0], [0.0, 0.0, 0.0]] {
        assert!((half.conjugate().unwrap().eval(&y) - half.eval(&y)).abs() < 1e-15);
    }
    let cone = ConvexFunction::cone(2, 0.5, 1.0).unwrap().conjugate().unwrap();
    for r in [0.0, 0.3, 0.5, 0.8, 2.0] {
        assert!((cone.eval(&[r, 0.0]) - (r - 0.5f64).max(0.0)).abs() < 1e-15);
    }
}

#[test]
fn discrete_conjugate_matches_analytic() {
    let axis: Vec<f64> = (0..=400).map(|i| -4.0 + 0.02 * i as f64).collect();
    let dual: Vec<f64> = (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect();
    for (name, u) in catalog().into_iter().filter(|(_, u)| u.dim() == 2) {
        let Ok(us) = u.conjugate() else { continue };
        let values: Vec<f64> = axis.iter().flat_map(|&a| { let u = &u; axis.iter().map(move |&b| u.eval(&[a, b])) }).collect();
        let got = discrete_conjugate(&[axis.clone(), axis.clone()], &values, &[dual.clone(), dual.clone()]);
        let mut worst = 0.0f64;
        for (i, &a) in dual.iter().enumerate() {
            for (j, &b) in dual.iter().enumerate() {
                worst = worst.max((got[i * dual.len() + j] - us.eval(&[a, b])).abs());
            }
        }
        // a domain boundary is only resolved to the grid step, which costs h·|y|
        let bound = if name.ends_with("indicator") { 0.02 * 2f64.sqrt() } else { 5e-3 };
        assert!(worst < bound, "{name}: {worst}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn discrete_conjugate_never_exceeds_continuous(a in 0.3f64..3.0, b in -1.0f64..1.0, y in -2.0f64..2.0) {
        let u = ConvexFunction::quadratic(SymMatrix::diagonal(&[a]), vec![b], 0.0).unwrap();
        let xs: Vec<f64> = (0..=50).map(|i| -3.0 + 0.12 * i as f64).collect();
        let f: Vec<f64> = xs.iter().map(|&x| u.eval(&[x])).collect();
        let d = discrete_conjugate(&[xs], &f, &[vec![y]])[0];
        prop_assert!(d <= u.conjugate().unwrap().eval(&[y]) + 1e-12);
    }

    #[test]
    fn quadratic_fenchel_young_equality(d in prop::array::uniform3(0.2f64..3.0), x in prop::array::uniform3(-2.0f64..2.0)) {
        let u = ConvexFunction::quadratic(SymMatrix::diagonal(&d), vec![0.1, 0.0, -0.3], 0.5).unwrap();
        let g = u.gradient(&x).unwrap();
        let gap = u.eval(&x) + u.conjugate().unwrap().eval(&g) - dot(&x, &g);
        prop_assert!(gap.abs() <= 1e-10 * (1.0 + dot(&x, &g).abs()));
    }

    #[test]
    fn epi_scaling_rescales_values(lambda in 0.2f64..4.0, x in prop::array::uniform2(-2.0f64..2.0)) {
        let u = ConvexFunction::radial_power(2, 3.0, 1.0).unwrap();
        let v = u.clone().epi_scale(lambda).unwrap();
        let expect = lambda * u.eval(&[x[0] / lambda, x[1] / lambda]);
        prop_assert!((v.eval(&x) - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
    }
}
