use bmfactors::poly::{evaluate_on_grid_fft, evaluate_on_grid_horner};
use bmfactors::{
    conjugate_reciprocal, derivative, dilate, factor, l2_factor_trajectory, l2_norm, lp_norm, sample_coefficients,
    sample_trajectory, CircleGrid, DistributionSpec, NormSpec, Polynomial,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| Complex64::new(a, b)), 1..max_len)
}

fn poly(max_len: usize) -> impl Strategy<Value = Polynomial> {
    coeffs(max_len).prop_map(Polynomial::new)
}

fn law() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        Just(DistributionSpec::complex_gaussian()),
        Just(DistributionSpec::real_gaussian()),
        Just(DistributionSpec::rademacher()),
        Just(DistributionSpec::uniform_symmetric(3f64.sqrt()).unwrap()),
    ]
}

fn max_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_is_linear(p in poly(40), q in poly(40), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let (a, b) = (Complex64::new(a, 0.5), Complex64::new(b, -1.0));
        let lhs = derivative(&p.scale(a).add(&q.scale(b)));
        let rhs = derivative(&p).scale(a).add(&derivative(&q).scale(b));
        prop_assert!(max_dist(lhs.coeffs(), rhs.coeffs()) <= 1e-12);
    }

    #[test]
    fn derivative_lowers_degree(p in poly(40)) {
        let d = derivative(&p);
        prop_assert_eq!(d.formal_degree(), p.formal_degree().saturating_sub(1));
    }

    #[test]
    fn fft_matches_horner(p in poly(60), r in 0.3..1.7f64, extra in 0usize..40) {
        let grid = CircleGrid::new(r, p.formal_degree() + 1 + extra).unwrap();
        let a = evaluate_on_grid_fft(&p, &grid);
        let b = evaluate_on_grid_horner(&p, &grid);
        let scale = l2_norm(&p, r).max(1.0) * (p.formal_degree() + 1) as f64;
        prop_assert!(max_dist(&a, &b) <= 1e-10 * scale);
    }

    #[test]
    fn dilation_composes(p in poly(30), r in 0.2..2.0f64, s in 0.2..2.0f64) {
        let a = dilate(&dilate(&p, r), s);
        let b = dilate(&p, r * s);
        let scale = b.coeffs().iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(max_dist(a.coeffs(), b.coeffs()) <= 1e-12 * scale);
    }

    #[test]
    fn conjugate_reciprocal_is_involution(p in poly(30)) {
        let q = conjugate_reciprocal(&conjugate_reciprocal(&p));
        prop_assert_eq!(q, p);
    }

    #[test]
    fn l2_factor_bounded_by_degree(p in poly(40)) {
        let f = factor(&p, &NormSpec::l2(1.0).unwrap()).unwrap();
        prop_assert!(f.value <= p.formal_degree() as f64 * (1.0 + 1e-12));
    }

    #[test]
    fn factor_is_scale_invariant(p in poly(25), c in 0.1..10.0f64, ph in 0.0..std::f64::consts::TAU) {
        prop_assume!(!p.is_zero());
        let c = Complex64::from_polar(c, ph);
        for spec in [NormSpec::l2(0.7).unwrap(), NormSpec::new(3.0, 1.0).unwrap()] {
            let a = factor(&p, &spec).unwrap().value;
            let b = factor(&p.scale(c), &spec).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }

    #[test]
    fn l2_factor_is_rotation_invariant(p in poly(25), ph in 0.0..std::f64::consts::TAU) {
        let spec = NormSpec::l2(1.3).unwrap();
        let a = factor(&p, &spec).unwrap().value;
        let b = factor(&p.rotate(Complex64::from_polar(1.0, ph)), &spec).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn scaled_l2_factor_increases_with_radius(seed in 0u64..1000, n in 1usize..300, dist in law()) {
        let p = sample_coefficients(&dist, n, seed, 0);
        prop_assume!(!p.is_zero());
        let mut prev = 0.0;
        for i in 1..=20 {
            let r = 0.15 * i as f64;
            let v = r * factor(&p, &NormSpec::l2(r).unwrap()).unwrap().value;
            prop_assert!(v >= prev * (1.0 - 1e-12));
            prev = v;
        }
    }

    #[test]
    fn trajectory_matches_recomputation(seed in 0u64..1000, r in prop_oneof![Just(0.5), Just(1.0), Just(2.0)], dist in law()) {
        let traj = sample_trajectory(&dist, 400, seed, 1);
        let ns = [1, 7, 50, 399, 400];
        let inc = l2_factor_trajectory(&traj, r, &ns).unwrap();
        for s in &inc.samples {
            let direct = factor(&traj.prefix(s.n), &NormSpec::l2(r).unwrap()).unwrap().value;
            prop_assert!((s.value - direct).abs() <= 1e-10 * direct.max(1.0), "{} {} {}", s.n, s.value, direct);
        }
    }

    #[test]
    fn quadrature_agrees_with_exact_l2(seed in 0u64..10_000, n in 0usize..200, r in 0.5..1.5f64, dist in law()) {
        let p = sample_coefficients(&dist, n, seed, 2);
        let exact = l2_norm(&p, r);
        let quad = lp_norm(&p, &NormSpec::new(2.0, r).unwrap()).unwrap().value;
        prop_assert!((exact - quad).abs() <= 1e-9 * exact.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn prefixes_are_consistent(seed in 0u64..1000, n in 1usize..200, dist in law()) {
        let long = sample_coefficients(&dist, n + 50, seed, 4);
        let short = sample_coefficients(&dist, n, seed, 4);
        prop_assert_eq!(&long.coeffs()[..=n], short.coeffs());
    }
}
