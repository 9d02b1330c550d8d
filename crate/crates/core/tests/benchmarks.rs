use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sjaya_core::benchmarks::{evaluate, suite, BenchmarkId};

#[test]
fn optima_evaluate_to_the_global_minimum() {
    for id in BenchmarkId::ALL {
        let spec = id.spec();
        let f = evaluate(id, &id.optimum_point()).unwrap();
        assert!((f - spec.global_min_value).abs() <= 1e-12, "{id}: {f}");
        assert!(spec.bounds().contains(&id.optimum_point()), "{id}");
    }
}

#[test]
fn random_points_never_beat_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for id in BenchmarkId::ALL {
        let spec = id.spec();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..spec.dimension)
                .map(|_| rng.random_range(spec.lower..=spec.upper))
                .collect();
            let f = evaluate(id, &x).unwrap();
            assert!(f >= spec.global_min_value - 1e-12, "{id} at {x:?}: {f}");
        }
    }
}

#[test]
fn hand_computed_values() {
    assert_eq!(evaluate(BenchmarkId::GoldsteinPrice, &[0.0, 0.0]).unwrap(), 600.0);
    assert_eq!(evaluate(BenchmarkId::Rosenbrock, &[0.0; 30]).unwrap(), 29.0);
    assert_eq!(evaluate(BenchmarkId::Step, &[2.7; 30]).unwrap(), 60.0);
    let b3 = evaluate(BenchmarkId::Bohachevsky3, &[1.0, 0.0]).unwrap();
    let expected = 1.0 - 0.3 * (3.0 * std::f64::consts::PI).cos() + 0.3;
    assert!((b3 - expected).abs() < 1e-14);
    let bc = evaluate(BenchmarkId::BartelsConn, &[1.0, 1.0]).unwrap();
    assert!((bc - (3.0 + 1f64.sin() + 1f64.cos())).abs() < 1e-14);
    let ackley_one = evaluate(BenchmarkId::Ackley, &[1.0; 30]).unwrap();
    let expected = -20.0 * (-0.2f64).exp() - 1f64.exp() + 20.0 + std::f64::consts::E;
    assert!((ackley_one - expected).abs() < 1e-12);
}

#[test]
fn suite_problems_match_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, id) in suite().iter().zip(BenchmarkId::ALL) {
        let spec = id.spec();
        let x: Vec<f64> = (0..spec.dimension)
            .map(|_| rng.random_range(spec.lower..=spec.upper))
            .collect();
        assert_eq!(p.objective(&x), evaluate(id, &x).unwrap());
        assert_eq!(p.name(), id.name());
        assert_eq!(p.known_optimum(), Some(spec.global_min_value));
    }
}

fn point(dim: usize, bound: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-bound..bound, dim)
}

proptest! {
    #[test]
    fn chung_reynolds_is_sphere_squared(x in point(30, 10.0)) {
        let s = evaluate(BenchmarkId::Sphere, &x).unwrap();
        let c = evaluate(BenchmarkId::ChungReynolds, &x).unwrap();
        prop_assert!((c - s * s).abs() <= 1e-12 * c.max(1.0));
    }

    #[test]
    fn even_functions_are_sign_symmetric(x in point(30, 10.0)) {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        for id in [BenchmarkId::Sphere, BenchmarkId::SumSquares, BenchmarkId::Step, BenchmarkId::Ackley, BenchmarkId::ChungReynolds] {
            let a = evaluate(id, &x).unwrap();
            let b = evaluate(id, &neg).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{}", id);
        }
    }

    #[test]
    fn two_dimensional_symmetries(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let m = |x: &[f64]| evaluate(BenchmarkId::Matyas, x).unwrap();
        prop_assert!((m(&[a, b]) - m(&[b, a])).abs() < 1e-12);
        prop_assert!((m(&[a, b]) - m(&[-a, -b])).abs() < 1e-12);
        let bc = |x: &[f64]| evaluate(BenchmarkId::BartelsConn, x).unwrap();
        prop_assert!((bc(&[a, b]) - bc(&[-a, -b])).abs() < 1e-12);
        let b2 = |x: &[f64]| evaluate(BenchmarkId::Bohachevsky2, x).unwrap();
        prop_assert!((b2(&[a, b]) - b2(&[-a, b])).abs() < 1e-12);
        prop_assert!((b2(&[a, b]) - b2(&[a, -b])).abs() < 1e-12);
    }
}
