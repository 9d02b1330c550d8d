mod common;

use proptest::prelude::*;
use sjaya_core::{
    make_candidate, run, run_observed, Bounds, Error, OptimizerConfig, Problem, RSchedule, RVector, StepEvent,
    StepObserver, SuccessTarget, Variant,
};

#[test]
fn exhaustive_small_instances_hold_every_invariant() {
    let n = common::exhaustive_small_instances().unwrap();
    assert_eq!(n, 3 * 4 * 9 * 2 * 2 * 3);
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::SJaya), Just(Variant::Jaya)]
}

fn schedule() -> impl Strategy<Value = RSchedule> {
    prop_oneof![Just(RSchedule::PerGeneration), Just(RSchedule::PerIndividual)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_small_instances_hold_every_invariant(
        dim in 1usize..=3,
        which in 0usize..4,
        pop_size in 2usize..=10,
        generations in 0usize..=50,
        seed in any::<u64>(),
        variant in variant(),
        r_schedule in schedule(),
    ) {
        let problem = common::small_problems(dim).swap_remove(which);
        let config = OptimizerConfig { pop_size, generations, seed, variant, r_schedule };
        common::check_run(&problem, &config).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn clones_in_the_nonnegative_orthant_are_a_fixed_point(
        x in prop::collection::vec(0.0f64..10.0, 1..=3),
        pop_size in 2usize..=10,
        raw in prop::collection::vec((1e-9f64..=1.0, 1e-9f64..=1.0), 3),
    ) {
        let d = x.len();
        let r = RVector::new(raw[..d].iter().map(|p| p.0).collect(), raw[..d].iter().map(|p| p.1).collect(), 1).unwrap();
        common::check_clone_fixed_point(x, pop_size, r).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn candidates_stay_in_the_box(
        parts in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0, -50.0f64..50.0, 1e-9f64..=1.0, 1e-9f64..=1.0), 1..6),
    ) {
        let d = parts.len();
        let bounds = Bounds::uniform(d, -10.0, 10.0).unwrap();
        let cur: Vec<f64> = parts.iter().map(|p| p.0).collect();
        let best: Vec<f64> = parts.iter().map(|p| p.1).collect();
        let worst: Vec<f64> = parts.iter().map(|p| p.2).collect();
        let r = RVector::new(parts.iter().map(|p| p.3).collect(), parts.iter().map(|p| p.4).collect(), 1).unwrap();
        let c = make_candidate(&cur, &best, &worst, &r, &bounds).unwrap();
        prop_assert!(bounds.contains(&c));
        for i in 0..d {
            let abs = cur[i].abs();
            let raw = cur[i] + r.r1[i] * (best[i] - abs) - r.r2[i] * (worst[i] - abs);
            prop_assert_eq!(c[i], raw.clamp(-10.0, 10.0));
        }
    }

    #[test]
    fn drawn_coefficients_lie_in_half_open_unit_interval(seed in any::<u64>(), dim in 1usize..40) {
        let mut rng = sjaya_core::optimizer::coefficient_rng(seed);
        let r = RVector::draw(&mut rng, dim, 1);
        prop_assert!(r.r1.iter().chain(&r.r2).all(|v| *v > 0.0 && *v <= 1.0));
        prop_assert_eq!(r.r1.len(), dim);
    }
}

fn sphere(dim: usize) -> Problem {
    Problem::new(
        "sphere",
        Bounds::uniform(dim, -5.0, 5.0).unwrap(),
        SuccessTarget::Near {
            value: 0.0,
            tolerance: 1e-6,
        },
        |x: &[f64]| x.iter().map(|v| v * v).sum(),
    )
}

#[test]
fn zero_generations_keep_only_the_initial_best() {
    let p = sphere(3);
    let t = run(&p, &OptimizerConfig::new(Variant::SJaya, 7, 0, 11)).unwrap();
    assert_eq!(t.evals, 7);
    assert!(t.improvements.iter().all(|pt| pt.evals <= 7));
}

#[test]
fn equal_seeds_share_the_initial_population() {
    let p = sphere(3);
    let a = run(&p, &OptimizerConfig::new(Variant::SJaya, 8, 0, 5)).unwrap();
    let b = run(&p, &OptimizerConfig::new(Variant::Jaya, 8, 0, 5)).unwrap();
    assert_eq!(a.improvements, b.improvements);
    assert_eq!(a.best, b.best);
}

#[derive(Default)]
struct FirstSteps(Vec<(usize, f64, bool)>);

impl StepObserver for FirstSteps {
    fn on_step(&mut self, e: &StepEvent<'_>) {
        if e.generation == 1 {
            self.0.push((e.index, e.candidate_fitness, e.accepted));
        }
    }
}

#[test]
fn paired_runs_agree_until_the_first_index_update() {
    let p = sphere(3);
    for seed in 0..20 {
        let mut s = FirstSteps::default();
        let mut j = FirstSteps::default();
        run_observed(&p, &OptimizerConfig::new(Variant::SJaya, 6, 1, seed), &mut s).unwrap();
        run_observed(&p, &OptimizerConfig::new(Variant::Jaya, 6, 1, seed), &mut j).unwrap();
        // Until a member is replaced both sweeps see the same population.
        let diverge = s.0.iter().position(|st| st.2).map_or(6, |k| k + 1);
        assert_eq!(s.0[..diverge], j.0[..diverge], "seed {seed}");
    }
}

#[test]
fn non_finite_objective_aborts_the_run() {
    let p = Problem::new(
        "nan",
        Bounds::uniform(2, -1.0, 1.0).unwrap(),
        SuccessTarget::AtMost(0.0),
        |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { x[0] },
    );
    let r = run(&p, &OptimizerConfig::new(Variant::SJaya, 10, 20, 3));
    assert!(matches!(r, Err(Error::Evaluation { .. })), "{r:?}");
}

#[test]
fn population_of_one_is_rejected() {
    let r = run(&sphere(2), &OptimizerConfig::new(Variant::Jaya, 1, 5, 0));
    assert!(matches!(r, Err(Error::Config(_))));
}
