#![allow(dead_code)]

use sjaya_core::optimizer::Evaluator;
use sjaya_core::{
    accept, run, run_observed, sjaya_generation, Bounds, Individual, OptimizerConfig, Population, Problem, RDraws,
    RSchedule, RVector, StepEvent, StepObserver, SuccessTarget, Variant,
};

/// Small objectives with ties, plateaus and negative values.
pub fn small_problems(dim: usize) -> Vec<Problem> {
    let target = SuccessTarget::Near {
        value: 0.0,
        tolerance: 1e-6,
    };
    let b = |lo: f64, hi: f64| Bounds::uniform(dim, lo, hi).unwrap();
    vec![
        Problem::new("sphere", b(-5.0, 5.0), target, |x: &[f64]| {
            x.iter().map(|v| v * v).sum()
        }),
        Problem::new("step", b(-3.0, 3.0), target, |x: &[f64]| {
            x.iter().map(|v| v.abs().floor()).sum()
        }),
        Problem::new("plateau", b(-1.0, 1.0), target, |x: &[f64]| {
            if x.iter().all(|v| v.abs() < 0.5) {
                0.0
            } else {
                1.0
            }
        }),
        Problem::new("tilted", b(-2.0, 4.0), target, |x: &[f64]| {
            x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * v - v.sin()).sum()
        }),
    ]
}

/// Checks every per-step and per-generation property of a run.
struct Checker<'a> {
    bounds: &'a Bounds,
    steps: u64,
    generation_start: Option<(usize, usize)>,
    variant: Option<Variant>,
    errors: Vec<String>,
}

impl Checker<'_> {
    fn fail(&mut self, msg: String) {
        if self.errors.len() < 5 {
            self.errors.push(msg);
        }
    }
}

fn min_fitness(pop: &Population) -> f64 {
    pop.members.iter().map(|m| m.fitness).fold(f64::INFINITY, f64::min)
}

fn max_fitness(pop: &Population) -> f64 {
    pop.members.iter().map(|m| m.fitness).fold(f64::NEG_INFINITY, f64::max)
}

impl StepObserver for Checker<'_> {
    fn on_step(&mut self, e: &StepEvent<'_>) {
        self.steps += 1;
        self.variant = Some(e.variant);
        let pop = e.population;
        let at = format!("gen {} step {}", e.generation, e.index);
        if e.accepted != accept(e.candidate_fitness, e.previous_fitness, e.variant) {
            self.fail(format!("{at}: acceptance replay disagrees"));
        }
        let now = pop.members[e.index].fitness;
        let expected = if e.accepted {
            e.candidate_fitness
        } else {
            e.previous_fitness
        };
        if now != expected {
            self.fail(format!("{at}: member fitness {now} after step, expected {expected}"));
        }
        match e.variant {
            Variant::SJaya => {
                if pop.best().fitness != min_fitness(pop) {
                    self.fail(format!("{at}: best_index does not attain the minimum"));
                }
                if e.worst_rescanned && (pop.worst_index != pop.scan_worst() || pop.worst().fitness != max_fitness(pop))
                {
                    self.fail(format!("{at}: rescanned worst_index does not attain the maximum"));
                }
            }
            Variant::Jaya => {
                if self.generation_start.is_none() {
                    self.generation_start = Some((pop.best_index, pop.worst_index));
                }
                if self.generation_start != Some((pop.best_index, pop.worst_index)) {
                    self.fail(format!("{at}: Jaya indices moved during the sweep"));
                }
            }
        }
    }

    fn on_generation_end(&mut self, generation: usize, pop: &Population) {
        self.generation_start = None;
        if pop.best().fitness != min_fitness(pop) || pop.worst().fitness != max_fitness(pop) {
            self.fail(format!("gen {generation}: indices stale at generation end"));
        }
        if self.variant == Some(Variant::Jaya)
            && (pop.best_index, pop.worst_index) != (pop.scan_best(), pop.scan_worst())
        {
            self.fail(format!("gen {generation}: Jaya indices not rescanned"));
        }
        if let Some(m) = pop.members.iter().find(|m| !self.bounds.contains(&m.x)) {
            self.fail(format!("gen {generation}: member {:?} out of bounds", m.x));
        }
    }
}

/// Runs `config` on `problem` and checks the run invariants.
pub fn check_run(problem: &Problem, config: &OptimizerConfig) -> Result<(), String> {
    let mut checker = Checker {
        bounds: problem.bounds(),
        steps: 0,
        generation_start: None,
        variant: None,
        errors: Vec::new(),
    };
    let trace = run_observed(problem, config, &mut checker).map_err(|e| e.to_string())?;
    let ctx = format!("{} {:?}", problem.name(), config);
    if let Some(first) = checker.errors.first() {
        return Err(format!("{ctx}: {first}"));
    }
    if checker.steps != (config.pop_size * config.generations) as u64 {
        return Err(format!("{ctx}: {} steps observed", checker.steps));
    }
    if trace.evals != config.total_evals() {
        return Err(format!(
            "{ctx}: {} evaluations, expected {}",
            trace.evals,
            config.total_evals()
        ));
    }
    if trace
        .improvements
        .windows(2)
        .any(|w| !(w[1].best < w[0].best && w[1].evals > w[0].evals))
    {
        return Err(format!("{ctx}: best-so-far trace is not monotone"));
    }
    match trace.improvements.last() {
        Some(last) if last.best == trace.best_fitness() => {}
        _ => return Err(format!("{ctx}: final best does not end the trace")),
    }
    if problem.objective(&trace.best.x) != trace.best_fitness() || !problem.bounds().contains(&trace.best.x) {
        return Err(format!("{ctx}: reported best individual is inconsistent"));
    }
    let again = run(problem, config).map_err(|e| e.to_string())?;
    if again != trace {
        return Err(format!("{ctx}: replay with the same seed differs"));
    }
    Ok(())
}

/// One SJaya generation on identical members in the non-negative orthant.
pub fn check_clone_fixed_point(x: Vec<f64>, pop_size: usize, r: RVector) -> Result<(), String> {
    let dim = x.len();
    let problem = Problem::new(
        "sphere",
        Bounds::uniform(dim, -10.0, 10.0).unwrap(),
        SuccessTarget::AtMost(0.0),
        |x: &[f64]| x.iter().map(|v| v * v).sum(),
    );
    let fitness = problem.objective(&x);
    let members = vec![Individual { x, fitness }; pop_size];
    let mut pop = Population::from_members(members).map_err(|e| e.to_string())?;
    let before = pop.clone();
    let mut ev = Evaluator::new(&problem);
    sjaya_generation(&mut pop, &mut ev, RDraws::Shared(&r), 1, &mut ()).map_err(|e| e.to_string())?;
    if pop.members != before.members {
        return Err(format!("clone population moved: {:?}", pop.members[0].x));
    }
    Ok(())
}

/// The exhaustive small-instance sweep: pop 2..=10, d 1..=3, both variants
/// and schedules, several seeds, up to 50 generations.
pub fn exhaustive_small_instances() -> Result<usize, String> {
    let mut count = 0;
    for dim in 1..=3 {
        for problem in small_problems(dim) {
            for pop_size in 2..=10 {
                for variant in [Variant::SJaya, Variant::Jaya] {
                    for r_schedule in [RSchedule::PerGeneration, RSchedule::PerIndividual] {
                        for seed in 0..3 {
                            let generations = [0, 1, 7, 50][(seed as usize + pop_size) % 4];
                            let config = OptimizerConfig {
                                pop_size,
                                generations,
                                seed,
                                variant,
                                r_schedule,
                            };
                            check_run(&problem, &config)?;
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(count)
}
