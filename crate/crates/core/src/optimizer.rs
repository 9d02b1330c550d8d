//! Jaya and semi-steady-state Jaya (SJaya).
//!
//! Both variants sweep the population in index order and build one candidate
//! per member from the member itself, the population best and the population
//! worst:
//!
//! ```text
//! x_new[i] = x[i] + r1[i] * (best[i] - |x[i]|) - r2[i] * (worst[i] - |x[i]|)
//! ```
//!
//! clamped into the box. They differ in two places:
//!
//! * SJaya accepts a candidate that is at least as good as the member it
//!   replaces; Jaya requires a strict improvement.
//! * SJaya moves `best_index` as soon as a replacement beats the current best
//!   and rescans for the worst member only when the worst one was replaced.
//!   Jaya uses the best and worst individuals as they stood at the start of the
//!   generation and rescans both once the sweep is over.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Bounds, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Jaya,
    SJaya,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Jaya => "jaya",
            Variant::SJaya => "sjaya",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jaya" => Ok(Variant::Jaya),
            "sjaya" => Ok(Variant::SJaya),
            other => Err(Error::Parse(format!("unknown variant `{other}`"))),
        }
    }
}

/// How often the random coefficient vectors are redrawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RSchedule {
    /// One pair of vectors per generation, shared by every member.
    #[default]
    PerGeneration,
    /// A fresh pair for every candidate.
    PerIndividual,
}

impl FromStr for RSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "per_generation" => Ok(RSchedule::PerGeneration),
            "per_individual" => Ok(RSchedule::PerIndividual),
            other => Err(Error::Parse(format!("unknown r schedule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub seed: u64,
    pub variant: Variant,
    #[serde(default)]
    pub r_schedule: RSchedule,
}

impl OptimizerConfig {
    pub fn new(variant: Variant, pop_size: usize, generations: usize, seed: u64) -> Self {
        Self {
            pop_size,
            generations,
            seed,
            variant,
            r_schedule: RSchedule::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 {
            return Err(Error::Config(format!(
                "population size must be at least 2, got {}",
                self.pop_size
            )));
        }
        Ok(())
    }

    /// Objective evaluations a complete run performs.
    pub fn total_evals(&self) -> u64 {
        self.pop_size as u64 * (self.generations as u64 + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Vec<f64>,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub best_index: usize,
    pub worst_index: usize,
}

impl Population {
    /// Builds a population and sets both indices by full scan.
    pub fn from_members(members: Vec<Individual>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Config("population must not be empty".into()));
        }
        let mut pop = Self {
            members,
            best_index: 0,
            worst_index: 0,
        };
        pop.rescan();
        Ok(pop)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> &Individual {
        &self.members[self.best_index]
    }

    pub fn worst(&self) -> &Individual {
        &self.members[self.worst_index]
    }

    /// Index of the lowest fitness; ties go to the lowest index.
    pub fn scan_best(&self) -> usize {
        let mut idx = 0;
        for (j, m) in self.members.iter().enumerate().skip(1) {
            if m.fitness < self.members[idx].fitness {
                idx = j;
            }
        }
        idx
    }

    /// Index of the highest fitness; ties go to the lowest index.
    pub fn scan_worst(&self) -> usize {
        let mut idx = 0;
        for (j, m) in self.members.iter().enumerate().skip(1) {
            if m.fitness > self.members[idx].fitness {
                idx = j;
            }
        }
        idx
    }

    pub fn rescan(&mut self) {
        self.best_index = self.scan_best();
        self.worst_index = self.scan_worst();
    }
}

/// Random coefficients in (0, 1] for one candidate construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RVector {
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub generation: usize,
}

impl RVector {
    pub fn new(r1: Vec<f64>, r2: Vec<f64>, generation: usize) -> Result<Self> {
        if r1.len() != r2.len() {
            return Err(Error::Dimension {
                expected: r1.len(),
                actual: r2.len(),
            });
        }
        if let Some(bad) = r1.iter().chain(&r2).find(|r| !(**r > 0.0 && **r <= 1.0)) {
            return Err(Error::Config(format!("random coefficient {bad} outside (0, 1]")));
        }
        Ok(Self { r1, r2, generation })
    }

    /// Draws `2 * dim` values as `1 - u` with `u` uniform on [0, 1).
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, dim: usize, generation: usize) -> Self {
        let r1 = (0..dim).map(|_| 1.0 - rng.random::<f64>()).collect();
        let r2 = (0..dim).map(|_| 1.0 - rng.random::<f64>()).collect();
        Self { r1, r2, generation }
    }

    pub fn dim(&self) -> usize {
        self.r1.len()
    }
}

/// Coefficients for one sweep: shared by all members, or one set per member.
#[derive(Debug, Clone, Copy)]
pub enum RDraws<'a> {
    Shared(&'a RVector),
    PerMember(&'a [RVector]),
}

impl<'a> RDraws<'a> {
    fn for_member(&self, j: usize) -> &'a RVector {
        match *self {
            RDraws::Shared(r) => r,
            RDraws::PerMember(rs) => &rs[j],
        }
    }

    fn check(&self, pop_size: usize, dim: usize) -> Result<()> {
        let vectors: &[RVector] = match self {
            RDraws::Shared(r) => std::slice::from_ref(*r),
            RDraws::PerMember(rs) => {
                if rs.len() != pop_size {
                    return Err(Error::Dimension {
                        expected: pop_size,
                        actual: rs.len(),
                    });
                }
                rs
            }
        };
        match vectors.iter().find(|r| r.dim() != dim) {
            Some(r) => Err(Error::Dimension {
                expected: dim,
                actual: r.dim(),
            }),
            None => Ok(()),
        }
    }
}

/// One (evaluation count, best fitness so far) record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evals: u64,
    pub best: f64,
}

/// Counts objective evaluations and logs every improvement of the best-so-far.
#[derive(Debug)]
pub struct Evaluator<'a> {
    problem: &'a Problem,
    evals: u64,
    trace: Vec<TracePoint>,
    best: Option<Individual>,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        Self {
            problem,
            evals: 0,
            trace: Vec::new(),
            best: None,
        }
    }

    pub fn problem(&self) -> &Problem {
        self.problem
    }

    pub fn evals(&self) -> u64 {
        self.evals
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    pub fn best(&self) -> Option<&Individual> {
        self.best.as_ref()
    }

    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let dim = self.problem.dim();
        if x.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: x.len(),
            });
        }
        self.evals += 1;
        let f = self.problem.objective(x);
        if !f.is_finite() {
            return Err(Error::Evaluation {
                value: f,
                eval: self.evals,
            });
        }
        if self.best.as_ref().is_none_or(|b| f < b.fitness) {
            self.best = Some(Individual {
                x: x.to_vec(),
                fitness: f,
            });
            self.trace.push(TracePoint {
                evals: self.evals,
                best: f,
            });
        }
        Ok(f)
    }
}

/// What happened to member `index` during a sweep.
#[derive(Debug)]
pub struct StepEvent<'p> {
    pub variant: Variant,
    pub generation: usize,
    pub index: usize,
    pub previous_fitness: f64,
    pub candidate_fitness: f64,
    pub accepted: bool,
    /// SJaya only: the replaced member was the worst, so the worst was rescanned.
    pub worst_rescanned: bool,
    pub population: &'p Population,
}

/// Hook called after each inner step and after each sweep.
pub trait StepObserver {
    fn on_step(&mut self, _event: &StepEvent<'_>) {}

    fn on_generation_end(&mut self, _generation: usize, _population: &Population) {}
}

impl StepObserver for () {}

pub fn initialize_population<R: Rng + ?Sized>(
    pop_size: usize,
    rng: &mut R,
    evaluator: &mut Evaluator<'_>,
) -> Result<Population> {
    if pop_size < 2 {
        return Err(Error::Config(format!(
            "population size must be at least 2, got {pop_size}"
        )));
    }
    let bounds = evaluator.problem().bounds().clone();
    let mut members = Vec::with_capacity(pop_size);
    for _ in 0..pop_size {
        let x: Vec<f64> = bounds
            .lower()
            .iter()
            .zip(bounds.upper())
            .map(|(&lo, &hi)| (lo + rng.random::<f64>() * (hi - lo)).min(hi))
            .collect();
        let fitness = evaluator.evaluate(&x)?;
        members.push(Individual { x, fitness });
    }
    Population::from_members(members)
}

/// Builds a clamped candidate. The absolute value applies to `current` only.
pub fn make_candidate(current: &[f64], best: &[f64], worst: &[f64], r: &RVector, bounds: &Bounds) -> Result<Vec<f64>> {
    let d = current.len();
    for len in [best.len(), worst.len(), r.dim(), bounds.dim()] {
        if len != d {
            return Err(Error::Dimension {
                expected: d,
                actual: len,
            });
        }
    }
    Ok((0..d)
        .map(|i| {
            let abs = current[i].abs();
            let v = current[i] + r.r1[i] * (best[i] - abs) - r.r2[i] * (worst[i] - abs);
            bounds.clamp(i, v)
        })
        .collect())
}

pub fn accept(candidate_fitness: f64, current_fitness: f64, variant: Variant) -> bool {
    match variant {
        Variant::SJaya => candidate_fitness <= current_fitness,
        Variant::Jaya => candidate_fitness < current_fitness,
    }
}

pub fn sjaya_generation(
    pop: &mut Population,
    evaluator: &mut Evaluator<'_>,
    r: RDraws<'_>,
    generation: usize,
    observer: &mut dyn StepObserver,
) -> Result<()> {
    let bounds = evaluator.problem().bounds().clone();
    r.check(pop.len(), bounds.dim())?;
    for j in 0..pop.len() {
        let candidate = make_candidate(
            &pop.members[j].x,
            &pop.members[pop.best_index].x,
            &pop.members[pop.worst_index].x,
            r.for_member(j),
            &bounds,
        )?;
        let fitness = evaluator.evaluate(&candidate)?;
        let previous = pop.members[j].fitness;
        let accepted = accept(fitness, previous, Variant::SJaya);
        let mut worst_rescanned = false;
        if accepted {
            pop.members[j] = Individual { x: candidate, fitness };
            if fitness < pop.members[pop.best_index].fitness {
                pop.best_index = j;
            }
            if j == pop.worst_index {
                pop.worst_index = pop.scan_worst();
                worst_rescanned = true;
            }
        }
        observer.on_step(&StepEvent {
            variant: Variant::SJaya,
            generation,
            index: j,
            previous_fitness: previous,
            candidate_fitness: fitness,
            accepted,
            worst_rescanned,
            population: pop,
        });
    }
    observer.on_generation_end(generation, pop);
    Ok(())
}

pub fn jaya_generation(
    pop: &mut Population,
    evaluator: &mut Evaluator<'_>,
    r: RDraws<'_>,
    generation: usize,
    observer: &mut dyn StepObserver,
) -> Result<()> {
    let bounds = evaluator.problem().bounds().clone();
    r.check(pop.len(), bounds.dim())?;
    // Best and worst as they stood when the generation began.
    let best = pop.best().x.clone();
    let worst = pop.worst().x.clone();
    for j in 0..pop.len() {
        let candidate = make_candidate(&pop.members[j].x, &best, &worst, r.for_member(j), &bounds)?;
        let fitness = evaluator.evaluate(&candidate)?;
        let previous = pop.members[j].fitness;
        let accepted = accept(fitness, previous, Variant::Jaya);
        if accepted {
            pop.members[j] = Individual { x: candidate, fitness };
        }
        observer.on_step(&StepEvent {
            variant: Variant::Jaya,
            generation,
            index: j,
            previous_fitness: previous,
            candidate_fitness: fitness,
            accepted,
            worst_rescanned: false,
            population: pop,
        });
    }
    pop.rescan();
    observer.on_generation_end(generation, pop);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub variant: Variant,
    pub seed: u64,
    pub pop_size: usize,
    pub generations: usize,
    /// Every improvement of the best-so-far, in evaluation order.
    pub improvements: Vec<TracePoint>,
    pub best: Individual,
    pub evals: u64,
}

impl RunTrace {
    pub fn best_fitness(&self) -> f64 {
        self.best.fitness
    }

    /// Best-so-far fitness after `evals` evaluations.
    pub fn best_at(&self, evals: u64) -> Option<f64> {
        self.improvements
            .iter()
            .take_while(|p| p.evals <= evals)
            .last()
            .map(|p| p.best)
    }
}

/// RNG for the initial population. Depends only on the seed, so Jaya and SJaya
/// runs with equal seeds start from the same population.
pub fn init_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// RNG for the random coefficient vectors, on a separate stream of the seed.
pub fn coefficient_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

pub fn run(problem: &Problem, config: &OptimizerConfig) -> Result<RunTrace> {
    run_observed(problem, config, &mut ())
}

pub fn run_observed(problem: &Problem, config: &OptimizerConfig, observer: &mut dyn StepObserver) -> Result<RunTrace> {
    config.validate()?;
    let dim = problem.dim();
    let mut evaluator = Evaluator::new(problem);
    let mut pop = initialize_population(config.pop_size, &mut init_rng(config.seed), &mut evaluator)?;
    let mut r_rng = coefficient_rng(config.seed);

    for generation in 1..=config.generations {
        let draws: Vec<RVector> = match config.r_schedule {
            RSchedule::PerGeneration => vec![RVector::draw(&mut r_rng, dim, generation)],
            RSchedule::PerIndividual => (0..config.pop_size)
                .map(|_| RVector::draw(&mut r_rng, dim, generation))
                .collect(),
        };
        let r = match config.r_schedule {
            RSchedule::PerGeneration => RDraws::Shared(&draws[0]),
            RSchedule::PerIndividual => RDraws::PerMember(&draws),
        };
        match config.variant {
            Variant::SJaya => sjaya_generation(&mut pop, &mut evaluator, r, generation, observer)?,
            Variant::Jaya => jaya_generation(&mut pop, &mut evaluator, r, generation, observer)?,
        }
    }

    let best = evaluator
        .best()
        .cloned()
        .expect("initialization evaluates at least two points");
    Ok(RunTrace {
        variant: config.variant,
        seed: config.seed,
        pop_size: config.pop_size,
        generations: config.generations,
        improvements: evaluator.trace().to_vec(),
        best,
        evals: evaluator.evals(),
    })
}
