//! Jaya and semi-steady-state Jaya (SJaya) for bounded continuous minimization,
//! with a benchmark suite, a PEM fuel cell stack design problem, a batch
//! experiment harness and the significance tests used to compare the two.

pub mod benchmarks;
pub mod compare;
pub mod error;
pub mod fuelcell;
pub mod harness;
pub mod optimizer;
pub mod problem;
pub mod stats;

pub use error::{Error, Result};
pub use optimizer::{
    accept, initialize_population, jaya_generation, make_candidate, run, run_observed, sjaya_generation, Individual,
    OptimizerConfig, Population, RDraws, RSchedule, RVector, RunTrace, StepEvent, StepObserver, Variant,
};
pub use problem::{Bounds, Problem, SuccessTarget};
