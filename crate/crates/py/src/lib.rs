//! Python bindings: `import sjaya`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sjaya_core::benchmarks::{self as bench, BenchmarkId};
use sjaya_core::fuelcell::{self, CellParams, FuelCellOptions, MppMode, StackDesign};
use sjaya_core::harness::{self, ExperimentRow, SummaryRow};
use sjaya_core::stats::{self as st, SampleSummary, WilcoxonReport};
use sjaya_core::{OptimizerConfig, RSchedule, Variant};

fn err(e: sjaya_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = sjaya_core::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn mpp_mode(mpp: &str, step_amps: f64) -> PyResult<MppMode> {
    match mpp {
        "refined" => Ok(MppMode::Refined),
        "grid" => Ok(MppMode::CurrentGrid { step_amps }),
        other => Err(PyValueError::new_err(format!(
            "mpp must be `refined` or `grid`, got `{other}`"
        ))),
    }
}

/// Result of one optimization run.
#[pyclass(frozen, get_all, module = "sjaya")]
struct RunTrace {
    variant: String,
    seed: u64,
    best_fitness: f64,
    best_x: Vec<f64>,
    evals: u64,
    /// `(evaluations, best so far)` at every improvement.
    improvements: Vec<(u64, f64)>,
    first_hit: Option<u64>,
}

#[pymethods]
impl RunTrace {
    fn __repr__(&self) -> String {
        format!(
            "RunTrace(variant='{}', seed={}, best_fitness={}, evals={})",
            self.variant, self.seed, self.best_fitness, self.evals
        )
    }
}

/// Names of the benchmark functions, in table order.
#[pyfunction]
fn benchmarks() -> Vec<&'static str> {
    BenchmarkId::ALL.iter().map(|id| id.name()).collect()
}

/// Dimension, bounds and global minimum of a benchmark.
#[pyfunction]
fn benchmark_spec(name: &str) -> PyResult<(usize, f64, f64, f64)> {
    let s = parse::<BenchmarkId>(name)?.spec();
    Ok((s.dimension, s.lower, s.upper, s.global_min_value))
}

#[pyfunction]
fn evaluate(name: &str, x: Vec<f64>) -> PyResult<f64> {
    bench::evaluate(parse(name)?, &x).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (problem, variant="sjaya", pop=30, gens=100, seed=0, r_schedule="per_generation", integer_rounding=true))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    problem: &str,
    variant: &str,
    pop: usize,
    gens: usize,
    seed: u64,
    r_schedule: &str,
    integer_rounding: bool,
) -> PyResult<RunTrace> {
    let fc = FuelCellOptions {
        integer_rounding,
        ..FuelCellOptions::default()
    };
    let problem = harness::resolve_problem(problem, &CellParams::default(), &fc).map_err(err)?;
    let config = OptimizerConfig {
        pop_size: pop,
        generations: gens,
        seed,
        variant: parse::<Variant>(variant)?,
        r_schedule: parse::<RSchedule>(r_schedule)?,
    };
    let trace = py.detach(|| sjaya_core::run(&problem, &config)).map_err(err)?;
    Ok(RunTrace {
        variant: trace.variant.to_string(),
        seed,
        best_fitness: trace.best_fitness(),
        best_x: trace.best.x.clone(),
        evals: trace.evals,
        improvements: trace.improvements.iter().map(|p| (p.evals, p.best)).collect(),
        first_hit: harness::first_hit_evals(&trace, problem.target()),
    })
}

fn summary_dict<'py>(py: Python<'py>, r: &SummaryRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("function", &r.function)?;
    d.set_item("pop", r.pop)?;
    d.set_item("gens", r.gens)?;
    d.set_item("fit_best", r.fit_best)?;
    d.set_item("fit_mean", r.fit_mean)?;
    d.set_item("fit_std", r.fit_std)?;
    d.set_item("success", r.success)?;
    d.set_item("fhe_best", r.fhe_best)?;
    d.set_item("fhe_mean", r.fhe_mean)?;
    d.set_item("fhe_std", r.fhe_std)?;
    Ok(d)
}

/// Summary row and per-run `(seed, best_fitness, first_hit)` records.
type BatchResult<'py> = (Bound<'py, PyDict>, Vec<(u64, f64, Option<u64>)>);

/// Runs `runs` seeds `base_seed + k` in parallel.
#[pyfunction]
#[pyo3(signature = (problem, variant="sjaya", pop=30, gens=100, runs=30, base_seed=0, r_schedule="per_generation"))]
#[allow(clippy::too_many_arguments)]
fn execute_batch<'py>(
    py: Python<'py>,
    problem: &str,
    variant: &str,
    pop: usize,
    gens: usize,
    runs: usize,
    base_seed: u64,
    r_schedule: &str,
) -> PyResult<BatchResult<'py>> {
    let row = ExperimentRow {
        problem: problem.to_string(),
        pop,
        gens,
        runs,
        variant: parse(variant)?,
        base_seed,
        r_schedule: parse(r_schedule)?,
    };
    let p = harness::resolve_problem(problem, &CellParams::default(), &FuelCellOptions::default()).map_err(err)?;
    let batch = py.detach(|| harness::execute_batch(&row, &p)).map_err(err)?;
    let records = batch
        .records
        .iter()
        .map(|r| (r.seed, r.best_fitness, r.first_hit))
        .collect();
    Ok((summary_dict(py, &batch.summary.to_row())?, records))
}

#[pyfunction]
#[pyo3(signature = (n_s, n_p, a_cell, integer_rounding=true, mpp="grid", step_amps=0.001))]
fn stack_cost(n_s: f64, n_p: f64, a_cell: f64, integer_rounding: bool, mpp: &str, step_amps: f64) -> PyResult<f64> {
    let opts = FuelCellOptions {
        integer_rounding,
        mpp: mpp_mode(mpp, step_amps)?,
    };
    fuelcell::stack_cost_with(&StackDesign::new(n_s, n_p, a_cell), &CellParams::default(), &opts).map_err(err)
}

/// `(p_load_max, v_load_mpp, i_at_mpp)` of a design, without rounding.
#[pyfunction]
#[pyo3(signature = (n_s, n_p, a_cell, mpp="refined", step_amps=0.001))]
fn max_power_point(n_s: f64, n_p: f64, a_cell: f64, mpp: &str, step_amps: f64) -> PyResult<(f64, f64, f64)> {
    let design = StackDesign::new(n_s, n_p, a_cell);
    let params = CellParams::default();
    let p = match mpp_mode(mpp, step_amps)? {
        MppMode::Refined => fuelcell::max_power_point(&design, &params),
        MppMode::CurrentGrid { step_amps } => {
            fuelcell::max_power_point_on_current_grid(&design, &params, step_amps).map_err(err)?
        }
    };
    Ok((p.p_load_max, p.v_load_mpp, p.i_at_mpp))
}

/// `(t, df, one-tailed p)`, or `None` when the test does not apply.
#[pyfunction]
fn welch_t(a: (f64, f64, usize), b: (f64, f64, usize)) -> PyResult<Option<(f64, f64, f64)>> {
    let a = SampleSummary::new(a.0, a.1, a.2).map_err(err)?;
    let b = SampleSummary::new(b.0, b.1, b.2).map_err(err)?;
    Ok(st::welch_t(&a, &b).map(|w| (w.t, w.df, w.p_one_tailed())))
}

#[pyfunction]
fn t_sf(t: f64, df: f64) -> PyResult<f64> {
    if df.is_nan() || df <= 0.0 {
        return Err(PyValueError::new_err("df must be positive"));
    }
    Ok(st::t_sf(t, df))
}

#[pyfunction]
fn normal_cdf(z: f64) -> f64 {
    st::normal_cdf(z)
}

/// `(mean_w, std_w, z, p)` of the signed-rank normal approximation.
#[pyfunction]
fn signed_rank_normal(n: usize, w: f64) -> (f64, f64, f64, f64) {
    let a = st::signed_rank_normal(n, w);
    (a.mean_w, a.std_w, a.z, a.p_one_tailed)
}

fn wilcoxon_dict<'py>(py: Python<'py>, r: &WilcoxonReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("zero_diffs", r.n_zero_diffs)?;
    d.set_item("n", r.n_effective)?;
    d.set_item("w_plus", r.w_plus)?;
    d.set_item("w_minus", r.w_minus)?;
    d.set_item("w", r.w)?;
    d.set_item("critical_w", r.critical_w)?;
    d.set_item("z", r.normal.map(|n| n.z))?;
    d.set_item("p", r.normal.map(|n| n.p_one_tailed))?;
    Ok(d)
}

/// Signed-rank test on `a - b` over `(a, b)` pairs.
#[pyfunction]
fn wilcoxon<'py>(py: Python<'py>, pairs: Vec<(f64, f64)>) -> PyResult<Bound<'py, PyDict>> {
    wilcoxon_dict(py, &st::wilcoxon(&pairs).map_err(err)?)
}

#[pymodule]
fn sjaya(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RunTrace>()?;
    m.add_function(wrap_pyfunction!(benchmarks, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark_spec, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(execute_batch, m)?)?;
    m.add_function(wrap_pyfunction!(stack_cost, m)?)?;
    m.add_function(wrap_pyfunction!(max_power_point, m)?)?;
    m.add_function(wrap_pyfunction!(welch_t, m)?)?;
    m.add_function(wrap_pyfunction!(t_sf, m)?)?;
    m.add_function(wrap_pyfunction!(normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(signed_rank_normal, m)?)?;
    m.add_function(wrap_pyfunction!(wilcoxon, m)?)?;
    Ok(())
}
