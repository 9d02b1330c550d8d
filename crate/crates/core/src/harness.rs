//! Repeated independent runs and the three comparison metrics: best-of-run
//! fitness, evaluations to the first hit of the success target, and the number
//! of successful runs.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::BenchmarkId;
use crate::error::{Error, Result};
use crate::fuelcell::{self, CellParams, FuelCellOptions};
use crate::optimizer::{self, OptimizerConfig, RSchedule, RunTrace, Variant};
use crate::problem::{Problem, SuccessTarget};

pub const DEFAULT_RUNS: usize = 30;

/// Resolves a benchmark name (or `fuelcell`) to a problem.
pub fn resolve_problem(name: &str, params: &CellParams, fc: &FuelCellOptions) -> Result<Problem> {
    if name.eq_ignore_ascii_case("fuelcell") {
        params.validate()?;
        return fuelcell::problem(*params, *fc);
    }
    Ok(name.parse::<BenchmarkId>()?.spec().problem())
}

/// Evaluation count at which the best-so-far first meets `target`.
pub fn first_hit_evals(trace: &RunTrace, target: SuccessTarget) -> Option<u64> {
    trace
        .improvements
        .iter()
        .find(|p| target.is_met(p.best))
        .map(|p| p.evals)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub problem: String,
    pub pop: usize,
    pub gens: usize,
    pub runs: usize,
    pub variant: Variant,
    pub base_seed: u64,
    #[serde(default)]
    pub r_schedule: RSchedule,
}

impl ExperimentRow {
    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::Config("a batch needs at least one run".into()));
        }
        self.config(self.base_seed).validate()
    }

    pub fn config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            pop_size: self.pop,
            generations: self.gens,
            seed,
            variant: self.variant,
            r_schedule: self.r_schedule,
        }
    }

    /// File stem for this row's outputs.
    pub fn stem(&self) -> String {
        format!("{}_p{}_g{}_{}", self.problem, self.pop, self.gens, self.variant)
    }
}

/// One line of the per-run file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub best_fitness: f64,
    pub first_hit: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat3 {
    pub best: f64,
    pub mean: f64,
    pub std: f64,
}

impl Stat3 {
    fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let best = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { best, mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub function: String,
    pub variant: Variant,
    pub pop: usize,
    pub gens: usize,
    pub n_runs: usize,
    pub best_of_run: Stat3,
    pub success: usize,
    /// Over successful runs only; absent when none succeeded.
    pub first_hit: Option<Stat3>,
    /// A std was computed from a single value and reported as 0.
    pub degenerate: bool,
}

impl BatchSummary {
    pub fn from_records(row: &ExperimentRow, records: &[RunRecord]) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Config("no run records to summarize".into()));
        }
        let fits: Vec<f64> = records.iter().map(|r| r.best_fitness).collect();
        let hits: Vec<f64> = records.iter().filter_map(|r| r.first_hit).map(|h| h as f64).collect();
        Ok(Self {
            function: row.problem.clone(),
            variant: row.variant,
            pop: row.pop,
            gens: row.gens,
            n_runs: records.len(),
            best_of_run: Stat3::of(&fits),
            success: hits.len(),
            first_hit: (!hits.is_empty()).then(|| Stat3::of(&hits)),
            degenerate: records.len() == 1 || hits.len() == 1,
        })
    }

    pub fn to_row(&self) -> SummaryRow {
        SummaryRow {
            function: self.function.clone(),
            pop: self.pop,
            gens: self.gens,
            fit_best: self.best_of_run.best,
            fit_mean: self.best_of_run.mean,
            fit_std: self.best_of_run.std,
            success: self.success,
            fhe_best: self.first_hit.map(|s| s.best as u64),
            fhe_mean: self.first_hit.map(|s| s.mean),
            fhe_std: self.first_hit.map(|s| s.std),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub row: ExperimentRow,
    pub records: Vec<RunRecord>,
    pub summary: BatchSummary,
}

/// Runs `row.runs` independent runs with seeds `base_seed + k`.
pub fn execute_batch(row: &ExperimentRow, problem: &Problem) -> Result<Batch> {
    row.validate()?;
    let target = problem.target();
    let records: Vec<RunRecord> = (0..row.runs as u64)
        .into_par_iter()
        .map(|k| {
            let seed = row.base_seed.wrapping_add(k);
            let trace = optimizer::run(problem, &row.config(seed)).map_err(|e| Error::Run {
                seed,
                source: Box::new(e),
            })?;
            Ok(RunRecord {
                seed,
                best_fitness: trace.best_fitness(),
                first_hit: first_hit_evals(&trace, target),
            })
        })
        .collect::<Result<_>>()?;
    let summary = BatchSummary::from_records(row, &records)?;
    Ok(Batch {
        row: row.clone(),
        records,
        summary,
    })
}

/// The summary file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub function: String,
    pub pop: usize,
    pub gens: usize,
    pub fit_best: f64,
    pub fit_mean: f64,
    pub fit_std: f64,
    pub success: usize,
    pub fhe_best: Option<u64>,
    pub fhe_mean: Option<f64>,
    pub fhe_std: Option<f64>,
}

impl SummaryRow {
    pub fn key(&self) -> (String, usize, usize) {
        (self.function.clone(), self.pop, self.gens)
    }
}

const SUMMARY_HEADER: [&str; 10] = [
    "function", "pop", "gens", "fit_best", "fit_mean", "fit_std", "success", "fhe_best", "fhe_mean", "fhe_std",
];

/// CSV writer that emits `header` even when no rows follow.
pub(crate) fn csv_writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(header)?;
    Ok(wtr)
}

pub fn write_summary_csv<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    let mut wtr = csv_writer(w, &SUMMARY_HEADER)?;
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_summary_csv<R: Read>(r: R) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(SUMMARY_HEADER) {
        return Err(Error::Parse(format!(
            "summary header must be `{}`, got `{}`",
            SUMMARY_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_runs_csv<W: Write>(w: W, records: &[RunRecord]) -> Result<()> {
    let mut wtr = csv_writer(w, &["seed", "best_fitness", "first_hit"])?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_runs_csv<R: Read>(r: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

/// Writes `<stem>_summary.csv` and `<stem>_runs.csv` into `dir`.
pub fn write_batch(dir: &Path, batch: &Batch) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let stem = batch.row.stem();
    let summary = dir.join(format!("{stem}_summary.csv"));
    let runs = dir.join(format!("{stem}_runs.csv"));
    write_summary_csv(std::fs::File::create(&summary)?, &[batch.summary.to_row()])?;
    write_runs_csv(std::fs::File::create(&runs)?, &batch.records)?;
    Ok((summary, runs))
}

/// Four decimals, switching to scientific notation for tiny magnitudes.
pub fn format4(v: f64) -> String {
    if v == 0.0 {
        "0.0".to_string()
    } else if v.abs() < 1e-4 {
        format!("{v:.4e}")
    } else {
        format!("{v:.4}")
    }
}

const DASH: &str = "---";

pub fn render_markdown(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(
        "| function | pop | gens | fit_best | fit_mean | fit_std | success | fhe_best | fhe_mean | fhe_std |\n",
    );
    out.push_str("|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n");
    for r in rows {
        let opt = |v: Option<f64>| v.map(format4).unwrap_or_else(|| DASH.to_string());
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            r.function,
            r.pop,
            r.gens,
            format4(r.fit_best),
            format4(r.fit_mean),
            format4(r.fit_std),
            r.success,
            r.fhe_best.map(|v| v.to_string()).unwrap_or_else(|| DASH.to_string()),
            opt(r.fhe_mean),
            opt(r.fhe_std),
        );
    }
    out
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    #[serde(default)]
    r_schedule: Option<RSchedule>,
    #[serde(default)]
    integer_rounding: Option<bool>,
    rows: Vec<GridEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridEntry {
    problem: String,
    pop: usize,
    gens: usize,
    #[serde(default = "default_runs")]
    runs: usize,
    variants: Vec<Variant>,
    #[serde(default)]
    base_seed: u64,
}

fn default_runs() -> usize {
    DEFAULT_RUNS
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub rows: Vec<ExperimentRow>,
    /// Overrides the fuel-cell rounding flag when present.
    pub integer_rounding: Option<bool>,
}

/// Parses an experiment grid; every entry expands into one row per variant.
pub fn parse_grid(text: &str) -> Result<Grid> {
    let file: GridFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let schedule = file.r_schedule.unwrap_or_default();
    let mut rows = Vec::new();
    for e in file.rows {
        if e.variants.is_empty() {
            return Err(Error::Config(format!("grid row for `{}` lists no variants", e.problem)));
        }
        for v in e.variants {
            let row = ExperimentRow {
                problem: e.problem.clone(),
                pop: e.pop,
                gens: e.gens,
                runs: e.runs,
                variant: v,
                base_seed: e.base_seed,
                r_schedule: schedule,
            };
            row.validate()?;
            rows.push(row);
        }
    }
    Ok(Grid {
        rows,
        integer_rounding: file.integer_rounding,
    })
}
