//! Jaya-versus-SJaya comparison reports built from two summary tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{csv_writer, format4, SummaryRow};
use crate::stats::{self, SampleSummary, WelchT, WilcoxonReport};

pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchCell {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

impl From<WelchT> for WelchCell {
    fn from(w: WelchT) -> Self {
        Self {
            t: w.t,
            df: w.df,
            p: w.p_one_tailed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WelchRow {
    pub function: String,
    pub pop: usize,
    pub gens: usize,
    pub fitness: Option<WelchCell>,
    pub first_hit: Option<WelchCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub welch: Vec<WelchRow>,
    pub fitness_wilcoxon: WilcoxonReport,
    pub first_hit_wilcoxon: WilcoxonReport,
}

/// Pairs rows by (function, pop, gens); both tables must list the same rows.
fn pair_rows<'a>(jaya: &'a [SummaryRow], sjaya: &'a [SummaryRow]) -> Result<Vec<(&'a SummaryRow, &'a SummaryRow)>> {
    let index: BTreeMap<_, _> = sjaya.iter().map(|r| (r.key(), r)).collect();
    if index.len() != sjaya.len() {
        return Err(Error::Parse("duplicate rows in the SJaya summary".into()));
    }
    let mut pairs = Vec::with_capacity(jaya.len());
    for a in jaya {
        let b = index.get(&a.key()).ok_or_else(|| {
            Error::Parse(format!(
                "row {} {}/{} has no SJaya counterpart",
                a.function, a.pop, a.gens
            ))
        })?;
        pairs.push((a, *b));
    }
    if pairs.len() != sjaya.len() {
        return Err(Error::Parse(format!(
            "ragged inputs: {} Jaya rows against {} SJaya rows",
            jaya.len(),
            sjaya.len()
        )));
    }
    Ok(pairs)
}

fn first_hit_sample(r: &SummaryRow) -> Option<SampleSummary> {
    match (r.fhe_mean, r.fhe_std) {
        (Some(mean), Some(std)) if r.success > 0 => SampleSummary::new(mean, std, r.success).ok(),
        _ => None,
    }
}

/// Welch test per row on both metrics and a signed-rank test per metric over
/// the row means. `n_runs` is the sample size of the best-of-run statistics.
pub fn compare(jaya: &[SummaryRow], sjaya: &[SummaryRow], n_runs: usize) -> Result<Comparison> {
    let pairs = pair_rows(jaya, sjaya)?;
    let mut welch = Vec::with_capacity(pairs.len());
    let mut fit_pairs = Vec::new();
    let mut hit_pairs = Vec::new();
    for (a, b) in &pairs {
        let fa = SampleSummary::new(a.fit_mean, a.fit_std, n_runs)?;
        let fb = SampleSummary::new(b.fit_mean, b.fit_std, n_runs)?;
        let ha = first_hit_sample(a);
        let hb = first_hit_sample(b);
        welch.push(WelchRow {
            function: a.function.clone(),
            pop: a.pop,
            gens: a.gens,
            fitness: stats::welch_t(&fa, &fb).map(Into::into),
            first_hit: match (ha, hb) {
                (Some(ha), Some(hb)) => stats::welch_t(&ha, &hb).map(Into::into),
                _ => None,
            },
        });
        fit_pairs.push((a.fit_mean, b.fit_mean));
        if let (Some(ha), Some(hb)) = (ha, hb) {
            hit_pairs.push((ha.mean, hb.mean));
        }
    }
    Ok(Comparison {
        welch,
        fitness_wilcoxon: stats::wilcoxon(&fit_pairs)?,
        first_hit_wilcoxon: stats::wilcoxon(&hit_pairs)?,
    })
}

#[derive(Serialize)]
struct WelchCsvRow<'a> {
    function: &'a str,
    pop: usize,
    gens: usize,
    fit_t: Option<f64>,
    fit_df: Option<f64>,
    fit_p: Option<f64>,
    fhe_t: Option<f64>,
    fhe_df: Option<f64>,
    fhe_p: Option<f64>,
}

pub fn write_welch_csv<W: Write>(w: W, rows: &[WelchRow]) -> Result<()> {
    let mut wtr = csv_writer(
        w,
        &[
            "function", "pop", "gens", "fit_t", "fit_df", "fit_p", "fhe_t", "fhe_df", "fhe_p",
        ],
    )?;
    for r in rows {
        wtr.serialize(WelchCsvRow {
            function: &r.function,
            pop: r.pop,
            gens: r.gens,
            fit_t: r.fitness.map(|c| c.t),
            fit_df: r.fitness.map(|c| c.df),
            fit_p: r.fitness.map(|c| c.p),
            fhe_t: r.first_hit.map(|c| c.t),
            fhe_df: r.first_hit.map(|c| c.df),
            fhe_p: r.first_hit.map(|c| c.p),
        })?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct WilcoxonCsvRow<'a> {
    metric: &'a str,
    zero_diffs: usize,
    n: usize,
    w_plus: f64,
    w_minus: f64,
    w: f64,
    alpha: f64,
    critical_w: Option<u32>,
    mean_w: Option<f64>,
    std_w: Option<f64>,
    z: Option<f64>,
    p: Option<f64>,
}

pub fn write_wilcoxon_csv<W: Write>(w: W, reports: &[(&str, &WilcoxonReport)]) -> Result<()> {
    let mut wtr = csv_writer(
        w,
        &[
            "metric",
            "zero_diffs",
            "n",
            "w_plus",
            "w_minus",
            "w",
            "alpha",
            "critical_w",
            "mean_w",
            "std_w",
            "z",
            "p",
        ],
    )?;
    for (metric, r) in reports {
        wtr.serialize(WilcoxonCsvRow {
            metric,
            zero_diffs: r.n_zero_diffs,
            n: r.n_effective,
            w_plus: r.w_plus,
            w_minus: r.w_minus,
            w: r.w,
            alpha: ALPHA,
            critical_w: r.critical_w,
            mean_w: r.normal.map(|n| n.mean_w),
            std_w: r.normal.map(|n| n.std_w),
            z: r.normal.map(|n| n.z),
            p: r.normal.map(|n| n.p_one_tailed),
        })?;
    }
    wtr.flush()?;
    Ok(())
}

impl Comparison {
    pub fn markdown(&self) -> String {
        let cell = |c: Option<WelchCell>| match c {
            Some(c) => (format4(c.t), format4(c.p)),
            None => ("---".to_string(), "---".to_string()),
        };
        let mut out = String::new();
        out.push_str("| function | pop | gens | fit t | fit p | fhe t | fhe p |\n");
        out.push_str("|---|---:|---:|---:|---:|---:|---:|\n");
        for r in &self.welch {
            let (ft, fp) = cell(r.fitness);
            let (ht, hp) = cell(r.first_hit);
            let _ = writeln!(
                out,
                "| {} | {} | {} | {ft} | {fp} | {ht} | {hp} |",
                r.function, r.pop, r.gens
            );
        }
        out.push('\n');
        out.push_str(
            "| metric | #zero diff. | n | W+ | W- | W | alpha | critical W | mean of W | std of W | z | p |\n",
        );
        out.push_str("|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n");
        for (name, r) in [
            ("mean best-of-run fitness", &self.fitness_wilcoxon),
            ("mean FirstHitEvals", &self.first_hit_wilcoxon),
        ] {
            let crit = r.critical_w.map(|c| c.to_string()).unwrap_or_else(|| "---".into());
            let (m, s, z, p) = match r.normal {
                Some(n) => (
                    format4(n.mean_w),
                    format4(n.std_w),
                    format4(n.z),
                    format4(n.p_one_tailed),
                ),
                None => ("---".into(), "---".into(), "---".into(), "---".into()),
            };
            let _ = writeln!(
                out,
                "| {name} | {} | {} | {} | {} | {} | {ALPHA} | {crit} | {m} | {s} | {z} | {p} |",
                r.n_zero_diffs, r.n_effective, r.w_plus, r.w_minus, r.w
            );
        }
        out
    }
}
