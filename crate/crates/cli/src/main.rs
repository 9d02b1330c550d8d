use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use sjaya_core::benchmarks::{self, BenchmarkId};
use sjaya_core::compare::{compare, write_welch_csv, write_wilcoxon_csv};
use sjaya_core::fuelcell::{self, CellParams, FuelCellOptions, MppMode, StackDesign};
use sjaya_core::harness::{
    self, execute_batch, parse_grid, read_summary_csv, render_markdown, resolve_problem, write_batch,
    write_summary_csv, ExperimentRow, SummaryRow, DEFAULT_RUNS,
};
use sjaya_core::stats::{self, WilcoxonReport};
use sjaya_core::{RSchedule, Variant};

#[derive(Parser)]
#[command(
    name = "sjaya",
    version,
    about = "Jaya and SJaya optimizers, benchmarks and significance tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the benchmark suite or evaluate one function at a point.
    Bench(BenchArgs),
    /// Evaluate the fuel cell stack cost of one design.
    Fuelcell(FuelcellArgs),
    /// Run repeated optimizations and write summary and per-run CSV files.
    Run(RunArgs),
    /// Welch and signed-rank tests comparing Jaya and SJaya summaries.
    Stats(StatsArgs),
    /// Render summary CSV files as markdown tables.
    Tables(TablesArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark to evaluate; lists the suite when omitted.
    #[arg(long, requires = "point")]
    problem: Option<String>,
    /// Comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MppArg {
    /// Continuous maximum power point.
    Refined,
    /// Maximum over load currents on a fixed ampere grid.
    Grid,
}

#[derive(Args)]
struct CellArgs {
    /// TOML or JSON file overriding cell parameters.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "grid")]
    mpp: MppArg,
    /// Load current step in amperes for `--mpp grid`.
    #[arg(long, default_value_t = 0.001)]
    step_amps: f64,
    /// Keep the cell counts continuous instead of rounding them.
    #[arg(long)]
    no_rounding: bool,
}

impl CellArgs {
    fn params(&self) -> Result<CellParams> {
        match &self.params {
            Some(p) => CellParams::from_file(p).with_context(|| format!("reading {}", p.display())),
            None => Ok(CellParams::default()),
        }
    }

    fn options(&self) -> FuelCellOptions {
        FuelCellOptions {
            integer_rounding: !self.no_rounding,
            mpp: match self.mpp {
                MppArg::Refined => MppMode::Refined,
                MppArg::Grid => MppMode::CurrentGrid {
                    step_amps: self.step_amps,
                },
            },
        }
    }
}

#[derive(Args)]
struct FuelcellArgs {
    #[arg(long)]
    ns: f64,
    #[arg(long)]
    np: f64,
    /// Cell area in cm².
    #[arg(long)]
    area: f64,
    #[command(flatten)]
    cell: CellArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment grid in TOML; replaces the single-problem flags.
    #[arg(long, conflicts_with_all = ["problem", "pop", "gens"])]
    grid: Option<PathBuf>,
    #[arg(long, required_unless_present = "grid")]
    problem: Option<String>,
    /// One or more of jaya, sjaya.
    #[arg(long, value_delimiter = ',', default_value = "jaya,sjaya")]
    variant: Vec<String>,
    #[arg(long, required_unless_present = "grid")]
    pop: Option<usize>,
    #[arg(long, required_unless_present = "grid")]
    gens: Option<usize>,
    /// Runs per row; overrides the grid when given.
    #[arg(long)]
    runs: Option<usize>,
    /// Seed of the first run; run k uses seed + k. Overrides the grid when given.
    #[arg(long)]
    seed: Option<u64>,
    /// per-generation or per-individual; overrides the grid when given.
    #[arg(long)]
    r_schedule: Option<String>,
    /// Output directory.
    #[arg(long, env = "SJAYA_OUT_DIR", default_value = "results")]
    out: PathBuf,
    #[command(flatten)]
    cell: CellArgs,
}

#[derive(Args)]
struct StatsArgs {
    /// Jaya summary CSV.
    #[arg(long, requires = "sjaya", conflicts_with = "pairs")]
    jaya: Option<PathBuf>,
    /// SJaya summary CSV.
    #[arg(long, requires = "jaya")]
    sjaya: Option<PathBuf>,
    /// Paired values with columns `jaya,sjaya`; runs the signed-rank test only.
    #[arg(long, required_unless_present = "jaya")]
    pairs: Option<PathBuf>,
    /// Runs behind each best-of-run mean and std.
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
    /// Directory for welch.csv and wilcoxon.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Summary CSV files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Bench(a) => cmd_bench(a),
        Command::Fuelcell(a) => cmd_fuelcell(a),
        Command::Run(a) => cmd_run(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Tables(a) => cmd_tables(a),
    }
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    match a.problem {
        Some(name) => {
            let id: BenchmarkId = name.parse()?;
            println!("{}", benchmarks::evaluate(id, &a.point)?);
        }
        None => {
            println!("| function | dim | lower | upper | global min |");
            println!("|---|---:|---:|---:|---:|");
            for id in BenchmarkId::ALL {
                let s = id.spec();
                println!(
                    "| {id} | {} | {} | {} | {} |",
                    s.dimension, s.lower, s.upper, s.global_min_value
                );
            }
        }
    }
    Ok(())
}

fn cmd_fuelcell(a: FuelcellArgs) -> Result<()> {
    let params = a.cell.params()?;
    let opts = a.cell.options();
    let design = StackDesign::new(a.ns, a.np, a.area);
    let cost = fuelcell::stack_cost_with(&design, &params, &opts)?;
    let used = if opts.integer_rounding {
        design.rounded()
    } else {
        design
    };
    let mpp = match opts.mpp {
        MppMode::Refined => fuelcell::max_power_point(&used, &params),
        MppMode::CurrentGrid { step_amps } => fuelcell::max_power_point_on_current_grid(&used, &params, step_amps)?,
    };
    println!("n_s      {}", used.n_s);
    println!("n_p      {}", used.n_p);
    println!("a_cell   {} cm2", used.a_cell);
    println!("p_max    {} W", mpp.p_load_max);
    println!("v_mpp    {} V", mpp.v_load_mpp);
    println!("i_mpp    {} mA/cm2", mpp.i_at_mpp);
    println!("cost     {cost}");
    Ok(())
}

fn experiment_rows(a: &RunArgs) -> Result<(Vec<ExperimentRow>, Option<bool>)> {
    let schedule: Option<RSchedule> = a.r_schedule.as_deref().map(str::parse).transpose()?;
    let (mut rows, rounding) = match &a.grid {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let g = parse_grid(&text).with_context(|| format!("parsing {}", path.display()))?;
            (g.rows, g.integer_rounding)
        }
        None => {
            let problem = a.problem.clone().expect("clap requires --problem");
            let mut rows = Vec::new();
            for v in &a.variant {
                rows.push(ExperimentRow {
                    problem: problem.clone(),
                    pop: a.pop.expect("clap requires --pop"),
                    gens: a.gens.expect("clap requires --gens"),
                    runs: DEFAULT_RUNS,
                    variant: v.parse::<Variant>()?,
                    base_seed: 0,
                    r_schedule: RSchedule::default(),
                });
            }
            (rows, None)
        }
    };
    for row in &mut rows {
        if let Some(r) = a.runs {
            row.runs = r;
        }
        if let Some(s) = a.seed {
            row.base_seed = s;
        }
        if let Some(s) = schedule {
            row.r_schedule = s;
        }
        row.validate()?;
    }
    Ok((rows, rounding))
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let (rows, grid_rounding) = experiment_rows(&a)?;
    let params = a.cell.params()?;
    let mut fc = a.cell.options();
    if let Some(r) = grid_rounding {
        if !a.cell.no_rounding {
            fc.integer_rounding = r;
        }
    }
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;

    let mut by_variant: Vec<(Variant, Vec<SummaryRow>)> = Vec::new();
    let mut failures = Vec::new();
    for row in &rows {
        let outcome = resolve_problem(&row.problem, &params, &fc)
            .and_then(|p| execute_batch(row, &p))
            .and_then(|b| write_batch(&a.out, &b).map(|_| b));
        match outcome {
            Ok(batch) => {
                let summary = batch.summary.to_row();
                match by_variant.iter_mut().find(|(v, _)| *v == row.variant) {
                    Some((_, list)) => list.push(summary),
                    None => by_variant.push((row.variant, vec![summary])),
                }
            }
            Err(e) => failures.push(format!("{}: {e}", row.stem())),
        }
    }

    for (variant, list) in &by_variant {
        let path = a.out.join(format!("{variant}_summary.csv"));
        write_summary_csv(File::create(&path)?, list)?;
        println!("## {variant}\n");
        println!("{}", render_markdown(list));
    }
    if !failures.is_empty() {
        bail!(
            "{} of {} rows failed:\n  {}",
            failures.len(),
            rows.len(),
            failures.join("\n  ")
        );
    }
    Ok(())
}

fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_summary_csv(f).with_context(|| format!("reading {}", path.display()))
}

#[derive(Deserialize)]
struct Pair {
    jaya: f64,
    sjaya: f64,
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    if let Some(path) = &a.pairs {
        let mut rdr = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        let pairs: Vec<(f64, f64)> = rdr
            .deserialize::<Pair>()
            .map(|r| r.map(|p| (p.jaya, p.sjaya)))
            .collect::<Result<_, _>>()
            .with_context(|| format!("reading {}", path.display()))?;
        let report = stats::wilcoxon(&pairs)?;
        print_wilcoxon(&[("pairs", &report)]);
        if let Some(dir) = &a.out {
            std::fs::create_dir_all(dir)?;
            write_wilcoxon_csv(File::create(dir.join("wilcoxon.csv"))?, &[("pairs", &report)])?;
        }
        return Ok(());
    }
    let jaya = read_summary(a.jaya.as_deref().expect("clap requires --jaya"))?;
    let sjaya = read_summary(a.sjaya.as_deref().expect("clap requires --sjaya"))?;
    let cmp = compare(&jaya, &sjaya, a.runs)?;
    print!("{}", cmp.markdown());
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
        write_welch_csv(File::create(dir.join("welch.csv"))?, &cmp.welch)?;
        write_wilcoxon_csv(
            File::create(dir.join("wilcoxon.csv"))?,
            &[
                ("fitness", &cmp.fitness_wilcoxon),
                ("first_hit_evals", &cmp.first_hit_wilcoxon),
            ],
        )?;
    }
    Ok(())
}

fn print_wilcoxon(reports: &[(&str, &WilcoxonReport)]) {
    println!("| metric | #zero diff. | n | W+ | W- | W | critical W | mean of W | std of W | z | p |");
    println!("|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|---:|");
    for (name, r) in reports {
        let crit = r.critical_w.map_or("---".to_string(), |c| c.to_string());
        let normal = match r.normal {
            Some(n) => [n.mean_w, n.std_w, n.z, n.p_one_tailed]
                .map(harness::format4)
                .join(" | "),
            None => "--- | --- | --- | ---".into(),
        };
        println!(
            "| {name} | {} | {} | {} | {} | {} | {crit} | {normal} |",
            r.n_zero_diffs, r.n_effective, r.w_plus, r.w_minus, r.w
        );
    }
}

fn cmd_tables(a: TablesArgs) -> Result<()> {
    for (k, path) in a.files.iter().enumerate() {
        if k > 0 {
            println!();
        }
        println!("## {}\n", path.display());
        print!("{}", render_markdown(&read_summary(path)?));
    }
    Ok(())
}
