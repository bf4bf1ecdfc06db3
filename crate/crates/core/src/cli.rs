//! Command-line front end.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::anneal::{
    batch_runs, initial_configuration, run_seed, AnnealSchedule, Annealer, Backend, BatchConfig, Problem, RunRecord,
    SolveMode, DEFAULT_ITERATIONS, DEFAULT_SWAP_PROBABILITY,
};
use crate::bench::{self, OptimumSource};
use crate::error::{Error, Result};
use crate::filter::{FilterConfig, DEFAULT_LEVELS, DEFAULT_ROWS, DEFAULT_VDD};
use crate::qkp::{
    brute_force_oracle, generate_instance, parse_instance, serialize_instance, GeneratorParams, InstanceFormat,
    QkpInstance,
};
use crate::qubo::{build_dqubo, build_inequality_qubo, QuboDocument, DEFAULT_ALPHA, DEFAULT_BETA};

/// Environment variable naming the default instance directory.
pub const INSTANCE_DIR_ENV: &str = "CIMQUBO_INSTANCE_DIR";

#[derive(Debug, Parser)]
#[command(name = "cimqubo", version = build_version(), about = "Constrained QUBO toolkit for QKP on a CiM model")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    /// Worker threads for batch work; output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Do not print the resolved configuration to stderr.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

fn build_version() -> &'static str {
    concat!(env!("CARGO_PKG_VERSION"), " (", env!("CARGO_PKG_NAME"), ")")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    #[value(alias = "inequality")]
    Ineq,
    Dqubo,
}

impl From<ModeArg> for SolveMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ineq => SolveMode::Inequality,
            ModeArg::Dqubo => SolveMode::Dqubo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum BackendArg {
    Exact,
    #[value(alias = "behavioral-cim")]
    Cim,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Emit the QUBO of an instance as JSON.
    Transform(TransformArgs),
    /// Exhaustive optimum of a small instance.
    Oracle(InstanceArg),
    /// Simulated annealing over a batch of initial configurations.
    Solve(SolveArgs),
    /// Filter classification study.
    FilterEval(FilterEvalArgs),
    /// Bit-width, dimension and cell-count comparison.
    Overhead(OverheadArgs),
    /// Success-rate comparison over an instance directory.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Serialize)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 20)]
    wmax: i64,
    #[arg(long, default_value_t = 50)]
    pmax: i64,
    #[arg(long, default_value_t = 0.5)]
    cap_ratio: f64,
}

#[derive(Debug, Args, Serialize)]
struct InstanceArg {
    instance: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct PenaltyArgs {
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: i64,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: i64,
}

#[derive(Debug, Args, Serialize)]
struct TransformArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Ineq)]
    mode: ModeArg,
    #[command(flatten)]
    penalty: PenaltyArgs,
}

#[derive(Debug, Args, Serialize)]
struct FilterArgs {
    #[arg(long, default_value_t = DEFAULT_ROWS)]
    rows: usize,
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    levels: u32,
    #[arg(long, default_value_t = DEFAULT_VDD)]
    vdd: f64,
    /// Volts per conduction event; mid-rail replica when omitted.
    #[arg(long)]
    unit_drop: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    comparator_offset: f64,
}

impl FilterArgs {
    fn config(&self) -> FilterConfig {
        FilterConfig {
            rows: self.rows,
            levels: self.levels,
            vdd: self.vdd,
            unit_drop: self.unit_drop,
            noise_sigma: self.noise_sigma,
            comparator_offset: self.comparator_offset,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct AnnealArgs {
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    #[arg(long, default_value_t = 100)]
    initials: usize,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// Relative read noise of each crossbar cell (cim backend).
    #[arg(long, default_value_t = 0.0)]
    crossbar_noise: f64,
    /// Overrides the matrix-derived starting temperature.
    #[arg(long)]
    t_start: Option<f64>,
    /// Overrides the final temperature (default t_start / 100).
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SWAP_PROBABILITY)]
    swap_prob: f64,
    #[command(flatten)]
    penalty: PenaltyArgs,
    #[command(flatten)]
    filter: FilterArgs,
}

impl AnnealArgs {
    fn batch_config(&self, seed: u64) -> BatchConfig {
        let backend = match self.backend {
            BackendArg::Exact => Backend {
                filter: self.filter.config(),
                ..Backend::exact()
            },
            BackendArg::Cim => Backend::cim(self.filter.config(), self.crossbar_noise),
        };
        BatchConfig {
            num_initials: self.initials,
            runs_per_initial: self.runs,
            iterations: self.iters,
            schedule: None,
            backend,
            master_seed: seed,
            alpha: self.penalty.alpha,
            beta: self.penalty.beta,
            swap_probability: self.swap_prob,
        }
    }

    fn schedule_for(&self, derived: AnnealSchedule) -> Result<AnnealSchedule> {
        let t_start = self.t_start.unwrap_or(derived.t_start);
        let t_end = self.t_end.unwrap_or(0.01 * t_start);
        AnnealSchedule::new(self.iters, t_start, t_end)?.with_swaps(self.swap_prob)
    }
}

#[derive(Debug, Args, Serialize)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Ineq)]
    mode: ModeArg,
    #[command(flatten)]
    anneal: AnnealArgs,
    /// Write the trajectory of run (0, 0) as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct InstanceSet {
    /// Instance files; the directory is scanned when none are given.
    instances: Vec<PathBuf>,
    #[arg(long, env = INSTANCE_DIR_ENV)]
    dir: Option<PathBuf>,
}

impl InstanceSet {
    fn load(&self) -> Result<Vec<QkpInstance>> {
        let mut paths = self.instances.clone();
        if paths.is_empty() {
            let dir = self.dir.as_ref().ok_or_else(|| {
                Error::Config(format!(
                    "no instances given and neither --dir nor {INSTANCE_DIR_ENV} set"
                ))
            })?;
            paths = instance_files(dir)?;
        }
        paths.iter().map(|p| load_instance(p)).collect()
    }
}

#[derive(Debug, Args, Serialize)]
struct FilterEvalArgs {
    #[command(flatten)]
    set: InstanceSet,
    #[arg(long, default_value_t = 20)]
    configs: usize,
    #[command(flatten)]
    filter: FilterArgs,
}

#[derive(Debug, Args, Serialize)]
struct OverheadArgs {
    #[command(flatten)]
    set: InstanceSet,
    #[command(flatten)]
    penalty: PenaltyArgs,
    #[arg(long, default_value_t = DEFAULT_ROWS)]
    rows: usize,
}

#[derive(Debug, Args, Serialize)]
struct BenchArgs {
    #[arg(long, env = INSTANCE_DIR_ENV)]
    dir: PathBuf,
    /// Success-rate report; falls back to --output, then stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// JSON map from instance name to best-known value; exhaustive search when omitted.
    #[arg(long)]
    best_known: Option<PathBuf>,
    /// Directory for per-run files named <instance>_<mode>_<seed>.
    #[arg(long)]
    runs_dir: Option<PathBuf>,
    #[command(flatten)]
    anneal: AnnealArgs,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))
            .and_then(|pool| pool.install(|| run(&cli))),
        None => run(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(cli, a),
        Command::Transform(a) => cmd_transform(cli, a),
        Command::Oracle(a) => cmd_oracle(cli, a),
        Command::Solve(a) => cmd_solve(cli, a),
        Command::FilterEval(a) => cmd_filter_eval(cli, a),
        Command::Overhead(a) => cmd_overhead(cli, a),
        Command::Bench(a) => cmd_bench(cli, a),
    }
}

fn metadata(cli: &Cli, command: &str, args: impl Serialize, extra: serde_json::Value) -> Result<serde_json::Value> {
    let meta = json!({
        "tool": "cimqubo",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": cli.seed,
        "args": serde_json::to_value(args)?,
        "resolved": extra,
    });
    if !cli.quiet {
        eprintln!("config: {meta}");
    }
    Ok(meta)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_report<T: Serialize>(
    path: Option<&Path>,
    format: ReportFormat,
    meta: &serde_json::Value,
    rows: &[T],
) -> Result<()> {
    let mut out = open_output(path)?;
    match format {
        ReportFormat::Csv => bench::write_csv(&mut out, meta, rows)?,
        ReportFormat::Json => bench::write_json(&mut out, meta, rows)?,
    }
    out.flush()?;
    Ok(())
}

fn load_instance(path: &Path) -> Result<QkpInstance> {
    let text = fs::read_to_string(path)?;
    parse_instance(&text, InstanceFormat::from_path(path))
}

/// Regular files of `dir` in name order.
fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Config(format!("no instance files in {}", dir.display())));
    }
    Ok(files)
}

fn cmd_gen(cli: &Cli, a: &GenArgs) -> Result<()> {
    metadata(cli, "gen", a, json!({}))?;
    let inst = generate_instance(GeneratorParams {
        n: a.n,
        density: a.density,
        wmax: a.wmax,
        pmax: a.pmax,
        cap_ratio: a.cap_ratio,
        seed: cli.seed,
    })?;
    let format = cli
        .output
        .as_deref()
        .map(InstanceFormat::from_path)
        .unwrap_or(InstanceFormat::CanonicalText);
    let mut out = open_output(cli.output.as_deref())?;
    out.write_all(serialize_instance(&inst, format)?.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_transform(cli: &Cli, a: &TransformArgs) -> Result<()> {
    metadata(cli, "transform", a, json!({}))?;
    let inst = load_instance(&a.instance)?;
    let doc = match a.mode {
        ModeArg::Ineq => QuboDocument::from_inequality(&build_inequality_qubo(&inst)),
        ModeArg::Dqubo => QuboDocument::from_dqubo(&build_dqubo(&inst, a.penalty.alpha, a.penalty.beta)?),
    };
    let mut out = open_output(cli.output.as_deref())?;
    writeln!(out, "{}", doc.to_json()?)?;
    out.flush()?;
    Ok(())
}

fn cmd_oracle(cli: &Cli, a: &InstanceArg) -> Result<()> {
    metadata(cli, "oracle", a, json!({}))?;
    let inst = load_instance(&a.instance)?;
    let r = brute_force_oracle(&inst)?;
    let mut out = open_output(cli.output.as_deref())?;
    match cli.format {
        ReportFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?,
        ReportFormat::Csv => {
            writeln!(out, "best_value: {}", r.best_value)?;
            writeln!(out, "best_config: {}", r.best_config)?;
            writeln!(out, "feasible_count: {}", r.feasible_count)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Flat CSV row of a [`RunRecord`].
#[derive(Debug, Serialize)]
struct RunRow<'a> {
    instance: &'a str,
    seed: u64,
    mode: SolveMode,
    initial_index: usize,
    run_index: usize,
    best_energy: i64,
    best_qkp_value: i64,
    best_feasible: bool,
    best_config: String,
    final_energy: f64,
    iterations: usize,
    filter_rejections: u64,
    evaluations: u64,
    infeasible_evaluations: u64,
}

fn run_rows<'a>(instance: &'a str, runs: &[RunRecord]) -> Vec<RunRow<'a>> {
    runs.iter()
        .map(|r| RunRow {
            instance,
            seed: r.seed,
            mode: r.mode,
            initial_index: r.initial_index,
            run_index: r.run_index,
            best_energy: r.best_energy,
            best_qkp_value: r.best_qkp_value,
            best_feasible: r.best_feasible,
            best_config: r.best_config.to_string(),
            final_energy: r.final_energy,
            iterations: r.iterations,
            filter_rejections: r.filter_rejections,
            evaluations: r.evaluations,
            infeasible_evaluations: r.infeasible_evaluations,
        })
        .collect()
}

/// Runs a batch of one instance in one mode; the closure sees the annealer
/// and the resolved configuration.
fn with_annealer<T>(
    inst: &QkpInstance,
    mode: SolveMode,
    anneal: &AnnealArgs,
    seed: u64,
    f: impl FnOnce(&Annealer<'_>, &BatchConfig) -> Result<T>,
) -> Result<T> {
    let mut config = anneal.batch_config(seed);
    match mode {
        SolveMode::Inequality => {
            let model = build_inequality_qubo(inst);
            let annealer = Annealer::new(Problem::Inequality(&model), config.backend.clone())?;
            config.schedule = Some(anneal.schedule_for(config.schedule_for(annealer.problem().qubo())?)?);
            f(&annealer, &config)
        }
        SolveMode::Dqubo => {
            let model = build_dqubo(inst, config.alpha, config.beta)?;
            let annealer = Annealer::new(Problem::Dqubo(&model), config.backend.clone())?;
            config.schedule = Some(anneal.schedule_for(config.schedule_for(annealer.problem().qubo())?)?);
            f(&annealer, &config)
        }
    }
}

fn cmd_solve(cli: &Cli, a: &SolveArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let mode = SolveMode::from(a.mode);
    with_annealer(&inst, mode, &a.anneal, cli.seed, |annealer, config| {
        let meta = metadata(cli, "solve", a, serde_json::to_value(config)?)?;
        let runs = batch_runs(annealer, config)?;
        if let Some(path) = &a.trajectory {
            let schedule = config.schedule.expect("resolved above");
            let init = initial_configuration(annealer.problem().dim(), config.master_seed, 0);
            let rec = annealer.run(&schedule, &init, run_seed(config.master_seed, 0, 0), true)?;
            let traj = rec.trajectory.unwrap_or_default();
            bench::write_csv(io::BufWriter::new(fs::File::create(path)?), &meta, &traj)?;
        }
        write_report(cli.output.as_deref(), cli.format, &meta, &run_rows(inst.name(), &runs))
    })
}

fn cmd_filter_eval(cli: &Cli, a: &FilterEvalArgs) -> Result<()> {
    let config = a.filter.config();
    let meta = metadata(cli, "filter-eval", a, serde_json::to_value(&config)?)?;
    let instances = a.set.load()?;
    let study = bench::filter_study(&instances, &config, a.configs, cli.seed)?;
    log::info!("filter accuracy {:.4} over {} rows", study.accuracy, study.rows.len());
    match cli.format {
        ReportFormat::Csv => write_report(cli.output.as_deref(), cli.format, &meta, &study.rows),
        ReportFormat::Json => {
            let mut out = open_output(cli.output.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &json!({ "metadata": meta, "study": study }))?;
            writeln!(out)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn cmd_overhead(cli: &Cli, a: &OverheadArgs) -> Result<()> {
    let config = FilterConfig {
        rows: a.rows,
        ..FilterConfig::default()
    };
    let meta = metadata(cli, "overhead", a, json!({}))?;
    let rows: Vec<_> = a
        .set
        .load()?
        .iter()
        .map(|i| bench::overhead_report(i, &config, a.penalty.alpha, a.penalty.beta))
        .collect();
    write_report(cli.output.as_deref(), cli.format, &meta, &rows)
}

fn cmd_bench(cli: &Cli, a: &BenchArgs) -> Result<()> {
    let instances = instance_files(&a.dir)?
        .iter()
        .map(|p| load_instance(p))
        .collect::<Result<Vec<_>>>()?;
    let optimum_source = match &a.best_known {
        Some(p) => OptimumSource::Provided(serde_json::from_str::<HashMap<String, i64>>(&fs::read_to_string(p)?)?),
        None => OptimumSource::Oracle,
    };
    let mut config = a.anneal.batch_config(cli.seed);
    if let Some(t_start) = a.anneal.t_start {
        config.schedule = Some(
            a.anneal
                .schedule_for(AnnealSchedule::new(a.anneal.iters, t_start, t_start)?)?,
        );
    } else if a.anneal.t_end.is_some() {
        return Err(Error::Config("--t-end needs --t-start for bench".into()));
    }
    let meta = metadata(cli, "bench", a, serde_json::to_value(&config)?)?;
    let reports = bench::success_rate_study(&instances, &config, &optimum_source)?;
    if let Some(dir) = &a.runs_dir {
        fs::create_dir_all(dir)?;
        for inst in &instances {
            for mode in [SolveMode::Inequality, SolveMode::Dqubo] {
                let runs = crate::anneal::batch_solve(inst, mode, &config)?;
                let ext = match cli.format {
                    ReportFormat::Csv => "csv",
                    ReportFormat::Json => "json",
                };
                let path = dir.join(format!("{}_{}_{}.{ext}", inst.name(), mode.as_str(), cli.seed));
                write_report(Some(&path), cli.format, &meta, &run_rows(inst.name(), &runs))?;
            }
        }
    }
    let (ineq, dqubo) = bench::suite_average(&reports);
    if !cli.quiet {
        eprintln!("suite average success: ineq {ineq:.4} dqubo {dqubo:.4}");
    }
    let rows: Vec<bench::SuccessRow> = reports.iter().map(Into::into).collect();
    let target = a.report.as_deref().or(cli.output.as_deref());
    write_report(target, cli.format, &meta, &rows)
}
