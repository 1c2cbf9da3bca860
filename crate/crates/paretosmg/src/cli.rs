use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use paretosmg_core::logreg::{
    accuracy, make_fairness_problem, quantile_indices, split_by_feature, train_sg, Dataset,
};
use paretosmg_core::metrics::{build_reference, extreme_points, front_metrics, performance_profile, PURITY_TOL};
use paretosmg_core::pareto::{initial_points, run_pf_with, sample_uniform, ParetoArchive, PfConfig, PfMode, PfStats};
use paretosmg_core::problems::{Problem, SyntheticKind};
use paretosmg_core::rng::stream;
use paretosmg_core::simplex::{default_max_iters, solve_min_norm, DEFAULT_TOL};
use paretosmg_core::smg::{
    bias_instance, measure_bias_both, run_smg, BatchSize, SmgConfig, StepSchedule, BIAS_BATCHES, BIAS_REPS,
};
use paretosmg_core::types::project_box;
use paretosmg_core::{BoxRegion, DecisionVector};
use serde::Serialize;

use crate::config::{
    load_file, BiasOptions, LogregOptions, MetricsOptions, ModeArg, PfOptions, ProfileOptions, SmgOptions,
};
use crate::error::{CliError, CliResult, ExitKind};
use crate::exec::PoolExecutor;
use crate::io::{artifact, numbered, read_labeled_table, read_table, write_json, write_table, Table};
use crate::libsvm::{parse_libsvm, LabelMapping};

pub const OUT_DIR_ENV: &str = "PARETOSMG_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "paretosmg", version, about = "Stochastic multi-gradient optimization and Pareto fronts")]
pub struct Cli {
    /// Directory for the output artifacts.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = "out")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the built-in problems.
    ListProblems,
    /// Run the stochastic multi-gradient iteration from one point.
    RunSmg {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: SmgOptions,
    },
    /// Approximate a Pareto front.
    RunPf {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: PfOptions,
    },
    /// Measure the bias of the stochastic multi-gradient against the batch size.
    Bias {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: BiasOptions,
    },
    /// Two-group logistic regression: single-objective baseline and accuracy front.
    Logreg {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: LogregOptions,
    },
    /// Purity and spread metrics of several fronts.
    Metrics {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: MetricsOptions,
    },
    /// Performance profile curves from a problem-by-solver table.
    Profile {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        opts: ProfileOptions,
    },
}

pub fn run(cli: Cli) -> CliResult<()> {
    let out = cli.out_dir.as_path();
    match cli.command {
        Command::ListProblems => {
            print!("{}", list_problems());
            Ok(())
        }
        Command::RunSmg { config, opts } => cmd_run_smg(&opts.overlay(load_file(config.as_deref())?), out),
        Command::RunPf { config, opts } => cmd_run_pf(&opts.overlay(load_file(config.as_deref())?), out),
        Command::Bias { config, opts } => cmd_bias(&opts.overlay(load_file(config.as_deref())?), out),
        Command::Logreg { config, opts } => cmd_logreg(&opts.overlay(load_file(config.as_deref())?), out),
        Command::Metrics { config, opts } => cmd_metrics(&opts.overlay(load_file(config.as_deref())?), out),
        Command::Profile { config, opts } => cmd_profile(&opts.overlay(load_file(config.as_deref())?), out),
    }
}

fn short(v: f64) -> String {
    format!("{}", (v * 1e4).round() / 1e4)
}

fn describe_bounds(region: &BoxRegion) -> String {
    if !region.is_bounded() {
        return "unbounded".into();
    }
    let (lo, hi) = (region.lower(), region.upper());
    if lo.iter().all(|&l| l == lo[0]) && hi.iter().all(|&h| h == hi[0]) {
        return format!("[{}, {}]", short(lo[0]), short(hi[0]));
    }
    lo.iter()
        .zip(hi)
        .map(|(l, h)| format!("[{}, {}]", short(*l), short(*h)))
        .collect::<Vec<_>>()
        .join("x")
}

pub fn list_problems() -> String {
    let mut out = format!("{:<8} {:>3} {:>2}  {:<24} {}\n", "name", "n", "m", "bounds", "geometry");
    for kind in SyntheticKind::ALL {
        let p = paretosmg_core::problems::Synthetic::new(kind);
        let bounds = describe_bounds(p.region());
        out.push_str(&format!(
            "{:<8} {:>3} {:>2}  {:<24} {}\n",
            kind.name(),
            p.dim(),
            p.num_objectives(),
            bounds,
            kind.geometry()
        ));
    }
    out
}

/// Norm of the multi-gradient of the true gradients at `x`.
fn stationarity_norm(p: &dyn Problem, x: &[f64]) -> CliResult<f64> {
    let grads: Vec<Vec<f64>> = (0..p.num_objectives())
        .map(|i| {
            let mut g = vec![0.0; p.dim()];
            p.gradient(i, x, &mut g);
            g
        })
        .collect();
    Ok(solve_min_norm(&grads, DEFAULT_TOL, default_max_iters(grads.len()))?.norm)
}

#[derive(Serialize)]
struct SmgSummary<'a> {
    problem: &'a str,
    seed: u64,
    iterations: usize,
    initial_values: &'a [f64],
    final_values: &'a [f64],
    final_point: &'a [f64],
    stationarity_norm: f64,
}

pub fn cmd_run_smg(opts: &SmgOptions, out: &Path) -> CliResult<()> {
    let p = opts.problem_choice().build()?;
    let schedule = opts.schedule_choice().build(StepSchedule::PF_DEFAULT)?;
    let seed = opts.seed.unwrap_or(0);
    let x0 = match &opts.x0 {
        Some(v) => {
            let x = DecisionVector::new(v.clone())?;
            if x.len() != p.dim() || !p.region().contains(&x) {
                return Err(CliError::usage(format!(
                    "--x0 must be a point of {} with {} coordinates inside {}",
                    p.name(),
                    p.dim(),
                    describe_bounds(p.region())
                )));
            }
            x
        }
        None => {
            let x = sample_uniform(&p.sampling_region(), 1, &mut stream(seed, &[0]))?.remove(0);
            project_box(&x, p.region())?
        }
    };
    let cfg = SmgConfig {
        max_iters: opts.max_iters.unwrap_or(1000),
        schedule,
        batch: BatchSize::Fixed(opts.batch.unwrap_or(1)),
        seed,
        record_trajectory: false,
    };
    let trace = run_smg(&x0, &*p, &cfg)?;

    let m = p.num_objectives();
    let mut header = vec!["iter".to_owned()];
    header.extend(numbered("f", m));
    header.extend(numbered("lambda", m));
    header.push("step".into());
    let mut table = Table::new(header);
    for (k, ((fx, w), step)) in trace.values.iter().zip(&trace.weights).zip(&trace.steps).enumerate() {
        let mut row = vec![(k + 1) as f64];
        row.extend_from_slice(fx);
        row.extend_from_slice(w);
        row.push(*step);
        table.push(row);
    }
    write_table(&artifact(out, "trace.csv")?, &table)?;
    let summary = SmgSummary {
        problem: p.name(),
        seed,
        iterations: trace.steps.len(),
        initial_values: &trace.initial_values,
        final_values: trace.final_values(),
        final_point: &trace.final_point,
        stationarity_norm: stationarity_norm(&*p, &trace.final_point)?,
    };
    write_json(&artifact(out, "summary.json")?, &summary)?;
    log::info!("run-smg: {} iterations on {}", summary.iterations, summary.problem);
    Ok(())
}

fn write_front(out: &Path, archive: &ParetoArchive, n: usize, m: usize) -> CliResult<()> {
    let mut front = Table::new(numbered("f", m));
    let mut points = Table::new(numbered("x", n));
    for e in archive.entries() {
        front.push(e.fx.to_vec());
        points.push(e.x.to_vec());
    }
    write_table(&artifact(out, "front.csv")?, &front)?;
    write_table(&artifact(out, "points.csv")?, &points)
}

#[derive(Serialize)]
struct PfSummary<'a> {
    problem: &'a str,
    mode: String,
    seed: u64,
    outer_iters: usize,
    list_size: usize,
    discarded: usize,
    wall_time_seconds: f64,
}

fn drive(
    p: &dyn Problem,
    cfg: &PfConfig,
    mode: PfMode,
    threads: Option<usize>,
) -> CliResult<(ParetoArchive, PfStats, f64)> {
    if threads == Some(0) {
        return Err(CliError::usage("--threads must be at least 1"));
    }
    let executor = PoolExecutor::new(threads).map_err(|e| CliError::new(ExitKind::Usage, e))?;
    let start = initial_points(p, cfg)?;
    let t0 = Instant::now();
    let (archive, stats) = run_pf_with(p, cfg, mode, start, &executor, &mut |k, list| {
        log::debug!("outer iteration {k}: {} points", list.len());
    })?;
    Ok((archive, stats, t0.elapsed().as_secs_f64()))
}

pub fn cmd_run_pf(opts: &PfOptions, out: &Path) -> CliResult<()> {
    let p = opts.problem_choice().build()?;
    let mode: PfMode = opts.mode.unwrap_or(ModeArg::Smg).into();
    let cfg = opts.driver_choice().build(mode, &opts.schedule_choice())?;
    let (archive, stats, secs) = drive(&*p, &cfg, mode, opts.threads)?;
    write_front(out, &archive, p.dim(), p.num_objectives())?;
    let summary = PfSummary {
        problem: p.name(),
        mode: mode.to_string(),
        seed: cfg.seed,
        outer_iters: stats.outer_iters,
        list_size: stats.list_size,
        discarded: stats.discarded,
        wall_time_seconds: secs,
    };
    write_json(&artifact(out, "stats.json")?, &summary)?;
    log::info!("run-pf: {} points after {} outer iterations", stats.list_size, stats.outer_iters);
    Ok(())
}

pub fn cmd_bias(opts: &BiasOptions, out: &Path) -> CliResult<()> {
    let seed = opts.seed.unwrap_or(0);
    let reps = opts.reps.unwrap_or(BIAS_REPS);
    let batches = opts.batches.clone().unwrap_or_else(|| BIAS_BATCHES.to_vec());
    let p = bias_instance(&mut stream(seed, &[0]))?;
    let x = vec![0.0; p.dim()];
    let (est, tru) = measure_bias_both(&p, &x, &batches, reps, &mut stream(seed, &[1]))?;
    let mut table = Table::new(
        ["batch", "bias_estimated", "se_estimated", "bias_true", "se_true"]
            .map(String::from)
            .to_vec(),
    );
    for (e, t) in est.iter().zip(&tru) {
        table.push(vec![e.batch as f64, e.bias, e.std_error, t.bias, t.std_error]);
    }
    write_table(&artifact(out, "bias.csv")?, &table)
}

const LIBSVM_NOTE: &str = "expected a LIBSVM text file with lines `<label> <index>:<value> ...`";

fn read_dataset(path: &Path) -> CliResult<(Dataset, LabelMapping)> {
    let file = File::open(path).map_err(|e| CliError::from(e).context(format!("{}: {LIBSVM_NOTE}", path.display())))?;
    parse_libsvm(BufReader::new(file))
        .map_err(|e| CliError::from(e).context(format!("{}: {LIBSVM_NOTE}", path.display())))
}

#[derive(Serialize)]
struct Accuracies {
    overall: f64,
    group1: f64,
    group2: f64,
}

#[derive(Serialize)]
struct Baseline {
    dataset: String,
    rows: usize,
    group_sizes: [usize; 2],
    split_feature: usize,
    label_mapping: String,
    iterations: usize,
    step: f64,
    batch: usize,
    reg: f64,
    accuracy: Accuracies,
    weights: Vec<f64>,
    intercept: f64,
}

#[derive(Serialize)]
struct LogregSummary {
    mode: String,
    seed: u64,
    outer_iters: usize,
    list_size: usize,
    discarded: usize,
    wall_time_seconds: f64,
}

pub fn cmd_logreg(opts: &LogregOptions, out: &Path) -> CliResult<()> {
    let path = opts
        .data
        .as_deref()
        .ok_or_else(|| CliError::usage(format!("missing --data; {LIBSVM_NOTE}")))?;
    let split_feature = match opts.split {
        Some(j) if j >= 1 => j,
        Some(_) => return Err(CliError::usage("--split is 1-based")),
        None => return Err(CliError::usage("missing --split (1-based feature defining the groups)")),
    };
    let mode: PfMode = opts.mode.unwrap_or(ModeArg::Smg).into();
    let cfg = opts.driver_choice().build(mode, &opts.schedule_choice())?;
    let reg1 = opts.reg1.unwrap_or(1e-3);
    let reg2 = opts.reg2.unwrap_or(1e-3);
    let iters = opts.baseline_iters.unwrap_or(1000);
    let step = opts.baseline_step.unwrap_or(0.1);
    let batch = opts.baseline_batch.unwrap_or(1);
    let baseline_schedule = StepSchedule::Constant { step };
    baseline_schedule.validate()?;
    let count = opts.representatives.unwrap_or(5);

    let (mut data, mapping) = read_dataset(path)?;
    let split = split_by_feature(&data, split_feature - 1).map_err(CliError::data)?;
    if opts.drop_split.unwrap_or(false) {
        data = data.without_feature(split_feature - 1).map_err(CliError::data)?;
    }
    let data = Arc::new(data);

    let all = data.all_rows();
    let model = train_sg(&data, &all, reg1, iters, &baseline_schedule, batch, &mut stream(cfg.seed, &[0]))?;
    let baseline = Baseline {
        dataset: path.display().to_string(),
        rows: data.len(),
        group_sizes: [split.first.len(), split.second.len()],
        split_feature,
        label_mapping: match mapping {
            LabelMapping::Identity => "identity".into(),
            LabelMapping::Mapped(neg, pos) => format!("{neg} -> -1, {pos} -> +1"),
        },
        iterations: iters,
        step,
        batch,
        reg: reg1,
        accuracy: Accuracies {
            overall: accuracy(&model, &data, &all)?,
            group1: accuracy(&model, &data, &split.first)?,
            group2: accuracy(&model, &data, &split.second)?,
        },
        weights: model.weights.clone(),
        intercept: model.intercept,
    };
    write_json(&artifact(out, "baseline.json")?, &baseline)?;

    let p = make_fairness_problem(Arc::clone(&data), &split, reg1, reg2)?;
    let (archive, stats, secs) = drive(&p, &cfg, mode, opts.threads)?;
    write_front(out, &archive, p.dim(), 2)?;

    let f1: Vec<f64> = archive.entries().iter().map(|e| e.fx[0]).collect();
    let mut table = Table::new(
        ["point", "f1", "f2", "acc_group1", "acc_group2"]
            .map(String::from)
            .to_vec(),
    );
    for j in quantile_indices(&f1, count) {
        let e = &archive.entries()[j];
        let acc = p.group_accuracies(&e.x)?;
        table.push(vec![j as f64, e.fx[0], e.fx[1], acc[0], acc[1]]);
    }
    write_table(&artifact(out, "accuracy.csv")?, &table)?;
    let summary = LogregSummary {
        mode: mode.to_string(),
        seed: cfg.seed,
        outer_iters: stats.outer_iters,
        list_size: stats.list_size,
        discarded: stats.discarded,
        wall_time_seconds: secs,
    };
    write_json(&artifact(out, "stats.json")?, &summary)
}

#[derive(Serialize, Default)]
struct MetricsReport {
    purity: BTreeMap<String, f64>,
    gamma: BTreeMap<String, f64>,
    delta: BTreeMap<String, f64>,
}

pub fn cmd_metrics(opts: &MetricsOptions, out: &Path) -> CliResult<()> {
    let paths = opts.fronts.clone().unwrap_or_default();
    if paths.len() < 2 {
        return Err(CliError::usage("metrics needs at least two front CSVs"));
    }
    let names: Vec<String> = match &opts.names {
        Some(names) if names.len() == paths.len() => names.clone(),
        Some(names) => {
            return Err(CliError::usage(format!(
                "{} names given for {} fronts",
                names.len(),
                paths.len()
            )))
        }
        None => paths
            .iter()
            .map(|p| p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()))
            .collect(),
    };
    let mut seen = names.clone();
    seen.sort();
    seen.dedup();
    if seen.len() != names.len() {
        return Err(CliError::usage("front names must be distinct (use --names)"));
    }
    let tol = opts.tol.unwrap_or(PURITY_TOL);
    let fronts = paths
        .iter()
        .map(|p| read_table(p).map(|t| t.rows))
        .collect::<CliResult<Vec<_>>>()?;
    let reference = build_reference(&fronts).map_err(CliError::data)?;
    let (lo, hi) = extreme_points(&reference).map_err(CliError::data)?;
    let mut report = MetricsReport::default();
    for (name, front) in names.iter().zip(&fronts) {
        let m = front_metrics(front, &reference, (&lo, &hi), tol)
            .map_err(|e| CliError::data(e).context(name))?;
        report.purity.insert(name.clone(), m.purity);
        report.gamma.insert(name.clone(), m.gamma);
        report.delta.insert(name.clone(), m.delta);
    }
    write_json(&artifact(out, "metrics.json")?, &report)
}

pub fn cmd_profile(opts: &ProfileOptions, out: &Path) -> CliResult<()> {
    let path = opts
        .table
        .as_deref()
        .ok_or_else(|| CliError::usage("missing the metrics table CSV"))?;
    let table = read_labeled_table(path)?;
    let solvers = &table.header[1..];
    let values: Vec<Vec<f64>> = (0..solvers.len())
        .map(|s| table.rows.iter().map(|row| row[s]).collect())
        .collect();
    let profile =
        performance_profile(&values, opts.higher_is_better.unwrap_or(false)).map_err(CliError::data)?;
    let mut header = vec!["tau".to_owned()];
    header.extend(solvers.iter().cloned());
    let mut curves = Table::new(header);
    for tau in profile.breakpoints() {
        let mut row = vec![tau];
        row.extend((0..solvers.len()).map(|s| profile.rho(s, tau)));
        curves.push(row);
    }
    write_table(&artifact(out, "profile.csv")?, &curves)
}
