//! `fih`: command-line front end for frequent itemset hiding experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use fih_core::harness::{write_reports, Prepared};
use fih_core::hiding::default_extensions_dir;
use fih_core::{
    db_stats, discover_scenarios, emit_plot_data, evaluate, mine_frequent, parse_database,
    parse_itemset_file, run_experiment, sample_sensitive, write_itemset_file, Axis, HidingOptions,
    HidingResult, LossScope, Registry, ReportBundle, RunOptions, SanitizationPlan, Scenario,
    SensitiveSet, Sigma, SolverBudget, XAxis,
};
use log::{info, warn};

#[derive(Parser, Debug)]
#[command(name = "fih", version, about = "Frequent itemset hiding: sanitize, evaluate and compare")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dataset statistics and frequent itemsets.
    Mine(MineArgs),
    /// Hide sensitive itemsets in one database with one or more algorithms.
    Hide(HideArgs),
    /// Score an already sanitized database.
    Eval(EvalArgs),
    /// Run a batch of scenarios from a `Datasets/` tree or from flags.
    Run(RunArgs),
    /// Draw a random sensitive set from the frequent itemsets.
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
struct MineArgs {
    #[arg(long)]
    input: PathBuf,
    /// Absolute count, or a fraction of the transactions such as 0.05.
    #[arg(long)]
    min_support: Option<Sigma>,
    /// Write `frequent.txt` here.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct AlgorithmArgs {
    /// Comma-separated algorithm ids, or `all`.
    #[arg(long, default_value = "all")]
    algorithms: String,
    /// Extra directory of external algorithms (the `Extensions` directory
    /// beside the executable is always scanned).
    #[arg(long)]
    extensions: Option<PathBuf>,
    /// Time limit per ILP solve, in seconds.
    #[arg(long, env = "FIH_SOLVER_BUDGET", default_value_t = 60.0)]
    solver_budget: f64,
    /// Branch-and-bound node limit per ILP solve.
    #[arg(long)]
    node_limit: Option<u64>,
    /// Inline: protect border itemsets with exact per-transaction rows.
    #[arg(long)]
    exact_border: bool,
    /// Information loss over single items instead of all itemsets.
    #[arg(long)]
    item_loss: bool,
    /// Write every ILP model in LP format under `<output-dir>/lp/`.
    #[arg(long)]
    dump_lp: bool,
    /// Worker threads (default 1 keeps timings comparable).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct HideArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    sensitive: PathBuf,
    #[arg(long)]
    min_support: Sigma,
    #[arg(long, default_value = "fih-out")]
    output_dir: PathBuf,
    #[command(flatten)]
    algorithms: AlgorithmArgs,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Original database.
    #[arg(long)]
    input: PathBuf,
    /// Sanitized database, same transactions in the same order.
    #[arg(long)]
    sanitized: PathBuf,
    #[arg(long)]
    sensitive: PathBuf,
    #[arg(long)]
    min_support: Sigma,
    #[arg(long)]
    item_loss: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Scenario root (containing `Datasets/`) or a database file.
    #[arg(long)]
    input: PathBuf,
    /// Sensitive itemsets, when `--input` is a database file.
    #[arg(long)]
    sensitive: Option<PathBuf>,
    /// Thresholds, comma-separated, when `--input` is a database file.
    #[arg(long, value_delimiter = ',')]
    min_support: Vec<Sigma>,
    #[arg(long, default_value = "fih-out")]
    output_dir: PathBuf,
    /// Recorded in the reports.
    #[arg(long)]
    seed: Option<u64>,
    /// Plot-data axes: comma-separated of changes, side-effects, cpu-time,
    /// information-loss, or `all`.
    #[arg(long)]
    plot: Option<String>,
    /// Plot rows: auto, size, sigma or id.
    #[arg(long, default_value = "auto")]
    x_axis: XAxis,
    /// Also write every sanitized database.
    #[arg(long)]
    write_sanitized: bool,
    #[command(flatten)]
    algorithms: AlgorithmArgs,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    min_support: Sigma,
    /// Number of itemsets.
    #[arg(long, short = 'k')]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (sensitive-itemset format); stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let outcome = match cli.command {
        Command::Mine(a) => mine(a).map(|()| true),
        Command::Hide(a) => hide(a),
        Command::Eval(a) => eval(a),
        Command::Run(a) => run(a),
        Command::Sample(a) => sample(a).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn mine(a: MineArgs) -> Result<()> {
    let db = parse_database(&a.input)?;
    let stats = db_stats(&db);
    println!(
        "{}: {} transactions, {} items, average length {}",
        a.input.display(),
        stats.n_transactions,
        stats.n_items,
        stats.avg_len_display()
    );
    let Some(sigma) = a.min_support else { return Ok(()) };
    let sigma_min = sigma.resolve(db.len());
    let frequent = mine_frequent(&db, sigma_min)?;
    println!("{} frequent itemsets at sigma_min {sigma_min}", frequent.len());
    for (k, level) in frequent.by_length().iter().enumerate() {
        println!("  length {}: {}", k + 1, level.len());
    }
    if let Some(dir) = a.output_dir {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("frequent.txt");
        let mut text = String::new();
        for (x, s) in frequent.iter() {
            text.push_str(&format!("{x} ({s})\n"));
        }
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn registry(args: &AlgorithmArgs) -> Result<Registry> {
    let mut r = Registry::builtin();
    let mut dirs: Vec<PathBuf> = default_extensions_dir().into_iter().collect();
    dirs.extend(args.extensions.clone());
    for dir in dirs {
        for (path, res) in r.scan_extensions(&dir) {
            if let Err(e) = res {
                warn!("extension {} not registered: {e}", path.display());
            }
        }
    }
    Ok(r)
}

fn run_options(args: &AlgorithmArgs, output_dir: &Path, write_sanitized: bool, seed: Option<u64>) -> Result<RunOptions> {
    if !(args.solver_budget.is_finite() && args.solver_budget >= 0.0) {
        bail!("--solver-budget must be a non-negative number of seconds");
    }
    Ok(RunOptions {
        hiding: HidingOptions {
            budget: SolverBudget {
                time_limit: Duration::from_secs_f64(args.solver_budget),
                node_limit: args.node_limit,
            },
            exact_border: args.exact_border,
            dump_lp_dir: args.dump_lp.then(|| output_dir.join("lp")),
        },
        loss_scope: if args.item_loss { LossScope::Items } else { LossScope::Itemsets },
        sanitized_dir: write_sanitized.then(|| output_dir.to_path_buf()),
        jobs: Some(args.jobs.max(1)),
        seed,
    })
}

fn print_bundle(bundle: &ReportBundle) {
    println!(
        "{:<32} {:<20} {:>8} {:>8} {:>8} {:>9} {:>6}",
        "scenario", "algorithm", "changes", "SE", "IL(%)", "time(s)", "hidden"
    );
    for r in &bundle.reports {
        println!(
            "{:<32} {:<20} {:>8} {:>8} {:>8.2} {:>9.3} {:>6}",
            r.scenario_id,
            r.algorithm_id,
            r.raw_changes,
            r.side_effects,
            r.information_loss * 100.0,
            r.cpu_time,
            if r.hidden_ok { "yes" } else { "NO" }
        );
    }
    for f in &bundle.failures {
        println!("{:<32} {:<20} FAILED: {}", f.scenario_id, f.algorithm_id, f.message);
    }
}

fn finish(bundle: &ReportBundle, output_dir: &Path, plot: Option<&str>, x_axis: XAxis) -> Result<bool> {
    let (txt, csv) = write_reports(bundle, output_dir)?;
    info!("wrote {} and {}", txt.display(), csv.display());
    if let Some(spec) = plot {
        for axis in Axis::parse_list(spec)? {
            let path = emit_plot_data(bundle, axis, x_axis, output_dir)?;
            info!("wrote {}", path.display());
        }
    }
    print_bundle(bundle);
    Ok(bundle.all_hidden())
}

fn hide(a: HideArgs) -> Result<bool> {
    let reg = registry(&a.algorithms)?;
    let ids = reg.resolve(&a.algorithms.algorithms)?;
    let opts = run_options(&a.algorithms, &a.output_dir, true, None)?;
    let scenario = Scenario::new(&a.input, &a.sensitive, a.min_support);
    let bundle = run_experiment(&[scenario], &reg, &ids, &opts)?;
    finish(&bundle, &a.output_dir, None, XAxis::Auto)
}

fn eval(a: EvalArgs) -> Result<bool> {
    let scenario = Scenario::new(&a.input, &a.sensitive, a.min_support);
    let prepared = Prepared::load(&scenario)?;
    let sanitized = parse_database(&a.sanitized)?;
    if sanitized.len() != prepared.db.len() {
        bail!(
            "sanitized database has {} transactions, original has {}",
            sanitized.len(),
            prepared.db.len()
        );
    }
    let mut deletions = Vec::new();
    for ((tid, before), (_, after)) in prepared.db.transactions().zip(sanitized.transactions()) {
        if let Some(extra) = after.iter().find(|i| before.binary_search(i).is_err()) {
            bail!("transaction {tid} gained item {extra}; only deletions can be evaluated");
        }
        deletions.extend(
            before
                .iter()
                .filter(|i| after.binary_search(i).is_err())
                .map(|&i| (tid, i)),
        );
    }
    let id = a
        .sanitized
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sanitized".into());
    let result = HidingResult {
        plan: SanitizationPlan {
            deletions,
            algorithm_id: id,
            wall_time: Duration::ZERO,
        },
        sanitized,
        notes: Vec::new(),
    };
    let scope = if a.item_loss { LossScope::Items } else { LossScope::Itemsets };
    let r = evaluate(&result, &prepared.frequent, &prepared.revised, prepared.sigma_min, &scenario.id, scope)?;
    println!("raw changes: {}", r.raw_changes);
    println!("side effects: {}", r.side_effects);
    println!("information loss: {:.2}%", r.information_loss * 100.0);
    println!("hidden: {}", if r.hidden_ok { "yes" } else { "no" });
    Ok(r.hidden_ok)
}

fn run(a: RunArgs) -> Result<bool> {
    let reg = registry(&a.algorithms)?;
    let ids = reg.resolve(&a.algorithms.algorithms)?;
    let scenarios = if a.input.is_dir() {
        if a.sensitive.is_some() || !a.min_support.is_empty() {
            bail!("--sensitive and --min-support apply only when --input is a database file");
        }
        discover_scenarios(&a.input)?
    } else {
        let Some(sensitive) = &a.sensitive else {
            bail!("--sensitive is required when --input is a database file");
        };
        if a.min_support.is_empty() {
            bail!("--min-support is required when --input is a database file");
        }
        a.min_support
            .iter()
            .map(|s| Scenario::new(&a.input, sensitive, s.clone()))
            .collect()
    };
    if scenarios.is_empty() {
        warn!("no scenarios found under {}", a.input.display());
    }
    let opts = run_options(&a.algorithms, &a.output_dir, a.write_sanitized, a.seed)?;
    let bundle = run_experiment(&scenarios, &reg, &ids, &opts)?;
    finish(&bundle, &a.output_dir, a.plot.as_deref(), a.x_axis)
}

fn sample(a: SampleArgs) -> Result<()> {
    let db = parse_database(&a.input)?;
    let sigma_min = a.min_support.resolve(db.len());
    let picked = sample_sensitive(&db, sigma_min, a.count, a.seed)?;
    match &a.output {
        Some(path) => {
            write_itemset_file(&picked, path)?;
            println!("wrote {} itemsets to {}", picked.len(), path.display());
        }
        None => {
            for x in &picked {
                println!("{x}");
            }
        }
    }
    // Validates the file round-trips as a sensitive set.
    if let Some(path) = &a.output {
        let back = SensitiveSet::new(parse_itemset_file(path)?);
        debug_assert_eq!(back.len(), picked.len());
    }
    Ok(())
}
