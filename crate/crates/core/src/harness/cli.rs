//! `snakefs` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::selection::{SelectionScheme, DEFAULT_ETA_PLUS, DEFAULT_TOURNAMENT_SIZE};

use super::config::{resolve, ConfigOverrides, ExperimentConfig, Variant};
use super::report::{compare_table, emit_reports, write_compare};
use super::runner::{load_dataset, run_experiment, Parallelism};
use super::stats::{Metric, SummaryStats};

#[derive(Debug, Parser)]
#[command(
    name = "snakefs",
    version,
    about = "Wrapper feature selection with binary Snake Optimizer variants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its reports.
    Run(RunArgs),
    /// Run several variants on one dataset and tabulate them side by side.
    Compare(CompareArgs),
    /// Check sampled selection frequencies against the exact probabilities.
    ValidateSelection(ValidateArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: ConfigOverrides,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Execute runs one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated variants, e.g. BSO,TLSO,PLSO,LLSO.
    #[arg(long, value_delimiter = ',', required = true, ignore_case = true)]
    variants: Vec<Variant>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Uniform,
    Tournament,
    Proportional,
    LinearRank,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Group size; fitness values default to 1/n, 2/n, ..., 1.
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Explicit comma-separated fitness values (overrides --n).
    #[arg(long, value_delimiter = ',')]
    fitness: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_TOURNAMENT_SIZE)]
    tournament_size: usize,
    #[arg(long, default_value_t = DEFAULT_ETA_PLUS)]
    eta_plus: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.02)]
    tolerance: f64,
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns the process exit code: 0 on success, 2 on usage errors, 1 otherwise.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (name, outcome) = match cli.command {
        Command::Run(a) => ("run", cmd_run(a)),
        Command::Compare(a) => ("compare", cmd_compare(a)),
        Command::ValidateSelection(a) => ("validate-selection", cmd_validate(a)),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => usage_error(name, &msg),
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Config(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other),
        }
    }
}

fn usage_error(subcommand: &str, msg: &str) -> i32 {
    let mut cmd = Cli::command();
    cmd.build();
    let kind = ErrorKind::ValueValidation;
    let err = match cmd.find_subcommand_mut(subcommand) {
        Some(sub) => sub.error(kind, msg),
        None => cmd.error(kind, msg),
    };
    let _ = err.print();
    2
}

fn resolve_common(c: &Common) -> std::result::Result<ExperimentConfig, CliError> {
    let cfg = resolve(c.config.as_deref(), &c.overrides)?;
    if cfg.dataset_path.is_none() {
        return Err(CliError::Usage(
            "no dataset given: pass --dataset <CSV> or a --config file with a `dataset` key".into(),
        ));
    }
    Ok(cfg)
}

fn parallelism(c: &Common) -> Parallelism {
    if c.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::from_env()
    }
}

fn print_summary(stats: &SummaryStats) {
    println!(
        "{:<15} {:>12} {:>12} {:>12} {:>12}",
        "metric", "mean", "std", "best", "worst"
    );
    for m in Metric::ALL {
        match stats.get(m) {
            Some(s) => println!(
                "{:<15} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                m.name(),
                s.mean,
                s.std,
                s.best,
                s.worst
            ),
            None => println!("{:<15} {:>12}", m.name(), "undefined"),
        }
    }
}

fn cmd_run(a: RunArgs) -> std::result::Result<i32, CliError> {
    let cfg = resolve_common(&a.common)?;
    let dataset = load_dataset(&cfg)?;
    let exp = run_experiment(&cfg, &dataset, parallelism(&a.common))?;
    emit_reports(&exp, &a.common.out)?;
    println!(
        "{} on {} ({} runs)",
        cfg.variant,
        cfg.dataset_path
            .as_deref()
            .unwrap_or(Path::new("?"))
            .display(),
        cfg.runs
    );
    print_summary(&exp.stats);
    println!("reports written to {}", a.common.out.display());
    Ok(0)
}

fn cmd_compare(a: CompareArgs) -> std::result::Result<i32, CliError> {
    let base = resolve_common(&a.common)?;
    let dataset = load_dataset(&base)?;
    let mut results = Vec::with_capacity(a.variants.len());
    for (i, &variant) in a.variants.iter().enumerate() {
        let cfg = ExperimentConfig {
            variant,
            ..base.clone()
        };
        cfg.validate()?;
        let exp = run_experiment(&cfg, &dataset, parallelism(&a.common))?;
        emit_reports(&exp, &a.common.out.join(format!("{i}_{variant}")))?;
        results.push((variant, exp.stats));
    }
    std::fs::create_dir_all(&a.common.out).map_err(|source| Error::Io {
        path: a.common.out.clone(),
        source,
    })?;
    write_compare(&results, &a.common.out.join("compare.csv"))?;
    for row in compare_table(&results) {
        println!("{}", row.join("\t"));
    }
    Ok(0)
}

fn cmd_validate(a: ValidateArgs) -> std::result::Result<i32, CliError> {
    let fitness = match &a.fitness {
        Some(f) if !f.is_empty() => f.clone(),
        _ => {
            if a.n == 0 {
                return Err(CliError::Usage("--n must be >= 1".into()));
            }
            (1..=a.n).map(|i| i as f64 / a.n as f64).collect()
        }
    };
    let scheme = match a.scheme {
        SchemeArg::Uniform => SelectionScheme::UniformRandom,
        SchemeArg::Tournament => SelectionScheme::Tournament {
            size: a.tournament_size,
        },
        SchemeArg::Proportional => SelectionScheme::Proportional,
        SchemeArg::LinearRank => SelectionScheme::LinearRank {
            eta_plus: a.eta_plus,
        },
    };
    if let SelectionScheme::Tournament { size } = scheme {
        if size < 2 {
            return Err(CliError::Usage(format!(
                "tournament size must be >= 2, got {size}"
            )));
        }
    } else {
        scheme.validate(fitness.len())?;
    }

    let (exact, empirical) = selection_check(scheme, &fitness, a.trials, a.seed);
    println!("index,fitness,exact,empirical,abs_diff");
    let mut worst: f64 = 0.0;
    for i in 0..fitness.len() {
        let d = (exact[i] - empirical[i]).abs();
        worst = worst.max(d);
        println!(
            "{i},{},{:.6},{:.6},{:.6}",
            fitness[i], exact[i], empirical[i], d
        );
    }
    let ok = worst <= a.tolerance;
    println!(
        "{}: {} max |exact - empirical| = {worst:.6} (tolerance {})",
        if ok { "PASS" } else { "FAIL" },
        scheme.name(),
        a.tolerance
    );
    Ok(if ok { 0 } else { 1 })
}

/// Exact probabilities and sampled frequencies over `trials` seeded draws.
pub fn selection_check(
    scheme: SelectionScheme,
    fitness: &[f64],
    trials: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let exact = scheme.probabilities(fitness);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; fitness.len()];
    for _ in 0..trials {
        counts[scheme.select(fitness, &mut rng)] += 1;
    }
    let empirical = counts
        .into_iter()
        .map(|c| c as f64 / trials.max(1) as f64)
        .collect();
    (exact, empirical)
}
