use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use obfevo_cli::analyze::{analyze, BudgetConfig};
use obfevo_cli::plot::{plot, PlotKind};
use obfevo_cli::spec::ExperimentSpec;
use obfevo_cli::{instances, runner, store, OUT_ENV};
use obfevo_core::privacy::leakage_estimate;
use obfevo_core::{ObfuscationMethod, ProblemKind};

#[derive(Parser)]
#[command(name = "obfevo", version, about = "Evolutionary optimization with obfuscated fitness evaluation")]
struct Cli {
    /// Output root (results, instances, analysis, plots).
    #[arg(long, global = true, env = OUT_ENV, default_value = "results")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ap,
    Moap,
    Tsp,
}

impl From<Kind> for ProblemKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Ap => ProblemKind::Ap,
            Kind::Moap => ProblemKind::Moap,
            Kind::Tsp => ProblemKind::Tsp,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances (with exact optima / ground truth) or import TSPLIB files.
    GenInstances {
        #[arg(long, value_enum, default_value = "ap")]
        kind: Kind,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 100)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// TSPLIB files to convert instead of generating.
        #[arg(long)]
        tsplib: Vec<PathBuf>,
    },
    /// Run every (instance, obfuscation configuration, seed) of an experiment spec.
    RunExperiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Run only this seed instead of the spec's seed list.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the time budget (seconds).
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Compare configurations at their comparison generations.
    Analyze {
        /// JSON file with `eval_times` and `budget`.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Write SVG convergence and scatter plots.
    Plot {
        #[arg(long, value_enum, default_value = "all")]
        kind: PlotKind,
    },
    /// Print the leakage bounds of an obfuscation method.
    Leakage {
        /// Method tag (`none`, `O`, `Q10`, `T30`, ...) or family (`order`, `quantiles`, `top`, ...).
        method: String,
        /// Parameter for family names.
        #[arg(long)]
        param: Option<f64>,
        #[arg(long, default_value_t = 500)]
        iterations: u64,
        #[arg(long, default_value_t = 300)]
        pop_size: u64,
    },
}

fn parse_method(method: &str, param: Option<f64>) -> Result<ObfuscationMethod> {
    let tag = match (method, param) {
        ("quantiles", Some(k)) => format!("Q{k}"),
        ("buckets", Some(k)) => format!("B{k}"),
        ("top", Some(k)) => format!("T{k}"),
        ("threshold", Some(k)) => format!("A{k}"),
        ("quantiles" | "buckets" | "top" | "threshold", None) => bail!("`{method}` needs --param"),
        _ => method.to_string(),
    };
    Ok(tag.parse()?)
}

fn load_budget(config: Option<&Path>, budget: Option<f64>) -> Result<BudgetConfig> {
    let mut b = match config {
        Some(p) => store::read_json(p)?,
        None => BudgetConfig::default(),
    };
    if let Some(x) = budget {
        b.budget = x;
    }
    Ok(b)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::GenInstances { kind, count, size, seed, tsplib } => {
            let dir = cli.out.join("instances");
            let written = if tsplib.is_empty() {
                instances::generate(kind.into(), seed, count, size, &dir)?
            } else {
                tsplib.iter().map(|p| instances::import_tsplib(p, &dir)).collect::<Result<_>>()?
            };
            for p in written {
                println!("{}", p.display());
            }
        }
        Command::RunExperiment { config, workers, seed, budget } => {
            let mut spec = ExperimentSpec::load(&config)?;
            if let Some(s) = seed {
                spec.seeds = vec![s];
            }
            if let Some(b) = budget {
                spec.budget = b;
            }
            let summary = runner::run_experiment(&spec, &cli.out, workers)
                .with_context(|| format!("running {}", config.display()))?;
            println!("{} run(s) completed, {} failed", summary.completed, summary.failures.len());
            for f in &summary.failures {
                println!("FAILED {}/{} seed {}: {}", f.instance, f.label, f.seed, f.message);
            }
            if !summary.is_success() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Analyze { config, budget } => {
            let budget = load_budget(config.as_deref(), budget)?;
            for inst in analyze(&cli.out, &budget)? {
                for m in &inst.metrics {
                    println!("{} / {} ({} is better)", inst.instance, m.key, if m.higher_is_better { "higher" } else { "lower" });
                    println!("  {:<12} {:>5} {:>5} {:>14} {:>12}", "config", "gen", "wins", "median", "iqr");
                    for s in &m.summaries {
                        println!(
                            "  {:<12} {:>5} {:>5} {:>14.4} {:>12.4}",
                            s.label, s.comparison_generation, s.wins, s.median_comparison, s.iqr_comparison
                        );
                    }
                }
            }
        }
        Command::Plot { kind } => {
            for p in plot(&cli.out, kind)? {
                println!("{}", p.display());
            }
        }
        Command::Leakage { method, param, iterations, pop_size } => {
            let m = parse_method(&method, param)?;
            let e = leakage_estimate(iterations, pop_size, &m)?;
            println!("method: {m}, iterations: {iterations}, population size: {pop_size}");
            if e.closed_form {
                println!("equations: {}", e.equations);
                println!(
                    "inequations: {} (within populations {} + across populations {})",
                    e.inequations(),
                    e.within_population_inequations,
                    e.cross_population_inequations
                );
                if e.approximate {
                    println!("note: population size is not divisible by the quantile count; group sizes differ");
                }
            } else {
                println!("no closed form: the counts depend on how fitness values fall into buckets / above the threshold");
            }
            println!("assumption: {}", e.assumption);
        }
    }
    Ok(ExitCode::SUCCESS)
}
