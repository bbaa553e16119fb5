use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ghp_core::experiments::{self, ExperimentReport, HoelderOptions};
use ghp_core::io::{format_matrix, read_mass, read_matrix, read_space};
use ghp_core::matmetric::EXACT_LIMIT;
use ghp_core::sampling::{self, trial_rng, ModelSpace, ENSEMBLE_BUDGET};
use ghp_core::{
    birkhoff_decompose, dm_distance, dpi_distance, enumerate_matrix_ensemble, ghp_upper_bound, prokhorov_distance,
    relative_entropy, DpiMode, FiniteMMS, Strategy, TAU,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ghp", version, about = "Distances between finite metric measure spaces and distance matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Row-exclusion distance d_M between two matrices.
    Dm { a: PathBuf, b: PathBuf },
    /// Permutation-invariant distance d_pi between two matrices.
    Dpi {
        a: PathBuf,
        b: PathBuf,
        /// Exhaustive branch and bound (default for n <= 8).
        #[arg(long, conflicts_with = "heuristic")]
        exact: bool,
        /// Local search with random restarts; the result is an upper bound.
        #[arg(long)]
        heuristic: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
    },
    /// Lévy-Prokhorov distance of two measures over a ground distance matrix.
    Prokhorov { p: PathBuf, q: PathBuf, d: PathBuf },
    /// Birkhoff decomposition of a doubly stochastic matrix.
    Birkhoff { s: PathBuf },
    /// Certified bounds on the GHP distance of two spaces.
    Ghp {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
    },
    /// Empirical spaces of n i.i.d. draws.
    Sample {
        space: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of independent samples (streams 0..count).
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Print the full spaces as JSON instead of plain matrices.
        #[arg(long)]
        json: bool,
    },
    /// Exact law of the n x n distance matrix of a sample.
    Ensemble {
        space: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = ENSEMBLE_BUDGET)]
        budget: u128,
    },
    /// Relative entropy of Y with respect to X.
    Entropy {
        y: PathBuf,
        x: PathBuf,
        #[arg(long, default_value_t = TAU)]
        tol: f64,
    },
    /// Run an experiment; exit code 0 iff every assertion passes.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Finspc,
    Hoelder,
    Sharp,
    Sampconv,
    Gpaction,
}

#[derive(Args)]
struct CheckArgs {
    experiment: Experiment,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
    #[arg(long, default_value_t = ENSEMBLE_BUDGET)]
    budget: u128,
    /// Space file for `sampconv` and the first space of `gpaction`.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Second space for `gpaction`.
    #[arg(long)]
    space2: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn load_model(path: &Path) -> Result<ModelSpace> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ModelSpace::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_finite(path: &Path) -> Result<FiniteMMS> {
    read_space(path).with_context(|| format!("reading {}", path.display()))
}

fn run_check(args: &CheckArgs) -> Result<ExperimentReport> {
    let report = match args.experiment {
        Experiment::Finspc => {
            experiments::check_finspc_sandwich(args.n.unwrap_or(5), args.trials.unwrap_or(200), args.seed)?
        }
        Experiment::Hoelder => {
            let options = HoelderOptions { budget: args.budget, trials: args.trials.unwrap_or(0), seed: args.seed };
            experiments::check_hoelder_small_n(args.eps.unwrap_or(0.04), args.n.unwrap_or(4), options)?
        }
        Experiment::Sharp => {
            experiments::check_sharp_exponent(args.c, args.alpha, args.eps.unwrap_or(0.01), args.n, args.budget)?
        }
        Experiment::Sampconv => {
            let space = match &args.space {
                Some(p) => load_model(p)?,
                None => ModelSpace::Finite(FiniteMMS::from_line(&[0.0, 1.0, 2.0, 3.0], vec![0.25; 4])?),
            };
            experiments::check_sampling_convergence(
                &space,
                args.eps.unwrap_or(0.1),
                args.n.unwrap_or(1000),
                args.trials.unwrap_or(200),
                args.seed,
            )?
        }
        Experiment::Gpaction => {
            let eps = args.eps.unwrap_or(0.1);
            let x = match &args.space {
                Some(p) => load_finite(p)?,
                None => experiments::two_point_space(["a", "b"], 0.5, eps)?,
            };
            let y = match &args.space2 {
                Some(p) => load_finite(p)?,
                None => experiments::two_point_space(["c", "d"], 1.0, eps)?,
            };
            experiments::check_group_invariance(&x, &y, args.n.unwrap_or(3), args.budget)?
        }
    };
    Ok(report)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Dm { a, b } => print_json(&dm_distance(&read_matrix(a)?, &read_matrix(b)?)?)?,
        Command::Dpi { a, b, exact, heuristic, seed, restarts } => {
            let (a, b) = (read_matrix(a)?, read_matrix(b)?);
            let mode = if heuristic || (!exact && a.n() > EXACT_LIMIT) {
                DpiMode::Heuristic { seed, restarts }
            } else {
                DpiMode::exact()
            };
            print_json(&dpi_distance(&a, &b, mode)?)?
        }
        Command::Prokhorov { p, q, d } => {
            let (p, q) = (read_mass(p)?, read_mass(q)?);
            print_json(&prokhorov_distance(&p, &q, &read_matrix(d)?.rows())?)?
        }
        Command::Birkhoff { s } => print_json(&birkhoff_decompose(&read_matrix(s)?)?)?,
        Command::Ghp { x, y, strategy } => print_json(&ghp_upper_bound(&load_finite(&x)?, &load_finite(&y)?, strategy)?)?,
        Command::Sample { space, n, seed, count, json } => {
            let model = load_model(&space)?;
            let samples = (0..count)
                .map(|k| sampling::empirical_space_with(&model, n, &mut trial_rng(seed, k)))
                .collect::<ghp_core::Result<Vec<_>>>()?;
            if json {
                print_json(&samples)?;
            } else {
                let blocks: Vec<String> = samples
                    .iter()
                    .map(|s| format!("# {}\n{}", s.labels().join(" "), format_matrix(s.dist().matrix())))
                    .collect();
                print!("{}", blocks.join("\n"));
            }
        }
        Command::Ensemble { space, n, budget } => {
            let model = load_model(&space)?;
            let Some(finite) = model.as_finite() else {
                bail!("ensemble enumeration needs a finite space");
            };
            print_json(&enumerate_matrix_ensemble(finite, n, budget)?)?
        }
        Command::Entropy { y, x, tol } => print_json(&relative_entropy(&load_finite(&y)?, &load_finite(&x)?, tol))?,
        Command::Check(args) => {
            let report = run_check(&args)?;
            let json = report.to_json()?;
            match &args.out {
                Some(path) => fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => println!("{json}"),
            }
            if let Some(path) = &args.csv {
                let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
                report.write_csv(file)?;
            }
            for a in &report.assertions {
                eprintln!("{:?} {}: {} {:?} {}", a.status, a.name, a.observed, a.relation, a.bound);
            }
            return Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
