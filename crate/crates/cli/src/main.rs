//! `fal`: verification sweeps, residual fits and limit-law experiments.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use config::{FamilyTag, Format};

/// Reasons a run stops early.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, files or parameters (exit 2).
    Usage(String),
    /// A check missed its tolerance or a computation did not converge
    /// (exit 1).
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) => 1,
        }
    }
}

impl From<fal_core::FalError> for Failure {
    fn from(e: fal_core::FalError) -> Self {
        Failure::Check(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "fal", version, about = "Two-term asymptotics of Fourier integrals over continued-fraction observables")]
struct Cli {
    /// Worker threads (FAL_THREADS takes precedence; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the oracle against an expansion and fit the residual order.
    Verify(VerifyArgs),
    /// Fit `C t^α |log t|^p` to the residual column of a sweep CSV.
    Fit(FitArgs),
    /// Run an i.i.d. or Dedekind-sum experiment.
    Simulate(SimulateArgs),
    /// Print the constants used by the expansions.
    Constants(ConstantsArgs),
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value = "floor")]
    family: FamilyTag,
    /// Coefficient of the power-log singularity.
    #[arg(short = 'a', long = "a", allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 1e-6)]
    t_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    t_max: f64,
    #[arg(long = "points-per-decade", default_value_t = 4)]
    points_per_decade: u32,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Sweep CSV with `t` and `residual` columns.
    report: PathBuf,
    /// Also report the slope with this log exponent divided out.
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["iid", "dedekind"])))]
struct SimulateArgs {
    /// Sums of r i.i.d. Gauss–Kuzmin draws.
    #[arg(long)]
    iid: bool,
    /// Normalised Dedekind sums over a Farey range.
    #[arg(long)]
    dedekind: bool,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 20)]
    r: u32,
    #[arg(long = "N", default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 5e-3)]
    t: f64,
    #[arg(long = "Q", default_value_t = 5000)]
    q: u64,
    /// Largest accepted distance (default 5e-3 for --iid, 0.05 for --dedekind).
    #[arg(long)]
    max_distance: Option<f64>,
    /// Sample file.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    match std::env::var("FAL_THREADS") {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!("FAL_THREADS must be a positive integer, got {v:?}"))),
        },
        _ => match flag {
            Some(0) => Err(Failure::Usage("--threads must be positive".into())),
            other => Ok(other),
        },
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = thread_count(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Verify(a) => {
            let family = config::Family::from_args(a.family.family, a.family.a, a.family.beta, a.family.lambda)?;
            let cfg = config::RunConfig {
                family,
                t_min: a.t_min,
                t_max: a.t_max,
                points_per_decade: a.points_per_decade,
                tol: a.tol,
                output: a.output,
                format: a.format,
            }
            .validate()?;
            commands::verify(&cfg)
        }
        Command::Fit(a) => commands::fit(&a.report, a.p, a.format),
        Command::Simulate(a) => {
            let out = commands::SimOutput { path: a.output, format: a.format };
            if a.iid {
                let family = config::Family::from_args(
                    a.family.family,
                    a.family.a,
                    a.family.beta,
                    a.family.lambda.or(Some(1.0)),
                )?;
                let run = commands::IidRun { family, r: a.r, n: a.n, seed: a.seed, t: a.t };
                commands::simulate_iid(&run, a.max_distance.unwrap_or(5e-3), &out)
            } else {
                commands::simulate_dedekind(a.q, a.max_distance.unwrap_or(0.05), &out)
            }
        }
        Command::Constants(a) => commands::constants(a.format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    std::panic::set_hook(Box::new(|info| eprintln!("fal: internal error: {info}")));
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            match &f {
                Failure::Usage(m) => eprintln!("fal: {m}"),
                Failure::Check(m) => eprintln!("fal: {m}"),
            }
            ExitCode::from(f.code())
        }
        Err(_) => ExitCode::from(1),
    }
}
