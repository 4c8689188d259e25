//! reftor: model generation, torsion computation, identity checking, and
//! parameter sweeps on top of the torsion-core library.
//!
//! Exit codes: 0 success, 2 usage or validation, 3 violated mathematical
//! assumption, 4 numerical failure.

mod check_cmd;
mod emit;
mod schema;
mod sweep_cmd;
mod torsion_cmd;

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use torsion_core::Error as CoreError;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let code = match &err {
            CoreError::Dimension { .. }
            | CoreError::InvalidRepresentation { .. }
            | CoreError::UnknownGenerator { .. }
            | CoreError::InvalidCwData { .. }
            | CoreError::InvalidLensParameters { .. }
            | CoreError::GenerationFailure { .. }
            | CoreError::EmptySpectrum
            | CoreError::MissingLIntegral
            | CoreError::UnknownCell { .. }
            | CoreError::InvalidGrid { .. } => 2,
            CoreError::AssumptionViolated { .. } | CoreError::SingularSpectrum => 3,
            CoreError::NonFinite { .. }
            | CoreError::NonConvergence { .. }
            | CoreError::CharPolyMismatch { .. }
            | CoreError::SingularMatrix { .. }
            | CoreError::OnCut { .. }
            | CoreError::SplittingFailure { .. }
            | CoreError::DegenerateSplitting { .. }
            | CoreError::DegenerateBasis { .. } => 4,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "reftor",
    version,
    about = "Refined analytic and combinatorial torsion at desk scale"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a model file for a built-in family
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Compute torsion invariants of a model file
    Torsion(TorsionArgs),
    /// Run a randomized invariant-checking suite
    Check(CheckArgs),
    /// Sweep the circle family over an annulus grid
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum Family {
    /// Flat line bundle over the circle with holonomy z
    Circle {
        /// Holonomy, e.g. "2", "0.5+0.5i"
        #[arg(long)]
        z: String,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lens space L(p, q) with a character of Z/p
    Lens {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
        /// Character index j, the generator mapping to exp(2 pi i j / p)
        #[arg(long = "char", default_value_t = 1)]
        character: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random acyclic complex with chirality
    Random {
        #[arg(long = "top-degree")]
        top_degree: usize,
        /// Comma-separated dimensions, degree 0 first, e.g. 2,4,4,2
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TorsionArgs {
    /// Model file path, or "-" for stdin
    model: String,
    /// analytic, comb, or both
    #[arg(long, default_value = "analytic")]
    mode: String,
    /// Cut angle: "auto" or a value in radians
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    theta: String,
    /// Bundle rank entering the dim == 3 (mod 4) phase correction
    #[arg(long = "rank-e", default_value_t = 1)]
    rank_e: u32,
    /// L-integral as a rational "a/b" (default 0 when required)
    #[arg(long = "l-integral")]
    l_integral: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// identity, angle-independence, or hermitian
    suite: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "r-lo", default_value_t = 0.8)]
    r_lo: f64,
    #[arg(long = "r-hi", default_value_t = 1.25)]
    r_hi: f64,
    #[arg(long, default_value_t = 21)]
    radial: usize,
    #[arg(long, default_value_t = 21)]
    angular: usize,
    /// Sweep the unitary arc |z| = 1 only (overrides the radial flags)
    #[arg(long)]
    arc: bool,
    /// Worker threads for the pointwise computations
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    out: String,
    /// Output file (stdout when absent)
    #[arg(long)]
    file: Option<PathBuf>,
}

fn read_model(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::validation(format!("cannot read stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read '{path}': {e}")))
    }
}

fn write_output(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::validation(format!("cannot write '{}': {e}", path.display()))),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { family } => {
            let (text, out) = torsion_cmd::generate(family)?;
            write_output(&text, out.as_ref())
        }
        Command::Torsion(args) => {
            let text = read_model(&args.model)?;
            let report = torsion_cmd::run(&text, &args)?;
            write_output(&report, args.out.as_ref())
        }
        Command::Check(args) => {
            let (report, ok) = check_cmd::run(&args)?;
            print!("{report}");
            if ok {
                Ok(())
            } else {
                Err(CliError::numerical("one or more checks failed"))
            }
        }
        Command::Sweep(args) => sweep_cmd::run(&args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {}", err.message);
        std::process::exit(err.code);
    }
}
