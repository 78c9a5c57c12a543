//! `cosk`: spectra, models, Kähler checks, four-dimensional decompositions
//! and the reproduction suite for the curvature operator of the second kind.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{ModelName, ModelParams, OrientationArg};
use report::{CliError, Outcome};

#[derive(Debug, Parser)]
#[command(name = "cosk", version, about = "Curvature operator of the second kind toolkit")]
struct Cli {
    /// Print the report-1 JSON instead of the table.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the report-1 JSON to this file.
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues of R̊ and R̂, scalar curvature and α-sums.
    Spectrum { file: PathBuf },
    /// Write a model tensor as CTJ and print its sha256.
    Model {
        #[arg(value_enum)]
        name: ModelName,
        #[command(flatten)]
        params: ModelParams,
        /// Output path, `-` for stdout.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Orthogonal bisectional curvature against six-nonnegativity.
    KahlerCheck {
        file: PathBuf,
        #[arg(long, default_value_t = cosk_core::kahler::DEFAULT_BISECTIONAL_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 200)]
        refine: usize,
        #[arg(long, env = "COSK_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Λ± splitting, W± spectra and the block form of R̊ in dimension four.
    Decompose4 {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        orientation: OrientationArg,
    },
    /// Run the reproduction suite; exits 1 if any check fails.
    VerifyPaper {
        #[arg(long, env = "COSK_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = cosk_core::verify::DEFAULT_TRIALS)]
        trials: usize,
        /// Replace the built-in S²×S² tensor with this CTJ file.
        #[arg(long, value_name = "FILE")]
        s2xs2: Option<PathBuf>,
    },
}

fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Spectrum { file } => commands::spectrum(file),
        Command::Model { name, params, out } => commands::model(*name, params, out),
        Command::KahlerCheck { file, samples, refine, seed } => commands::kahler_check(file, *samples, *refine, *seed),
        Command::Decompose4 { file, orientation } => commands::decompose4(file, *orientation),
        Command::VerifyPaper { seed, trials, s2xs2 } => commands::verify_paper(*seed, *trials, s2xs2.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code);
        }
    };
    let json = outcome.report.to_json();
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(report::EXIT_PARSE);
        }
    }
    match (&outcome.payload, cli.json) {
        (Some(doc), _) => {
            print!("{doc}");
            eprint!("{}", outcome.table);
        }
        (None, true) => print!("{json}"),
        (None, false) => print!("{}", outcome.table),
    }
    eprintln!("wall time {:.2}s", start.elapsed().as_secs_f64());
    ExitCode::from(outcome.code)
}
