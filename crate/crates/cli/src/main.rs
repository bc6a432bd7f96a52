//! `kdvtau`: exact verification of the generalized BGW / Witten–Kontsevich
//! jet identities, jet-polynomial fitting and series export.

mod cache;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kdv_tau::kdv::Provenance;
use kdv_tau::verify::Fault;

use config::ConfigArgs;

/// How a run ended; maps onto the exit code.
#[derive(Debug)]
pub enum Failure {
    Mismatch(String),
    Usage(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl From<kdv_tau::Error> for Failure {
    fn from(e: kdv_tau::Error) -> Self {
        match e {
            kdv_tau::Error::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Internal(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FaultArg {
    None,
    Lhs,
    Rhs,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Self {
        match f {
            FaultArg::None => Fault::None,
            FaultArg::Lhs => Fault::Lhs,
            FaultArg::Rhs => Fault::Rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProvenanceArg {
    Gbgw,
    Wk,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Parser, Debug)]
#[command(name = "kdvtau", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the identity for genera 1..=G; exit 1 on any mismatch.
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Perturb one side to exercise mismatch reporting.
        #[arg(long, value_enum, default_value = "none")]
        inject_fault: FaultArg,
    },
    /// Fit the Witten–Kontsevich jet polynomial of genus G.
    WkJets {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output file for the polynomial (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a series: Q, y, u, F0-closed, v, U or F<g>.
    Series {
        which: String,
        #[arg(long, value_enum, default_value = "gbgw")]
        provenance: ProvenanceArg,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify {
            config,
            output,
            inject_fault,
        } => commands::verify(
            &config.resolve()?,
            inject_fault.into(),
            output.format,
            output.out.as_deref(),
        ),
        Command::WkJets { config, out } => commands::wk_jets(&config.resolve()?, out.as_deref()),
        Command::Series {
            which,
            provenance,
            config,
            output,
        } => {
            let provenance = match provenance {
                ProvenanceArg::Gbgw => Provenance::Gbgw,
                ProvenanceArg::Wk => Provenance::Wk,
            };
            commands::series(
                &config.resolve()?,
                &which,
                provenance,
                output.format,
                output.out.as_deref(),
            )
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors by itself
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (kind, msg) = match &f {
                Failure::Mismatch(m) => ("mismatch", m),
                Failure::Usage(m) => ("usage error", m),
                Failure::Internal(m) => ("internal error", m),
            };
            eprintln!("kdvtau: {kind}: {msg}");
            ExitCode::from(f.code())
        }
    }
}
