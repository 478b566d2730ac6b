mod commands;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "peano", version, about = "Generalized Riemann differences, elimination certificates and derivative estimates")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceKind {
    Grouped,
    Primitive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StencilKind {
    Forward,
    Symmetric,
    Mz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mz,
    Shifts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the unique stencil on the given nodes.
    Stencil {
        #[arg(long)]
        order: usize,
        /// Comma-separated rationals, e.g. `0,1,2,4` or `-1/2,1/2`.
        #[arg(long, allow_hyphen_values = true)]
        nodes: String,
    },
    /// Print the doubling-recursion difference of order N.
    Mz { n: usize },
    /// Derive {0,1,2,4,...,2^(N-1)} from the shifted progressions.
    Derive {
        n: usize,
        /// Write the certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TraceKind::Grouped)]
        trace: TraceKind,
    },
    /// Check a certificate.
    Verify { file: PathBuf },
    /// Check a certificate and replay it as stencil algebra.
    Replay { file: PathBuf },
    /// Estimate derivatives of a catalog function by h-sweeps.
    Estimate(EstimateArgs),
    /// Contrast the doubling-recursion difference with the shift family.
    Compare { n: usize },
}

#[derive(Args)]
pub struct EstimateArgs {
    /// poly:<expr>, sgn, x3sin, parity:<n>, group23 or exp.
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long)]
    pub order: usize,
    /// Peano profile method, used when --stencil is absent.
    #[arg(long, value_enum, default_value_t = MethodArg::Mz)]
    pub method: MethodArg,
    /// Estimate a single stencil of the given order instead of a profile.
    #[arg(long, value_enum)]
    pub stencil: Option<StencilKind>,
    #[arg(long, default_value = "1/2")]
    pub h0: String,
    #[arg(long, default_value = "1/2")]
    pub ratio: String,
    #[arg(long, default_value_t = 40)]
    pub count: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
}

/// Exit status and standard-output payload of a command.
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout }
    }

    fn failed(stdout: String) -> Self {
        Outcome { code: 1, stdout }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Malformed(String),
}

pub fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Stencil { order, nodes } => commands::stencil(order, &nodes, cli.format),
        Command::Mz { n } => commands::mz(n, cli.format),
        Command::Derive { n, out, trace } => commands::derive(n, out.as_deref(), trace, cli.format),
        Command::Verify { file } => commands::verify(&file, cli.format),
        Command::Replay { file } => commands::replay(&file, cli.format),
        Command::Estimate(args) => commands::estimate(&args, cli.format),
        Command::Compare { n } => commands::compare(n, cli.format),
    };
    match result {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(outcome.stdout.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            if outcome.code != 0 {
                eprintln!("peano: check failed");
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("peano: {e}");
            ExitCode::from(2)
        }
    }
}
