use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use symext_cli::certificate::CertificateFile;
use symext_cli::commands::{self, CertMethod, Method, Outcome, ScanParams, SolverFlags};
use symext_cli::output::read_input;
use symext_cli::{exit, CliError, CliResult, StateSpec};

/// Symmetric-extendibility checks for U2-invariant two-qudit states.
#[derive(Parser)]
#[command(name = "symext", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// Positivity tolerance for the solver and the necessary-condition filter.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iterations: usize,
    /// Combined distance to the constraint sets at which the solver stops.
    #[arg(long, default_value_t = 1e-8)]
    residual_tol: f64,
    /// Seed 0 starts at the canonical point; other seeds perturb it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn flags(&self) -> SolverFlags {
        SolverFlags {
            tol: self.tol,
            max_iterations: self.max_iterations,
            residual_tol: self.residual_tol,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Closed,
    Solver,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertMethodArg {
    Auto,
    Closed,
    Solver,
}

#[derive(Subcommand)]
enum Command {
    /// Decide extendibility; exit 0, 1 or 2 for Extendible, NotExtendible, Undecided.
    Check {
        /// State spec JSON file, or `-` for stdin.
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the generalised-isotropic region as CSV.
    Scan {
        #[arg(long)]
        d: usize,
        /// Grid points per axis.
        #[arg(long, default_value_t = 41)]
        resolution: usize,
        /// Grid points along x; overrides --resolution.
        #[arg(long)]
        x_steps: Option<usize>,
        /// Grid points along a - b; overrides --resolution.
        #[arg(long)]
        diff_steps: Option<usize>,
        /// Add solver columns (parallel; SYMEXT_THREADS caps the threads).
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write an extension certificate for an extendible state.
    Certify {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = CertMethodArg::Auto)]
        method: CertMethodArg,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a certificate against a state; exit 0 iff it passes.
    Verify {
        spec: PathBuf,
        cert: PathBuf,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace a state by its U2 twirl in compact form.
    Twirl {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_spec(path: &Path) -> CliResult<StateSpec> {
    let text = read_input(path)
        .map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", path.display())))?;
    StateSpec::parse(&text)
}

fn load_certificate(path: &Path) -> CliResult<CertificateFile> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::CorruptCertificate(format!("cannot read {}: {e}", path.display()))
    })?;
    CertificateFile::parse(&text)
}

fn scan_threads() -> CliResult<Option<usize>> {
    match std::env::var("SYMEXT_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "SYMEXT_THREADS must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Check {
            spec,
            method,
            solver,
            out,
        } => {
            let method = match method {
                MethodArg::Auto => Method::Auto,
                MethodArg::Closed => Method::Closed,
                MethodArg::Solver => Method::Solver,
                MethodArg::Both => Method::Both,
            };
            commands::check(&load_spec(&spec)?, method, &solver.flags(), out.as_deref())
        }
        Command::Scan {
            d,
            resolution,
            x_steps,
            diff_steps,
            oracle,
            solver,
            out,
        } => {
            let params = ScanParams {
                d,
                x_steps: x_steps.unwrap_or(resolution),
                diff_steps: diff_steps.unwrap_or(resolution),
                oracle,
                threads: scan_threads()?,
            };
            commands::scan(&params, &solver.flags(), out.as_deref())
        }
        Command::Certify {
            spec,
            method,
            solver,
            out,
        } => {
            let method = match method {
                CertMethodArg::Auto => CertMethod::Auto,
                CertMethodArg::Closed => CertMethod::Closed,
                CertMethodArg::Solver => CertMethod::Solver,
            };
            commands::certify(&load_spec(&spec)?, method, &solver.flags(), &out)
        }
        Command::Verify {
            spec,
            cert,
            tol,
            out,
        } => {
            let spec = load_spec(&spec)?;
            commands::verify(&spec, &load_certificate(&cert)?, tol, out.as_deref())
        }
        Command::Twirl { spec, out } => commands::twirl(&load_spec(&spec)?, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => exit::USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
