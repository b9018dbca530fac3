use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qberry::sweep::{self, SweepError, SweepMode, SweepSpec};

#[derive(Parser)]
#[command(
    name = "qberry",
    version,
    about = "Berry phase, entropy and concurrence sweeps for cavity-coupled charge qubits"
)]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-qubit Berry phase and entropy against detuning.
    Fig2(FigArgs),
    /// Two-qubit Berry phase against concurrence.
    Fig3(FigArgs),
    /// Sweep described entirely by a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FigArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Validation(String),
    Io(String),
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn load(path: Option<&Path>, mode: Option<SweepMode>) -> Result<SweepSpec, Failure> {
    let Some(path) = path else {
        return Ok(SweepSpec::defaults(mode.unwrap_or(SweepMode::Fig2)));
    };
    let text = std::fs::read(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    sweep::parse_config_as(&text, mode)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.threads == Some(0) {
        return Err(Failure::Validation("--threads must be at least 1".into()));
    }
    let (spec, out) = match cli.command {
        Command::Fig2(a) => (load(a.config.as_deref(), Some(SweepMode::Fig2))?, a.out),
        Command::Fig3(a) => (load(a.config.as_deref(), Some(SweepMode::Fig3))?, a.out),
        Command::Sweep { config, out } => (load(Some(&config), None)?, out),
    };
    let output = sweep::run_sweep(&spec, cli.threads)?;
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    match out.or_else(|| spec.output.clone()) {
        Some(path) => output
            .write_file(&path)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            output
                .write_to(&mut lock)
                .and_then(|_| lock.flush())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
