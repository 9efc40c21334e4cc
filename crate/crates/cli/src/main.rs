use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use outwalk_core::report::{run_command, Command};
use outwalk_core::verify::{run_suite, Fault, Suite};
use outwalk_core::walk::Experiment;
use outwalk_core::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "outwalk", version, about = "Random walks on Out(F_n) and on free-group trees")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the exact invariant suites and print a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Drift of κ and of every tracked class.
    Drift(RunArgs),
    /// Standardized fluctuations at the horizon with a KS test.
    Clt(RunArgs),
    /// Exceedance curve P(|κ/n − λ̂| > ε).
    Deviation(RunArgs),
    /// Lipschitz distances between the configured rose points.
    Distance(RunArgs),
    /// Centering, Gromov-product tail and tracking diagnostics in tree mode.
    TreeLab(RunArgs),
    /// Sup over n of |κ − σ| for one tracked class.
    Gap(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidInput(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Prints to stdout; a closed pipe is not an error.
fn emit(lines: &[String]) {
    let mut out = io::stdout().lock();
    for line in lines {
        if writeln!(out, "{line}").is_err() {
            return;
        }
    }
}

fn verify(suite: Suite, seed: u64, fault: Option<Fault>) -> ExitCode {
    let report = run_suite(suite, seed, fault);
    match serde_json::to_string_pretty(&report) {
        Ok(text) => emit(&[text]),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    for c in report.failed_checks() {
        eprintln!(
            "FAIL {}: {} of {} cases; first: {}",
            c.name,
            c.failures,
            c.cases,
            c.first_failure.as_deref().unwrap_or("-")
        );
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}

fn run(command: Command, args: &RunArgs) -> ExitCode {
    let bytes = match fs::read(&args.config) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {}", Error::io(&args.config, e));
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let text = match std::str::from_utf8(&bytes) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}", Error::io(&args.config, e));
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let mut exp = match Experiment::from_json(text) {
        Ok(exp) => exp,
        Err(e) => {
            eprintln!("error in {}: {e}", args.config.display());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Some(seed) = args.seed {
        exp.config.seed = seed;
        exp.walk_config.master_seed = seed;
    }
    match run_command(command, &exp, &bytes, &args.out, args.threads) {
        Ok(outcome) => {
            let wrote = outcome.files.iter().map(|f| format!("wrote {}", f.display()));
            emit(&outcome.messages.iter().cloned().chain(wrote).collect::<Vec<_>>());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Verify {
            suite,
            seed,
            inject_fault,
        } => verify(suite, seed, inject_fault),
        Cmd::Drift(a) => run(Command::Drift, &a),
        Cmd::Clt(a) => run(Command::Clt, &a),
        Cmd::Deviation(a) => run(Command::Deviation, &a),
        Cmd::Distance(a) => run(Command::Distance, &a),
        Cmd::TreeLab(a) => run(Command::TreeLab, &a),
        Cmd::Gap(a) => run(Command::Gap, &a),
    }
}
