use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nilfix_cli::{configure_threads, run_file, write_atomic, Command, Settings, EXIT_INVALID};

/// Fixed points of nilpotent Lie algebra actions on surfaces.
#[derive(Parser)]
#[command(name = "nilfix", version)]
struct Cli {
    /// Seed for multi-start sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Modulus floor for index commands, witness tolerance for verify-main.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Target {
    file: PathBuf,
    #[arg(long)]
    field: String,
    #[arg(long)]
    region: String,
}

#[derive(Subcommand)]
enum Sub {
    /// Validate structure constants and report nilpotency data.
    CheckAlgebra { file: PathBuf },
    /// Check that the generator fields represent the algebra.
    CheckAction { file: PathBuf },
    /// Block index of a field, or of its time-t map with --flow-t.
    Index {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        flow_t: Option<f64>,
    },
    /// Search for a common fixed point inside an essential block.
    VerifyMain {
        #[command(flatten)]
        target: Target,
    },
    /// Render a phase portrait.
    Plot {
        #[command(flatten)]
        target: Target,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Run every task listed in the scenario.
    Run { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("nilfix: {e}");
        return ExitCode::from(EXIT_INVALID as u8);
    }
    let (file, cmd) = match cli.command {
        Sub::CheckAlgebra { file } => (file, Command::CheckAlgebra),
        Sub::CheckAction { file } => (file, Command::CheckAction),
        Sub::Index { target, flow_t } => (
            target.file,
            Command::Index {
                field: target.field,
                region: target.region,
                flow_t,
            },
        ),
        Sub::VerifyMain { target } => (
            target.file,
            Command::VerifyMain {
                field: target.field,
                region: target.region,
            },
        ),
        Sub::Plot { target, output } => (
            target.file,
            Command::Plot {
                field: target.field,
                region: target.region,
                output,
            },
        ),
        Sub::Run { file } => (file, Command::Run),
    };
    let settings = Settings {
        tol: cli.tol,
        seed: cli.seed,
    };
    let outcome = run_file(&file, &cmd, &settings);
    let mut exit = outcome.exit;
    for (path, svg) in &outcome.svgs {
        if let Err(e) = write_atomic(path, svg) {
            eprintln!("nilfix: cannot write {}: {e}", path.display());
            exit = EXIT_INVALID;
        }
    }
    let text = outcome.report_text();
    match &cli.report {
        Some(path) => {
            if let Err(e) = write_atomic(path, &text) {
                eprintln!("nilfix: cannot write {}: {e}", path.display());
                exit = EXIT_INVALID;
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(exit as u8)
}
