use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tact_cli::{run, CliError, Command, ExperimentConfig, OutputFormat, Overrides};

/// Two-axis counter-twisting experiments.
#[derive(Parser)]
#[command(name = "tact", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Observable sweep (squeezing, Fisher information, moments, fidelities).
    Evolve(RunArgs),
    /// Best squeezing and first Fisher-information maximum for each N.
    Scaling(RunArgs),
    /// Husimi and Wigner maps at the labelled events A-H.
    Maps(RunArgs),
    /// Mean-field fixed points, flow field and trajectories.
    Portrait(RunArgs),
    /// Gaussian-model and frozen-spin closed-form curves.
    Approx(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags below override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Particle number, or a comma-separated list.
    #[arg(long, value_delimiter = ',', value_name = "N[,N...]")]
    n: Option<Vec<usize>>,
    /// Window length in chi t.
    #[arg(long, value_name = "CHI_T")]
    tmax: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn execute(command: Command, args: RunArgs) -> Result<(), CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        out: args.out,
        n: args.n,
        t_max: args.tmax,
        samples: args.samples,
        format: args.format,
    })?;
    let manifest = run(command, &cfg)?;
    println!(
        "{}: wrote {} files to {}",
        command.name(),
        manifest.files.len() + 1,
        cfg.out_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors are configuration errors; help and version succeed
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, args) = match cli.command {
        Sub::Evolve(a) => (Command::Evolve, a),
        Sub::Scaling(a) => (Command::Scaling, a),
        Sub::Maps(a) => (Command::Maps, a),
        Sub::Portrait(a) => (Command::Portrait, a),
        Sub::Approx(a) => (Command::Approx, a),
    };
    match execute(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tact: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
