use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vqspde_cli::{encode_report, orbit_report, run_experiment, CliError, ExperimentConfig, RawConfig};

#[derive(Parser)]
#[command(name = "vqspde", version, about = "Variational simulation of 1D evolution PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a key=value config (or a previous meta.json).
    Run {
        config: PathBuf,
        /// Override a config entry, e.g. --set n_layers=6
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Output directory (overrides output_dir)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the orbits of the circular entangling layer.
    Orbits {
        #[arg(long)]
        n: usize,
    },
    /// Print the single bit-flip encoding of a basis state.
    Encode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        layers: usize,
        #[arg(long)]
        target: u64,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, overrides, out } => {
            let mut raw = RawConfig::load(&config)?;
            for o in &overrides {
                raw.apply_override(o)?;
            }
            if let Some(dir) = out {
                raw.set("output_dir", &dir.display().to_string())?;
            }
            let cfg = ExperimentConfig::from_raw(&raw)?;
            let summary = run_experiment(&cfg)?;
            println!("{}", summary.headline);
            println!("wrote {} to {}", summary.files.join(", "), summary.output_dir.display());
        }
        Command::Orbits { n } => print!("{}", orbit_report(n)?),
        Command::Encode { n, layers, target } => print!("{}", encode_report(n, layers, target)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vqspde: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
