//! `pdk`: batch front end for transmission spectra, trigger design,
//! amplifier sweeps, detector POVMs and network design.

mod amplify;
mod config;
mod design;
mod failure;
mod output;
mod povm;
mod transmit;
mod wavepacket;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::RunArgs;
use failure::{Failure, Outcome};

#[derive(Parser)]
#[command(
    name = "pdk",
    version,
    about = "Single-photon detector models: spectra, triggers, amplifiers and POVMs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transmission and reflection spectra of a network.
    Transmit(Common),
    /// Trigger coupling schedule for a target wavepacket.
    Wavepacket(Common),
    /// SNR and variance sweep over amplifier gains.
    Amplify(Common),
    /// Detector POVM element, fluctuations, uncertainty, super-resolution.
    Povm(Common),
    /// Two-state couplings, perfect-transmission frequencies, mode matching.
    Design(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Seed for every random draw; overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the number of points of the primary grid.
    #[arg(long)]
    grid_points: Option<usize>,
}

impl From<Common> for RunArgs {
    fn from(c: Common) -> Self {
        RunArgs {
            config: c.config,
            out: c.out,
            seed: c.seed,
            grid_points: c.grid_points,
        }
    }
}

/// Caps rayon's pool at `PDK_THREADS` when set.
fn configure_threads() -> Outcome<()> {
    let Ok(raw) = std::env::var("PDK_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Failure::config(format!("PDK_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::config(format!("cannot configure thread pool: {e}")))
}

fn dispatch(command: Command) -> Outcome<()> {
    configure_threads()?;
    match command {
        Command::Transmit(c) => transmit::run(&c.into()),
        Command::Wavepacket(c) => wavepacket::run(&c.into()),
        Command::Amplify(c) => amplify::run(&c.into()),
        Command::Povm(c) => povm::run(&c.into()),
        Command::Design(c) => design::run(&c.into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = json!({ "error": "usage", "class": "config", "exit_code": 2, "message": e.to_string().trim() });
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}
