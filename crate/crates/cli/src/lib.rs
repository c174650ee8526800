//! `chsh-rates`: rate curves, finite-size rates, simulation and verification
//! from the command line.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use args::{Cli, Command};
pub use config::RunConfig;
pub use error::{CliError, EXIT_MISMATCH, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
pub use manifest::{sha256_hex, Manifest};

/// Loads the config, applies the global flags and runs the command. The
/// manifest is written only when the command succeeds.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(error::usage("--threads must be positive"));
        }
        // Fails harmlessly if a pool already exists in this process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut out = manifest::OutDir::open(&dir)?;
    match &cli.command {
        Command::Curves(a) => commands::curves(a, &mut cfg, &mut out)?,
        Command::Rates(a) => commands::rates(a, &mut cfg, &mut out, false)?,
        Command::Crossover(a) => commands::rates(a, &mut cfg, &mut out, true)?,
        Command::Simulate(a) => commands::simulate_cmd(a, &mut cfg, &mut out)?,
        Command::Verify(a) => commands::verify(a, &mut cfg, &mut out)?,
    }
    out.finish(cli.command.name(), &cfg)?;
    Ok(())
}

/// Parses `args` (including the program name) and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
