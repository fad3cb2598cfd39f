mod args;
mod commands;
mod config;
mod input;
mod report;

use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use args::{Cli, Format};
use commands::{Settings, DEFAULT_TOL};
use config::ExperimentConfig;

/// Validation problems exit with 2, numerical failures with 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<suffdiv::Error>(),
            Some(suffdiv::Error::NonConvergence { .. } | suffdiv::Error::InfiniteRate)
        )
    });
    if numerical {
        1
    } else {
        2
    }
}

fn resolve(cli: Cli) -> Result<Cli> {
    let Some(path) = &cli.config else {
        return Ok(cli);
    };
    if cli.command.is_some() {
        bail!("--config replaces the subcommand; give one or the other");
    }
    if cli.bits || cli.format != Format::Json || cli.tol.is_some() {
        bail!("with --config, set bits, format and tolerance inside the config file");
    }
    let cfg = ExperimentConfig::load(path)?;
    let argv = cfg.to_argv("suffdiv")?;
    let mut resolved = Cli::try_parse_from(&argv).map_err(|e| anyhow::anyhow!("config {}: {e}", path.display()))?;
    resolved.output = resolved.output.or(cli.output);
    Ok(resolved)
}

fn run(cli: Cli) -> Result<()> {
    let cli = resolve(cli)?;
    let Some(command) = &cli.command else {
        bail!("no subcommand given; see --help");
    };
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            bail!("--tol must be a positive number, got {tol}");
        }
    }
    let settings = Settings {
        bits: cli.bits,
        tol: cli.tol.unwrap_or(DEFAULT_TOL),
    };
    let text = commands::run(command, &settings)?.render(cli.format)?;
    match &cli.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
