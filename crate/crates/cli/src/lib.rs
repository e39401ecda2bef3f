//! Experiment driver for the driven XXZ simulator: configuration, the four
//! subcommands, and the file formats they write.
//!
//! Output contract (all floats with 17 significant digits, sites 1-based,
//! times in units of `1/|J∥|`):
//!
//! - `sz_profile.csv`: `t,site,sz`
//! - `entropy.csv`: `t,sigma` (half-system entropy per site)
//! - `classify.json`, `effcheck.json`, `table1.json`: reports
//! - `manifest.json`: resolved config, version, outputs, norm drift, warnings
//!
//! A frequency sweep writes each trajectory under `omega_<value>/`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::time::Instant;

use args::{Cli, CommandKind};
pub use config::Config;
pub use error::{CliError, CliResult};
use output::{write_json, MANIFEST_FILE};

/// Runs one parsed invocation and returns what to print.
pub fn run(cli: Cli) -> CliResult<String> {
    let start = Instant::now();
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let kind = cli.command.kind();
    cli.command.apply(&mut config);
    let out = cli.out.as_path();
    let mut outcome = match kind {
        CommandKind::Classify => commands::classify(&config, out)?,
        CommandKind::Evolve => commands::evolve(&config, out)?,
        CommandKind::Effcheck => commands::effcheck(&config, out)?,
        CommandKind::Table1 => commands::table1(&config, out)?,
    };
    outcome.manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    write_json(out, MANIFEST_FILE, &outcome.manifest)?;
    Ok(outcome.stdout)
}

