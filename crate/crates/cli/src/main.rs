//! `delc`: entanglement sweeps, dressed spectra, coherent channels and
//! self-validation for cascaded four-wave-mixing amplifiers.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{resolve, Format, Overrides};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "delc", version, about = "Cascaded four-wave-mixing entanglement and coherent-channel toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON configuration file, merged over the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in preset name (e.g. fig3, fig6, fig8_col3, fig9_quad) or a path to a preset file.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps; output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Duan/PPT criteria over a gain grid.
    RegionScan {
        #[command(flatten)]
        common: Common,
    },
    /// Third-order coherence spectra for one or more dressing cases.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Analytic and numeric coherent-channel positions and the capacity.
    Channels {
        #[command(flatten)]
        common: Common,
    },
    /// Criteria along δ1 with the first gain modulated by the spectrum.
    Profile {
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in checks; exits nonzero when any fails.
    Validate {
        /// Check id, name or group (closed-form, symplectic, three-mode, four-mode, resonance, oracle).
        filter: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, filter) = match &cli.command {
        Command::RegionScan { common }
        | Command::Spectrum { common }
        | Command::Channels { common }
        | Command::Profile { common } => (common, None),
        Command::Validate { filter, common } => (common, filter.as_deref()),
    };
    let cfg = resolve(
        common.preset.as_deref(),
        common.config.as_deref(),
        Overrides {
            out: common.out.clone(),
            format: common.format,
            jobs: common.jobs,
        },
    )?;
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))?;
    }
    match cli.command {
        Command::RegionScan { .. } => commands::region_scan(&cfg),
        Command::Spectrum { .. } => commands::spectrum_cmd(&cfg),
        Command::Channels { .. } => commands::channels(&cfg),
        Command::Profile { .. } => commands::profile(&cfg),
        Command::Validate { .. } => commands::validate(&cfg, filter, cfg.format == Some(Format::Json)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
