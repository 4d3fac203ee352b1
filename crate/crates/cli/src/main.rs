use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rmem_cli::config::parse_assignment;
use rmem_cli::run::{self, to_json};
use rmem_cli::{output, presets, CliError, CliResult, RunConfig, SweepSpec};

/// Cavity Raman memory driven by refractive-index ramps.
#[derive(Parser)]
#[command(name = "rmem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one storage/retrieval scenario.
    Simulate {
        config: PathBuf,
        /// Override a config field, e.g. `--set params.kappa=2e7`.
        #[arg(long = "set", value_name = "PATH=VALUE")]
        set: Vec<String>,
        /// Output directory (default: config, then $RMEM_OUTPUT_DIR, then `.`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep.
    Sweep {
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a capacity or crosstalk request.
    Analyze { request: PathBuf },
    /// Compare the collective model with the discrete-atom oracle.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "PATH=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a ready-made document.
    Preset {
        #[arg(value_parser = presets::PRESETS)]
        name: String,
        /// Mode spacing in pulse widths (gaussian only).
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Pulse FWHM in seconds.
        #[arg(long, default_value_t = 1e-6)]
        tau: f64,
    },
}

fn read(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &PathBuf, set: &[String]) -> CliResult<RunConfig> {
    let config = RunConfig::from_json(&read(path)?)?;
    let assignments = set.iter().map(|s| parse_assignment(s)).collect::<CliResult<Vec<_>>>()?;
    config.with_overrides(assignments.iter().map(|(k, v)| (k.as_str(), v.clone())))
}

fn execute(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Simulate { config, set, out } => {
            let config = load(&config, &set)?;
            let (outcome, _) = run::simulate(&config, out.as_deref())?;
            Ok(to_json(&outcome.summary))
        }
        Command::Sweep { spec, jobs, out } => {
            let spec = SweepSpec::from_json(&read(&spec)?)?;
            let rows = run::sweep(&spec, jobs)?;
            let dir = output::resolve_dir(out.as_deref(), spec.base.output.dir.as_deref());
            let name = format!("{}.sweep.csv", spec.base.output.stem);
            let csv = run::sweep_csv(&spec, &rows);
            output::write(&dir, &name, &csv)?;
            Ok(csv)
        }
        Command::Analyze { request } => {
            let request = run::parse_analysis(&read(&request)?)?;
            Ok(to_json(&run::analyze(&request)?))
        }
        Command::Validate { config, set, out } => {
            let config = load(&config, &set)?;
            Ok(to_json(&run::validate(&config, out.as_deref())?))
        }
        Command::Preset { name, delta, tau } => presets::preset(&name, delta, tau),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
