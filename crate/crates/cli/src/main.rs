mod commands;
mod config;
mod error;
mod output;
mod plot;
mod presets;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{write_files, RunRecord};

/// Imaginary-gap-closed points, dissipative quantum walks and damping-matrix
/// spectra of onsite-dissipative ladders.
#[derive(Parser)]
#[command(name = "igclab", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Sub>,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Also write SVG charts.
    #[arg(long, global = true)]
    plot: bool,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for random loss profiles.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override a config entry by dotted path, e.g. model.ladder.hoppings.0=0.4.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the experiment described by --config (the default).
    Run,
    /// Run a built-in figure preset.
    Figure { name: String },
    /// Print the built-in presets as JSON.
    Presets,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.status() as u8)
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Schema(e.render().to_string().trim().to_string())),
    };
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Schema(format!("--jobs: {e}")))?;
    }
    let doc = match &cli.command {
        Some(Sub::Presets) => {
            let list = serde_json::to_string_pretty(&presets::all()).expect("presets serialize");
            println!("{list}");
            return Ok(());
        }
        Some(Sub::Figure { name }) => json!({ "command": "figure", "figure": name }),
        Some(Sub::Run) | None => {
            let path = cli
                .config
                .as_ref()
                .ok_or_else(|| CliError::Schema("--config PATH is required".into()))?;
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str::<Value>(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?
        }
    };
    let overrides = cli
        .overrides
        .iter()
        .map(|s| config::parse_override(s))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = config::resolve(doc, &overrides, cli.seed)?;
    let echo = serde_json::to_value(&cfg).expect("config serializes");

    let start = Instant::now();
    let mut out = commands::run(&cfg, cli.plot)?;
    let manifest = write_files(&cli.out, &out.files)?;
    let record = RunRecord {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command_name(),
        config: &echo,
        prng: igclab::model::LOSS_PRNG,
        wall_time_s: start.elapsed().as_secs_f64(),
        stages: &out.stages,
        summary: std::mem::take(&mut out.summary).into_iter().collect(),
        manifest,
    };
    let meta = cli.out.join("metadata.json");
    let text = serde_json::to_string_pretty(&record).expect("record serializes");
    fs::write(&meta, text + "\n").map_err(|e| CliError::io(&meta, e))?;
    println!("{} files written to {}", out.files.len() + 1, cli.out.display());
    match out.deferred {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
