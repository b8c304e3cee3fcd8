use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fiberqed::harness::{
    list_presets, load_preset, parse_config, run_sweep, Status, SweepOptions, SweepSpec,
};
use fiberqed::Result;

/// Fidelity sweeps for transfer and gate protocols between fiber-coupled
/// atomic ensembles.
#[derive(Parser)]
#[command(name = "fiberqed", version)]
struct Cli {
    /// Directory for CSV series, summary and manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the time-grid step (in tau) of every run.
    #[arg(long, global = true)]
    grid_step: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario/sweep document.
    Run { config: PathBuf },
    /// Run a built-in preset, optionally with `section.key=value` overrides.
    Preset {
        name: String,
        overrides: Vec<String>,
    },
    /// List the built-in presets.
    ListPresets,
}

fn execute(cli: &Cli, spec: SweepSpec) -> Result<bool> {
    let spec = match cli.grid_step {
        Some(step) => spec.with_grid_step(step)?,
        None => spec,
    };
    let options = SweepOptions {
        out_dir: cli.out.clone(),
        threads: cli.threads,
    };
    let manifest = run_sweep(&spec, &options)?;
    for run in &manifest.runs {
        match run.status {
            Status::Ok => println!(
                "{} {}: peak {:.6} at tau = {:.4}",
                manifest.name,
                run.label,
                run.peak_fidelity.unwrap_or(f64::NAN),
                run.peak_tau.unwrap_or(f64::NAN)
            ),
            Status::Failed => eprintln!(
                "{} {}: FAILED: {}",
                manifest.name,
                run.label,
                run.error.as_deref().unwrap_or("unknown error")
            ),
        }
    }
    println!(
        "{} run(s), {} failed; artifacts in {}",
        manifest.runs.len(),
        manifest.failures(),
        cli.out.display()
    );
    Ok(manifest.failures() == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::ListPresets => {
            for p in list_presets() {
                println!("{:<10} {}", p.name, p.description());
            }
            Ok(true)
        }
        Command::Run { config } => std::fs::read_to_string(config)
            .map_err(Into::into)
            .and_then(|text| parse_config(&text))
            .and_then(|spec| execute(&cli, spec)),
        Command::Preset { name, overrides } => {
            load_preset(name, overrides).and_then(|spec| execute(&cli, spec))
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
