use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use zermelo::scenario::{run_scenario, RunOptions, RunReport};

#[derive(Parser)]
#[command(
    name = "zermelo",
    about = "Time-optimal quantum navigation: solve, propagate, and verify \
             steering problems under an energy resource bound",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario config and emit its report and time series.
    Run {
        /// Path to the JSON scenario config.
        config: PathBuf,
        /// Directory for emitted files (default: the config's directory).
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Override the config's grid step count.
        #[arg(long)]
        steps: Option<usize>,
        /// Suppress per-run console output.
        #[arg(long)]
        quiet: bool,
    },
    /// Run every *.json scenario in a directory.
    Batch {
        /// Directory containing scenario configs.
        dir: PathBuf,
        /// Directory for emitted files (default: alongside each config).
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Suppress per-run console output.
        #[arg(long)]
        quiet: bool,
    },
}

fn print_report(report: &RunReport) {
    let label = report
        .name
        .clone()
        .unwrap_or_else(|| report.preset.clone());
    if report.degenerate {
        println!("{label}: states coincide, delta_t = 0 (no control needed)");
        return;
    }
    match report.delta_t_seconds {
        Some(secs) => println!(
            "{label}: k = {}, delta_t = {} ({} ps)",
            report.k,
            report.delta_t,
            secs * 1e12
        ),
        None => println!("{label}: k = {}, delta_t = {}", report.k, report.delta_t),
    }
    for check in &report.invariants {
        println!(
            "  {} {}: {:.3e} (threshold {:.0e})",
            if check.pass { "pass" } else { "FAIL" },
            check.name,
            check.max_deviation,
            check.threshold
        );
    }
    for file in &report.emitted_files {
        println!("  wrote {file}");
    }
}

fn run_one(config: &Path, opts: &RunOptions) -> Result<bool, String> {
    let report = run_scenario(config, opts)
        .map_err(|e| format!("{}: {e}", config.display()))?;
    if !opts.quiet {
        print_report(&report);
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, output_dir, steps, quiet } => {
            let opts = RunOptions {
                output_dir: output_dir.clone(),
                steps_override: *steps,
                quiet: *quiet,
            };
            run_one(config, &opts)
        }
        Command::Batch { dir, output_dir, quiet } => (|| {
            let mut configs: Vec<PathBuf> = std::fs::read_dir(dir)
                .map_err(|e| format!("{}: {e}", dir.display()))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
                .collect();
            configs.sort();
            if configs.is_empty() {
                return Err(format!("no *.json scenarios in {}", dir.display()));
            }
            let opts = RunOptions {
                output_dir: output_dir.clone(),
                steps_override: None,
                quiet: *quiet,
            };
            let mut all_pass = true;
            for config in &configs {
                all_pass &= run_one(config, &opts)?;
            }
            Ok(all_pass)
        })(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: invariant check failed");
            ExitCode::FAILURE
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
