//! Command-line driver: run configurations or presets, validate configs,
//! write trajectory and summary CSV files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gaussbath::cli::{self, RunOptions, Severity};
use gaussbath::Error;

#[derive(Parser)]
#[command(name = "gaussbath", version, about = "Two-particle Gaussian states in contact with heat baths: log-negativity trajectories, sudden death, revivals")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration (from a JSON file or a built-in preset) and write
    /// trajectory/summary CSV files.
    Run {
        /// Path to a JSON run configuration.
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Built-in recipe: fig1 | fig2 | fig3 | fig4.
        #[arg(long)]
        preset: Option<String>,
        /// Output directory (defaults to $GAUSSBATH_OUT, then the working directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for sweep points.
        #[arg(long)]
        threads: Option<usize>,
        /// Log-negativity death threshold for cutoff/revival detection.
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
    /// Check a configuration without running it; prints one line per finding.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::NumericalFailure(_) | Error::IntegrationDiverged { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::Run {
            config,
            preset,
            out,
            threads,
            eps,
        } => {
            let cfg = match (config, preset) {
                (Some(path), None) => cli::load_config(&path),
                (None, Some(name)) => cli::preset(&name),
                (None, None) => Err(Error::ConfigError {
                    field: "config".into(),
                    message: "pass --config <path> or --preset <name>".into(),
                }),
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let mut cfg = match cfg {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return exit_code_for(&e);
                }
            };
            if let Some(dir) = out {
                cfg.out = Some(dir);
            }
            for issue in cli::validate(&cfg) {
                if issue.severity == Severity::Warning {
                    eprintln!("{issue}");
                }
            }
            match cli::run(&cfg, &RunOptions { threads, eps }) {
                Ok(summary) => {
                    for row in &summary.rows {
                        let label = row
                            .param_value
                            .map(|v| format!("{}={v}", cfg.sweep_param.as_deref().unwrap_or("value")))
                            .unwrap_or_else(|| "single run".into());
                        let esd = row
                            .esd_time
                            .map(|t| format!("{t:.6}"))
                            .unwrap_or_else(|| "none".into());
                        println!(
                            "{label}: esd_time={esd} revivals={} regime={} unphysical_samples={} -> {}",
                            row.revival_count,
                            row.regime,
                            row.unphysical_samples,
                            row.trajectory_file.display()
                        );
                        if row.unphysical_samples > 0 {
                            eprintln!(
                                "warning: {label}: {} samples fail the physicality check (see the `physical` column)",
                                row.unphysical_samples
                            );
                        }
                    }
                    println!("summary -> {}", summary.summary_file.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    exit_code_for(&e)
                }
            }
        }
        Command::Validate { config } => match cli::load_config(&config) {
            Ok(cfg) => {
                let issues = cli::validate(&cfg);
                for issue in &issues {
                    println!("{issue}");
                }
                if issues.iter().any(|i| i.severity == Severity::Error) {
                    ExitCode::from(1)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(e) => {
                eprintln!("{e}");
                exit_code_for(&e)
            }
        },
    }
}
