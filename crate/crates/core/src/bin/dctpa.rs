//! Thin CLI over the library: run scans, validate configs, emit presets
//! and oracle curves. Exit codes: 0 success, 2 configuration error, 3
//! runtime/numerical error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dctpa::harness::{oracle_csv, run_ocdma, run_scan_to_file, validate_config, write_preset};
use dctpa::Error;

#[derive(Parser)]
#[command(name = "dctpa", about = "Two-photon absorption with broadband down-converted light", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the scan (or communication run) described by a config file
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the realization count
        #[arg(long)]
        realizations: Option<usize>,
        /// Override the output CSV path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config file and report all problems
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a bundled preset configuration into a directory
    Preset {
        /// One of: fig2a, fig2b, fig3b, fig3c, ocdma-demo
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit the closed-form oracle curve for a scan config
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> dctpa::Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            realizations,
            out,
        } => {
            let mut cfg = validate_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(r) = realizations {
                if r < 2 {
                    return Err(Error::config(format!(
                        "run.realizations: must be >= 2, got {r}"
                    )));
                }
                cfg.realizations = r;
            }
            if let Some(o) = out {
                cfg.output_path = o;
            }
            if cfg.mode == "ocdma" {
                let result = run_ocdma(&cfg)?;
                let n = result.decoded.len();
                println!(
                    "decoded {n} bits, {} errors (BER {:.4})",
                    result.errors,
                    result.errors as f64 / n.max(1) as f64
                );
                println!(
                    "results written to {}",
                    cfg.ocdma.as_ref().unwrap().results_path.display()
                );
            } else {
                run_scan_to_file(&cfg)?;
                println!("scan written to {}", cfg.output_path.display());
            }
            Ok(())
        }
        Command::Validate { config } => {
            validate_config(&config)?;
            println!("{}: ok", config.display());
            Ok(())
        }
        Command::Preset { name, out } => {
            let path = write_preset(&name, &out)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Oracle { config } => {
            let cfg = validate_config(&config)?;
            print!("{}", oracle_csv(&cfg)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(0),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
