use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;
use sqzc_cli::app::{configure_threads, fock_steady, fock_wigner, gaussian_optimum, load_config, run_scenario};
use sqzc_cli::recipes::{recipe, Recipe, RecipeOptions};
use sqzc_cli::CliError;

/// Squeezing in a cascaded amplifier / cavity-qubit circuit.
#[derive(Parser)]
#[command(name = "sqzc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs a scenario configuration and writes its CSV/SVG artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output.path`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Worker threads (`SQZC_THREADS` takes precedence).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Runs, or with `--emit-config` only writes, a figure recipe.
    Recipe {
        /// fig1, fig2, fig3, fig4 or fig5.
        name: String,
        #[arg(long)]
        emit_config: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Points per sweep axis (Wigner points per side for fig3).
        #[arg(long)]
        points: Option<usize>,
        /// Use n1 = 10, n2 = 50 for the qubit variants.
        #[arg(long)]
        full_truncation: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    #[command(subcommand)]
    Fock(FockCommand),
    #[command(subcommand)]
    Gaussian(GaussianCommand),
}

#[derive(Subcommand)]
enum FockCommand {
    /// Solves a single-point configuration and stores the density matrix.
    Steady {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        state_out: PathBuf,
    },
    /// Wigner function of cavity 2 of a stored state.
    Wigner {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 4.0)]
        xmax: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GaussianCommand {
    /// Detuning that minimizes the quadrature variance at one pump strength.
    Optimum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        eps1: f64,
        /// Search window `lo,hi` for the bare detuning.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (f64, f64),
    },
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    Ok((num(lo)?, num(hi)?))
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("value serializes"));
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out_dir, threads } => {
            configure_threads(threads)?;
            let cfg = load_config(&config)?;
            let report = run_scenario(&cfg, out_dir.as_deref())?;
            for f in &report.files {
                println!("{}", f.display());
            }
            report.status()
        }
        Command::Recipe { name, emit_config, out_dir, points, full_truncation, threads } => {
            let r: Recipe = name.parse()?;
            let cfg = recipe(r, RecipeOptions { points, full_truncation, eps1_range: None });
            cfg.validate()?;
            if let Some(path) = emit_config {
                return sqzc_cli::emit::table::write_file(&path, cfg.to_json().as_bytes());
            }
            configure_threads(threads)?;
            let report = run_scenario(&cfg, out_dir.as_deref())?;
            for f in &report.files {
                println!("{}", f.display());
            }
            report.status()
        }
        Command::Fock(FockCommand::Steady { config, state_out }) => {
            let cfg = load_config(&config)?;
            print(&fock_steady(&cfg, &state_out)?);
            Ok(())
        }
        Command::Fock(FockCommand::Wigner { state, xmax, points, out, svg }) => {
            print(&fock_wigner(&state, xmax, points, &out, svg.as_deref())?);
            Ok(())
        }
        Command::Gaussian(GaussianCommand::Optimum { config, eps1, window }) => {
            let cfg = load_config(&config)?;
            print(&gaussian_optimum(&cfg, eps1, window)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let e = e.classify();
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
