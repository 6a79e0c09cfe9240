//! Configuration-driven front end for the NG-Rayleigh / Nehari-manifold
//! solvers. Identical config and seed produce byte-identical artifacts.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure.

mod checks;
mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nehari-rq",
    about = "Fibering maps, nonlinear generalized Rayleigh quotients, Nehari-manifold ground states, and prescribed-energy solutions on finite-difference grids",
    version
)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the solver seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Refine every grid axis by a factor of 2^K.
    #[arg(long, global = true, default_value_t = 0)]
    grid_refine: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a fibering-map profile CSV (t, phi, dphi, ddphi).
    Fiber,
    /// Evaluate a quotient and its realizer; optional t-profile CSV.
    Quotient,
    /// Estimate a quotient extremal value by multi-start descent.
    Extremal,
    /// Solve a Nehari-manifold minimization on one branch.
    GroundState,
    /// Warm-started branch continuation over a lambda grid.
    Branch,
    /// Prescribed-energy solution of the zero-mass problem.
    ZeroMass,
    /// Run a family invariant suite; nonzero exit on failure.
    Check {
        /// "convex-concave", "four-term", or "zero-mass".
        #[arg(long)]
        family: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are success; bad arguments are a
            // validation failure.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Ok(threads) = std::env::var("NEHARI_RQ_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    // `check` runs without a config.
    if let Command::Check { family } = &cli.command {
        return match commands::run_check(family, &cli.out) {
            Ok(0) => ExitCode::SUCCESS,
            Ok(_) => ExitCode::from(2),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        };
    }

    let config_path = match &cli.config {
        Some(p) => p.clone(),
        None => {
            eprintln!("error: --config is required for this subcommand");
            return ExitCode::from(1);
        }
    };
    let config = match config::Config::load(&config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let out_dir = config
        .output
        .dir
        .as_ref()
        .map(PathBuf::from)
        .unwrap_or_else(|| cli.out.clone());
    let ctx = commands::Context {
        config,
        out_dir,
        seed: cli.seed,
        grid_refine: cli.grid_refine,
    };
    let result = match &cli.command {
        Command::Fiber => commands::run_fiber(&ctx),
        Command::Quotient => commands::run_quotient(&ctx),
        Command::Extremal => commands::run_extremal(&ctx),
        Command::GroundState => commands::run_ground_state(&ctx),
        Command::Branch => commands::run_branch(&ctx),
        Command::ZeroMass => commands::run_zero_mass(&ctx),
        Command::Check { .. } => unreachable!("handled above"),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Configuration and input mistakes are validation errors; errors
            // surfacing from the solvers are numerical failures.
            let is_validation = e.downcast_ref::<nehari_rq::Error>().is_none();
            eprintln!("error: {e:#}");
            ExitCode::from(if is_validation { 1 } else { 2 })
        }
    }
}
