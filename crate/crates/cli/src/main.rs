//! `singular-yamabe`: command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "singular-yamabe", version, about = "Yamabe problem toolkit for spaces with conic tips")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for all random probe families.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML file with solver, probe, analysis and inequality settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectrum of the operator family on the link, with conic indicial roots.
    Spectrum {
        space: PathBuf,
        /// Family index `m` (default: the dimension `n`).
        #[arg(long)]
        m: Option<usize>,
        /// Highest mode kept.
        #[arg(long)]
        jmax: Option<usize>,
    },
    /// Subcritical minimization with continuation toward the critical exponent.
    Solve {
        space: PathBuf,
        /// Number of grid cells.
        #[arg(long)]
        grid: Option<usize>,
        /// Comma-separated exponents, decreasing toward `n`.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<f64>>,
    },
    /// Tip exponents, positivity and a Moser sup bound for a solution.
    Analyze { solution: PathBuf, space: PathBuf },
    /// Curvature-condition truth table of a strata file.
    Admissibility { strata: PathBuf },
    /// Hardy, Morrey, Sobolev and truncation checks for a space.
    Inequalities { space: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SINGULAR_YAMABE_LOG", "error"))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> singular_yamabe::Result<ExitCode> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.probes.seed = seed;
    }
    let ctx = commands::Context { out: cli.out, config };
    match cli.command {
        Command::Spectrum { space, m, jmax } => commands::spectrum(&ctx, &space, m, jmax),
        Command::Solve { space, grid, schedule } => {
            let mut ctx = ctx;
            if let Some(cells) = grid {
                ctx.config.solver.grid.cells = cells;
            }
            if let Some(s) = schedule {
                ctx.config.solver.schedule = s;
            }
            commands::solve(&ctx, &space)
        }
        Command::Analyze { solution, space } => commands::analyze(&ctx, &solution, &space),
        Command::Admissibility { strata } => commands::admissibility(&ctx, &strata),
        Command::Inequalities { space } => commands::inequalities(&ctx, &space),
    }
}
