//! The `qst` command-line front end.
//!
//! ```text
//! qst evolve --config run.conf [--out DIR]
//! qst sweep  --config run.conf --axis J --from 0.01 --to 3 --points 60 [--out DIR]
//! qst oracle --g1 1 --j 1.1547 --g2 1 --tmax 6 [--points N] [--out DIR]
//! qst reproduce fig3a [--out DIR]
//! ```
//!
//! Exit codes: 0 on success, 2 for configuration errors (including CLI
//! usage), 3 for numerical failures, 1 for I/O problems.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{CliError, FigureId};
pub use config::{parse_config, ConfigError, ResolvedRun, RunConfig};
pub use output::RunSummary;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "qst",
    about = "Quantum-state-transfer simulator for a qubit / resonator / resonator / NV chain",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the master equation for one configuration
    Evolve {
        /// Path to a key=value config file
        #[arg(long)]
        config: PathBuf,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Sweep one parameter axis, recording the fidelity maximum per point
    Sweep {
        /// Path to a key=value config file with the base parameters
        #[arg(long)]
        config: PathBuf,
        /// Axis to vary: J, g1, theta or xi
        #[arg(long)]
        axis: String,
        /// First grid value
        #[arg(long)]
        from: f64,
        /// Last grid value
        #[arg(long)]
        to: f64,
        /// Number of grid points
        #[arg(long)]
        points: usize,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Closed-system chain populations from the eigendecomposition oracle
    Oracle {
        #[arg(long)]
        g1: f64,
        #[arg(long)]
        j: f64,
        #[arg(long)]
        g2: f64,
        #[arg(long)]
        tmax: f64,
        /// Number of output samples
        #[arg(long, default_value_t = 2000)]
        points: usize,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Emit the data files for one of the built-in figure presets
    Reproduce {
        /// One of: fig1, fig2a, fig2b, fig3a, fig3b, fig3c, fig3d
        figure: String,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Parse arguments, run, and translate failures into exit codes.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evolve { config, out } => commands::cmd_evolve(&config, &out),
        Command::Sweep {
            config,
            axis,
            from,
            to,
            points,
            out,
        } => commands::cmd_sweep(&config, &axis, from, to, points, &out),
        Command::Oracle {
            g1,
            j,
            g2,
            tmax,
            points,
            out,
        } => commands::cmd_oracle(g1, j, g2, tmax, points, &out),
        Command::Reproduce { figure, out } => match FigureId::parse(&figure) {
            Some(id) => commands::cmd_reproduce(id, &out),
            None => Err(CliError::Config(ConfigError {
                line: None,
                message: format!(
                    "unknown figure id `{figure}` (expected one of fig1, fig2a, fig2b, fig3a, fig3b, fig3c, fig3d)"
                ),
            })),
        },
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
