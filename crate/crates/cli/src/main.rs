use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gwt_cli::commands::{self, Output};
use gwt_cli::config::{Loaded, RegistryConfig};
use gwt_cli::error::{CliError, Result};
use gwt_cli::render::Format;

#[derive(Parser)]
#[command(name = "gwt", version, about = "Reorder operator polynomials with the general Wick theorem")]
struct Cli {
    /// Registry configuration (JSON).
    #[arg(long, env = "GWT_CONFIG", global = true)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the contraction matrix between two orderings.
    Contract {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Rewrite `from[EXPR]` as a `to`-ordered polynomial.
    Reorder {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        expr: String,
    },
    /// Check every configured ordering pair on all words up to a length.
    Verify {
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Restrict to one pair, e.g. `A→N`.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Compare two expressions as truncated Fock-space matrices.
    Numeric {
        #[arg(long, default_value_t = 20)]
        trunc: usize,
        #[arg(long, default_value_t = 8)]
        block: usize,
        lhs: String,
        rhs: String,
    },
    /// Reorder a Gaussian exp(-x·D⁻¹x/2); D is read from a JSON file of rows.
    Quadratic {
        matrix: PathBuf,
        #[arg(long, default_value = "qp")]
        from: String,
        #[arg(long, default_value = "N")]
        to: String,
        /// Also compare both sides on a truncated Fock space.
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long, default_value_t = 10)]
        block: usize,
    },
    /// Two-mode squeezing operator in normal-ordered form, checked numerically.
    Squeeze {
        #[arg(long)]
        g: f64,
        #[arg(long, default_value_t = 30)]
        trunc: usize,
        #[arg(long, default_value_t = 10)]
        block: usize,
    },
}

fn load(path: &Option<PathBuf>) -> Result<Loaded> {
    match path {
        Some(p) => RegistryConfig::from_path(p)?.load(),
        None => Err(CliError::Config("no registry given: pass --config or set GWT_CONFIG".into())),
    }
}

fn run(cli: &Cli) -> Result<Output> {
    let f = cli.format;
    match &cli.command {
        Command::Contract { from, to } => commands::contract(&load(&cli.config)?, from, to, f),
        Command::Reorder { from, to, expr } => commands::reorder(&load(&cli.config)?, from, to, expr, f),
        Command::Verify { max_len, pair } => commands::verify(&load(&cli.config)?, *max_len, pair.as_deref(), f),
        Command::Numeric { trunc, block, lhs, rhs } => {
            commands::numeric(&load(&cli.config)?, *trunc, *block, lhs, rhs, f)
        }
        Command::Quadratic { matrix, from, to, trunc, block } => {
            let text = std::fs::read_to_string(matrix).map_err(|e| CliError::Io(format!("{}: {e}", matrix.display())))?;
            let d = commands::read_matrix(&text)?;
            commands::quadratic(&load(&cli.config)?, &d, from, to, trunc.map(|t| (t, *block)), f)
        }
        Command::Squeeze { g, trunc, block } => commands::squeeze(*g, *trunc, *block, f),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{}", out.document.trim_end());
            if out.success { ExitCode::SUCCESS } else { ExitCode::from(1) }
        }
        Err(e) => {
            match cli.format {
                Format::Json => println!("{}", e.to_json()),
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(2)
        }
    }
}
