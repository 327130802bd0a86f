//! `ga-kernel`: JSON front end for the exact kernel.
//!
//! Every mathematical outcome, negative ones included, exits 0 with a JSON
//! verdict on stdout. Exit code 2 is reserved for unreadable or invalid
//! input.

mod commands;
mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ga_kernel_core::parser::GRAMMAR;

use config::{CliConfig, Output, Overrides, CONFIG_ENV};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Invalid(String),
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn input(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Invalid(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ga-kernel",
    version,
    about = "Exact rational integrability, nilpotency, slices and toric root criteria",
    after_help = "Expressions use + - * / ^, integers and the declared variable names; \
                  flow files may also use t and tp (tp stands for t'). See --help-grammar."
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Print the expression grammar and exit
    #[arg(long)]
    help_grammar: bool,
    /// Worker threads for root enumeration (output order does not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON config file; flags take precedence over its fields
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficients d^n(f)/n! of the exponential series of f
    Exp {
        derivation: PathBuf,
        expr: String,
        /// Last coefficient index [default: series-order]
        #[arg(long)]
        order: Option<usize>,
    },
    /// Detect and certify a rational flow of a derivation
    Integrable { derivation: PathBuf },
    /// Nilpotency test on the generators of a polynomial derivation
    Lnd { derivation: PathBuf },
    /// Find a verified rational slice of a flow
    Slice { flow: PathBuf },
    /// Check that a flow is the exponential flow of a derivation
    FlowVerify { flow: PathBuf, derivation: PathBuf },
    /// Check the group law F(t + tp) = F(tp) after F(t)
    Coaction { flow: PathBuf },
    /// Criteria for the homogeneous derivation D_{p,e} on a fan
    ToricCheck {
        fan: PathBuf,
        /// Comma-separated integers, e.g. 1,0
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Comma-separated integers, e.g. -1,2
        #[arg(long, allow_hyphen_values = true)]
        e: String,
    },
    /// All roots of a fan with coordinates bounded by the root bound
    ToricRoots {
        fan: PathBuf,
        /// Overrides --root-bound
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Convexity of the fan support
    ToricSemiaffine { fan: PathBuf },
}

fn run(cli: Cli) -> Result<String, CliError> {
    if cli.help_grammar {
        return Ok(GRAMMAR.to_string());
    }
    let Some(command) = cli.command else {
        return Err(CliError::Invalid("no subcommand given; see --help".into()));
    };
    let config = CliConfig::resolve(cli.config.as_deref(), &cli.overrides)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Invalid("threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let c = &config;
    let value = match command {
        Command::Exp { derivation, expr, order } => commands::exp(c, &derivation, &expr, order)?,
        Command::Integrable { derivation } => commands::integrable(c, &derivation)?,
        Command::Lnd { derivation } => commands::lnd(c, &derivation)?,
        Command::Slice { flow } => commands::slice(&flow)?,
        Command::FlowVerify { flow, derivation } => commands::flow_verify(&flow, &derivation)?,
        Command::Coaction { flow } => commands::coaction(&flow)?,
        Command::ToricCheck { fan, p, e } => commands::toric_check(c, &fan, &p, &e)?,
        Command::ToricRoots { fan, bound } => commands::toric_roots(c, &fan, bound)?,
        Command::ToricSemiaffine { fan } => commands::toric_semiaffine(c, &fan)?,
    };
    Ok(commands::render_output(&value, config.output == Output::Pretty))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
