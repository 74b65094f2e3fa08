//! `bundle-pricing`: exact pricing solvers and oracles from the command line.
//!
//! Every run prints one JSON document. Exit codes: 0 success, 1 I/O failure,
//! 2 parse or validation error, 3 budget exceeded, 4 infeasible input,
//! 5 internal consistency failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use bundle_pricing::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bundle-pricing", version, about = "Exact revenue-optimal bundle pricing")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Largest allocation-map search space accepted by drev-exact.
    #[arg(long, global = true)]
    pub budget_allocations: Option<u128>,
    /// Largest number of LP variables; rows are capped at eight times this.
    #[arg(long, global = true)]
    pub budget_lp: Option<usize>,
    /// Largest item count accepted by solve-constk.
    #[arg(long, global = true)]
    pub max_items: Option<usize>,
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Fractional digits in decimal annotations.
    #[arg(long, global = true, default_value_t = 6)]
    pub decimal_digits: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal separate item pricing.
    Srev {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Optimal grand-bundle pricing.
    Brev {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Optimal deterministic mechanism by exhaustive search.
    DrevExact {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Optimal lottery revenue from the standard LP.
    RevLp {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Optimal pricing for i.i.d. items on two values {a, b}.
    SolveIid2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Probability of the high value b.
        #[arg(long)]
        p: String,
    },
    /// Optimal bundle pricing for a constant number of items.
    SolveConstk {
        #[arg(long)]
        instance: PathBuf,
        /// Include every evaluated vertex with its revenue.
        #[arg(long)]
        emit_candidates: bool,
    },
    /// Expected revenue of a menu.
    EvalMenu {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        menu: PathBuf,
    },
    /// Reduce a counting instance to one meeting the structural conditions.
    ReduceComp {
        #[arg(long)]
        input: PathBuf,
    },
    /// Build the pricing instance of a counting instance.
    BuildHardInstance {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        t: String,
        /// Accept inputs violating the structural conditions.
        #[arg(long)]
        allow_plain_comp: bool,
    },
    /// Revenues of the two candidate menus of a hard instance.
    CompareSolutions {
        #[arg(long)]
        instance: PathBuf,
        /// Include both menus in the report.
        #[arg(long)]
        emit_menus: bool,
    },
    /// Validate an instance file and optionally a menu against it.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        menu: Option<PathBuf>,
    },
}

/// Failure of a run, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Core(Error::DivisionByZero | Error::ParseRational { .. } | Error::Invalid(_)) => 2,
            CliError::Core(Error::BudgetExceeded { .. }) => 3,
            CliError::Core(Error::Infeasible(_)) => 4,
            CliError::Core(Error::Consistency(_)) => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Io(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let opts = cli.opts;
    let report = match opts.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
            pool.install(|| commands::execute(&cli.command, &opts))?
        }
        None => commands::execute(&cli.command, &opts)?,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    match &opts.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
