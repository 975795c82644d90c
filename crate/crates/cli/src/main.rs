//! `gamereduce`: every transformation and verifier as a subcommand.
//!
//! Exit status is 0 on success, 2 when a checked property fails (the
//! report names a witness), and 1 on usage or input errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Default size cap for exhaustive enumerations.
pub const DEFAULT_CAP: u128 = 1 << 26;

#[derive(Parser, Debug)]
#[command(name = "gamereduce", version, about = "Reductions from 3SAT to smooth label cover games")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Size cap for exhaustive enumerations.
    #[arg(long, global = true, env = "GAMEREDUCE_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: u128,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Degree-reduce a 3CNF formula to 3SAT5 by two replacement rounds.
    #[command(name = "to-3sat5")]
    To3sat5 {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Degree of the first-round expanders.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, default_value_t = 0.05)]
        lambda_min: f64,
    },
    /// Add local copies and linking clauses to a 3SAT5 formula.
    TwoOrac { input: PathBuf, output: PathBuf },
    /// Build the (J,R) dummy game and check its smoothness.
    Dummy {
        input: PathBuf,
        #[arg(long = "J", default_value_t = 1)]
        j: usize,
        #[arg(long = "R", default_value_t = 1)]
        r: usize,
        /// Write the game in nlg format.
        #[arg(long)]
        game: Option<PathBuf>,
    },
    /// Build the smooth label cover instance of a 3SAT5 formula.
    BuildSlc {
        input: PathBuf,
        output: PathBuf,
        #[arg(long = "J", default_value_t = 1)]
        j: usize,
        #[arg(long = "R", default_value_t = 1)]
        r: usize,
    },
    /// Check smoothness, fiber size, regularity and weak expansion.
    VerifySlc {
        input: PathBuf,
        #[arg(long = "J", default_value_t = 1)]
        j: usize,
        #[arg(long = "R", default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random subsets per expansion check.
        #[arg(long, default_value_t = 200)]
        subsets: usize,
    },
    /// Repeat constraints so the uniform distribution tracks the weights.
    Uniformize {
        input: PathBuf,
        output: PathBuf,
        #[arg(long = "N")]
        n: usize,
    },
    /// Classical or synchronous values of a game or constraint system.
    Value {
        #[command(subcommand)]
        method: ValueMethod,
    },
    /// Defect of a constraint-variable strategy, in both forms.
    Defect {
        system: PathBuf,
        /// Strategy on the constraint-variable game; random when absent.
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Round every POVM in a strat file to a PVM.
    Round {
        input: PathBuf,
        output: PathBuf,
    },
    /// Conditional linear distributions.
    Clm {
        #[command(subcommand)]
        op: ClmOp,
    },
}

#[derive(Subcommand, Debug)]
pub enum ValueMethod {
    /// Exact classical value by branch and bound.
    Exact { input: PathBuf },
    /// Local search for a good classical strategy.
    Search {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
    },
    /// Seesaw lower bound on the synchronous value.
    Seesaw {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        /// Write the best strategy found.
        #[arg(long)]
        strategy: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ClmOp {
    /// Probability of a question pair, or the whole support.
    Pmf {
        input: PathBuf,
        /// Comma-separated coordinates of x.
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
    },
    /// Pad the oracularized distribution and report the pad counts.
    Pad {
        input: PathBuf,
        #[arg(long)]
        check_marginals: bool,
    },
    /// Draw padded question pairs.
    Sample {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Check value transport on random rational correlations.
    Transport {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(report) => match commands::emit(&cli.global, &report.text) {
            Ok(()) if report.ok => ExitCode::SUCCESS,
            Ok(()) => ExitCode::from(2),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
