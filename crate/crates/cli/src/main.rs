mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Batch experiments on finite structure families: counting, quantifier
/// elimination and dimension chains, each checked against brute force.
#[derive(Debug, Parser)]
#[command(name = "pseudofinite", version)]
pub struct Cli {
    /// JSON experiment configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here (CSV for chain and corpus, JSON otherwise).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest model size to build.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a model and audit its axioms.
    Build {
        /// Model spec such as string:3, pair:4,2, eqclass:5 or interval:6.
        #[arg(long)]
        model: Option<String>,
    },
    /// Size of a definable set.
    Count {
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        formula: Option<String>,
        /// Parameter values, e.g. y=3,z=0.
        #[arg(long)]
        params: Option<String>,
    },
    /// Eliminate quantifiers and compare with direct evaluation.
    Qe {
        /// tree, pair or star.
        #[arg(long)]
        theory: Option<String>,
        #[arg(long)]
        formula: Option<String>,
        /// Models to check on; defaults depend on the theory.
        #[arg(long = "check-model")]
        check_models: Vec<String>,
    },
    /// Cardinality definition of a conjunction of pairing literals.
    Polycard {
        #[arg(long)]
        formula: Option<String>,
        /// Counted variable when the formula has no ∃ in front.
        #[arg(long)]
        var: Option<String>,
        #[arg(long = "check-model")]
        check_models: Vec<String>,
    },
    /// Build and verify a descending witness chain.
    Chain {
        /// sa_tree, a_pair or a_eqclass.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        /// Sweep points: 3,4,5 or n:m pairs such as 4:2,4:3 for a_pair.
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Successor-language elimination checked on interval models.
    Star {
        #[arg(long)]
        formula: Option<String>,
        /// Longest interval checked.
        #[arg(long)]
        max_len: Option<u32>,
    },
    /// Generate a seeded corpus and check every item.
    Corpus {
        /// tree, pair, polycard, star or equiv.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        size: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
