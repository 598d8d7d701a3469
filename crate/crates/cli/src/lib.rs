//! Command-line front end for `hadamard-core`.
//!
//! Exit codes: 0 when a check passes or a verdict is produced, 1 when a
//! violation (or an inconclusive search) is found, 2 on input errors.

mod commands;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{reproduce_outcome, run};
pub use report::Outcome;

#[derive(Debug, Parser)]
#[command(
    name = "hadamard-kit",
    version,
    about = "Checks on geodesic spaces, dual elements and monotone relations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Random seed; falls back to HADAMARD_KIT_SEED.
    #[arg(
        long,
        env = "HADAMARD_KIT_SEED",
        default_value_t = hadamard_core::sampling::DEFAULT_SEED,
        value_parser = clap::value_parser!(u64).range(1..)
    )]
    pub seed: u64,

    /// Number of sampled instances.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,

    /// Comparison tolerance, e.g. 1e-9 or 1/1000. Defaults to 0 for exact
    /// models and 1e-9 for floating point.
    #[arg(long)]
    pub tol: Option<String>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute the reference spider values with exact rationals.
    ReproducePaper {
        /// Size of the pairwise margin table.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=200))]
        table_size: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Check every pair of a relation for monotonicity.
    CheckMonotone {
        #[arg(long)]
        relation: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Look for violations of the 𝒲-property on a λ grid.
    CheckW {
        #[arg(long)]
        relation: PathBuf,
        /// Base point as JSON; repeatable. Defaults to the first domain point.
        #[arg(long)]
        base: Vec<String>,
        /// λ grid is k/steps for k = 0..=steps.
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=1000))]
        steps: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Test the flatness criteria on sampled points.
    ClassifyFlat {
        #[arg(long)]
        space: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sample support functions and test membership in Θ.
    Theta {
        #[arg(long)]
        relation: PathBuf,
        /// Base point as JSON; repeatable. Defaults to the first domain point.
        #[arg(long)]
        base: Vec<String>,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=1000))]
        steps: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Search the hull for a point extending the relation monotonically.
    Extend {
        #[arg(long)]
        relation: PathBuf,
        #[arg(long)]
        hull: PathBuf,
        /// File holding φ; defaults to the hull file.
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long, default_value = "1e-6")]
        eps: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(0..=12))]
        depth: u32,
        #[arg(long, default_value_t = 40)]
        refine: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Bounds on the norm of every dual element of a relation.
    Norm {
        #[arg(long)]
        relation: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check the quasilinearization identities on sampled points.
    #[command(alias = "check-identities")]
    Identities {
        #[arg(long)]
        space: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::ReproducePaper { common, .. }
            | Command::CheckMonotone { common, .. }
            | Command::CheckW { common, .. }
            | Command::ClassifyFlat { common, .. }
            | Command::Theta { common, .. }
            | Command::Extend { common, .. }
            | Command::Norm { common, .. }
            | Command::Identities { common, .. } => common,
        }
    }
}
