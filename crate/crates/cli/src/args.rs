use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "zonobal",
    version,
    about = "Vector balancing experiments for zonotope norms"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Single seed; shorthand for `--seeds S`.
    #[arg(long, global = true, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Seed list: `1,2,3` or a half-open range `0..20`.
    #[arg(long, global = true)]
    pub seeds: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for per-seed parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON experiment config; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub c_strip: Option<f64>,
    #[arg(long, global = true)]
    pub c_measure: Option<f64>,
    #[arg(long, global = true)]
    pub c0_sparsify: Option<f64>,
    #[arg(long, global = true)]
    pub c_decompose: Option<f64>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct Shape {
    /// Dimension (comma list allowed for sweeps).
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Number of zonotope segments (comma list allowed for sweeps).
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    /// Number of vectors, or subspace dimension for `measure`.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct Instance {
    /// Use the rotated-cube Hadamard instance (d a power of two).
    #[arg(long)]
    pub hadamard: bool,
    /// Zonotope file (`# scale s` header, then an `m d` generator matrix).
    #[arg(long, requires = "vectors", conflicts_with = "hadamard")]
    pub zonotope: Option<PathBuf>,
    /// Vectors file, one vector per row.
    #[arg(long, requires = "zonotope")]
    pub vectors: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GaugeKind {
    Linf,
    Zonotope,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Balance vectors of K in the norm of K.
    BalanceKk {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        instance: Instance,
    },
    /// Balance vectors of K in the norm of Q with the Gram-Schmidt walk.
    BalanceKq {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        instance: Instance,
        /// Target body Q; a random normalized zonotope when absent.
        #[arg(long, requires = "zonotope")]
        q: Option<PathBuf>,
    },
    /// Monte Carlo sweep of Gaussian section measures.
    Measure {
        #[command(flatten)]
        shape: Shape,
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
        /// Samples per cell.
        #[arg(long)]
        samples: Option<usize>,
        /// Use K = B∞ᵈ and H = ℝᵈ, where the measure has a closed form.
        #[arg(long)]
        cube: bool,
    },
    /// Closed-form strip tail bound on the 90-point grid.
    StripCheck,
    /// Lewis-weight normalization of a zonotope file.
    Normalize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Lewis-weight row sampling of a zonotope file.
    Sparsify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Halving decomposition of an approximately regular generator matrix.
    Decompose {
        #[command(flatten)]
        shape: Shape,
        /// Zonotope file whose generators are decomposed; otherwise a
        /// normalized Gaussian instance of shape (d, m).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Exhaustive optimum over all colorings, by two enumerations.
    Oracle {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        instance: Instance,
        #[arg(long, value_enum, default_value = "zonotope")]
        gauge: GaugeKind,
    },
    /// Run the verification suite.
    Suite {
        /// Accepted for scripting; the full suite already fits the quick
        /// budget, so both modes run identical workloads.
        #[arg(long)]
        quick: bool,
        /// Restrict to these criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::BalanceKk { .. } => "balance-kk",
            Command::BalanceKq { .. } => "balance-kq",
            Command::Measure { .. } => "measure",
            Command::StripCheck => "strip-check",
            Command::Normalize { .. } => "normalize",
            Command::Sparsify { .. } => "sparsify",
            Command::Decompose { .. } => "decompose",
            Command::Oracle { .. } => "oracle",
            Command::Suite { .. } => "suite",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::Measure { .. } | Command::StripCheck => Format::Csv,
            _ => Format::Json,
        }
    }
}
