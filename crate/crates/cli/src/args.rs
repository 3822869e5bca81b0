use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heislab::chung::LilMode;
use heislab::ProcessKind;

/// Monte Carlo lab for hypoelliptic Brownian motion on the Heisenberg group.
#[derive(Debug, Parser)]
#[command(name = "heislab", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Base seed for every random stream.
    #[arg(long, global = true, env = "HEISLAB_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Number of Monte Carlo paths (default depends on the command).
    #[arg(long, global = true)]
    pub n_paths: Option<u64>,
    /// Grid steps per unit of time (default depends on the command).
    #[arg(long, global = true)]
    pub steps_per_unit: Option<u64>,
    /// Simulation horizon for `simulate` and `chung`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    /// Ball radius.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Comma-separated list of radii.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub epsilon_grid: Option<Vec<f64>>,
    /// Censoring time for exit-time experiments.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format. CSV is available for `simulate` and `chung`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Process {
    Bm1,
    Bm2,
    Heis,
    Area,
}

impl From<Process> for ProcessKind {
    fn from(p: Process) -> Self {
        match p {
            Process::Bm1 => ProcessKind::Bm1,
            Process::Bm2 => ProcessKind::Bm2,
            Process::Heis => ProcessKind::Heis,
            Process::Area => ProcessKind::Area,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reference {
    Bm1,
    Bm2,
}

impl From<Reference> for ProcessKind {
    fn from(p: Reference) -> Self {
        match p {
            Reference::Bm1 => ProcessKind::Bm1,
            Reference::Bm2 => ProcessKind::Bm2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Group,
    Area,
    Both,
}

impl ModeArg {
    pub fn modes(self) -> Vec<LilMode> {
        match self {
            ModeArg::Group => vec![LilMode::Group],
            ModeArg::Area => vec![LilMode::Area],
            ModeArg::Both => vec![LilMode::Group, LilMode::Area],
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dirichlet eigenvalues and the bracket for the small-deviation constant.
    Bounds,
    /// Simulate one path (default horizon 1, 1000 steps per unit, CSV).
    Simulate {
        /// Emit every n-th grid point.
        #[arg(long, default_value_t = 1)]
        stride: u64,
    },
    /// Small-ball probabilities at horizon 1 (default 1e5 paths, 1000 steps).
    ///
    /// With --epsilon-grid of three or more radii the rate constant is fitted.
    Smallball {
        #[arg(long, value_enum, default_value = "heis")]
        process: Process,
        /// Disable the Brownian-bridge correction for BM1.
        #[arg(long)]
        no_bridge: bool,
    },
    /// Exponential tail rate of the unit-ball exit time (default 1e5 paths).
    Exitrate {
        #[arg(long, value_enum, default_value = "heis")]
        process: Process,
    },
    /// Scaling identity checks over --epsilon-grid (default 0.7,0.8,0.9,1.0).
    Scalingcheck {
        /// Samples per arm for the terminal-norm KS comparison.
        #[arg(long, default_value_t = 10_000)]
        ks_samples: u64,
    },
    /// Lévy area against its time-changed representation (default 1e4 samples).
    Timechange,
    /// Left and right increment laws between times u and u + s.
    Increments {
        #[arg(long, default_value_t = 1.0)]
        u: f64,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
    },
    /// Iterated-logarithm diagnostics over many seeds (default horizon 1e6,
    /// 10 steps per unit, 100 seeds).
    Chung {
        #[arg(long, default_value_t = 100)]
        n_seeds: u64,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        /// Acceptance band `lo,hi` (single mode only).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        band: Option<Vec<f64>>,
    },
    /// Exit-rate estimator against an exact eigenvalue, at two resolutions.
    Calibrate {
        #[arg(long, value_enum)]
        process: Reference,
    },
    /// Randomized structural property suite. Exits 1 on any failure.
    Check {
        /// Random cases per property.
        #[arg(long, default_value_t = 100_000)]
        cases: u64,
    },
}
