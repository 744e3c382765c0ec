// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use optblocks_core::FitnessModel;

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "optblocks", version, about = "Exact optimal segmentation of data on an interval")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal piecewise-constant segmentation report.
    Segment(DataArgs),
    /// Adaptive-width histogram from events or bins.
    Hist(DataArgs),
    /// Real-time change reports, one record per input line.
    Stream(DataArgs),
    /// Timing and evaluation counts on synthetic data.
    Bench(BenchArgs),
    /// Compare the optimiser with exhaustive search (at most 14 cells).
    OracleCheck(DataArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Events,
    Bins,
    Measures,
}

impl ModelArg {
    pub fn fitness(self) -> FitnessModel {
        match self {
            ModelArg::Events => FitnessModel::PoissonEvents,
            ModelArg::Bins => FitnessModel::PoissonBins,
            ModelArg::Measures => FitnessModel::GaussianConst,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Record layout: events `t`, bins `t_lo,t_hi,count`, measures `t,x,sigma`.
    #[arg(long, value_enum, default_value = "events")]
    pub model: ModelArg,
    /// Per-block penalty (default: ln of the number of cells).
    #[arg(long)]
    pub penalty: Option<f64>,
    /// Minimum number of cells per block.
    #[arg(long, conflicts_with = "k")]
    pub min_size: Option<usize>,
    /// Exact number of blocks (the penalty is then ignored).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Left end of the observation interval.
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// Input file; standard input when absent or `-`.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated problem sizes.
    #[arg(long, value_delimiter = ',', default_value = "100,1000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Segment,
    Hist,
    Stream,
    Bench,
    OracleCheck,
}

/// Everything a command needs, validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub model: ModelArg,
    pub penalty: Option<f64>,
    pub min_size: Option<usize>,
    pub k: Option<usize>,
    pub input: Option<PathBuf>,
    pub format: Format,
    pub t0: Option<f64>,
    pub seed: u64,
    pub sizes: Vec<usize>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (command, data, bench) = match cli.command {
            Command::Segment(a) => (CommandKind::Segment, Some(a), None),
            Command::Hist(a) => (CommandKind::Hist, Some(a), None),
            Command::Stream(a) => (CommandKind::Stream, Some(a), None),
            Command::OracleCheck(a) => (CommandKind::OracleCheck, Some(a), None),
            Command::Bench(b) => (CommandKind::Bench, None, Some(b)),
        };
        let config = match (data, bench) {
            (Some(a), _) => RunConfig {
                command,
                model: a.model,
                penalty: a.penalty,
                min_size: a.min_size,
                k: a.k,
                input: a.input.filter(|p| p.as_os_str() != "-"),
                format: a.format,
                t0: a.t0,
                seed: 0,
                sizes: Vec::new(),
            },
            (None, Some(b)) => RunConfig {
                command,
                model: ModelArg::Events,
                penalty: None,
                min_size: None,
                k: None,
                input: None,
                format: b.format,
                t0: None,
                seed: b.seed,
                sizes: b.sizes,
            },
            (None, None) => unreachable!("every command carries arguments"),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.min_size.is_some() && self.k.is_some() {
            return Err(CliError::Input("--min-size and --k are mutually exclusive".into()));
        }
        if let Some(p) = self.penalty {
            if !p.is_finite() || p < 0.0 {
                return Err(CliError::Input(format!("--penalty must be finite and non-negative, got {p}")));
            }
        }
        if self.min_size == Some(0) {
            return Err(CliError::Input("--min-size must be at least 1".into()));
        }
        if self.k == Some(0) {
            return Err(CliError::Input("--k must be at least 1".into()));
        }
        if self.command == CommandKind::Stream && self.k.is_some() {
            return Err(CliError::Input("--k is not available in stream mode".into()));
        }
        if self.command == CommandKind::Hist && self.model == ModelArg::Measures {
            return Err(CliError::Input("hist needs events or bins input".into()));
        }
        if self.command == CommandKind::Bench && self.sizes.contains(&0) {
            return Err(CliError::Input("--sizes must be positive".into()));
        }
        Ok(())
    }
}
