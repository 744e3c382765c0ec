// SPDX-License-Identifier: MIT OR Apache-2.0

//! Block-additive fitness functions.
//!
//! The optimiser only ever sees a [`BlockObjective`]: something that scores
//! a contiguous run of cells. [`CellFitness`] binds one of the shipped
//! piecewise-constant models to a [`DataCells`] value; other block models
//! (or synthetic objectives in tests) implement the trait directly.

use serde::Serialize;

use crate::cells::{BlockStats, CellKind, DataCells};
use crate::error::{Error, Result};

/// Scores contiguous blocks of cells. Indices are 1-based and inclusive.
///
/// Implementations must be deterministic and return a finite value for
/// every `1 <= first <= last <= n_cells()`.
pub trait BlockObjective {
    fn n_cells(&self) -> usize;

    fn block_fitness(&self, first: usize, last: usize) -> f64;
}

impl<T: BlockObjective + ?Sized> BlockObjective for &T {
    fn n_cells(&self) -> usize {
        (**self).n_cells()
    }

    fn block_fitness(&self, first: usize, last: usize) -> f64 {
        (**self).block_fitness(first, last)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitnessModel {
    /// Constant-rate Poisson likelihood on event cells.
    PoissonEvents,
    /// Constant-rate Poisson likelihood on binned counts.
    PoissonBins,
    /// Constant-level weighted Gaussian likelihood on measurements.
    GaussianConst,
}

impl FitnessModel {
    /// The cell kind this model scores.
    pub fn cell_kind(self) -> CellKind {
        match self {
            FitnessModel::PoissonEvents => CellKind::Events,
            FitnessModel::PoissonBins => CellKind::Bins,
            FitnessModel::GaussianConst => CellKind::Measures,
        }
    }

    /// The model matching a cell kind.
    pub fn for_kind(kind: CellKind) -> FitnessModel {
        match kind {
            CellKind::Events => FitnessModel::PoissonEvents,
            CellKind::Bins => FitnessModel::PoissonBins,
            CellKind::Measures => FitnessModel::GaussianConst,
        }
    }

    pub fn evaluate(self, stats: &BlockStats) -> Result<f64> {
        match self {
            FitnessModel::PoissonEvents | FitnessModel::PoissonBins => poisson_fitness(stats),
            FitnessModel::GaussianConst => gaussian_fitness(stats),
        }
    }

    /// Evaluation for statistics already known to be valid (positive
    /// duration, positive weight).
    #[inline]
    pub(crate) fn evaluate_valid(self, stats: &BlockStats) -> f64 {
        match self {
            FitnessModel::PoissonEvents | FitnessModel::PoissonBins => {
                poisson_unchecked(stats.n_events, stats.duration)
            }
            FitnessModel::GaussianConst => stats.sum_wx * stats.sum_wx / (2.0 * stats.sum_w),
        }
    }

    /// Block parameter estimate: the rate `N/T` for Poisson models, the
    /// weighted mean for the Gaussian model.
    pub fn estimate(self, stats: &BlockStats) -> f64 {
        match self {
            FitnessModel::PoissonEvents | FitnessModel::PoissonBins => {
                stats.n_events as f64 / stats.duration
            }
            FitnessModel::GaussianConst => stats.sum_wx / stats.sum_w,
        }
    }

    pub fn bind(self, cells: &DataCells) -> Result<CellFitness<'_>> {
        CellFitness::new(cells, self)
    }
}

#[inline]
fn poisson_unchecked(n_events: u64, duration: f64) -> f64 {
    if n_events == 0 {
        return 0.0;
    }
    let n = n_events as f64;
    n * (n / duration).ln()
}

/// Maximum-likelihood log-likelihood of a constant-rate Poisson block,
/// `N (ln N - ln T)`, with the `0 ln 0 = 0` convention for empty blocks.
pub fn poisson_fitness(stats: &BlockStats) -> Result<f64> {
    if !(stats.duration > 0.0) {
        return Err(Error::NonPositiveDuration { duration: stats.duration });
    }
    Ok(poisson_unchecked(stats.n_events, stats.duration))
}

/// Constant-level weighted Gaussian log-likelihood `(sum w x)^2 / (2 sum w)`,
/// dropping the partition-independent `sum w x^2` term.
pub fn gaussian_fitness(stats: &BlockStats) -> Result<f64> {
    if !(stats.sum_w > 0.0) {
        return Err(Error::NonPositiveWeight { sum_w: stats.sum_w });
    }
    Ok(stats.sum_wx * stats.sum_wx / (2.0 * stats.sum_w))
}

/// Constant fitness charge per block (the geometric prior on block count).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Penalty(f64);

impl Penalty {
    pub const ZERO: Penalty = Penalty(0.0);

    pub fn new(per_block: f64) -> Result<Self> {
        if per_block.is_finite() && per_block >= 0.0 {
            Ok(Penalty(per_block))
        } else {
            Err(Error::InvalidPenalty { value: per_block })
        }
    }

    pub fn per_block(self) -> f64 {
        self.0
    }
}

impl Default for Penalty {
    fn default() -> Self {
        Penalty::ZERO
    }
}

/// `ln(n_cells)` per block.
///
/// Note that a zero penalty with Poisson fitness on distinct event times
/// tends to the degenerate one-block-per-cell answer; that is allowed.
pub fn default_penalty(n_cells: usize) -> Penalty {
    Penalty((n_cells.max(1) as f64).ln())
}

/// A [`FitnessModel`] bound to the cells it scores.
#[derive(Debug, Clone, Copy)]
pub struct CellFitness<'a> {
    cells: &'a DataCells,
    model: FitnessModel,
}

impl<'a> CellFitness<'a> {
    pub fn new(cells: &'a DataCells, model: FitnessModel) -> Result<Self> {
        if model.cell_kind() != cells.kind() {
            return Err(Error::ModelMismatch { model, kind: cells.kind() });
        }
        Ok(Self { cells, model })
    }

    pub fn cells(&self) -> &'a DataCells {
        self.cells
    }

    pub fn model(&self) -> FitnessModel {
        self.model
    }
}

impl BlockObjective for CellFitness<'_> {
    fn n_cells(&self) -> usize {
        self.cells.n_cells()
    }

    #[inline]
    fn block_fitness(&self, first: usize, last: usize) -> f64 {
        self.model.evaluate_valid(&self.cells.block_stats_unchecked(first, last))
    }
}
