// SPDX-License-Identifier: MIT OR Apache-2.0

use serde::Serialize;

use crate::cells::{BlockStats, DataCells};
use crate::dp::{block_ranges, Partition};
use crate::fitness::{FitnessModel, Penalty};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSummary {
    pub first_cell: usize,
    pub last_cell: usize,
    pub start: f64,
    pub end: f64,
    pub stats: BlockStats,
    /// Rate `N/T` (Poisson) or weighted mean (Gaussian).
    pub estimate: f64,
    /// Block fitness `g(B)` before the penalty.
    pub fitness: f64,
}

/// A partition of [`DataCells`] into blocks, with per-block summaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segmentation {
    pub model: FitnessModel,
    pub n_cells: usize,
    pub n_blocks: usize,
    /// 1-based first cell of each block, ascending; always starts at 1.
    pub changepoints: Vec<usize>,
    /// Block boundary times, `n_blocks + 1` values.
    pub block_edges: Vec<f64>,
    pub blocks: Vec<BlockSummary>,
    /// Sum of `g(B) - penalty` over blocks, as computed by the optimiser.
    pub total_fitness: f64,
    pub penalty: Penalty,
    pub n_evaluations: u64,
}

impl Segmentation {
    pub(crate) fn from_partition(
        cells: &DataCells,
        model: FitnessModel,
        penalty: Penalty,
        partition: &Partition,
    ) -> Self {
        let edges = cells.edges();
        let blocks: Vec<BlockSummary> = block_ranges(&partition.changepoints, partition.n_cells)
            .map(|(first, last)| {
                let stats = cells.block_stats_unchecked(first, last);
                BlockSummary {
                    first_cell: first,
                    last_cell: last,
                    start: edges[first - 1],
                    end: edges[last],
                    stats,
                    estimate: model.estimate(&stats),
                    fitness: model.evaluate_valid(&stats),
                }
            })
            .collect();
        let mut block_edges: Vec<f64> = blocks.iter().map(|b| b.start).collect();
        block_edges.push(cells.interval_end());
        Self {
            model,
            n_cells: partition.n_cells,
            n_blocks: blocks.len(),
            changepoints: partition.changepoints.clone(),
            block_edges,
            blocks,
            total_fitness: partition.total_fitness,
            penalty,
            n_evaluations: partition.n_evaluations,
        }
    }

    /// Re-scores the reported blocks: `sum g(B) - n_blocks * penalty`.
    pub fn rescore(&self) -> f64 {
        let sum: f64 = self.blocks.iter().map(|b| b.fitness).sum();
        sum - self.n_blocks as f64 * self.penalty.per_block()
    }

    /// Sum of `g(B)` without the penalty.
    pub fn unpenalized_fitness(&self) -> f64 {
        self.blocks.iter().map(|b| b.fitness).sum()
    }
}
