// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded workloads shared by the benchmarks.

use optblocks_core::synthetic::{random_bin_cells, random_event_cells, random_measure_cells, rng};
use optblocks_core::{DataCells, FitnessModel};

pub const SEED: u64 = 0x5eed;

/// Cells of `n` items for `model`, reproducible across runs.
pub fn workload(model: FitnessModel, n: usize) -> DataCells {
    let mut r = rng(SEED ^ n as u64);
    match model {
        FitnessModel::PoissonEvents => random_event_cells(&mut r, n),
        FitnessModel::PoissonBins => random_bin_cells(&mut r, n),
        FitnessModel::GaussianConst => random_measure_cells(&mut r, n),
    }
}

pub fn model_label(model: FitnessModel) -> &'static str {
    match model {
        FitnessModel::PoissonEvents => "events",
        FitnessModel::PoissonBins => "bins",
        FitnessModel::GaussianConst => "measures",
    }
}
