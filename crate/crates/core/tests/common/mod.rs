// SPDX-License-Identifier: MIT OR Apache-2.0

#![allow(dead_code)]

use std::cell::Cell;

use optblocks_core::synthetic;
use optblocks_core::{BlockObjective, BlockStats, DataCells, FitnessModel};
use rand::Rng;

pub const MODELS: [FitnessModel; 3] =
    [FitnessModel::PoissonEvents, FitnessModel::PoissonBins, FitnessModel::GaussianConst];

pub fn random_cells<R: Rng>(rng: &mut R, model: FitnessModel, n: usize) -> DataCells {
    match model {
        FitnessModel::PoissonEvents => synthetic::random_event_cells(rng, n),
        FitnessModel::PoissonBins => synthetic::random_bin_cells(rng, n),
        FitnessModel::GaussianConst => synthetic::random_measure_cells(rng, n),
    }
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Block statistics by looping over cells, without prefix sums.
pub fn direct_stats(cells: &DataCells, first: usize, last: usize) -> BlockStats {
    let mut stats = BlockStats { n_events: 0, duration: 0.0, sum_w: 0.0, sum_wx: 0.0 };
    for c in first - 1..last {
        stats.n_events += cells.counts()[c];
        stats.duration += cells.widths()[c];
        if !cells.weights().is_empty() {
            stats.sum_w += cells.weights()[c];
            stats.sum_wx += cells.weights()[c] * cells.values()[c];
        }
    }
    stats
}

/// Recursive enumeration of every composition of `n` cells into blocks,
/// scoring each left to right. Returns `(best value, every changepoint
/// list attaining it)`.
pub fn brute_force(
    objective: &dyn BlockObjective,
    penalty: f64,
    admissible: &dyn Fn(&[usize]) -> bool,
) -> Option<(f64, Vec<Vec<usize>>)> {
    fn walk(
        objective: &dyn BlockObjective,
        penalty: f64,
        admissible: &dyn Fn(&[usize]) -> bool,
        starts: &mut Vec<usize>,
        value: f64,
        best: &mut Option<(f64, Vec<Vec<usize>>)>,
    ) {
        let n = objective.n_cells();
        let first = *starts.last().unwrap();
        for last in first..=n {
            let v = value + (objective.block_fitness(first, last) - penalty);
            if last == n {
                if !admissible(starts) {
                    continue;
                }
                match best {
                    Some((b, list)) if v == *b => list.push(starts.clone()),
                    Some((b, _)) if v < *b => {}
                    _ => *best = Some((v, vec![starts.clone()])),
                }
            } else {
                starts.push(last + 1);
                walk(objective, penalty, admissible, starts, v, best);
                starts.pop();
            }
        }
    }
    let mut best = None;
    walk(objective, penalty, admissible, &mut vec![1], 0.0, &mut best);
    best
}

/// Wraps an objective and counts every evaluation.
pub struct Counting<O> {
    pub inner: O,
    pub calls: Cell<u64>,
}

impl<O> Counting<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, calls: Cell::new(0) }
    }
}

impl<O: BlockObjective> BlockObjective for Counting<O> {
    fn n_cells(&self) -> usize {
        self.inner.n_cells()
    }

    fn block_fitness(&self, first: usize, last: usize) -> f64 {
        self.calls.set(self.calls.get() + 1);
        self.inner.block_fitness(first, last)
    }
}

/// `g - shift` as a new objective.
pub struct Shifted<O> {
    pub inner: O,
    pub shift: f64,
}

impl<O: BlockObjective> BlockObjective for Shifted<O> {
    fn n_cells(&self) -> usize {
        self.inner.n_cells()
    }

    fn block_fitness(&self, first: usize, last: usize) -> f64 {
        self.inner.block_fitness(first, last) - self.shift
    }
}
