// SPDX-License-Identifier: MIT OR Apache-2.0

//! Ground truth and comparison baselines for the optimiser.
//!
//! [`exhaustive`] scans every one of the `2^(N-1)` partitions and is the
//! oracle the dynamic program is checked against. The two greedy searches
//! (recursive binary splitting and pairwise merging) share the penalised
//! objective of the DP so their values are directly comparable.

use serde::Serialize;

use crate::cells::DataCells;
use crate::dp::{block_ranges, Partition};
use crate::error::{Error, Result};
use crate::fitness::{BlockObjective, FitnessModel, Penalty};
use crate::segmentation::Segmentation;

/// Largest input the exhaustive search accepts (2^19 partitions).
pub const MAX_ORACLE_CELLS: usize = 20;

/// Predicate on a changepoint list restricting the partitions searched.
pub type Feasibility<'a> = &'a dyn Fn(&[usize]) -> bool;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub best_fitness: f64,
    pub best_partition: Vec<usize>,
    pub n_partitions_scanned: u64,
    pub n_feasible: u64,
}

/// Sums `g - penalty` block by block, left to right, starting from zero;
/// the same association order the DP uses, so equal partitions give
/// bit-identical values.
pub fn partition_value<O: BlockObjective + ?Sized>(
    objective: &O,
    penalty: Penalty,
    changepoints: &[usize],
) -> f64 {
    let p = penalty.per_block();
    block_ranges(changepoints, objective.n_cells())
        .fold(0.0, |acc, (first, last)| acc + (objective.block_fitness(first, last) - p))
}

/// Reverse-lexicographic order on changepoint lists: the one whose last
/// block starts earlier wins, then the next-to-last, and so on. This is the
/// order the DP's smallest-`j` rule induces during backtracking.
fn prefer(candidate: &[usize], incumbent: &[usize]) -> bool {
    candidate.iter().rev().lt(incumbent.iter().rev())
}

/// Exhaustive search over every partition, optionally restricted to those
/// accepted by `feasible` (which receives the changepoint list).
///
/// Ties in value are broken towards the partition the DP would report.
pub fn exhaustive<O: BlockObjective + ?Sized>(
    objective: &O,
    penalty: Penalty,
    feasible: Option<Feasibility<'_>>,
) -> Result<OracleResult> {
    let n = objective.n_cells();
    if n == 0 {
        return Err(Error::Empty);
    }
    if n > MAX_ORACLE_CELLS {
        return Err(Error::OracleTooLarge { n_cells: n, max: MAX_ORACLE_CELLS });
    }
    let p = penalty.per_block();
    // table[first][last] = g(first..=last) - penalty
    let mut table = vec![vec![0.0; n + 1]; n + 1];
    #[allow(clippy::needless_range_loop)]
    for first in 1..=n {
        for last in first..=n {
            table[first][last] = objective.block_fitness(first, last) - p;
        }
    }

    let total: u64 = 1 << (n - 1);
    let mut best_fitness = f64::NEG_INFINITY;
    let mut best_partition: Vec<usize> = Vec::new();
    let mut n_feasible = 0;
    let mut changepoints = Vec::with_capacity(n);
    for mask in 0..total {
        // bit b set: a block starts at cell b + 2
        changepoints.clear();
        changepoints.push(1);
        changepoints.extend((0..n - 1).filter(|b| mask >> b & 1 == 1).map(|b| b + 2));
        if let Some(f) = feasible {
            if !f(&changepoints) {
                continue;
            }
        }
        n_feasible += 1;
        let value = block_ranges(&changepoints, n)
            .fold(0.0, |acc, (first, last)| acc + table[first][last]);
        if value > best_fitness
            || (value == best_fitness && prefer(&changepoints, &best_partition))
        {
            best_fitness = value;
            best_partition.clone_from(&changepoints);
        }
    }
    if best_partition.is_empty() {
        return Err(Error::NoFeasiblePartition);
    }
    Ok(OracleResult { best_fitness, best_partition, n_partitions_scanned: total, n_feasible })
}

/// Feasibility filter: every block spans at least `min_size` of `n_cells`.
pub fn min_block_size(min_size: usize, n_cells: usize) -> impl Fn(&[usize]) -> bool {
    move |cps: &[usize]| block_ranges(cps, n_cells).all(|(a, b)| b + 1 - a >= min_size)
}

/// Feasibility filter: exactly `k` blocks.
pub fn block_count(k: usize) -> impl Fn(&[usize]) -> bool {
    move |cps: &[usize]| cps.len() == k
}

/// Counts evaluations made through it.
struct Counted<'a, O: ?Sized> {
    inner: &'a O,
    count: std::cell::Cell<u64>,
}

impl<O: BlockObjective + ?Sized> Counted<'_, O> {
    fn eval(&self, first: usize, last: usize) -> f64 {
        self.count.set(self.count.get() + 1);
        self.inner.block_fitness(first, last)
    }
}

/// Top-down greedy: split each segment at the single boundary with the
/// largest penalised gain while that gain is positive.
pub fn greedy_topdown_objective<O: BlockObjective + ?Sized>(
    objective: &O,
    penalty: Penalty,
) -> Result<Partition> {
    let n = objective.n_cells();
    if n == 0 {
        return Err(Error::Empty);
    }
    let p = penalty.per_block();
    let counted = Counted { inner: objective, count: std::cell::Cell::new(0) };
    let mut changepoints = vec![1];
    let mut pending = vec![(1usize, n)];
    while let Some((a, b)) = pending.pop() {
        if a == b {
            continue;
        }
        let whole = counted.eval(a, b) - p;
        let mut best_gain = 0.0;
        let mut best_split = None;
        for s in a + 1..=b {
            let gain = ((counted.eval(a, s - 1) - p) + (counted.eval(s, b) - p)) - whole;
            if gain > best_gain {
                best_gain = gain;
                best_split = Some(s);
            }
        }
        if let Some(s) = best_split {
            changepoints.push(s);
            pending.push((s, b));
            pending.push((a, s - 1));
        }
    }
    changepoints.sort_unstable();
    Ok(Partition {
        total_fitness: partition_value(objective, penalty, &changepoints),
        changepoints,
        n_cells: n,
        n_evaluations: counted.count.get(),
    })
}

/// Bottom-up greedy: from singletons, merge the adjacent pair with the
/// largest positive penalised gain (smallest left index on ties) until no
/// merge gains.
pub fn greedy_bottomup_objective<O: BlockObjective + ?Sized>(
    objective: &O,
    penalty: Penalty,
) -> Result<Partition> {
    let n = objective.n_cells();
    if n == 0 {
        return Err(Error::Empty);
    }
    let p = penalty.per_block();
    let counted = Counted { inner: objective, count: std::cell::Cell::new(0) };
    // (first, last, g - p)
    let mut blocks: Vec<(usize, usize, f64)> =
        (1..=n).map(|c| (c, c, counted.eval(c, c) - p)).collect();
    // merged[i] = value of blocks[i] merged with blocks[i + 1]
    let mut merged: Vec<f64> =
        blocks.windows(2).map(|w| counted.eval(w[0].0, w[1].1) - p).collect();
    loop {
        let mut best_gain = 0.0;
        let mut best_i = None;
        for i in 0..merged.len() {
            let gain = merged[i] - (blocks[i].2 + blocks[i + 1].2);
            if gain > best_gain {
                best_gain = gain;
                best_i = Some(i);
            }
        }
        let Some(i) = best_i else { break };
        let right = blocks.remove(i + 1);
        blocks[i] = (blocks[i].0, right.1, merged[i]);
        merged.remove(i);
        if i > 0 {
            merged[i - 1] = counted.eval(blocks[i - 1].0, blocks[i].1) - p;
        }
        if i < merged.len() {
            merged[i] = counted.eval(blocks[i].0, blocks[i + 1].1) - p;
        }
    }
    let changepoints: Vec<usize> = blocks.iter().map(|b| b.0).collect();
    Ok(Partition {
        total_fitness: partition_value(objective, penalty, &changepoints),
        changepoints,
        n_cells: n,
        n_evaluations: counted.count.get(),
    })
}

pub fn greedy_topdown(
    cells: &DataCells,
    model: FitnessModel,
    penalty: Penalty,
) -> Result<Segmentation> {
    let partition = greedy_topdown_objective(&model.bind(cells)?, penalty)?;
    Ok(Segmentation::from_partition(cells, model, penalty, &partition))
}

pub fn greedy_bottomup(
    cells: &DataCells,
    model: FitnessModel,
    penalty: Penalty,
) -> Result<Segmentation> {
    let partition = greedy_bottomup_objective(&model.bind(cells)?, penalty)?;
    Ok(Segmentation::from_partition(cells, model, penalty, &partition))
}
