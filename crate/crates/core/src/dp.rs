// SPDX-License-Identifier: MIT OR Apache-2.0

//! The exact optimal-partitioning dynamic program.
//!
//! For the first `n` cells, `opt[n]` is the best achievable fitness and
//! `lastchange[n]` the first cell of the last block of a partition that
//! achieves it. Extending by one cell scans every candidate start `j` of the
//! new last block:
//!
//! ```text
//! opt[n] = max_{1 <= j <= n} opt[j - 1] + (g(j..=n) - penalty)
//! ```
//!
//! which costs `n` block evaluations, `N (N + 1) / 2` in total. Ties go to
//! the smallest `j`, compared with exact floating-point equality. Batch
//! optimisation is nothing more than pushing every cell in turn, so the
//! real-time mode and the batch mode share one code path.

use serde::Serialize;

use crate::cells::DataCells;
use crate::error::{Error, Result};
use crate::fitness::{BlockObjective, FitnessModel, Penalty};
use crate::segmentation::Segmentation;

/// Incremental DP state: append-only `opt` and `lastchange` sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct DpState {
    // opt[0] = 0; opt[n] for the first n cells. NEG_INFINITY marks prefixes
    // that admit no feasible partition under a minimum block size.
    opt: Vec<f64>,
    // lastchange[0] is an unused sentinel so that lastchange[n] reads naturally.
    lastchange: Vec<usize>,
    penalty: Penalty,
    min_size: usize,
    n_evaluations: u64,
}

impl DpState {
    pub fn new(penalty: Penalty) -> Self {
        Self::with_min_size(penalty, 1).expect("min_size 1 is always valid")
    }

    /// A state whose blocks must each span at least `min_size` cells.
    pub fn with_min_size(penalty: Penalty, min_size: usize) -> Result<Self> {
        if min_size == 0 {
            return Err(Error::InvalidMinSize { min_size, n_cells: 0 });
        }
        Ok(Self { opt: vec![0.0], lastchange: vec![0], penalty, min_size, n_evaluations: 0 })
    }

    pub fn n_processed(&self) -> usize {
        self.opt.len() - 1
    }

    /// `opt[0..=n_processed]`, with `opt[0] = 0`.
    pub fn opt(&self) -> &[f64] {
        &self.opt
    }

    /// `lastchange(n)` for `n = 1..=n_processed` (element `n - 1`). Zero
    /// marks an infeasible prefix under a minimum block size.
    pub fn lastchange(&self) -> &[usize] {
        &self.lastchange[1..]
    }

    pub fn penalty(&self) -> Penalty {
        self.penalty
    }

    pub fn min_size(&self) -> usize {
        self.min_size
    }

    /// Number of block-fitness evaluations performed so far.
    pub fn n_evaluations(&self) -> u64 {
        self.n_evaluations
    }

    /// Best fitness over the cells processed so far.
    pub fn best_fitness(&self) -> f64 {
        self.opt[self.n_processed()]
    }

    /// Consumes cell `n_processed + 1` of `objective` and returns the start
    /// of the optimal last block for the extended prefix (zero when that
    /// prefix has no feasible partition).
    pub fn push<O: BlockObjective + ?Sized>(&mut self, objective: &O) -> Result<usize> {
        let n = self.n_processed() + 1;
        if objective.n_cells() < n {
            return Err(Error::StateMismatch {
                n_processed: self.n_processed(),
                n_cells: objective.n_cells(),
            });
        }
        let penalty = self.penalty.per_block();
        let mut best = f64::NEG_INFINITY;
        let mut best_j = 0;
        if self.min_size == 1 {
            for j in 1..=n {
                let candidate = self.opt[j - 1] + (objective.block_fitness(j, n) - penalty);
                if candidate > best {
                    best = candidate;
                    best_j = j;
                }
            }
            self.n_evaluations += n as u64;
            if best_j == 0 {
                return Err(Error::NonFiniteFitness { n });
            }
        } else if n >= self.min_size {
            // The last block j..=n needs n - j + 1 >= d cells; the prefix
            // 1..j-1 must itself be feasible (empty, or finite opt).
            for j in 1..=n + 1 - self.min_size {
                let prefix = self.opt[j - 1];
                if prefix == f64::NEG_INFINITY {
                    continue;
                }
                let candidate = prefix + (objective.block_fitness(j, n) - penalty);
                self.n_evaluations += 1;
                if candidate > best {
                    best = candidate;
                    best_j = j;
                }
            }
            // j = 1 is always admissible here, so no winner means no finite candidate.
            if best_j == 0 {
                return Err(Error::NonFiniteFitness { n });
            }
        }
        self.opt.push(best);
        self.lastchange.push(best_j);
        Ok(best_j)
    }

    /// Changepoints (1-based block starts) of the optimal partition of the
    /// processed cells.
    pub fn changepoints(&self) -> Result<Vec<usize>> {
        backtrack(self.lastchange())
    }
}

/// Walks a `lastchange` sequence (element `n - 1` holds `lastchange(n)`)
/// back from its end and returns the block starts in ascending order.
pub fn backtrack(lastchange: &[usize]) -> Result<Vec<usize>> {
    if lastchange.is_empty() {
        return Err(Error::Empty);
    }
    let mut starts = Vec::new();
    let mut n = lastchange.len();
    loop {
        let start = lastchange[n - 1];
        if start == 0 || start > n {
            return Err(Error::InvalidLastchange { n, value: start });
        }
        starts.push(start);
        if start == 1 {
            break;
        }
        n = start - 1;
    }
    starts.reverse();
    Ok(starts)
}

/// An optimal (or baseline) partition of an abstract objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    /// 1-based index of the first cell of each block, ascending, starting at 1.
    pub changepoints: Vec<usize>,
    pub n_cells: usize,
    /// Sum over blocks of `g(B) - penalty`.
    pub total_fitness: f64,
    pub n_evaluations: u64,
}

impl Partition {
    pub fn n_blocks(&self) -> usize {
        self.changepoints.len()
    }

    /// `(first, last)` cell ranges of each block, inclusive.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        block_ranges(&self.changepoints, self.n_cells)
    }
}

pub(crate) fn block_ranges(
    changepoints: &[usize],
    n_cells: usize,
) -> impl Iterator<Item = (usize, usize)> + '_ {
    changepoints.iter().enumerate().map(move |(m, &first)| {
        let last = changepoints.get(m + 1).map_or(n_cells, |&next| next - 1);
        (first, last)
    })
}

/// Runs the batch recurrence and returns the full DP state.
pub fn batch_state<O: BlockObjective + ?Sized>(objective: &O, penalty: Penalty) -> Result<DpState> {
    fill_state(objective, DpState::new(penalty))
}

fn fill_state<O: BlockObjective + ?Sized>(objective: &O, mut state: DpState) -> Result<DpState> {
    if objective.n_cells() == 0 {
        return Err(Error::Empty);
    }
    while state.n_processed() < objective.n_cells() {
        state.push(objective)?;
    }
    Ok(state)
}

fn run_state<O: BlockObjective + ?Sized>(objective: &O, state: DpState) -> Result<Partition> {
    let state = fill_state(objective, state)?;
    Ok(Partition {
        changepoints: state.changepoints()?,
        n_cells: objective.n_cells(),
        total_fitness: state.best_fitness(),
        n_evaluations: state.n_evaluations(),
    })
}

/// Optimal partition of any block-additive objective.
pub fn optimize_objective<O: BlockObjective + ?Sized>(
    objective: &O,
    penalty: Penalty,
) -> Result<Partition> {
    run_state(objective, DpState::new(penalty))
}

/// Optimal partition whose blocks each span at least `min_size` cells.
pub fn optimize_objective_min_size<O: BlockObjective + ?Sized>(
    objective: &O,
    penalty: Penalty,
    min_size: usize,
) -> Result<Partition> {
    let n_cells = objective.n_cells();
    if n_cells == 0 {
        return Err(Error::Empty);
    }
    if min_size == 0 || min_size > n_cells {
        return Err(Error::InvalidMinSize { min_size, n_cells });
    }
    run_state(objective, DpState::with_min_size(penalty, min_size)?)
}

/// Best partition into exactly `k` blocks, with no per-block penalty.
///
/// Layered recurrence `opt_m(n) = max_j opt_{m-1}(j - 1) + g(j..=n)`,
/// `O(k N^2)` evaluations.
pub fn optimize_objective_fixed_k<O: BlockObjective + ?Sized>(
    objective: &O,
    k: usize,
) -> Result<Partition> {
    let n_cells = objective.n_cells();
    if n_cells == 0 {
        return Err(Error::Empty);
    }
    if k == 0 || k > n_cells {
        return Err(Error::InvalidBlockCount { k, n_cells });
    }
    let mut evaluations = 0u64;
    // layer[n] = opt_m(n); entries with n < m are infeasible.
    let mut layer = vec![f64::NEG_INFINITY; n_cells + 1];
    for (n, slot) in layer.iter_mut().enumerate().skip(1) {
        *slot = 0.0 + objective.block_fitness(1, n);
    }
    evaluations += n_cells as u64;
    // back[m][n] = start of the last block in the best m+1 block partition.
    let mut back: Vec<Vec<usize>> = vec![vec![1; n_cells + 1]];
    for m in 2..=k {
        let mut next = vec![f64::NEG_INFINITY; n_cells + 1];
        let mut starts = vec![0; n_cells + 1];
        for n in m..=n_cells {
            let mut best = f64::NEG_INFINITY;
            let mut best_j = 0;
            for j in m..=n {
                let candidate = layer[j - 1] + objective.block_fitness(j, n);
                if candidate > best {
                    best = candidate;
                    best_j = j;
                }
            }
            evaluations += (n + 1 - m) as u64;
            if best_j == 0 {
                return Err(Error::NonFiniteFitness { n });
            }
            next[n] = best;
            starts[n] = best_j;
        }
        layer = next;
        back.push(starts);
    }
    let mut changepoints = Vec::with_capacity(k);
    let mut n = n_cells;
    for m in (0..k).rev() {
        let start = back[m][n];
        changepoints.push(start);
        n = start - 1;
    }
    changepoints.reverse();
    debug_assert_eq!(changepoints[0], 1);
    Ok(Partition {
        changepoints,
        n_cells,
        total_fitness: layer[n_cells],
        n_evaluations: evaluations,
    })
}

/// Optimal segmentation of `cells` under `model` with a per-block penalty.
pub fn optimize(cells: &DataCells, model: FitnessModel, penalty: Penalty) -> Result<Segmentation> {
    let objective = model.bind(cells)?;
    let partition = optimize_objective(&objective, penalty)?;
    Ok(Segmentation::from_partition(cells, model, penalty, &partition))
}

pub fn optimize_min_size(
    cells: &DataCells,
    model: FitnessModel,
    penalty: Penalty,
    min_size: usize,
) -> Result<Segmentation> {
    let objective = model.bind(cells)?;
    let partition = optimize_objective_min_size(&objective, penalty, min_size)?;
    Ok(Segmentation::from_partition(cells, model, penalty, &partition))
}

pub fn optimize_fixed_k(cells: &DataCells, model: FitnessModel, k: usize) -> Result<Segmentation> {
    let objective = model.bind(cells)?;
    let partition = optimize_objective_fixed_k(&objective, k)?;
    Ok(Segmentation::from_partition(cells, model, Penalty::ZERO, &partition))
}
