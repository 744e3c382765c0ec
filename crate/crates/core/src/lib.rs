// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact optimal partitioning of one-dimensional data.
//!
//! Data on an interval are reduced to an ordered sequence of [`DataCells`]
//! carrying sufficient statistics. Any block-additive fitness (see
//! [`BlockObjective`]) can then be maximised over all `2^(N-1)` partitions in
//! `O(N^2)` block evaluations by the dynamic program in [`dp`].
//!
//! ```
//! use optblocks_core::{DataCells, FitnessModel, default_penalty, optimize};
//!
//! let times = [0.0, 0.1, 0.2, 0.3, 5.0, 9.0, 13.0];
//! let cells = DataCells::from_events(&times, None).unwrap();
//! let seg = optimize(&cells, FitnessModel::PoissonEvents, default_penalty(cells.n_cells())).unwrap();
//! assert!(seg.n_blocks >= 1);
//! assert_eq!(seg.changepoints[0], 1);
//! ```

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cells;
pub mod dp;
mod error;
pub mod fitness;
pub mod segmentation;
pub mod stream;
pub mod synthetic;

pub use baselines::{exhaustive, greedy_bottomup, greedy_topdown, OracleResult, MAX_ORACLE_CELLS};
pub use cells::{BlockStats, CellKind, DataCells};
pub use dp::{
    backtrack, batch_state, optimize, optimize_fixed_k, optimize_min_size, optimize_objective,
    optimize_objective_fixed_k, optimize_objective_min_size, DpState, Partition,
};
pub use error::{Error, Result};
pub use fitness::{
    default_penalty, gaussian_fitness, poisson_fitness, BlockObjective, CellFitness,
    FitnessModel, Penalty,
};
pub use segmentation::{BlockSummary, Segmentation};
pub use stream::{StreamSegmenter, StreamUpdate};
