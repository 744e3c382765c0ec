// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::cells::CellKind;
use crate::fitness::FitnessModel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("no data cells")]
    Empty,
    #[error("input is not sorted: value at index {index} is smaller than its predecessor")]
    Unsorted { index: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("empty interval [{start}, {end}]")]
    EmptyInterval { start: f64, end: f64 },
    #[error("time {time} at index {index} lies outside the interval [{start}, {end}]")]
    OutsideInterval { index: usize, time: f64, start: f64, end: f64 },
    #[error("cell at time {time} would have zero width")]
    DegenerateCell { time: f64 },
    #[error("bin edges are not strictly increasing at index {index}")]
    NonMonotoneEdge { index: usize },
    #[error("negative count {count} at index {index}")]
    NegativeCount { index: usize, count: i64 },
    #[error("non-positive sigma {sigma} at index {index}")]
    NonPositiveSigma { index: usize, sigma: f64 },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cell range [{first}, {last}] is invalid for {n_cells} cells")]
    IndexOutOfRange { first: usize, last: usize, n_cells: usize },
    #[error("block duration {duration} is not positive")]
    NonPositiveDuration { duration: f64 },
    #[error("block weight {sum_w} is not positive")]
    NonPositiveWeight { sum_w: f64 },
    #[error("penalty {value} must be finite and non-negative")]
    InvalidPenalty { value: f64 },
    #[error("model {model:?} cannot score {kind:?} cells")]
    ModelMismatch { model: FitnessModel, kind: CellKind },
    #[error("minimum block size {min_size} is invalid for {n_cells} cells")]
    InvalidMinSize { min_size: usize, n_cells: usize },
    #[error("block count {k} is invalid for {n_cells} cells")]
    InvalidBlockCount { k: usize, n_cells: usize },
    #[error("state has processed {n_processed} cells but only {n_cells} are available")]
    StateMismatch { n_processed: usize, n_cells: usize },
    #[error("lastchange entry {value} at n = {n} is outside 1..=n")]
    InvalidLastchange { n: usize, value: usize },
    #[error("no finite candidate for the block ending at cell {n}")]
    NonFiniteFitness { n: usize },
    #[error("exhaustive search is capped at {max} cells, got {n_cells}")]
    OracleTooLarge { n_cells: usize, max: usize },
    #[error("no partition satisfies the feasibility filter")]
    NoFeasiblePartition,
    #[error("record at time {time} is earlier than the stream position {position}")]
    OutOfOrder { time: f64, position: f64 },
    #[error("bin [{lo}, {hi}] does not continue the stream at {position}")]
    NonContiguousBin { lo: f64, hi: f64, position: f64 },
}
