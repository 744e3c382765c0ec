// SPDX-License-Identifier: MIT OR Apache-2.0

//! Real-time segmentation of a record stream.
//!
//! Cells are built causally: an event or measurement cell spans from the
//! previous record's time to its own, so widths are gaps rather than the
//! midpoint widths of batch construction. Records that share a timestamp are
//! folded into one cell, which means a cell is only committed once a strictly
//! later record (or [`StreamSegmenter::finish`]) arrives. Records at the
//! anchor time itself are carried into the first cell.

use crate::cells::{CellKind, DataCells};
use crate::dp::DpState;
use crate::error::{Error, Result};
use crate::fitness::{CellFitness, FitnessModel, Penalty};

/// DP progress after one committed cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamUpdate {
    pub n_processed: usize,
    pub latest_block_start: usize,
    pub opt: f64,
    /// Whether `latest_block_start` moved since the previous update.
    pub changed: bool,
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    time: f64,
    count: u64,
    w: f64,
    wx: f64,
}

#[derive(Debug, Clone)]
pub struct StreamSegmenter {
    model: FitnessModel,
    cells: Option<DataCells>,
    anchor: Option<f64>,
    pending: Option<Pending>,
    state: DpState,
    last_start: usize,
}

impl StreamSegmenter {
    /// `anchor` fixes the left end of the first cell; without it the first
    /// record's time is used.
    pub fn new(
        model: FitnessModel,
        penalty: Penalty,
        min_size: usize,
        anchor: Option<f64>,
    ) -> Result<Self> {
        if let Some(a) = anchor {
            if !a.is_finite() {
                return Err(Error::NonFinite { index: 0 });
            }
        }
        Ok(Self {
            model,
            cells: None,
            anchor,
            pending: None,
            state: DpState::with_min_size(penalty, min_size)?,
            last_start: 1,
        })
    }

    pub fn model(&self) -> FitnessModel {
        self.model
    }

    pub fn state(&self) -> &DpState {
        &self.state
    }

    /// Committed cells so far, if any.
    pub fn cells(&self) -> Option<&DataCells> {
        self.cells.as_ref()
    }

    /// Current stream position: the right edge of the last committed cell,
    /// or the anchor.
    fn position(&self) -> Option<f64> {
        self.cells.as_ref().map(|c| c.interval_end()).or(self.anchor)
    }

    pub fn push_event(&mut self, time: f64) -> Result<Option<StreamUpdate>> {
        self.expect_kind(CellKind::Events)?;
        self.push_point(time, 1, 0.0, 0.0)
    }

    pub fn push_measure(&mut self, time: f64, value: f64, sigma: f64) -> Result<Option<StreamUpdate>> {
        self.expect_kind(CellKind::Measures)?;
        if !value.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::NonPositiveSigma { index: 0, sigma });
        }
        let w = 1.0 / (sigma * sigma);
        self.push_point(time, 1, w, w * value)
    }

    /// Bins must tile the line: each `lo` equals the previous `hi`.
    pub fn push_bin(&mut self, lo: f64, hi: f64, count: i64) -> Result<Option<StreamUpdate>> {
        self.expect_kind(CellKind::Bins)?;
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        if !(hi > lo) {
            return Err(Error::NonMonotoneEdge { index: 1 });
        }
        let count = u64::try_from(count).map_err(|_| Error::NegativeCount { index: 0, count })?;
        if let Some(position) = self.cells.as_ref().map(|c| c.interval_end()) {
            if lo != position {
                return Err(Error::NonContiguousBin { lo, hi, position });
            }
        }
        self.cells.get_or_insert_with(|| DataCells::empty(CellKind::Bins, lo)).append(hi, count, 0.0, 0.0);
        self.advance().map(Some)
    }

    /// Commits any held record. Returns the update, if a cell was added,
    /// and the number of events that could not be placed in a cell (records
    /// sitting exactly at the anchor with nothing after them).
    pub fn finish(&mut self) -> Result<(Option<StreamUpdate>, u64)> {
        let Some(p) = self.pending.take() else { return Ok((None, 0)) };
        match self.position() {
            Some(position) if p.time > position => {
                self.commit(p);
                Ok((Some(self.advance()?), 0))
            }
            _ => {
                self.pending = Some(p);
                Ok((None, p.count))
            }
        }
    }

    fn expect_kind(&self, kind: CellKind) -> Result<()> {
        if self.model.cell_kind() != kind {
            return Err(Error::ModelMismatch { model: self.model, kind });
        }
        Ok(())
    }

    fn push_point(&mut self, time: f64, count: u64, w: f64, wx: f64) -> Result<Option<StreamUpdate>> {
        if !time.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        let floor = self.pending.map(|p| p.time).or(self.position());
        if let Some(position) = floor {
            if time < position {
                return Err(Error::OutOfOrder { time, position });
            }
        }
        if self.anchor.is_none() && self.cells.is_none() && self.pending.is_none() {
            self.anchor = Some(time);
        }
        let position = self.position().expect("anchored above");
        match self.pending {
            Some(ref mut p) if p.time == time => {
                p.count += count;
                p.w += w;
                p.wx += wx;
                Ok(None)
            }
            Some(p) if p.time == position => {
                // records at the anchor join the next cell
                self.pending = Some(Pending { time, count: p.count + count, w: p.w + w, wx: p.wx + wx });
                Ok(None)
            }
            Some(p) => {
                self.commit(p);
                self.pending = Some(Pending { time, count, w, wx });
                self.advance().map(Some)
            }
            None => {
                self.pending = Some(Pending { time, count, w, wx });
                Ok(None)
            }
        }
    }

    fn commit(&mut self, p: Pending) {
        let kind = self.model.cell_kind();
        let start = self.anchor.expect("anchored before any commit");
        self.cells.get_or_insert_with(|| DataCells::empty(kind, start)).append(p.time, p.count, p.w, p.wx);
    }

    fn advance(&mut self) -> Result<StreamUpdate> {
        let cells = self.cells.as_ref().expect("a cell was just committed");
        let objective = CellFitness::new(cells, self.model)?;
        let start = self.state.push(&objective)?;
        let changed = start != 0 && start != self.last_start;
        if start != 0 {
            self.last_start = start;
        }
        Ok(StreamUpdate {
            n_processed: self.state.n_processed(),
            latest_block_start: start,
            opt: self.state.best_fitness(),
            changed,
        })
    }
}
