// SPDX-License-Identifier: MIT OR Apache-2.0

//! Data cells and their prefix sufficient statistics.
//!
//! A [`DataCells`] value is an ordered, gap-free tiling of an interval
//! `[interval_start, interval_end]`. Each cell carries an event count, a
//! duration and (for measurements) a weight `w = 1/sigma^2` together with the
//! weighted value `w * x`. Cumulative sums with a leading zero make the
//! statistics of any contiguous run of cells an O(1) difference.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Events,
    Bins,
    Measures,
}

/// Sufficient statistics of a contiguous block of cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockStats {
    pub n_events: u64,
    pub duration: f64,
    pub sum_w: f64,
    pub sum_wx: f64,
}

impl BlockStats {
    fn combine(self, other: BlockStats) -> BlockStats {
        BlockStats {
            n_events: self.n_events + other.n_events,
            duration: self.duration + other.duration,
            sum_w: self.sum_w + other.sum_w,
            sum_wx: self.sum_wx + other.sum_wx,
        }
    }
}

impl std::ops::Add for BlockStats {
    type Output = BlockStats;

    fn add(self, rhs: BlockStats) -> BlockStats {
        self.combine(rhs)
    }
}

/// Ordered, contiguous data cells with prefix sufficient statistics.
///
/// Immutable once built; cell indices in the public API are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct DataCells {
    kind: CellKind,
    /// Cell boundaries, length `N + 1`; cell `n` (1-based) spans
    /// `edges[n - 1]..edges[n]`.
    edges: Vec<f64>,
    widths: Vec<f64>,
    counts: Vec<u64>,
    values: Vec<f64>,
    weights: Vec<f64>,
    prefix_counts: Vec<u64>,
    prefix_widths: Vec<f64>,
    prefix_w: Vec<f64>,
    prefix_wx: Vec<f64>,
    // Running accumulators, kept so appended cells extend the same sums.
    acc_w: Neumaier,
    acc_wx: Neumaier,
}

impl DataCells {
    /// Builds one cell per distinct event time using the midpoint rule.
    ///
    /// Cell `n` spans from the midpoint with the previous distinct time to
    /// the midpoint with the next one; the outer cells are clipped to the
    /// interval. Repeated times collapse into one cell whose count is the
    /// multiplicity. Without an explicit interval, `[first, last]` is used.
    pub fn from_events(times: &[f64], interval: Option<(f64, f64)>) -> Result<Self> {
        let (distinct, counts) = collapse_sorted(times)?;
        let (start, end) = resolve_interval(times, interval)?;
        let edges = midpoint_edges(&distinct, start, end)?;
        Ok(Self::build(CellKind::Events, edges, counts, Vec::new(), Vec::new()))
    }

    /// One cell per bin; `edges` has one more entry than `counts`.
    pub fn from_bins(edges: &[f64], counts: &[i64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Empty);
        }
        if edges.len() != counts.len() + 1 {
            return Err(Error::LengthMismatch { expected: counts.len() + 1, found: edges.len() });
        }
        check_finite(edges)?;
        for index in 1..edges.len() {
            if edges[index] <= edges[index - 1] {
                return Err(Error::NonMonotoneEdge { index });
            }
        }
        let counts = counts
            .iter()
            .enumerate()
            .map(|(index, &count)| {
                u64::try_from(count).map_err(|_| Error::NegativeCount { index, count })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::build(CellKind::Bins, edges.to_vec(), counts, Vec::new(), Vec::new()))
    }

    /// Point measurements `values[n] +- sigmas[n]` at sorted `times`.
    ///
    /// Widths follow the same midpoint rule as events; weights are
    /// `1 / sigma^2`. Repeated times are rejected.
    pub fn from_measures(
        times: &[f64],
        values: &[f64],
        sigmas: &[f64],
        interval: Option<(f64, f64)>,
    ) -> Result<Self> {
        if values.len() != times.len() {
            return Err(Error::LengthMismatch { expected: times.len(), found: values.len() });
        }
        if sigmas.len() != times.len() {
            return Err(Error::LengthMismatch { expected: times.len(), found: sigmas.len() });
        }
        check_finite(values)?;
        for (index, &sigma) in sigmas.iter().enumerate() {
            if !(sigma > 0.0) || !sigma.is_finite() {
                return Err(Error::NonPositiveSigma { index, sigma });
            }
        }
        let (distinct, _) = collapse_sorted(times)?;
        if distinct.len() != times.len() {
            let dup = times.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]).unwrap_or(times[0]);
            return Err(Error::DegenerateCell { time: dup });
        }
        let (start, end) = resolve_interval(times, interval)?;
        let edges = midpoint_edges(times, start, end)?;
        let weights: Vec<f64> = sigmas.iter().map(|s| 1.0 / (s * s)).collect();
        let counts = vec![1; times.len()];
        Ok(Self::build(CellKind::Measures, edges, counts, values.to_vec(), weights))
    }

    fn build(
        kind: CellKind,
        edges: Vec<f64>,
        counts: Vec<u64>,
        values: Vec<f64>,
        weights: Vec<f64>,
    ) -> Self {
        let n = counts.len();
        let widths: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
        let prefix_widths: Vec<f64> = edges.iter().map(|e| e - edges[0]).collect();
        let mut prefix_counts = Vec::with_capacity(n + 1);
        prefix_counts.push(0);
        let mut acc = 0u64;
        for &c in &counts {
            acc += c;
            prefix_counts.push(acc);
        }
        let mut acc_w = Neumaier::default();
        let mut acc_wx = Neumaier::default();
        let (prefix_w, prefix_wx) = if kind == CellKind::Measures {
            (
                prefix_sums(&mut acc_w, weights.iter().copied()),
                prefix_sums(&mut acc_wx, values.iter().zip(&weights).map(|(x, w)| w * x)),
            )
        } else {
            (vec![0.0; n + 1], vec![0.0; n + 1])
        };
        Self {
            kind,
            edges,
            widths,
            counts,
            values,
            weights,
            prefix_counts,
            prefix_widths,
            prefix_w,
            prefix_wx,
            acc_w,
            acc_wx,
        }
    }

    /// An empty tiling anchored at `start`, grown with [`Self::append`].
    pub(crate) fn empty(kind: CellKind, start: f64) -> Self {
        Self {
            kind,
            edges: vec![start],
            widths: Vec::new(),
            counts: Vec::new(),
            values: Vec::new(),
            weights: Vec::new(),
            prefix_counts: vec![0],
            prefix_widths: vec![0.0],
            prefix_w: vec![0.0],
            prefix_wx: vec![0.0],
            acc_w: Neumaier::default(),
            acc_wx: Neumaier::default(),
        }
    }

    /// Appends a cell ending at `end` with the given statistics.
    ///
    /// `w` and `wx` are already aggregated (several measurements may share a
    /// cell). Callers guarantee `end > interval_end()`.
    pub(crate) fn append(&mut self, end: f64, count: u64, w: f64, wx: f64) {
        debug_assert!(end > self.interval_end());
        let start = self.edges[0];
        self.widths.push(end - self.interval_end());
        self.edges.push(end);
        self.prefix_widths.push(end - start);
        self.counts.push(count);
        self.prefix_counts.push(self.prefix_counts.last().copied().unwrap_or(0) + count);
        if self.kind == CellKind::Measures {
            self.weights.push(w);
            self.values.push(if w > 0.0 { wx / w } else { 0.0 });
            self.prefix_w.push(self.acc_w.add(w));
            self.prefix_wx.push(self.acc_wx.add(wx));
        } else {
            self.prefix_w.push(0.0);
            self.prefix_wx.push(0.0);
        }
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn n_cells(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn interval_start(&self) -> f64 {
        self.edges[0]
    }

    pub fn interval_end(&self) -> f64 {
        self.edges[self.edges.len() - 1]
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Measurement values; empty unless the kind is [`CellKind::Measures`].
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Measurement weights `1/sigma^2`; empty unless the kind is
    /// [`CellKind::Measures`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn prefix_counts(&self) -> &[u64] {
        &self.prefix_counts
    }

    pub fn prefix_widths(&self) -> &[f64] {
        &self.prefix_widths
    }

    pub fn prefix_w(&self) -> &[f64] {
        &self.prefix_w
    }

    pub fn prefix_wx(&self) -> &[f64] {
        &self.prefix_wx
    }

    pub fn total_events(&self) -> u64 {
        self.prefix_counts[self.n_cells()]
    }

    /// Statistics of cells `first..=last` (1-based, inclusive).
    pub fn block_stats(&self, first: usize, last: usize) -> Result<BlockStats> {
        if first == 0 || first > last || last > self.n_cells() {
            return Err(Error::IndexOutOfRange { first, last, n_cells: self.n_cells() });
        }
        Ok(self.block_stats_unchecked(first, last))
    }

    #[inline]
    pub(crate) fn block_stats_unchecked(&self, first: usize, last: usize) -> BlockStats {
        let lo = first - 1;
        BlockStats {
            n_events: self.prefix_counts[last] - self.prefix_counts[lo],
            duration: self.prefix_widths[last] - self.prefix_widths[lo],
            sum_w: self.prefix_w[last] - self.prefix_w[lo],
            sum_wx: self.prefix_wx[last] - self.prefix_wx[lo],
        }
    }
}

fn check_finite(xs: &[f64]) -> Result<()> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Distinct values of a sorted slice with their multiplicities.
fn collapse_sorted(times: &[f64]) -> Result<(Vec<f64>, Vec<u64>)> {
    if times.is_empty() {
        return Err(Error::Empty);
    }
    check_finite(times)?;
    let mut distinct: Vec<f64> = Vec::with_capacity(times.len());
    let mut counts: Vec<u64> = Vec::with_capacity(times.len());
    for (index, &t) in times.iter().enumerate() {
        match distinct.last() {
            Some(&prev) if t < prev => return Err(Error::Unsorted { index }),
            Some(&prev) if t == prev => *counts.last_mut().expect("non-empty") += 1,
            _ => {
                distinct.push(t);
                counts.push(1);
            }
        }
    }
    Ok((distinct, counts))
}

fn resolve_interval(times: &[f64], interval: Option<(f64, f64)>) -> Result<(f64, f64)> {
    let first = times[0];
    let last = times[times.len() - 1];
    let (start, end) = match interval {
        Some((start, end)) => {
            if !start.is_finite() || !end.is_finite() || end <= start {
                return Err(Error::EmptyInterval { start, end });
            }
            (start, end)
        }
        None => (first, last),
    };
    for (index, &time) in times.iter().enumerate() {
        if time < start || time > end {
            return Err(Error::OutsideInterval { index, time, start, end });
        }
    }
    Ok((start, end))
}

fn midpoint_edges(distinct: &[f64], start: f64, end: f64) -> Result<Vec<f64>> {
    let mut edges = Vec::with_capacity(distinct.len() + 1);
    edges.push(start);
    for pair in distinct.windows(2) {
        edges.push(0.5 * (pair[0] + pair[1]));
    }
    edges.push(end);
    for (k, w) in edges.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::DegenerateCell { time: distinct[k] });
        }
    }
    Ok(edges)
}

/// Compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) -> f64 {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.sum + self.comp
    }
}

fn prefix_sums(acc: &mut Neumaier, xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend(xs.map(|x| acc.add(x)));
    out
}
