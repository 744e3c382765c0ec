// SPDX-License-Identifier: MIT OR Apache-2.0

//! CSV record parsing. One record per line; blank lines and lines starting
//! with `#` are skipped.

use optblocks_core::{DataCells, Error as CoreError};

use crate::config::ModelArg;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Record {
    Event { t: f64 },
    Bin { lo: f64, hi: f64, count: i64 },
    Measure { t: f64, x: f64, sigma: f64 },
}

impl Record {
    pub fn time(&self) -> f64 {
        match *self {
            Record::Event { t } | Record::Measure { t, .. } => t,
            Record::Bin { lo, .. } => lo,
        }
    }
}

/// Parses one line. `Ok(None)` for blank and comment lines.
pub fn parse_line(model: ModelArg, line: &str) -> std::result::Result<Option<Record>, String> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    let expected = match model {
        ModelArg::Events => 1,
        ModelArg::Bins | ModelArg::Measures => 3,
    };
    if fields.len() != expected {
        return Err(format!(
            "expected {expected} field(s) for {} input, found {}",
            model_name(model),
            fields.len()
        ));
    }
    let num = |s: &str| -> std::result::Result<f64, String> {
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("invalid number '{s}'")),
        }
    };
    Ok(Some(match model {
        ModelArg::Events => Record::Event { t: num(fields[0])? },
        ModelArg::Bins => Record::Bin {
            lo: num(fields[0])?,
            hi: num(fields[1])?,
            count: fields[2].parse::<i64>().map_err(|_| format!("invalid count '{}'", fields[2]))?,
        },
        ModelArg::Measures => Record::Measure {
            t: num(fields[0])?,
            x: num(fields[1])?,
            sigma: num(fields[2])?,
        },
    }))
}

pub fn model_name(model: ModelArg) -> &'static str {
    match model {
        ModelArg::Events => "events",
        ModelArg::Bins => "bins",
        ModelArg::Measures => "measures",
    }
}

/// Parsed records with the 1-based line number each came from.
#[derive(Debug, Clone, Default)]
pub struct Records {
    pub records: Vec<Record>,
    pub lines: Vec<usize>,
}

pub fn parse_all(model: ModelArg, text: &str) -> Result<Records> {
    let mut out = Records::default();
    for (i, line) in text.lines().enumerate() {
        match parse_line(model, line) {
            Ok(Some(r)) => {
                out.records.push(r);
                out.lines.push(i + 1);
            }
            Ok(None) => {}
            Err(msg) => return Err(CliError::Input(format!("line {}: {msg}", i + 1))),
        }
    }
    Ok(out)
}

impl Records {
    fn at_line(&self, record: usize, err: CoreError) -> CliError {
        match self.lines.get(record) {
            Some(line) => CliError::Input(format!("line {line}: {err}")),
            None => CliError::Input(err.to_string()),
        }
    }

    /// Builds batch cells; errors that point at a record name its line.
    pub fn to_cells(&self, model: ModelArg, t0: Option<f64>) -> Result<DataCells> {
        if self.records.is_empty() {
            return Err(CliError::Input("no records in input".into()));
        }
        let map = |e: CoreError| match e {
            CoreError::Unsorted { index }
            | CoreError::NonFinite { index }
            | CoreError::NonPositiveSigma { index, .. }
            | CoreError::NegativeCount { index, .. }
            | CoreError::OutsideInterval { index, .. } => self.at_line(index, e),
            // edge i is the upper edge of bin i - 1
            CoreError::NonMonotoneEdge { index } => self.at_line(index.saturating_sub(1), e),
            other => CliError::Input(other.to_string()),
        };
        match model {
            ModelArg::Events => {
                let times: Vec<f64> = self.records.iter().map(Record::time).collect();
                let interval = t0.map(|start| (start, times[times.len() - 1]));
                DataCells::from_events(&times, interval).map_err(map)
            }
            ModelArg::Measures => {
                let mut times = Vec::new();
                let mut values = Vec::new();
                let mut sigmas = Vec::new();
                for r in &self.records {
                    if let Record::Measure { t, x, sigma } = *r {
                        times.push(t);
                        values.push(x);
                        sigmas.push(sigma);
                    }
                }
                let interval = t0.map(|start| (start, times[times.len() - 1]));
                DataCells::from_measures(&times, &values, &sigmas, interval).map_err(map)
            }
            ModelArg::Bins => {
                let mut edges = Vec::with_capacity(self.records.len() + 1);
                let mut counts = Vec::with_capacity(self.records.len());
                for (i, r) in self.records.iter().enumerate() {
                    let Record::Bin { lo, hi, count } = *r else { continue };
                    match edges.last() {
                        None => edges.push(lo),
                        Some(&prev) if prev != lo => {
                            return Err(CliError::Input(format!(
                                "line {}: bin starts at {lo} but the previous bin ended at {prev}",
                                self.lines[i]
                            )))
                        }
                        Some(_) => {}
                    }
                    edges.push(hi);
                    counts.push(count);
                }
                DataCells::from_bins(&edges, &counts).map_err(map)
            }
        }
    }
}
