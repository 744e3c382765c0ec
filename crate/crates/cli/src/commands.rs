// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::time::Instant;

use optblocks_core::baselines::{block_count, min_block_size};
use optblocks_core::synthetic::{random_event_cells, rng};
use optblocks_core::{
    default_penalty, exhaustive, optimize, optimize_fixed_k, optimize_min_size, DataCells, Penalty,
    Segmentation, StreamSegmenter, StreamUpdate,
};
use serde::Serialize;

use crate::config::{CommandKind, Format, ModelArg, RunConfig};
use crate::error::{CliError, Result};
use crate::input::{self, Record};

/// Largest input `oracle-check` accepts.
pub const ORACLE_CHECK_MAX_CELLS: usize = 14;

/// Stream penalty when none is given: the stream length is unknown up
/// front, so a fixed `ln 1000` stands in for `ln N`.
pub const STREAM_DEFAULT_CELLS: usize = 1000;

pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    match config.command {
        CommandKind::Bench => run_bench(config, out),
        CommandKind::Stream => run_stream(config, open_input(config)?, out),
        CommandKind::Segment => run_segment(config, &read_all(config)?, out),
        CommandKind::Hist => run_hist(config, &read_all(config)?, out),
        CommandKind::OracleCheck => run_oracle_check(config, &read_all(config)?, out),
    }
}

fn open_input(config: &RunConfig) -> Result<Box<dyn BufRead>> {
    Ok(match &config.input {
        Some(path) => Box::new(BufReader::new(File::open(path).map_err(|e| {
            CliError::Input(format!("cannot open {}: {e}", path.display()))
        })?)),
        None => Box::new(BufReader::new(io::stdin())),
    })
}

fn read_all(config: &RunConfig) -> Result<String> {
    let mut text = String::new();
    open_input(config)?.read_to_string(&mut text)?;
    Ok(text)
}

fn resolve_penalty(config: &RunConfig, n_cells: usize) -> Result<Penalty> {
    match config.penalty {
        Some(p) => Ok(Penalty::new(p)?),
        None => Ok(default_penalty(n_cells)),
    }
}

/// Runs the variant selected by `--k` / `--min-size`.
fn segment_cells(config: &RunConfig, cells: &DataCells) -> Result<Segmentation> {
    let model = config.model.fitness();
    if let Some(k) = config.k {
        if config.penalty.is_some() {
            log::warn!("--penalty is ignored when --k is set");
        }
        return Ok(optimize_fixed_k(cells, model, k)?);
    }
    let penalty = resolve_penalty(config, cells.n_cells())?;
    match config.min_size {
        Some(d) => Ok(optimize_min_size(cells, model, penalty, d)?),
        None => Ok(optimize(cells, model, penalty)?),
    }
}

/// Re-scores the reported blocks from their statistics alone and checks
/// the total against the optimiser's value.
fn check_round_trip(seg: &Segmentation) -> Result<f64> {
    let p = seg.penalty.per_block();
    let mut total = 0.0;
    for block in &seg.blocks {
        let g = seg.model.evaluate(&block.stats)?;
        total += g - p;
    }
    let scale = total.abs().max(seg.total_fitness.abs());
    if (total - seg.total_fitness).abs() > 1e-12 * scale {
        return Err(CliError::Invariant(format!(
            "reported blocks re-score to {total}, optimiser reported {}",
            seg.total_fitness
        )));
    }
    Ok(total)
}

fn load_cells(config: &RunConfig, text: &str) -> Result<DataCells> {
    let records = input::parse_all(config.model, text)?;
    log::info!("read {} records", records.records.len());
    records.to_cells(config.model, config.t0)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

#[derive(Serialize)]
struct SegmentReport<'a> {
    command: &'static str,
    min_size: Option<usize>,
    k: Option<usize>,
    #[serde(flatten)]
    segmentation: &'a Segmentation,
    rescored_fitness: f64,
}

pub fn run_segment(config: &RunConfig, text: &str, out: &mut dyn Write) -> Result<()> {
    let cells = load_cells(config, text)?;
    let seg = segment_cells(config, &cells)?;
    let rescored = check_round_trip(&seg)?;
    log::info!("{} cells -> {} blocks", seg.n_cells, seg.n_blocks);
    match config.format {
        Format::Json => write_json(
            out,
            &SegmentReport {
                command: "segment",
                min_size: config.min_size,
                k: config.k,
                segmentation: &seg,
                rescored_fitness: rescored,
            },
        ),
        Format::Csv => {
            writeln!(out, "# command=segment")?;
            writeln!(out, "# model={}", input::model_name(config.model))?;
            writeln!(out, "# n_cells={}", seg.n_cells)?;
            writeln!(out, "# n_blocks={}", seg.n_blocks)?;
            writeln!(out, "# penalty={}", seg.penalty.per_block())?;
            writeln!(out, "# total_fitness={}", seg.total_fitness)?;
            writeln!(out, "# changepoints={}", join(&seg.changepoints))?;
            writeln!(out, "first_cell,last_cell,start,end,count,width,estimate,fitness")?;
            for b in &seg.blocks {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    b.first_cell,
                    b.last_cell,
                    b.start,
                    b.end,
                    b.stats.n_events,
                    b.stats.duration,
                    b.estimate,
                    b.fitness
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Normalization {
    sum_density_width: f64,
    total_events: u64,
    relative_error: f64,
}

#[derive(Serialize)]
struct HistReport {
    command: &'static str,
    n_cells: usize,
    n_bins: usize,
    penalty: Penalty,
    edges: Vec<f64>,
    density: Vec<f64>,
    counts: Vec<u64>,
    widths: Vec<f64>,
    normalization: Normalization,
}

pub fn run_hist(config: &RunConfig, text: &str, out: &mut dyn Write) -> Result<()> {
    let cells = load_cells(config, text)?;
    let seg = segment_cells(config, &cells)?;
    check_round_trip(&seg)?;
    let density: Vec<f64> = seg.blocks.iter().map(|b| b.estimate).collect();
    let counts: Vec<u64> = seg.blocks.iter().map(|b| b.stats.n_events).collect();
    let widths: Vec<f64> = seg.blocks.iter().map(|b| b.stats.duration).collect();
    let sum: f64 = density.iter().zip(&widths).map(|(r, w)| r * w).sum();
    let total = cells.total_events();
    let relative_error = if total == 0 { sum.abs() } else { (sum - total as f64).abs() / total as f64 };
    if relative_error > 1e-9 {
        return Err(CliError::Invariant(format!(
            "histogram integrates to {sum}, expected {total} events"
        )));
    }
    let report = HistReport {
        command: "hist",
        n_cells: seg.n_cells,
        n_bins: seg.n_blocks,
        penalty: seg.penalty,
        edges: seg.block_edges.clone(),
        density,
        counts,
        widths,
        normalization: Normalization { sum_density_width: sum, total_events: total, relative_error },
    };
    match config.format {
        Format::Json => write_json(out, &report),
        Format::Csv => {
            writeln!(out, "# command=hist")?;
            writeln!(out, "# n_cells={}", report.n_cells)?;
            writeln!(out, "# n_bins={}", report.n_bins)?;
            writeln!(out, "# penalty={}", report.penalty.per_block())?;
            writeln!(out, "# total_events={total}")?;
            writeln!(out, "# sum_density_width={sum}")?;
            writeln!(out, "# relative_error={relative_error}")?;
            writeln!(out, "start,end,count,width,density")?;
            for i in 0..report.n_bins {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    report.edges[i],
                    report.edges[i + 1],
                    report.counts[i],
                    report.widths[i],
                    report.density[i]
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Emission {
    n_processed: usize,
    latest_block_start: usize,
    opt: f64,
}

#[derive(Serialize)]
struct Rejection<'a> {
    line: usize,
    reason: &'a str,
}

#[derive(Serialize)]
struct StreamSummary {
    n_records: usize,
    n_cells: usize,
    n_rejected: usize,
    n_emissions: usize,
    unplaced_events: u64,
    penalty: Penalty,
    /// Absent when no feasible partition exists (no cells, or `--min-size`
    /// larger than the stream).
    changepoints: Option<Vec<usize>>,
    block_edges: Option<Vec<f64>>,
    n_blocks: usize,
    opt: Option<f64>,
}

struct StreamWriter<'a> {
    out: &'a mut dyn Write,
    format: Format,
    n_emissions: usize,
}

impl StreamWriter<'_> {
    fn emit(&mut self, update: Option<StreamUpdate>) -> Result<()> {
        let Some(u) = update.filter(|u| u.changed) else { return Ok(()) };
        self.n_emissions += 1;
        match self.format {
            Format::Json => {
                let e = Emission { n_processed: u.n_processed, latest_block_start: u.latest_block_start, opt: u.opt };
                serde_json::to_writer(&mut *self.out, &e)?;
                writeln!(self.out)?;
            }
            Format::Csv => writeln!(self.out, "{},{},{}", u.n_processed, u.latest_block_start, u.opt)?,
        }
        self.out.flush()?;
        Ok(())
    }

    fn reject(&mut self, line: usize, reason: &str) -> Result<()> {
        log::warn!("line {line}: record dropped: {reason}");
        match self.format {
            Format::Json => {
                serde_json::to_writer(&mut *self.out, &serde_json::json!({ "rejected": Rejection { line, reason } }))?;
                writeln!(self.out)?;
            }
            Format::Csv => writeln!(self.out, "# rejected line={line} reason={reason}")?,
        }
        self.out.flush()?;
        Ok(())
    }
}

pub fn run_stream(config: &RunConfig, input: Box<dyn BufRead>, out: &mut dyn Write) -> Result<()> {
    let penalty = match config.penalty {
        Some(p) => Penalty::new(p)?,
        None => {
            let p = default_penalty(STREAM_DEFAULT_CELLS);
            log::info!("no --penalty given; using {}", p.per_block());
            p
        }
    };
    let mut seg = StreamSegmenter::new(config.model.fitness(), penalty, config.min_size.unwrap_or(1), config.t0)?;
    let mut writer = StreamWriter { out, format: config.format, n_emissions: 0 };
    if config.format == Format::Csv {
        writeln!(writer.out, "n_processed,latest_block_start,opt")?;
    }
    let mut n_records = 0;
    let mut n_rejected = 0;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let record = match input::parse_line(config.model, &line) {
            Ok(Some(r)) => r,
            Ok(None) => continue,
            Err(reason) => {
                n_rejected += 1;
                writer.reject(i + 1, &reason)?;
                continue;
            }
        };
        let pushed = match record {
            Record::Event { t } => seg.push_event(t),
            Record::Bin { lo, hi, count } => seg.push_bin(lo, hi, count),
            Record::Measure { t, x, sigma } => seg.push_measure(t, x, sigma),
        };
        match pushed {
            Ok(update) => {
                n_records += 1;
                writer.emit(update)?;
            }
            Err(e) => {
                n_rejected += 1;
                writer.reject(i + 1, &e.to_string())?;
            }
        }
    }
    let (update, unplaced_events) = seg.finish()?;
    writer.emit(update)?;
    if unplaced_events > 0 {
        log::warn!("{unplaced_events} event(s) at the anchor time could not form a cell");
    }

    let state = seg.state();
    let feasible = state.n_processed() > 0 && state.best_fitness().is_finite();
    let changepoints = if feasible { Some(state.changepoints()?) } else { None };
    let block_edges = match (&changepoints, seg.cells()) {
        (Some(cps), Some(cells)) => {
            let mut e: Vec<f64> = cps.iter().map(|&c| cells.edges()[c - 1]).collect();
            e.push(cells.interval_end());
            Some(e)
        }
        _ => None,
    };
    let summary = StreamSummary {
        n_records,
        n_cells: state.n_processed(),
        n_rejected,
        n_emissions: writer.n_emissions,
        unplaced_events,
        penalty,
        n_blocks: changepoints.as_ref().map_or(0, Vec::len),
        changepoints,
        block_edges,
        opt: feasible.then(|| state.best_fitness()),
    };
    let out = writer.out;
    match config.format {
        Format::Json => {
            serde_json::to_writer(&mut *out, &serde_json::json!({ "summary": summary }))?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "# summary n_records={}", summary.n_records)?;
            writeln!(out, "# summary n_cells={}", summary.n_cells)?;
            writeln!(out, "# summary n_rejected={}", summary.n_rejected)?;
            writeln!(out, "# summary n_emissions={}", summary.n_emissions)?;
            writeln!(out, "# summary unplaced_events={}", summary.unplaced_events)?;
            writeln!(out, "# summary penalty={}", penalty.per_block())?;
            writeln!(out, "# summary n_blocks={}", summary.n_blocks)?;
            writeln!(out, "# summary changepoints={}", join(summary.changepoints.as_deref().unwrap_or(&[])))?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct BenchRun {
    n: usize,
    seconds: f64,
    n_evaluations: u64,
    expected_evaluations: u64,
    n_blocks: usize,
    /// Time relative to the previous size, with the quadratic prediction.
    time_ratio: Option<f64>,
    predicted_ratio: Option<f64>,
}

pub fn run_bench(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let mut runs: Vec<BenchRun> = Vec::with_capacity(config.sizes.len());
    for &n in &config.sizes {
        let cells = random_event_cells(&mut rng(config.seed), n);
        let model = ModelArg::Events.fitness();
        let started = Instant::now();
        let seg = optimize(&cells, model, default_penalty(n))?;
        let seconds = started.elapsed().as_secs_f64();
        let expected = (n as u64) * (n as u64 + 1) / 2;
        if seg.n_evaluations != expected {
            return Err(CliError::Invariant(format!(
                "N = {n}: {} fitness evaluations, expected {expected}",
                seg.n_evaluations
            )));
        }
        log::info!("N = {n}: {seconds:.4} s");
        let prev = runs.last();
        runs.push(BenchRun {
            n,
            seconds,
            n_evaluations: seg.n_evaluations,
            expected_evaluations: expected,
            n_blocks: seg.n_blocks,
            time_ratio: prev.map(|p| seconds / p.seconds),
            predicted_ratio: prev.map(|p| (n as f64 / p.n as f64).powi(2)),
        });
    }
    match config.format {
        Format::Json => write_json(out, &serde_json::json!({ "command": "bench", "seed": config.seed, "runs": runs })),
        Format::Csv => {
            writeln!(out, "# command=bench")?;
            writeln!(out, "# seed={}", config.seed)?;
            writeln!(out, "n,seconds,n_evaluations,expected_evaluations,n_blocks,time_ratio,predicted_ratio")?;
            let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
            for r in &runs {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.n,
                    r.seconds,
                    r.n_evaluations,
                    r.expected_evaluations,
                    r.n_blocks,
                    opt(r.time_ratio),
                    opt(r.predicted_ratio)
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct OracleReport {
    command: &'static str,
    n_cells: usize,
    constraint: String,
    penalty: Penalty,
    n_partitions_scanned: u64,
    n_feasible: u64,
    dp_fitness: f64,
    oracle_fitness: f64,
    dp_changepoints: Vec<usize>,
    oracle_changepoints: Vec<usize>,
    agree: bool,
}

pub fn run_oracle_check(config: &RunConfig, text: &str, out: &mut dyn Write) -> Result<()> {
    let cells = load_cells(config, text)?;
    let n = cells.n_cells();
    if n > ORACLE_CHECK_MAX_CELLS {
        return Err(CliError::Input(format!(
            "oracle-check accepts at most {ORACLE_CHECK_MAX_CELLS} cells, input has {n}"
        )));
    }
    let model = config.model.fitness();
    let objective = model.bind(&cells)?;
    let seg = segment_cells(config, &cells)?;
    let (oracle, constraint) = if let Some(k) = config.k {
        (exhaustive(&objective, Penalty::ZERO, Some(&block_count(k)))?, format!("k={k}"))
    } else if let Some(d) = config.min_size {
        let filter = min_block_size(d, n);
        (exhaustive(&objective, seg.penalty, Some(&filter))?, format!("min_size={d}"))
    } else {
        (exhaustive(&objective, seg.penalty, None)?, "none".to_string())
    };
    let scale = seg.total_fitness.abs().max(oracle.best_fitness.abs());
    let values_close = (seg.total_fitness - oracle.best_fitness).abs() <= 1e-9 * scale;
    // partitions are only comparable when the values tie exactly
    let partitions_ok =
        seg.total_fitness != oracle.best_fitness || seg.changepoints == oracle.best_partition;
    let report = OracleReport {
        command: "oracle-check",
        n_cells: n,
        constraint,
        penalty: seg.penalty,
        n_partitions_scanned: oracle.n_partitions_scanned,
        n_feasible: oracle.n_feasible,
        dp_fitness: seg.total_fitness,
        oracle_fitness: oracle.best_fitness,
        dp_changepoints: seg.changepoints.clone(),
        oracle_changepoints: oracle.best_partition.clone(),
        agree: values_close && partitions_ok,
    };
    match config.format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            writeln!(out, "# command=oracle-check")?;
            writeln!(out, "n_cells,constraint,penalty,n_partitions_scanned,n_feasible,dp_fitness,oracle_fitness,dp_changepoints,oracle_changepoints,agree")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                report.n_cells,
                report.constraint,
                report.penalty.per_block(),
                report.n_partitions_scanned,
                report.n_feasible,
                report.dp_fitness,
                report.oracle_fitness,
                join(&report.dp_changepoints),
                join(&report.oracle_changepoints),
                report.agree
            )?;
        }
    }
    if !report.agree {
        return Err(CliError::Invariant(format!(
            "optimiser {:?} ({}) disagrees with exhaustive search {:?} ({})",
            report.dp_changepoints, report.dp_fitness, report.oracle_changepoints, report.oracle_fitness
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::CommandKind;

    fn config(command: CommandKind, model: ModelArg) -> RunConfig {
        RunConfig {
            command,
            model,
            penalty: None,
            min_size: None,
            k: None,
            input: None,
            format: Format::Json,
            t0: None,
            seed: 0,
            sizes: vec![],
        }
    }

    fn run_text(config: &RunConfig, text: &str) -> (Result<()>, String) {
        let mut out = Vec::new();
        let r = match config.command {
            CommandKind::Segment => run_segment(config, text, &mut out),
            CommandKind::Hist => run_hist(config, text, &mut out),
            CommandKind::OracleCheck => run_oracle_check(config, text, &mut out),
            CommandKind::Stream => run_stream(config, Box::new(io::Cursor::new(text.to_owned())), &mut out),
            CommandKind::Bench => run_bench(config, &mut out),
        };
        (r, String::from_utf8(out).unwrap())
    }

    #[test]
    fn segment_report_carries_required_fields() {
        let c = config(CommandKind::Segment, ModelArg::Events);
        let (r, out) = run_text(&c, "0\n1\n2\n3\n");
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        for key in ["n_cells", "n_blocks", "changepoints", "block_edges", "blocks", "total_fitness", "penalty"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["n_cells"], 4);
        assert_eq!(v["blocks"][0]["estimate"], 4.0 / 3.0);
    }

    #[test]
    fn oracle_check_refuses_large_inputs() {
        let c = config(CommandKind::OracleCheck, ModelArg::Events);
        let text: String = (0..15).map(|i| format!("{i}\n")).collect();
        let (r, _) = run_text(&c, &text);
        assert!(matches!(r, Err(CliError::Input(_))));
    }

    #[test]
    fn stream_csv_has_header_and_summary() {
        let mut c = config(CommandKind::Stream, ModelArg::Bins);
        c.format = Format::Csv;
        let (r, out) = run_text(&c, "0,1,2\n1,2,3\n");
        r.unwrap();
        assert!(out.starts_with("n_processed,latest_block_start,opt\n"));
        assert!(out.contains("# summary n_cells=2"));
    }

    #[test]
    fn round_trip_catches_a_tampered_total() {
        let cells = DataCells::from_bins(&[0.0, 1.0, 2.0], &[1, 5]).unwrap();
        let mut seg = optimize(&cells, ModelArg::Bins.fitness(), Penalty::ZERO).unwrap();
        check_round_trip(&seg).unwrap();
        seg.total_fitness += 1e-6;
        assert!(matches!(check_round_trip(&seg), Err(CliError::Invariant(_))));
    }
}
