// SPDX-License-Identifier: MIT OR Apache-2.0

//! Acceptance criteria, run sequentially so the timing check is not
//! disturbed by other tests. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{brute_force, random_cells, rel_close, Counting, Shifted, MODELS};
use optblocks_core::baselines::{
    block_count, greedy_bottomup_objective, greedy_topdown_objective, min_block_size,
};
use optblocks_core::synthetic::{self, rng};
use optblocks_core::{
    batch_state, default_penalty, exhaustive, optimize, optimize_objective,
    optimize_objective_fixed_k, optimize_objective_min_size, DataCells, DpState, FitnessModel,
    Penalty, StreamSegmenter,
};
use rand::Rng;

const EXACT_REL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 1. DP value equals the exhaustive optimum; partitions match under ties.
fn exactness() -> Outcome {
    let started = Instant::now();
    let mut r = rng(1001);
    let mut compared = 0u64;
    let mut ties_checked = 0u64;
    for n in 1..=14 {
        for model in MODELS {
            for _ in 0..200 {
                let cells = random_cells(&mut r, model, n);
                let obj = model.bind(&cells).unwrap();
                for pen in [Penalty::ZERO, default_penalty(n)] {
                    let dp = optimize_objective(&obj, pen).unwrap();
                    let oracle = exhaustive(&obj, pen, None).unwrap();
                    ensure(rel_close(dp.total_fitness, oracle.best_fitness, EXACT_REL), || {
                        format!(
                            "N={n} {model:?} p={}: dp {} vs oracle {}",
                            pen.per_block(),
                            dp.total_fitness,
                            oracle.best_fitness
                        )
                    })?;
                    if dp.total_fitness == oracle.best_fitness {
                        ties_checked += 1;
                        ensure(dp.changepoints == oracle.best_partition, || {
                            format!(
                                "N={n} {model:?}: dp {:?} vs oracle {:?}",
                                dp.changepoints, oracle.best_partition
                            )
                        })?;
                    }
                    compared += 1;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{compared} instances, {ties_checked} partition comparisons, {elapsed:.2?}"))
}

/// 2. Exactly N(N+1)/2 fitness evaluations.
fn evaluation_count() -> Outcome {
    let mut parts = Vec::new();
    for n in [1usize, 10, 100, 1000] {
        let cells = synthetic::uniform_event_cells(&mut rng(n as u64), n);
        let counted = Counting::new(FitnessModel::PoissonEvents.bind(&cells).unwrap());
        let p = optimize_objective(&counted, default_penalty(n)).unwrap();
        let expected = (n * (n + 1) / 2) as u64;
        ensure(p.n_evaluations == expected && counted.calls.get() == expected, || {
            format!("N={n}: engine {} wrapper {} expected {expected}", p.n_evaluations, counted.calls.get())
        })?;
        parts.push(format!("N={n}:{expected}"));
    }
    Ok(parts.join(" "))
}

fn median(mut xs: Vec<Duration>) -> Duration {
    xs.sort();
    xs[xs.len() / 2]
}

/// 3. time(2N)/time(N) in [3, 6] at N = 10^4; N = 2*10^4 under 60 s.
fn quadratic_scaling() -> Outcome {
    let time_at = |n: usize| -> Vec<Duration> {
        let cells = synthetic::random_event_cells(&mut rng(77), n);
        let pen = default_penalty(n);
        // warm-up
        optimize(&cells, FitnessModel::PoissonEvents, pen).unwrap();
        (0..5)
            .map(|_| {
                let t = Instant::now();
                let seg = optimize(&cells, FitnessModel::PoissonEvents, pen).unwrap();
                let elapsed = t.elapsed();
                assert_eq!(seg.n_evaluations, (n * (n + 1) / 2) as u64);
                elapsed
            })
            .collect()
    };
    let small = time_at(10_000);
    let large = time_at(20_000);
    let max_large = *large.iter().max().unwrap();
    let (ms, ml) = (median(small), median(large));
    let ratio = ml.as_secs_f64() / ms.as_secs_f64();
    ensure((3.0..=6.0).contains(&ratio), || format!("ratio {ratio:.2} ({ms:?} -> {ml:?})"))?;
    ensure(max_large < Duration::from_secs(60), || format!("N=20000 took {max_large:?}"))?;
    Ok(format!("median {ms:.2?} -> {ml:.2?}, ratio {ratio:.2}"))
}

/// 4. Pushing cells one at a time is bit-identical to the batch run.
fn incremental_equals_batch() -> Outcome {
    let mut r = rng(4004);
    for i in 0..50 {
        let model = MODELS[i % 3];
        let n = r.random_range(1..=500);
        let cells = random_cells(&mut r, model, n);
        let obj = model.bind(&cells).unwrap();
        let pen = if r.random_bool(0.5) { default_penalty(n) } else { Penalty::new(r.random_range(0.0..4.0)).unwrap() };
        let mut pushed = DpState::new(pen);
        for _ in 0..n {
            pushed.push(&obj).unwrap();
        }
        let batch = batch_state(&obj, pen).unwrap();
        ensure(pushed.opt() == batch.opt() && pushed.lastchange() == batch.lastchange(), || {
            format!("instance {i}: state differs")
        })?;
        let seg = optimize(&cells, model, pen).unwrap();
        ensure(pushed.changepoints().unwrap() == seg.changepoints, || format!("instance {i}: partition differs"))?;
        ensure(pushed.best_fitness().to_bits() == seg.total_fitness.to_bits(), || format!("instance {i}: fitness differs"))?;

        // bins streamed record by record build the same cells and state
        if model == FitnessModel::PoissonBins {
            let mut stream = StreamSegmenter::new(model, pen, 1, None).unwrap();
            for (c, w) in cells.edges().windows(2).enumerate() {
                stream.push_bin(w[0], w[1], cells.counts()[c] as i64).unwrap();
            }
            ensure(stream.state() == &batch, || format!("instance {i}: streamed bins differ"))?;
        }
    }
    Ok("50 instances bit-identical".into())
}

/// 5. DP dominates both greedy searches; stored fixtures are strict.
fn greedy_dominance() -> Outcome {
    let mut r = rng(5005);
    let mut strict_td = 0;
    let mut strict_bu = 0;
    for i in 0..1000 {
        let model = MODELS[i % 3];
        let n = r.random_range(1..=60);
        let cells = random_cells(&mut r, model, n);
        let obj = model.bind(&cells).unwrap();
        let pen = Penalty::new(r.random_range(0.0..5.0)).unwrap();
        let dp = optimize_objective(&obj, pen).unwrap();
        let td = greedy_topdown_objective(&obj, pen).unwrap();
        let bu = greedy_bottomup_objective(&obj, pen).unwrap();
        ensure(dp.total_fitness >= td.total_fitness && dp.total_fitness >= bu.total_fitness, || {
            format!("instance {i}: dp {} td {} bu {}", dp.total_fitness, td.total_fitness, bu.total_fitness)
        })?;
        strict_td += usize::from(dp.total_fitness > td.total_fitness);
        strict_bu += usize::from(dp.total_fitness > bu.total_fitness);
    }

    // Top-down: no single split of the whole interval gains, so it stops at
    // one block while four singletons are optimal.
    let cells = DataCells::from_bins(&[0.0, 2.0, 5.0, 6.0, 8.0], &[3, 0, 4, 1]).unwrap();
    let obj = FitnessModel::PoissonBins.bind(&cells).unwrap();
    let pen = Penalty::new(1.5).unwrap();
    let dp = optimize_objective(&obj, pen).unwrap();
    let td = greedy_topdown_objective(&obj, pen).unwrap();
    ensure(dp.changepoints == [1, 2, 3, 4] && td.changepoints == [1], || "top-down fixture partitions".into())?;
    ensure(rel_close(dp.total_fitness, 0.06842558824410983, 1e-12) && td.total_fitness == -1.5, || {
        format!("top-down fixture values {} {}", dp.total_fitness, td.total_fitness)
    })?;

    // Bottom-up: the first merges lock in a three-block answer; one block is optimal.
    let cells = DataCells::from_bins(&[0.0, 3.0, 5.0, 8.0, 10.0], &[6, 1, 6, 4]).unwrap();
    let obj = FitnessModel::PoissonBins.bind(&cells).unwrap();
    let pen = Penalty::new(1.0).unwrap();
    let dp = optimize_objective(&obj, pen).unwrap();
    let bu = greedy_bottomup_objective(&obj, pen).unwrap();
    ensure(dp.changepoints == [1] && bu.changepoints == [1, 2, 3], || "bottom-up fixture partitions".into())?;
    ensure(
        rel_close(dp.total_fitness, 8.020680268056896, 1e-12)
            && rel_close(bu.total_fitness, 7.397207708399179, 1e-12),
        || format!("bottom-up fixture values {} {}", dp.total_fitness, bu.total_fitness),
    )?;
    Ok(format!("0 violations in 1000; strict gaps: top-down {strict_td}, bottom-up {strict_bu}; fixtures strict"))
}

/// 6. Constrained variants match the feasibility-filtered oracle.
fn constrained_variants() -> Outcome {
    let mut r = rng(6006);
    for i in 0..100 {
        let model = MODELS[i % 3];
        let n = r.random_range(1..=12);
        let cells = random_cells(&mut r, model, n);
        let obj = model.bind(&cells).unwrap();
        let pen = default_penalty(n);
        let d = r.random_range(1..=n);
        let dp = optimize_objective_min_size(&obj, pen, d).unwrap();
        let filter = min_block_size(d, n);
        let oracle = exhaustive(&obj, pen, Some(&filter)).unwrap();
        ensure(rel_close(dp.total_fitness, oracle.best_fitness, EXACT_REL), || {
            format!("min-size instance {i}: {} vs {}", dp.total_fitness, oracle.best_fitness)
        })?;
        ensure(filter(&dp.changepoints), || format!("min-size instance {i}: infeasible output"))?;
        // independent enumeration, as a check on the filter plumbing itself
        let (best, _) = brute_force(&obj, pen.per_block(), &filter).unwrap();
        ensure(rel_close(best, dp.total_fitness, EXACT_REL), || format!("min-size instance {i}: brute force"))?;
    }
    for i in 0..100 {
        let model = MODELS[i % 3];
        let n = r.random_range(1..=12);
        let cells = random_cells(&mut r, model, n);
        let obj = model.bind(&cells).unwrap();
        let k = r.random_range(1..=n);
        let dp = optimize_objective_fixed_k(&obj, k).unwrap();
        let filter = block_count(k);
        let oracle = exhaustive(&obj, Penalty::ZERO, Some(&filter)).unwrap();
        ensure(dp.n_blocks() == k, || format!("fixed-k instance {i}: {} blocks", dp.n_blocks()))?;
        ensure(rel_close(dp.total_fitness, oracle.best_fitness, EXACT_REL), || {
            format!("fixed-k instance {i}: {} vs {}", dp.total_fitness, oracle.best_fitness)
        })?;
    }
    Ok("100 min-size + 100 fixed-k instances".into())
}

/// 7. Penalty folded into g is bit-identical; larger penalty never adds blocks.
fn penalty_invariants() -> Outcome {
    let mut r = rng(7007);
    let sweep = [0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0];
    for i in 0..200 {
        let model = MODELS[i % 3];
        let n = r.random_range(1..=80);
        let cells = random_cells(&mut r, model, n);
        let obj = model.bind(&cells).unwrap();
        let p = r.random_range(0.0..6.0);
        let with = optimize_objective(&obj, Penalty::new(p).unwrap()).unwrap();
        let folded = optimize_objective(&Shifted { inner: obj, shift: p }, Penalty::ZERO).unwrap();
        ensure(
            with.changepoints == folded.changepoints
                && with.total_fitness.to_bits() == folded.total_fitness.to_bits(),
            || format!("instance {i}: penalty {p} not equivalent"),
        )?;
        let mut previous = usize::MAX;
        for &p in &sweep {
            let blocks = optimize_objective(&obj, Penalty::new(p).unwrap()).unwrap().n_blocks();
            ensure(blocks <= previous, || format!("instance {i}: {blocks} blocks at p={p} > {previous}"))?;
            previous = blocks;
        }
    }
    Ok("200 instances, 0 violations".into())
}

/// 8. Two-block Poisson data, rate ratio 10: boundary recovered within 5 events.
fn changepoint_recovery() -> Outcome {
    const TRIALS: usize = 100;
    const REQUIRED: usize = 90;
    const TRUTH: usize = 101;
    let mut hits = 0;
    for trial in 0..TRIALS {
        let times = synthetic::poisson_step_events(&mut rng(8000 + trial as u64), &[(1.0, 100), (10.0, 100)]);
        let cells = DataCells::from_events(&times, None).unwrap();
        let seg = optimize(&cells, FitnessModel::PoissonEvents, default_penalty(cells.n_cells())).unwrap();
        let nearest = seg.changepoints.iter().skip(1).map(|&c| c.abs_diff(TRUTH)).min();
        if nearest.is_some_and(|d| d <= 5) {
            hits += 1;
        }
    }
    ensure(hits >= REQUIRED, || format!("{hits}/{TRIALS} within 5 events"))?;
    Ok(format!("{hits}/{TRIALS} within 5 events (need {REQUIRED})"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 exactness vs exhaustive search", exactness),
        ("2 evaluation count N(N+1)/2", evaluation_count),
        ("3 quadratic scaling", quadratic_scaling),
        ("4 incremental equals batch", incremental_equals_batch),
        ("5 greedy dominance", greedy_dominance),
        ("6 constrained variants", constrained_variants),
        ("7 penalty equivalence and monotonicity", penalty_invariants),
        ("8 change-point recovery", changepoint_recovery),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
