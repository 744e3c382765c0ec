// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded synthetic inputs for benchmarks, tests and the CLI `bench` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cells::DataCells;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit-mean exponential variate.
fn exponential<R: Rng>(rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1], so the log is finite
    -(1.0 - rng.random::<f64>()).ln()
}

/// Event times of a piecewise-constant Poisson process starting at 0.
///
/// Each `(rate, count)` segment contributes `count` events with
/// exponential gaps of mean `1 / rate`.
pub fn poisson_step_events<R: Rng>(rng: &mut R, segments: &[(f64, usize)]) -> Vec<f64> {
    let mut t = 0.0;
    let mut times = Vec::with_capacity(segments.iter().map(|s| s.1).sum());
    for &(rate, count) in segments {
        for _ in 0..count {
            t += exponential(rng) / rate;
            times.push(t);
        }
    }
    times
}

/// `n` event cells from a constant-rate process.
pub fn uniform_event_cells<R: Rng>(rng: &mut R, n: usize) -> DataCells {
    let times = poisson_step_events(rng, &[(1.0, n)]);
    DataCells::from_events(&times, Some((0.0, times[n - 1] + exponential(rng))))
        .expect("generated times are sorted and distinct")
}

/// `n` event cells whose rate switches between random levels in random
/// runs, so optimal partitions have several blocks.
pub fn random_event_cells<R: Rng>(rng: &mut R, n: usize) -> DataCells {
    let mut segments = Vec::new();
    let mut left = n;
    while left > 0 {
        let len = rng.random_range(1..=left.min(6));
        let rate = [0.2, 1.0, 5.0][rng.random_range(0..3)];
        segments.push((rate, len));
        left -= len;
    }
    let times = poisson_step_events(rng, &segments);
    DataCells::from_events(&times, Some((0.0, times[n - 1] + exponential(rng))))
        .expect("generated times are sorted and distinct")
}

/// `n` bins with random widths and small counts (zeros included).
pub fn random_bin_cells<R: Rng>(rng: &mut R, n: usize) -> DataCells {
    let mut edges = vec![0.0];
    let mut counts = Vec::with_capacity(n);
    let level: f64 = rng.random_range(0.5..4.0);
    for _ in 0..n {
        let w = rng.random_range(0.25..2.0);
        edges.push(edges[edges.len() - 1] + w);
        let rate = if rng.random_bool(0.3) { level * 4.0 } else { level };
        let mean = rate * w;
        // Poisson by inversion; the means here are small
        let mut k = 0i64;
        let mut p = (-mean).exp();
        let mut cdf = p;
        let u: f64 = rng.random();
        while u > cdf && k < 1000 {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        counts.push(k);
    }
    DataCells::from_bins(&edges, &counts).expect("generated bins are valid")
}

/// `n` measurements with piecewise-constant means and random sigmas.
pub fn random_measure_cells<R: Rng>(rng: &mut R, n: usize) -> DataCells {
    let times: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let mut values = Vec::with_capacity(n);
    let mut sigmas = Vec::with_capacity(n);
    let mut mean: f64 = rng.random_range(-2.0..2.0);
    for _ in 0..n {
        if rng.random_bool(0.25) {
            mean = rng.random_range(-2.0..2.0);
        }
        let sigma = rng.random_range(0.3..1.5);
        // sum of uniforms: cheap, roughly normal noise
        let noise: f64 = (0..4).map(|_| rng.random_range(-1.0..1.0)).sum::<f64>() * 0.866;
        values.push(mean + sigma * noise);
        sigmas.push(sigma);
    }
    DataCells::from_measures(&times, &values, &sigmas, Some((-0.5, n as f64 - 0.5)))
        .expect("generated measures are valid")
}
