// SPDX-License-Identifier: MIT OR Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use optblocks_bench::{model_label, workload};
use optblocks_core::{default_penalty, optimize, DpState, FitnessModel};

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize");
    group.sample_size(10);
    for model in [FitnessModel::PoissonEvents, FitnessModel::PoissonBins, FitnessModel::GaussianConst] {
        for n in [250usize, 500, 1000, 2000, 4000] {
            let cells = workload(model, n);
            let pen = default_penalty(n);
            // throughput in fitness evaluations
            group.throughput(Throughput::Elements((n * (n + 1) / 2) as u64));
            group.bench_with_input(BenchmarkId::new(model_label(model), n), &cells, |b, cells| {
                b.iter(|| optimize(black_box(cells), model, pen).unwrap())
            });
        }
    }
    group.finish();
}

fn incremental(c: &mut Criterion) {
    let mut group = c.benchmark_group("push");
    group.sample_size(10);
    for n in [500usize, 2000] {
        let cells = workload(FitnessModel::PoissonEvents, n);
        let obj = FitnessModel::PoissonEvents.bind(&cells).unwrap();
        let pen = default_penalty(n);
        group.bench_with_input(BenchmarkId::new("events", n), &obj, |b, obj| {
            b.iter(|| {
                let mut state = DpState::new(pen);
                for _ in 0..n {
                    state.push(obj).unwrap();
                }
                state
            })
        });
    }
    group.finish();
}

criterion_group!(benches, batch, incremental);
criterion_main!(benches);
