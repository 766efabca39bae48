//! One worker against the default pool on the three hot loops: box dilation,
//! the k-fold line scan and the distance transform. Built without the
//! `parallel` feature both arms run the sequential fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use minklab::geometry::Spider;
use minklab::grid::{dilate, distance_transform, GridFrame, GridSet, Mode};
use minklab::lab::Model;
use minklab::par::with_workers;
use minklab::rational::{int, rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_set(d: usize, n: usize, density: f64, seed: u64) -> GridSet {
    let frame = GridFrame::new(vec![int(0); d], rat(1, 256), vec![n; d]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = GridSet::empty(frame.clone(), Mode::Exact).unwrap();
    for c in GridSet::full(frame, Mode::Exact).unwrap().cells() {
        if rng.gen_bool(density) {
            g.insert(&c).unwrap();
        }
    }
    g
}

fn arms() -> [(&'static str, usize); 2] {
    [("sequential", 1), ("parallel", 0)]
}

fn bench_dilate(c: &mut Criterion) {
    let a = random_set(2, 256, 0.02, 1);
    let b = random_set(2, 24, 0.3, 2);
    let mut group = c.benchmark_group("dilate");
    for (name, w) in arms() {
        group.bench_function(BenchmarkId::from_parameter(name), |bench| {
            bench.iter(|| with_workers(w, || dilate(black_box(&a), black_box(&b)).unwrap()))
        });
    }
    group.finish();
}

fn bench_kfold(c: &mut Criterion) {
    let tips = vec![
        vec![int(1), int(0), int(0)],
        vec![int(0), int(1), int(0)],
        vec![int(0), int(0), int(1)],
        vec![int(-1), rat(-1, 2), rat(-1, 3)],
    ];
    let model = Model::Spider(Spider::new(vec![int(0); 3], tips).unwrap());
    let mut group = c.benchmark_group("kfold");
    group.sample_size(10);
    for (name, w) in arms() {
        group.bench_function(BenchmarkId::from_parameter(name), |bench| {
            bench.iter(|| with_workers(w, || model.grid(black_box(4), &rat(1, 32), 1 << 28).unwrap()))
        });
    }
    group.finish();
}

fn bench_edt(c: &mut Criterion) {
    let a = random_set(3, 96, 0.001, 3);
    let mut group = c.benchmark_group("edt");
    group.sample_size(20);
    for (name, w) in arms() {
        group.bench_function(BenchmarkId::from_parameter(name), |bench| {
            bench.iter(|| with_workers(w, || distance_transform(black_box(&a)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_dilate, bench_kfold, bench_edt);
criterion_main!(benches);
