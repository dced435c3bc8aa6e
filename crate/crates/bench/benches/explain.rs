use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gsv_bench::{forest, soybean};
use gsv_core::{brute_force_gsv, ensemble_gsv};

fn tree_count(c: &mut Criterion) {
    let mut group = c.benchmark_group("fast/trees");
    for trees in [1, 10, 100] {
        let (model, x, partition) = forest(7, trees, 6, 10, 5);
        group.bench_with_input(BenchmarkId::from_parameter(trees), &trees, |b, _| {
            b.iter(|| ensemble_gsv(black_box(&model), black_box(&x), &partition).unwrap())
        });
    }
    group.finish();
}

fn engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine/groups");
    for groups in [2, 4, 8] {
        let (model, x, partition) = forest(11, 5, 6, 10, groups);
        group.bench_with_input(BenchmarkId::new("fast", groups), &groups, |b, _| {
            b.iter(|| ensemble_gsv(black_box(&model), black_box(&x), &partition).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("oracle", groups), &groups, |b, _| {
            b.iter(|| brute_force_gsv(black_box(&model), black_box(&x), &partition).unwrap())
        });
    }
    group.finish();
}

fn soybean_shaped(c: &mut Criterion) {
    let (model, x, partition) = soybean(3, 100, 6);
    c.bench_function("fast/soybean_100x6", |b| {
        b.iter(|| ensemble_gsv(black_box(&model), black_box(&x), &partition).unwrap())
    });
}

criterion_group!(benches, tree_count, engines, soybean_shaped);
criterion_main!(benches);
