use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use fal_core::cfdynamics::{cf_expand, dedekind_sum, dedekind_sum_direct, farey_count};
use fal_core::limitlab::{dedekind_experiment, iid_sums};
use fal_core::PhiSpec;

fn exact(c: &mut Criterion) {
    c.bench_function("cf_expand_fib", |b| b.iter(|| cf_expand(black_box(832_040), black_box(1_346_269)).unwrap()));
    c.bench_function("dedekind_sum_reciprocity", |b| {
        b.iter(|| dedekind_sum(black_box(123_456), black_box(1_000_003)).unwrap())
    });
    c.bench_function("dedekind_sum_direct_q997", |b| b.iter(|| dedekind_sum_direct(black_box(311), 997).unwrap()));
    c.bench_function("farey_count_1e4", |b| b.iter(|| farey_count(black_box(10_000))));
}

fn experiments(c: &mut Criterion) {
    let phi = PhiSpec::floor_power(1.0).unwrap();
    let mut g = c.benchmark_group("limitlab");
    g.sample_size(10);
    g.bench_function("iid_sums_r20_n1e5", |b| b.iter(|| iid_sums(&phi, 20, black_box(100_000), 7).unwrap()));
    g.bench_function("dedekind_experiment_q500", |b| b.iter(|| dedekind_experiment(black_box(500)).unwrap()));
    g.finish();
}

criterion_group!(benches, exact, experiments);
criterion_main!(benches);
