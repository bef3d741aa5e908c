use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mixkt::{kt_exact_lp, split_p_q, triple_norm, CoupleSpec};
use mixkt_bench::{unit, weighted};

fn rectangle_suprema(c: &mut Criterion) {
    let spec = CoupleSpec::new(3.0, 1.0, 1.0).unwrap();
    let mut group = c.benchmark_group("triple_norm");
    for n in [4, 6, 8] {
        let w = weighted(n, 1);
        group.bench_with_input(BenchmarkId::new("weighted", n), &w, |b, a| {
            b.iter(|| triple_norm(black_box(a), &spec).unwrap())
        });
        let u = unit(2 * n, 1);
        group.bench_with_input(BenchmarkId::new("unit", 2 * n), &u, |b, a| {
            b.iter(|| triple_norm(black_box(a), &spec).unwrap())
        });
    }
    group.finish();
}

fn split_and_lp(c: &mut Criterion) {
    let a = weighted(5, 2);
    let spec = CoupleSpec::new(4.0, 2.0, 1.5).unwrap();
    c.bench_function("split_p_q 5x5", |b| b.iter(|| split_p_q(black_box(&a), &spec).unwrap()));
    c.bench_function("kt_exact_lp 5x5", |b| {
        b.iter(|| kt_exact_lp(black_box(&a), 0.7).unwrap())
    });
}

criterion_group!(benches, rectangle_suprema, split_and_lp);
criterion_main!(benches);
