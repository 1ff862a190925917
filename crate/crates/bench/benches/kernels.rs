use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use longtail_bench::{gaussian_spec, stable_spec};
use longtail_core::pot_estimators::{hill_sum, order_statistic};
use longtail_core::{Method, PathGenerator, StableLaw};

fn simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    for n in [1usize << 10, 1 << 12] {
        let spec = gaussian_spec(n);
        for (name, method) in [("direct", Method::Direct), ("fft", Method::Fft)] {
            let generator = PathGenerator::new(&spec, n, method).unwrap();
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| generator.simulate(black_box(1)).unwrap())
            });
        }
    }
    for n in [1usize << 12, 1 << 16] {
        let generator = PathGenerator::new(&stable_spec(n), n, Method::Fft).unwrap();
        group.bench_with_input(BenchmarkId::new("fft_stable_aggregate", n), &n, |b, _| {
            b.iter(|| generator.simulate(black_box(1)).unwrap())
        });
    }
    group.finish();
}

fn stable_cdf(c: &mut Criterion) {
    let law = StableLaw::new(1.5, 1.0).unwrap();
    let mut group = c.benchmark_group("stable_cdf");
    for x in [0.5, 3.0, 40.0] {
        group.bench_with_input(BenchmarkId::from_parameter(x), &x, |b, &x| b.iter(|| law.cdf(black_box(x))));
    }
    group.finish();
}

fn statistics(c: &mut Criterion) {
    let n = 1 << 16;
    let xs = PathGenerator::new(&stable_spec(n), n, Method::Fft)
        .unwrap()
        .simulate(7)
        .unwrap();
    let u = order_statistic(&xs, n - 200).unwrap();
    c.bench_function("order_statistic_65536", |b| b.iter(|| order_statistic(black_box(&xs), n - 200).unwrap()));
    c.bench_function("hill_sum_65536", |b| b.iter(|| hill_sum(black_box(&xs), u).unwrap()));
}

criterion_group!(benches, simulate, stable_cdf, statistics);
criterion_main!(benches);
