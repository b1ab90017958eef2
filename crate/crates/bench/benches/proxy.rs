use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use profilekit::proxy::{en, hs_value, EN_DEFAULT_TOL};
use profilekit_bench::sources;

fn proxy(c: &mut Criterion) {
    let mut g = c.benchmark_group("proxy");
    g.sample_size(20);
    for (name, p) in sources() {
        for n in [1_000u64, 1_000_000] {
            g.bench_with_input(BenchmarkId::new(format!("hs/{name}"), n), &n, |b, &n| {
                b.iter(|| hs_value(black_box(&p), n).unwrap())
            });
            g.bench_with_input(BenchmarkId::new(format!("en/{name}"), n), &n, |b, &n| {
                b.iter(|| en(black_box(&p), n, EN_DEFAULT_TOL).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, proxy);
criterion_main!(benches);
