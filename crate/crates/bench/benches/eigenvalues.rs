use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heckeval::hecke::Method;
use heckeval_bench::{level1_eigenvalue, TABLE};

fn routes(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigenvalue");
    g.sample_size(10);
    for (k, p) in TABLE {
        for method in [Method::Direct, Method::Eisenstein] {
            if method == Method::Eisenstein && k < 24 && p > 1000 {
                continue;
            }
            g.bench_with_input(BenchmarkId::new(format!("{method}/k{k}"), p), &(k, p), |b, &(k, p)| {
                b.iter(|| level1_eigenvalue(k, p, 3, method))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, routes);
criterion_main!(benches);
