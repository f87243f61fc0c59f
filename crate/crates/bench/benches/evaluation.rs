use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heckeval::eval::{EvalPoint, FormEvaluator};
use heckeval::qexp::EigenformHandle;
use heckeval_bench::eps;
use rug::Rational;

fn delta_at_points(c: &mut Criterion) {
    let ev = FormEvaluator::with_sign(EigenformHandle::level1(12, 0).unwrap(), None);
    let mut g = c.benchmark_group("delta");
    for (name, y) in [("im1", (1, 1)), ("im0.1", (1, 10)), ("im0.01", (1, 100))] {
        let z = EvalPoint::exact(Rational::from((1, 7)), Rational::from(y)).unwrap();
        for digits in [10, 100] {
            let e = eps(digits);
            ev.evaluate(&z, &e).unwrap();
            g.bench_with_input(BenchmarkId::new(name, digits), &z, |b, z| b.iter(|| ev.evaluate(z, &e).unwrap()));
        }
    }
    g.finish();
}

criterion_group!(benches, delta_at_points);
criterion_main!(benches);
