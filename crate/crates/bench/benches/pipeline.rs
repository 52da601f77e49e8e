use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use preproj_bench::{algebra, complex};
use preproj_core::certificate::{certify, RunConfig};
use preproj_core::presentation::{presentation_for, verify};
use preproj_core::yoneda::{Generator, YonedaEngine};

fn build(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_algebra");
    for n in [2, 4, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| algebra(n, 0)));
    }
    g.finish();
}

fn dims(c: &mut Criterion) {
    let mut g = c.benchmark_group("hh_dims");
    for n in [2, 4, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| complex(n, 0).hh_dims(12)));
    }
    g.finish();
}

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("products");
    g.sample_size(10);
    for n in [2, 4] {
        let cx = complex(n, 7);
        g.bench_with_input(BenchmarkId::new("y_z_gamma", n), &n, |b, _| {
            b.iter(|| {
                let e = YonedaEngine::new(cx.clone());
                e.monomial(&[Generator::Y, Generator::Z(1), Generator::Gamma]).unwrap()
            })
        });
        g.bench_with_input(BenchmarkId::new("presentation", n), &n, |b, &n| {
            let pres = presentation_for(n, 7).unwrap();
            b.iter(|| verify(&pres, &YonedaEngine::new(cx.clone()), 12).unwrap().pass)
        });
    }
    g.finish();
}

fn certificate(c: &mut Criterion) {
    let mut g = c.benchmark_group("certify");
    g.sample_size(10);
    let cfg = RunConfig::default();
    for n in [1, 3] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| certify(n, 0, &cfg).unwrap().0.pass));
    }
    g.finish();
}

criterion_group!(benches, build, dims, products, certificate);
criterion_main!(benches);
