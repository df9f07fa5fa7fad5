use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperalg::{ItemMemory, Model, ModelKind, ModelParams, RngStream};

const KINDS: [ModelKind; 6] = [
    ModelKind::Bsc,
    ModelKind::Map,
    ModelKind::Hrr,
    ModelKind::Fhrr,
    ModelKind::Sbc,
    ModelKind::Mcr,
];

fn model(kind: ModelKind, dim: usize) -> Model {
    Model::new(kind, ModelParams::with_dim(dim), &RngStream::new(1, "bench")).unwrap()
}

fn bind(c: &mut Criterion) {
    let mut group = c.benchmark_group("bind");
    for kind in KINDS {
        let m = model(kind, 1024);
        let a = m.random(&RngStream::new(1, "a"));
        let b = m.random(&RngStream::new(1, "b"));
        group.bench_function(BenchmarkId::new(kind.name(), 1024), |bench| {
            bench.iter(|| m.bind(black_box(&a), black_box(&b)).unwrap())
        });
    }
    group.finish();
}

fn bundle(c: &mut Criterion) {
    let mut group = c.benchmark_group("bundle-16");
    for kind in KINDS {
        let m = model(kind, 1024);
        let items: Vec<_> = (0..16).map(|i| m.random(&RngStream::new(1, "x").at(i))).collect();
        group.bench_function(kind.name(), |bench| {
            bench.iter(|| m.superpose(black_box(&items), m.default_norm()).unwrap())
        });
    }
    group.finish();
}

fn cleanup(c: &mut Criterion) {
    let mut group = c.benchmark_group("cleanup-1024");
    for kind in KINDS {
        let m = model(kind, 1024);
        let memory = ItemMemory::symbols(*m.space(), m.default_metric(), 1, "item", 1024).unwrap();
        let query = m.random(&RngStream::new(1, "q"));
        group.bench_function(kind.name(), |bench| bench.iter(|| memory.cleanup(black_box(&query)).unwrap()));
    }
    group.finish();
}

fn hrr_sizes(c: &mut Criterion) {
    let mut group = c.benchmark_group("hrr-bind");
    for dim in [64, 65, 1024, 10_000] {
        let m = model(ModelKind::Hrr, dim);
        let a = m.random(&RngStream::new(1, "a"));
        let b = m.random(&RngStream::new(1, "b"));
        group.bench_function(BenchmarkId::from_parameter(dim), |bench| {
            bench.iter(|| m.bind(black_box(&a), black_box(&b)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bind, bundle, cleanup, hrr_sizes);
criterion_main!(benches);
