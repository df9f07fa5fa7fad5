use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hyperalg::capacity::{pcorr_analytic, run_sequence_recovery_experiment, DetectionStats, RecoveryConfig};
use hyperalg::ModelKind;

fn pcorr(c: &mut Criterion) {
    let stats = DetectionStats::new(1.0, 0.4, 0.0, 0.0625).unwrap();
    c.bench_function("pcorr-n64", |b| b.iter(|| pcorr_analytic(black_box(&stats), 64).unwrap()));
}

fn recovery(c: &mut Criterion) {
    let config = RecoveryConfig {
        runs: 1,
        trials: 1000,
        stats_trials: 1000,
        ..RecoveryConfig::new(ModelKind::Map, 256, 64, vec![10], 1)
    };
    let mut group = c.benchmark_group("recovery");
    group.sample_size(10);
    group.bench_function("map-d256-m10", |b| {
        b.iter(|| run_sequence_recovery_experiment(black_box(&config)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pcorr, recovery);
criterion_main!(benches);
