//! Parallel vs sequential comparison for the two data-parallel drivers: the
//! interval sweep and the self-consistency simulation. Both produce
//! byte-identical reports in either mode; these benches measure what the
//! rayon fan-out buys. With the `parallel` feature disabled both arms run
//! sequentially.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use imprand_core::audit::{consistency_simulation, sweep_constant_intervals, SweepConfig};
use imprand_core::gen::{sample_path, RealityPolicy};
use imprand_core::{ForecastingSystem, IntervalForecast};

fn bench_sweep(c: &mut Criterion) {
    let system = ForecastingSystem::alternating_pq(0.3, 0.7).unwrap();
    let path = sample_path(&system, RealityPolicy::Midpoint, 11, 20_000);
    let mut group = c.benchmark_group("sweep_20k_grid_0.10");
    group.sample_size(10);
    for parallel in [false, true] {
        let label = if parallel { "parallel" } else { "sequential" };
        group.bench_function(label, |b| {
            b.iter(|| {
                let mut config = SweepConfig::new(20_000, 0.10);
                config.parallel = parallel;
                black_box(sweep_constant_intervals(black_box(&path), &config).unwrap())
            });
        });
    }
    group.finish();
}

fn bench_consistency(c: &mut Criterion) {
    let system = ForecastingSystem::stationary(IntervalForecast::new(0.4, 0.6).unwrap());
    let mut group = c.benchmark_group("consistency_48x2k");
    group.sample_size(10);
    for parallel in [false, true] {
        let label = if parallel { "parallel" } else { "sequential" };
        group.bench_function(label, |b| {
            b.iter(|| {
                black_box(
                    consistency_simulation(
                        black_box(&system),
                        RealityPolicy::UniformInInterval,
                        48,
                        2_000,
                        100.0,
                        7,
                        parallel,
                    )
                    .unwrap(),
                )
            });
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_consistency);
criterion_main!(benches);
