//! Benchmarks of the data-parallel hot paths against a single-thread
//! baseline: per-mode time integration (the dominant cost of every
//! experiment) and full scenario sweeps.
//!
//! With the default `parallel` feature the comparison runs the same code
//! under a one-thread rayon pool and under the default pool. Built with
//! `--no-default-features` the crate falls back to sequential loops and the
//! two series coincide.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use scatwave_core::dynamics::{evolve, IntegratorConfig};
use scatwave_core::{CoefficientProfile, SpectrumModel, StateVector};

fn bench_state(modes: usize) -> (SpectrumModel, StateVector) {
    let eigenvalues: Vec<f64> = (1..=modes).map(|k| k as f64 + 0.5 * (k as f64).sqrt()).collect();
    let spectrum = SpectrumModel::new(eigenvalues).unwrap();
    let amplitudes = (0..modes)
        .map(|k| {
            let phase = k as f64 * 0.7;
            (
                Complex64::new(phase.cos(), phase.sin()),
                Complex64::new(-phase.sin(), 0.5 * phase.cos()),
            )
        })
        .collect();
    (spectrum, StateVector::new(amplitudes).unwrap())
}

fn evolve_workload(spectrum: &SpectrumModel, initial: &StateVector) {
    let c = CoefficientProfile::power(1.0, 0.5, 2.0).unwrap();
    let b = CoefficientProfile::power(0.0, 0.5, 2.0).unwrap();
    let times: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
    let config = IntegratorConfig::default();
    let trajectory = evolve(spectrum, initial, &c, &b, &times, &config).unwrap();
    criterion::black_box(trajectory.state(20).norm());
}

fn bench_evolve(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolve_modes");
    for &modes in &[16usize, 64, 256] {
        let (spectrum, initial) = bench_state(modes);

        #[cfg(feature = "parallel")]
        {
            let single = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap();
            group.bench_with_input(
                BenchmarkId::new("single_thread", modes),
                &modes,
                |bench, _| {
                    bench.iter(|| single.install(|| evolve_workload(&spectrum, &initial)));
                },
            );
            group.bench_with_input(
                BenchmarkId::new("default_pool", modes),
                &modes,
                |bench, _| {
                    bench.iter(|| evolve_workload(&spectrum, &initial));
                },
            );
        }

        #[cfg(not(feature = "parallel"))]
        group.bench_with_input(
            BenchmarkId::new("sequential", modes),
            &modes,
            |bench, _| {
                bench.iter(|| evolve_workload(&spectrum, &initial));
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_evolve);
criterion_main!(benches);
