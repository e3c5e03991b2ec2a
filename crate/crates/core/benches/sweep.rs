use std::collections::BTreeMap;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lpc_core::catalog::curve_catalog;
use lpc_core::curve::sample_curve_with;
use lpc_core::par::Exec;
use lpc_core::pipeline::{run_sweep, sweep_jobs};
use lpc_core::Tolerances;

fn strategies() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Exec::Parallel));
    v
}

fn sweep(c: &mut Criterion) {
    let tol = Tolerances::default();
    let jobs = sweep_jobs(&[0.0, 1.0], &[0.7]);
    let mut g = c.benchmark_group("catalog_sweep");
    g.sample_size(10);
    for (name, exec) in strategies() {
        g.bench_with_input(BenchmarkId::new(name, jobs.len()), &exec, |b, &exec| {
            b.iter(|| run_sweep(&jobs, 1000, &tol, exec))
        });
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let tol = Tolerances::default();
    let spec = curve_catalog("timelike_helix", &BTreeMap::new()).unwrap();
    let mut g = c.benchmark_group("sample_curve");
    for (name, exec) in strategies() {
        g.bench_with_input(BenchmarkId::new(name, 100_000), &exec, |b, &exec| {
            b.iter(|| sample_curve_with(&spec, 100_000, &tol, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sweep, sampling);
criterion_main!(benches);
