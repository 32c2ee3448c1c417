//! Sequential against parallel execution on the three heavy entry points.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperwave::bispectral::difference_residual;
use hyperwave::confluence::scan;
use hyperwave::wavefn::wavefunction;
use hyperwave::{ConfluenceKind, Couplings, Execution, Family, Settings, SpectralPoint, C64};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn data(n: usize) -> (SpectralPoint, Couplings, Vec<f64>) {
    let xi = [C64::new(0.13, 1.37), C64::new(-0.11, 0.71), C64::new(0.07, 0.29)][..n].to_vec();
    let g = Couplings::new(C64::new(0.35, 0.05), C64::new(0.6, -0.04), C64::new(0.25, 0.03), n);
    let x = (0..n).map(|j| 2.5 + 2.0 * (n - 1 - j) as f64).collect();
    (SpectralPoint(xi), g, x)
}

fn bench_wavefunction(c: &mut Criterion) {
    let (xi, g, x) = data(3);
    let mut group = c.benchmark_group("wavefunction_bc_n3_N20");
    for (name, exec) in MODES {
        let s = Settings::default().with_level(20).with_exec(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| wavefunction(Family::Bc, &xi, &x, &g, &s).unwrap())
        });
    }
    group.finish();
}

fn bench_difference(c: &mut Criterion) {
    let (xi, g, x) = data(3);
    let mut group = c.benchmark_group("difference_residual_bc_n3_l2");
    group.sample_size(10);
    for (name, exec) in MODES {
        let s = Settings::default().with_level(14).with_exec(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| difference_residual(Family::Bc, 2, &xi, &x, &g, &s).unwrap())
        });
    }
    group.finish();
}

fn bench_scan(c: &mut Criterion) {
    let (xi, g, x) = data(2);
    let grid = [4.0, 6.0, 8.0, 10.0];
    let mut group = c.benchmark_group("confluence_scan_m_n2");
    group.sample_size(10);
    for (name, exec) in MODES {
        let s = Settings::default().with_level(20).with_exec(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| scan(ConfluenceKind::M, &xi, &x, &g, &grid, &s).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_wavefunction, bench_difference, bench_scan);
criterion_main!(benches);
