use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mpi_pam4::sweep::run_sweep_sequential;
use mpi_pam4::{run_point, DelaySpec, LinkConfig, SweepGrid};

fn bench_grid() -> SweepGrid {
    SweepGrid {
        phi_over_pi: vec![0.0, 0.5, 1.0],
        sir_db: vec![16.0, 20.0, 24.0, 28.0],
        l_over_lc: vec![0.1],
        num_symbols: vec![50_000],
        ..SweepGrid::default()
    }
}

fn sweep(c: &mut Criterion) {
    let grid = bench_grid();
    let mut group = c.benchmark_group("sweep_12_cells");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| run_sweep_sequential(&grid).unwrap())
    });
    #[cfg(feature = "parallel")]
    {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        group.bench_with_input(BenchmarkId::new("parallel", workers), &workers, |b, &w| {
            b.iter(|| mpi_pam4::sweep::run_sweep_parallel(&grid, w).unwrap())
        });
    }
    group.finish();
}

fn point(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_point");
    group.sample_size(10);
    for n in [100_000usize, 400_000] {
        let cfg = LinkConfig {
            num_symbols: n,
            delay: DelaySpec::Symbols(676),
            ..LinkConfig::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| run_point(cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, point);
criterion_main!(benches);
