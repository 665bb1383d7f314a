//! Rayon pool against the sequential path for the data-parallel kernels.
//! Build with `--no-default-features` to compare against a rayon-free binary.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cssplit::experiment::run_convergence;
use cssplit::par::Exec;
use cssplit::problems::Mode;
use cssplit::stability::{region_scan, Window};
use cssplit::stencil::SchemeSpec;

fn region(c: &mut Criterion) {
    let spec = SchemeSpec::int(4, 1);
    let mut g = c.benchmark_group("region_scan_128x128");
    for exec in [Exec::Parallel, Exec::Sequential] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| region_scan(black_box(&spec), Window::DEFAULT, 128, 128, exec).unwrap())
        });
    }
    g.finish();
}

fn ladder(c: &mut Criterion) {
    let spec = SchemeSpec::int(3, 6);
    let dts = [0.1, 0.05, 0.025, 0.0125];
    let mut g = c.benchmark_group("convergence_ladder_n12");
    g.sample_size(10);
    for exec in [Exec::Parallel, Exec::Sequential] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| run_convergence(&spec, 1.0, 12, 0.5, Mode::NavierStokes, black_box(&dts), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, region, ladder);
criterion_main!(benches);
