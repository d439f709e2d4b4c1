use std::f64::consts::PI;
use std::hint::black_box;

use bintomo::baselines::{solve_least_squares, solve_tv, TvConfig};
use bintomo::dual::{solve_dual_primal_dual, solve_dual_smoothed};
use bintomo::enumerate::enumerate_all;
use bintomo::lsqr::LsqrOptions;
use bintomo::phantom::PhantomName;
use bintomo::projector::build_parallel_operator;
use bintomo::{GreyLevels, GridSpec, Kernel, LatticeGeometry, SolverConfig};
use bintomo_bench::{desk, geometry};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("operator");
    for n in [32, 64] {
        let grid = GridSpec::new(n).unwrap();
        for kernel in [Kernel::Joseph, Kernel::Strip] {
            let geom = geometry(10, PI, n, kernel);
            group.bench_with_input(BenchmarkId::new(format!("build_{kernel}"), n), &n, |b, _| {
                b.iter(|| build_parallel_operator(&grid, black_box(&geom)).unwrap())
            });
        }
        let a = build_parallel_operator(&grid, &geometry(10, PI, n, Kernel::Joseph)).unwrap();
        let x = vec![0.5; a.cols()];
        let r = vec![1.0; a.rows()];
        group.bench_with_input(BenchmarkId::new("forward", n), &n, |b, _| b.iter(|| a.apply_forward(black_box(&x)).unwrap()));
        group.bench_with_input(BenchmarkId::new("adjoint", n), &n, |b, _| b.iter(|| a.apply_adjoint(black_box(&r)).unwrap()));
    }
    group.finish();
}

fn reconstructions(c: &mut Criterion) {
    let d = desk(PhantomName::P1, 32, 10);
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("reconstruct_p1_32");
    group.sample_size(10);
    group.bench_function("dp", |b| b.iter(|| solve_dual_primal_dual(&d.a, black_box(&d.y), GreyLevels::UNIT, None, &cfg).unwrap()));
    group.bench_function("dp_smooth", |b| b.iter(|| solve_dual_smoothed(&d.a, black_box(&d.y), GreyLevels::UNIT, None, &cfg).unwrap()));
    group.bench_function("lsqr", |b| b.iter(|| solve_least_squares(&d.a, black_box(&d.y), LsqrOptions::default()).unwrap()));
    let tv = TvConfig { lambda: 1e-2, ..TvConfig::default() };
    group.bench_function("tv", |b| b.iter(|| solve_tv(&d.a, black_box(&d.y), &tv).unwrap()));
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    for m in 2..=4 {
        let geom = LatticeGeometry::first(m).unwrap();
        group.bench_with_input(BenchmarkId::new("n3", geom.to_string()), &geom, |b, g| b.iter(|| enumerate_all(3, g).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, operators, reconstructions, enumeration);
criterion_main!(benches);
