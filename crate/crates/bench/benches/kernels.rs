use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use largerho::appendix::series_coefficients;
use largerho::elliptic::{complete, jacobi};
use largerho::melnikov::{solve_asym_branch, solve_sym_branch};
use largerho::odesim::{measure_transport, IntegratorOptions};
use largerho::shooting::{refine_from_branch, ShootingOptions};
use largerho::{EllipticModulus, Params, State3};

const BETA: f64 = 8.0 / 3.0;

fn elliptic(c: &mut Criterion) {
    let md = EllipticModulus::new(0.9).unwrap();
    c.bench_function("complete K,E", |b| b.iter(|| complete(black_box(&md)).unwrap()));
    c.bench_function("jacobi sn,cn,dn", |b| b.iter(|| jacobi(black_box(1.3), black_box(&md)).unwrap()));
}

fn branches(c: &mut Criterion) {
    let sym = Params::from_lambda(33.0 / 14.0, BETA).unwrap();
    let asym = Params::from_lambda(0.9, BETA).unwrap();
    c.bench_function("symmetric branch", |b| b.iter(|| solve_sym_branch(black_box(&sym)).unwrap()));
    c.bench_function("asymmetric branch", |b| b.iter(|| solve_asym_branch(black_box(&asym)).unwrap()));
}

fn simulation(c: &mut Criterion) {
    let p = Params::new(10.0, BETA).unwrap().with_rho(1000.0).unwrap();
    let x0 = State3::original(5.0, 5.0, 20.0);
    let opts = IntegratorOptions::tolerances(1e-9, 1e-11);
    let mut g = c.benchmark_group("simulation");
    g.sample_size(10);
    g.bench_function("transport rho=1000 t=20", |b| b.iter(|| measure_transport(&p, &x0, 20.0, 2.0, &opts).unwrap()));
    let p6 = Params::from_lambda(1.5, BETA).unwrap().with_rho(1e6).unwrap();
    let bp = solve_sym_branch(&p6).unwrap();
    g.bench_function("shooting rho=1e6", |b| b.iter(|| refine_from_branch(&bp, &p6, &ShootingOptions::default()).unwrap()));
    g.finish();
}

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("appendix");
    g.sample_size(10);
    g.bench_function("exact series N=300", |b| b.iter(|| series_coefficients(black_box(300)).unwrap()));
    g.finish();
}

criterion_group!(benches, elliptic, branches, simulation, series);
criterion_main!(benches);
