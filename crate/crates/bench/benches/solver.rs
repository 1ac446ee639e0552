use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use usc_lab_bench::scenario;
use usc_lab_core::analysis::decompose_cycling;
use usc_lab_core::lp::RevisedSimplex;
use usc_lab_core::{build_lp, solve_scenario, Slcr, SolverOptions};

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    g.sample_size(10);
    for horizon in [48, 168] {
        for slcr in [Slcr::Zero, Slcr::Complete] {
            let s = scenario(horizon, slcr);
            let solver = RevisedSimplex::new(SolverOptions::default());
            g.bench_with_input(BenchmarkId::new(format!("1{}", slcr.letter()), horizon), &s, |b, s| {
                b.iter(|| solve_scenario(black_box(s), &solver).unwrap())
            });
        }
    }
    g.finish();
}

fn build(c: &mut Criterion) {
    let s = scenario(672, Slcr::Complete);
    c.bench_function("build_lp/672", |b| b.iter(|| build_lp(black_box(&s)).unwrap()));
}

fn decompose(c: &mut Criterion) {
    c.bench_function("decompose_cycling", |b| {
        b.iter(|| decompose_cycling(black_box(10.0), black_box(10.0), black_box(0.64)).unwrap())
    });
}

criterion_group!(benches, solve, build, decompose);
criterion_main!(benches);
