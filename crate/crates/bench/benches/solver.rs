use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ftpid_bench::random_systems;
use ftpid_core::{
    decompose, fixtures, solve_ift, EngineOptions, Measure, SolverOptions, SourceAntichain, StepRule,
};

fn entrance(c: &mut Criterion) {
    let system = fixtures::entrance_cameras();
    let alpha = SourceAntichain::parse("{1}{2}", 2).unwrap();
    let opts = SolverOptions::default();
    c.bench_function("solve_ift/entrance/{1}{2}", |b| {
        b.iter(|| solve_ift(black_box(&system), black_box(&alpha), &opts).unwrap())
    });
}

fn step_rules(c: &mut Criterion) {
    let alpha = SourceAntichain::parse("{1}{2}{3}", 3).unwrap();
    // skip systems the solver settles in a handful of sweeps
    let systems = random_systems(7, 3, 50);
    let system = systems
        .iter()
        .find(|s| solve_ift(s, &alpha, &SolverOptions::default()).is_ok_and(|c| c.iterations > 20))
        .expect("corpus has a nontrivial instance");
    let mut group = c.benchmark_group("solve_ift/step_rule");
    for rule in [StepRule::BlockPairwise, StepRule::LineSearch] {
        let opts = SolverOptions {
            step_rule: rule,
            tolerance: 1e-3,
            restarts: 1,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(format!("{rule:?}")), &opts, |b, o| {
            b.iter(|| solve_ift(system, &alpha, o).unwrap())
        });
    }
    group.finish();
}

fn decompose_three(c: &mut Criterion) {
    let systems = random_systems(11, 3, 4);
    let opts = EngineOptions::default();
    c.bench_function("decompose/ft/n=3", |b| {
        b.iter(|| {
            for s in &systems {
                black_box(decompose(s, Measure::Ft, &opts).unwrap());
            }
        })
    });
}

criterion_group!(benches, entrance, step_rules, decompose_three);
criterion_main!(benches);
