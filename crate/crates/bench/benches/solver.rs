use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use smpc_bench::{healthcare, healthcare_with_horizon};
use smpc_core::solver::{backup, expectimax_oracle, PruneMode, ValueStage};
use smpc_core::{solve, Belief, SolverOptions};

fn offline_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for n in 1..=4 {
        let model = healthcare_with_horizon(n);
        group.bench_with_input(BenchmarkId::new("lp", n), &model, |b, m| {
            b.iter(|| solve(m, &SolverOptions::default()).unwrap())
        });
    }
    let model = healthcare_with_horizon(2);
    let pointwise = SolverOptions {
        prune: PruneMode::Pointwise,
        ..SolverOptions::default()
    };
    group.bench_function("pointwise/2", |b| {
        b.iter(|| solve(&model, &pointwise).unwrap())
    });
    group.finish();
}

fn single_backup(c: &mut Criterion) {
    let model = healthcare();
    let opts = SolverOptions::default();
    let mut stage = ValueStage::terminal(&model);
    let mut group = c.benchmark_group("backup");
    group.sample_size(10);
    for _ in 1..=3 {
        let input = stage.clone();
        group.bench_with_input(BenchmarkId::from_parameter(input.len()), &input, |b, s| {
            b.iter(|| backup(s, &model, &opts).unwrap())
        });
        stage = backup(&stage, &model, &opts).unwrap();
    }
    group.finish();
}

fn tree_search(c: &mut Criterion) {
    let model = healthcare();
    let opts = SolverOptions::default();
    let belief = Belief::uniform(3);
    let mut group = c.benchmark_group("expectimax");
    group.sample_size(10);
    for depth in 2..=4 {
        group.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, &d| {
            b.iter(|| expectimax_oracle(&model, &belief, d, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, offline_solve, single_backup, tree_search);
criterion_main!(benches);
