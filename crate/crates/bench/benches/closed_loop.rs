use criterion::{criterion_group, criterion_main, Criterion};
use smpc_bench::{constrained_healthcare, healthcare, healthcare_artifact};
use smpc_core::sim::{run_batch, simulate, CertaintyEquivalent, InitialState, Policy};
use smpc_core::{update, Belief, SolverOptions};

fn filter(c: &mut Criterion) {
    let model = healthcare();
    let belief = Belief::new(vec![0.2, 0.5, 0.3]).unwrap();
    c.bench_function("filter/update", |b| {
        b.iter(|| update(&belief, 2, 1, &model).unwrap())
    });
}

fn batches(c: &mut Criterion) {
    let model = healthcare();
    let artifact = healthcare_artifact();
    let ce = CertaintyEquivalent::new(&model);
    let pi0 = Belief::uniform(3);
    let mut group = c.benchmark_group("batch_100x100");
    group.sample_size(10);
    group.bench_function("smpc", |b| {
        b.iter(|| {
            run_batch(
                &model,
                &Policy::Smpc(&artifact),
                &pi0,
                InitialState::default(),
                100,
                100,
                7,
                None,
            )
            .unwrap()
        })
    });
    group.bench_function("certainty_equivalent", |b| {
        b.iter(|| {
            run_batch(
                &model,
                &Policy::CertaintyEquivalent(&ce),
                &pi0,
                InitialState::default(),
                100,
                100,
                7,
                None,
            )
            .unwrap()
        })
    });
    group.finish();
}

fn constrained_run(c: &mut Criterion) {
    let model = constrained_healthcare()
        .with_overrides(Some(2), None, None)
        .unwrap();
    let pi0 = Belief::vertex(3, 1);
    let policy = Policy::SmpcOnline(SolverOptions::default());
    let mut group = c.benchmark_group("online");
    group.sample_size(10);
    group.bench_function("constrained_30_steps", |b| {
        b.iter(|| simulate(&model, &policy, &pi0, InitialState::Fixed(1), 30, 3).unwrap())
    });
    group.finish();
}

criterion_group!(benches, filter, batches, constrained_run);
criterion_main!(benches);
