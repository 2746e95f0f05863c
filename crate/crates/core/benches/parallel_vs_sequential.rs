use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wpi_core::entropy::machine::ReferenceMachine;
use wpi_core::entropy::{CoarseState, ExactEnum};
use wpi_core::metrics::{ExecutionTrace, TaskRecord, TaskSuite};
use wpi_core::par::Exec;
use wpi_core::sim::{coupled_bound_sweep, sample_trajectories, BoundKind, Coupling, MarkovModel};
use wpi_core::substrate::{run_comparison, Substrate, SubstrateRun};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn chain() -> MarkovModel {
    let states = ["0000", "0101", "0110", "1011"]
        .iter()
        .map(|b| CoarseState::parse(b).unwrap())
        .collect();
    MarkovModel::algorithmic("alg4", states, &ExactEnum::default()).unwrap()
}

fn sampling(c: &mut Criterion) {
    let m = chain();
    let mut g = c.benchmark_group("sample_trajectories");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "10k x 10"), |b| {
            b.iter(|| sample_trajectories(black_box(&m), 10, 10_000, 7, exec).unwrap())
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let m = chain();
    let e = ExactEnum::default();
    let trajs = sample_trajectories(&m, 10, 10_000, 7, Exec::default()).unwrap();
    let mut g = c.benchmark_group("coupled_bound_sweep");
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| {
                coupled_bound_sweep(&m, black_box(&trajs), BoundKind::Efficiency, Coupling::default(), 0.05, &e, exec)
                    .unwrap()
            })
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let machine = ReferenceMachine::default();
    let mut g = c.benchmark_group("shortest_table");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "len<=16"), |b| {
            b.iter(|| machine.shortest_table(black_box(&[]), 16, exec))
        });
    }
    g.finish();
}

fn comparison(c: &mut Criterion) {
    let suite = TaskSuite::new((0..200).map(|i| TaskRecord::new(format!("t{i}"), 1.0, 0.5)).collect()).unwrap();
    let runs: Vec<SubstrateRun> = (0..512)
        .map(|i| SubstrateRun {
            substrate: Substrate::new(format!("s{i:03}"), 300.0, 1.0 + i as f64, 2.0, 1.0).unwrap(),
            trace: ExecutionTrace::new(1_000_000, 1.0),
            suite: suite.clone(),
        })
        .collect();
    let mut g = c.benchmark_group("run_comparison");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "512 substrates"), |b| {
            b.iter(|| run_comparison(black_box(&runs), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sampling, sweep, enumeration, comparison);
criterion_main!(benches);
