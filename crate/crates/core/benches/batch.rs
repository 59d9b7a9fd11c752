//! Sequential vs parallel execution of the batch entry points.

use std::collections::HashSet;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use infodiff::exec::Execution;
use infodiff::graph::{partition_by_interest, VoteHistory};
use infodiff::pde::{solve_batch, DLParams, GrowthRate, SolverConfig};
use infodiff::spline::InitialDensity;
use infodiff::synth::{generate_batch, generate_graph, GraphKind, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] =
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn solves(c: &mut Criterion) {
    let knots = [(1.0, 6.0), (2.0, 2.5), (3.0, 1.0), (4.0, 0.5), (5.0, 0.3), (6.0, 0.2)];
    let phi = InitialDensity::build(&knots).unwrap();
    let jobs: Vec<(DLParams, InitialDensity)> = (0..32)
        .map(|i| {
            let d = 0.005 + 0.002 * i as f64;
            let p = DLParams::new(d, GrowthRate::new(1.4, 1.5, 0.25), 25.0, 1.0, 6.0).unwrap();
            (p, phi.clone())
        })
        .collect();
    let config = SolverConfig { dx: 0.05, dt: 0.01, t_end: 24 };
    let mut group = c.benchmark_group("solve_batch");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| solve_batch(black_box(&jobs), &config, mode))
        });
    }
    group.finish();
}

fn interest(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let histories: VoteHistory = (0..20_000)
        .map(|i| {
            let stories: HashSet<String> =
                (0..rng.gen_range(1..40)).map(|_| format!("s{}", rng.gen_range(0..500))).collect();
            (format!("u{i}"), stories)
        })
        .collect();
    let mut group = c.benchmark_group("partition_by_interest");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| partition_by_interest(black_box(&histories), "u0", 6, mode).unwrap())
        });
    }
    group.finish();
}

fn cascades(c: &mut Criterion) {
    let graph = generate_graph(&GraphKind::BarabasiAlbert { m: 3 }, 2_000, 5).unwrap();
    let seeds: Vec<u64> = (0..16).collect();
    let base = SimConfig { horizon: 24, ..SimConfig::default() };
    let mut group = c.benchmark_group("generate_batch");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generate_batch(black_box(&graph), &base, &seeds, "u0", "s", mode))
        });
    }
    group.finish();
}

criterion_group!(benches, solves, interest, cascades);
criterion_main!(benches);
