use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use streamsub::bruteforce::brute_opt_with;
use streamsub::instances::{random_instance, ConstraintFamily, Instance, ObjectiveFamily};
use streamsub::localsearch::{Grid, GridConfig};
use streamsub::unconstrained::DoubleGreedyConfig;
use streamsub::ExecMode;

const MODES: [(&str, ExecMode); 2] =
    [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn instance(n: usize, objective: ObjectiveFamily, d: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    random_instance(&mut rng, n, objective, ConstraintFamily::Partition, d).unwrap()
}

fn grid_stream(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_stream");
    group.sample_size(10);
    for eps in [0.5, 0.1] {
        let inst = instance(300, ObjectiveFamily::CoverageCut, 2);
        for (name, exec) in MODES {
            let cfg = GridConfig {
                backbone: inst.backbone(),
                greedy: DoubleGreedyConfig::deterministic(),
                exec,
                ..GridConfig::new(eps, inst.k.max(20))
            };
            group.bench_with_input(BenchmarkId::new(name, eps), &cfg, |b, cfg| {
                b.iter(|| {
                    let mut grid = Grid::new(
                        inst.oracle.clone(),
                        inst.constraint.clone(),
                        inst.knapsacks,
                        *cfg,
                    )
                    .unwrap();
                    for e in &inst.ground {
                        grid.process(e.clone()).unwrap();
                    }
                    black_box(grid.finalize().unwrap().value)
                })
            });
        }
    }
    group.finish();
}

fn exhaustive(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_opt");
    group.sample_size(10);
    let inst = instance(16, ObjectiveFamily::CoverageCut, 1);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                let r = brute_opt_with(
                    exec,
                    inst.oracle.as_ref(),
                    &inst.ground,
                    Some(inst.constraint.as_ref()),
                    Some(&inst.knapsacks),
                )
                .unwrap();
                black_box(r.best_value)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, grid_stream, exhaustive);
criterion_main!(benches);
