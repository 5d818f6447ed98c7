//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use streamsub::bruteforce::{brute_opt, unconstrained_opt};
use streamsub::constraints::{IndependenceOracle, UniformMatroid};
use streamsub::indstream::{IndStream, IndStreamConfig};
use streamsub::instances::{random_coverage_cut, random_instance, random_logdet, ConstraintFamily, Instance, ObjectiveFamily};
use streamsub::localsearch::{chain_length, guarantee_bound, Chain, ChainConfig, Grid, GridConfig};
use streamsub::objectives::{eval_owned, sample_size_bound, DecomposableOracle, FacilityLocation, Modular, Reservoir, ValueOracle};
use streamsub::session::{Algorithm, Session, SessionConfig};
use streamsub::unconstrained::{unconstrained_max, DoubleGreedyConfig};
use streamsub::{Element, ElementId};

const TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn refs(set: &[Element]) -> Vec<&Element> {
    set.iter().collect()
}

const OBJECTIVES: [ObjectiveFamily; 2] = [ObjectiveFamily::CoverageCut, ObjectiveFamily::LogDet];
const CONSTRAINTS: [ConstraintFamily; 3] =
    [ConstraintFamily::Uniform, ConstraintFamily::Partition, ConstraintFamily::Matchoid];

/// `count` instances cycling through every objective/constraint pairing.
fn instances(seed: u64, count: usize, d: impl Fn(usize) -> usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let objective = OBJECTIVES[i % OBJECTIVES.len()];
            let constraint = CONSTRAINTS[(i / OBJECTIVES.len()) % CONSTRAINTS.len()];
            let n = rng.random_range(6..=12);
            random_instance(&mut rng, n, objective, constraint, d(i)).unwrap()
        })
        .collect()
}

fn deterministic_chain(inst: &Instance) -> ChainConfig {
    ChainConfig {
        backbone: inst.backbone(),
        greedy: DoubleGreedyConfig::deterministic(),
        length: None,
    }
}

fn grid_config(inst: &Instance, eps: f64) -> GridConfig {
    GridConfig {
        backbone: inst.backbone(),
        greedy: DoubleGreedyConfig::deterministic(),
        ..GridConfig::new(eps, inst.k)
    }
}

fn bound_exactness() -> Outcome {
    let mut worst = 0.0f64;
    for p in 1..=4 {
        let alpha = 1.0 / (4.0 * p as f64);
        let sp = (p as f64).sqrt();
        let c1 = 1.0 / (1.0 + 2.0 * sp).powi(2);
        worst = worst.max((guarantee_bound(alpha, 0.5, 0, 0.0).unwrap() - c1).abs());
        for d in 1..=3 {
            for eps in [0.0, 0.1] {
                let c2 = (1.0 - eps) / (1.0 + 4.0 * p as f64 + 4.0 * sp + d as f64 * (2.0 + 1.0 / sp));
                worst = worst.max((guarantee_bound(alpha, 0.5, d, eps).unwrap() - c2).abs());
            }
        }
    }
    outcome(worst <= 1e-12, format!("max deviation {worst:e} over p=1..4, d=0..3, eps in {{0, 0.1}}"))
}

fn chain_bound() -> Outcome {
    let insts = instances(101, 300, |_| 0);
    let mut violations = 0;
    let mut min_ratio = f64::INFINITY;
    for inst in &insts {
        let cfg = deterministic_chain(inst);
        let mut chain = Chain::new(inst.oracle.clone(), inst.constraint.clone(), cfg).unwrap();
        for e in &inst.ground {
            chain.process(e.clone(), None).unwrap();
        }
        let sel = chain.finalize().unwrap();
        let opt = brute_opt(inst.oracle.as_ref(), &inst.ground, Some(inst.constraint.as_ref()), None).unwrap();
        let bound = guarantee_bound(inst.alpha(), 1.0 / 3.0, 0, 0.0).unwrap();
        let value = eval_owned(inst.oracle.as_ref(), &sel.elements).unwrap();
        let independent = inst.constraint.is_independent(&refs(&sel.elements));
        if value < bound * opt.best_value - TOL || !independent || (value - sel.value).abs() > TOL {
            violations += 1;
            eprintln!("  violation on {}: f = {value}, OPT = {}, bound = {bound}", inst.label, opt.best_value);
        }
        if opt.best_value > 0.0 {
            min_ratio = min_ratio.min(value / opt.best_value);
        }
    }
    outcome(
        violations == 0,
        format!("{} instances, {violations} violations, min f/OPT = {min_ratio:.4}", insts.len()),
    )
}

struct GridRun {
    label: String,
    violations: usize,
    infeasible: usize,
    memory_failures: Vec<String>,
    min_ratio: f64,
}

fn grid_bound_and_memory() -> (Outcome, Outcome) {
    const EPS: f64 = 0.2;
    let insts = instances(202, 300, |i| 1 + (i / 6) % 2);
    let mut runs = Vec::new();
    for inst in &insts {
        let d = inst.knapsacks.d;
        let mut grid = Grid::new(inst.oracle.clone(), inst.constraint.clone(), inst.knapsacks, grid_config(inst, EPS)).unwrap();
        let q = chain_length(inst.alpha(), 1.0 / 3.0).unwrap();
        let max_runs = ((inst.k as f64).ln() / EPS.ln_1p() - 1e-9).ceil().max(0.0) as usize + 2;
        let mut memory_failures = Vec::new();
        for e in &inst.ground {
            grid.process(e.clone()).unwrap();
            let active = grid.active_indices().len();
            if active > max_runs {
                memory_failures.push(format!("{} active runs > {max_runs}", active));
            }
            for (_, chain) in grid.runs() {
                let s = chain.stats();
                if s.high_water > q * s.max_instance_high_water() {
                    memory_failures.push(format!("chain high-water {} > {q} * {}", s.high_water, s.max_instance_high_water()));
                }
            }
        }
        let gs = grid.stats();
        if gs.high_water > gs.max_runs * q * gs.max_instance_high_water {
            memory_failures.push(format!(
                "grid high-water {} > {} * {q} * {}",
                gs.high_water, gs.max_runs, gs.max_instance_high_water
            ));
        }
        let sel = grid.finalize().unwrap();
        let opt = brute_opt(inst.oracle.as_ref(), &inst.ground, Some(inst.constraint.as_ref()), Some(&inst.knapsacks)).unwrap();
        let bound = guarantee_bound(inst.alpha(), 1.0 / 3.0, d, EPS).unwrap();
        let value = eval_owned(inst.oracle.as_ref(), &sel.elements).unwrap();
        let feasible = inst.constraint.is_independent(&refs(&sel.elements))
            && inst.knapsacks.feasible(&refs(&sel.elements)).unwrap();
        runs.push(GridRun {
            label: inst.label.clone(),
            violations: usize::from(value < bound * opt.best_value - TOL),
            infeasible: usize::from(!feasible),
            memory_failures,
            min_ratio: if opt.best_value > 0.0 { value / opt.best_value } else { 1.0 },
        });
        if value < bound * opt.best_value - TOL {
            eprintln!("  violation on {}: f = {value}, OPT = {}, bound = {bound}", inst.label, opt.best_value);
        }
    }
    let violations: usize = runs.iter().map(|r| r.violations).sum();
    let infeasible: usize = runs.iter().map(|r| r.infeasible).sum();
    let min_ratio = runs.iter().map(|r| r.min_ratio).fold(f64::INFINITY, f64::min);
    let bound = outcome(
        violations == 0 && infeasible == 0,
        format!(
            "{} instances (d in {{1, 2}}, eps = 0.2), {violations} bound violations, {infeasible} infeasible outputs, min f/OPT = {min_ratio:.4}",
            runs.len()
        ),
    );
    let bad: Vec<&GridRun> = runs.iter().filter(|r| !r.memory_failures.is_empty()).collect();
    for r in bad.iter().take(5) {
        eprintln!("  memory failure on {}: {}", r.label, r.memory_failures[0]);
    }
    let memory = outcome(
        bad.is_empty(),
        format!("{} grid runs checked after every element, {} with counter-bound failures", runs.len(), bad.len()),
    );
    (bound, memory)
}

fn backbone_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut violations = 0;
    let mut min_ratio = f64::INFINITY;
    let trials = 200;
    for _ in 0..trials {
        let n = rng.random_range(4..=12);
        let inst = random_instance(&mut rng, n, ObjectiveFamily::Coverage, ConstraintFamily::Uniform, 0).unwrap();
        let mut backbone = IndStream::new(inst.oracle.clone(), inst.constraint.clone(), IndStreamConfig::for_matchoid(1)).unwrap();
        for e in &inst.ground {
            backbone.process(e.clone()).unwrap();
        }
        let value = eval_owned(inst.oracle.as_ref(), backbone.current_solution()).unwrap();
        let opt = brute_opt(inst.oracle.as_ref(), &inst.ground, Some(inst.constraint.as_ref()), None).unwrap();
        if value < opt.best_value / 4.0 - TOL {
            violations += 1;
        }
        if opt.best_value > 0.0 {
            min_ratio = min_ratio.min(value / opt.best_value);
        }
    }
    outcome(violations == 0, format!("{trials} coverage streams, {violations} violations, min f/OPT = {min_ratio:.4}"))
}

fn double_greedy() -> (Outcome, Outcome) {
    const SEEDS: u64 = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut det_violations = 0;
    let mut rand_violations = 0;
    let mut min_det = f64::INFINITY;
    let trials = 300;
    for i in 0..trials {
        let n = rng.random_range(4..=12);
        let ids: Vec<ElementId> = (1..=n as ElementId).collect();
        let ground: Vec<Element> = ids.iter().map(|&id| Element::new(id)).collect();
        let oracle: Arc<dyn ValueOracle> = if i % 2 == 0 {
            Arc::new(random_coverage_cut(&mut rng, &ids).unwrap())
        } else {
            Arc::new(random_logdet(&mut rng, &ids).unwrap())
        };
        let opt = unconstrained_opt(oracle.as_ref(), &ground).unwrap().best_value;

        let det = unconstrained_max(oracle.as_ref(), &ground, &DoubleGreedyConfig::deterministic()).unwrap();
        let det_value = eval_owned(oracle.as_ref(), &det).unwrap();
        if det_value < opt / 3.0 - TOL {
            det_violations += 1;
        }
        if opt > 0.0 {
            min_det = min_det.min(det_value / opt);
        }

        let values: Vec<f64> = (0..SEEDS)
            .map(|s| {
                let r = unconstrained_max(oracle.as_ref(), &ground, &DoubleGreedyConfig::randomized(s)).unwrap();
                eval_owned(oracle.as_ref(), &r).unwrap()
            })
            .collect();
        let mean = values.iter().sum::<f64>() / SEEDS as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (SEEDS - 1) as f64;
        let se = (var / SEEDS as f64).sqrt();
        if mean < 0.5 * opt - 3.0 * se - TOL {
            rand_violations += 1;
        }
    }
    (
        outcome(det_violations == 0, format!("{trials} instances, {det_violations} violations, min f/OPT = {min_det:.4}")),
        outcome(
            rand_violations == 0,
            format!("{trials} instances x {SEEDS} seeds, {rand_violations} means below 0.5 OPT - 3 SE"),
        ),
    )
}

fn conservation() -> Outcome {
    const N: u64 = 100_000;
    const CHECK_EVERY: u64 = 1_000;
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let weights: Vec<(ElementId, f64)> = (0..N).map(|id| (id, rng.random_range(0.0..1.0))).collect();
    let oracle = Arc::new(Modular::new(weights));
    let cfg = ChainConfig {
        length: Some(3),
        ..ChainConfig::default()
    };
    let mut chain = Chain::new(oracle, Arc::new(UniformMatroid::new(16)), cfg).unwrap();
    let mut failures = Vec::new();
    let mut checkpoints = 0;
    for id in 0..N {
        chain.process(Element::new(id), None).unwrap();
        if (id + 1) % CHECK_EVERY != 0 {
            continue;
        }
        checkpoints += 1;
        let mut seen = BTreeSet::new();
        let mut held = 0;
        for inst in chain.instances() {
            let s = inst.stats();
            let size = inst.current_solution().len();
            held += size;
            if s.accepted + s.rejected != s.processed || size + s.rejected + s.evicted != s.processed {
                failures.push(format!("instance counters at {}: {s:?}, |S| = {size}", id + 1));
            }
            if !inst.current_solution().iter().all(|e| seen.insert(e.id)) {
                failures.push(format!("solutions overlap at {}", id + 1));
            }
        }
        let cs = chain.stats();
        if held + cs.dropped != cs.pushed {
            failures.push(format!("chain conservation at {}: {held} + {} != {}", id + 1, cs.dropped, cs.pushed));
        }
    }
    for f in failures.iter().take(5) {
        eprintln!("  {f}");
    }
    outcome(
        failures.is_empty() && checkpoints == 100,
        format!("{N} elements, q = 3, {checkpoints} checkpoints, {} failures", failures.len()),
    )
}

fn decomposable() -> Outcome {
    const K: usize = 3;
    const EPS: f64 = 0.5;
    const DELTA: f64 = 0.1;
    const GROUND: usize = 4_000;
    const CANDIDATES: usize = 10;
    const TRIALS: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let w = sample_size_bound(K, EPS, DELTA, GROUND).unwrap().min(GROUND);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..TRIALS {
        let centres: Vec<[f64; 2]> = (0..4).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect();
        let ground: Vec<Element> = (0..GROUND as ElementId)
            .map(|id| {
                let c = centres[rng.random_range(0..centres.len())];
                Element::new(id).with_features(vec![c[0] + 0.1 * rng.random::<f64>(), c[1] + 0.1 * rng.random::<f64>()])
            })
            .collect();
        let candidates: Vec<Element> = (0..CANDIDATES)
            .map(|_| ground[rng.random_range(0..GROUND)].clone())
            .collect();
        let mut reservoir = Reservoir::new(w);
        for e in &ground {
            reservoir.offer(e.clone(), &mut rng);
        }
        let family = Arc::new(FacilityLocation::new(0.05).unwrap());
        let estimate = DecomposableOracle::new(family, reservoir.into_sample(), &candidates).unwrap();
        let exact = estimate.exact_over(ground).unwrap();
        let mut failed = false;
        for mask in 1u32..1 << CANDIDATES {
            if mask.count_ones() as usize > K {
                continue;
            }
            let set: Vec<&Element> = (0..CANDIDATES).filter(|i| mask >> i & 1 == 1).map(|i| &candidates[i]).collect();
            let err = (estimate.eval(&set).unwrap() - exact.eval(&set).unwrap()).abs();
            worst = worst.max(err);
            failed |= err > EPS;
        }
        failures += usize::from(failed);
    }
    let allowed = (DELTA * TRIALS as f64).floor() as usize;
    outcome(
        failures <= allowed,
        format!("|W| = {w} of {GROUND}, {failures}/{TRIALS} instances failed (allowed {allowed}), max error {worst:.4}"),
    )
}

fn anytime() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut mismatches = 0;
    let mut runs = 0;
    for i in 0..40 {
        let d = i % 3;
        let inst = random_instance(&mut rng, 12, OBJECTIVES[i % 2], CONSTRAINTS[i % 3], d).unwrap();
        let greedy = DoubleGreedyConfig::randomized(i as u64);
        let config = if d == 0 {
            SessionConfig {
                algorithm: Algorithm::Chain(ChainConfig {
                    backbone: inst.backbone(),
                    greedy,
                    length: None,
                }),
                knapsacks: inst.knapsacks,
            }
        } else {
            SessionConfig {
                algorithm: Algorithm::Grid(GridConfig {
                    greedy,
                    ..grid_config(&inst, 0.2)
                }),
                knapsacks: inst.knapsacks,
            }
        };
        let n = inst.ground.len();
        let marks = [n / 4, n / 2, 3 * n / 4];
        let mut probed = Session::open(inst.oracle.clone(), inst.constraint.clone(), config).unwrap();
        let mut fresh = Session::open(inst.oracle.clone(), inst.constraint.clone(), config).unwrap();
        for (pos, e) in inst.ground.iter().enumerate() {
            if marks.contains(&pos) {
                probed.snapshot().unwrap();
            }
            probed.push(e.clone()).unwrap();
            fresh.push(e.clone()).unwrap();
        }
        let (a, sa) = probed.close().unwrap();
        let (b, sb) = fresh.close().unwrap();
        let same = a == b
            && a.selection.value.to_bits() == b.selection.value.to_bits()
            && sa.chain == sb.chain
            && sa.grid == sb.grid;
        mismatches += usize::from(!same);
        runs += 1;
    }
    outcome(mismatches == 0, format!("{runs} seeded sessions snapshotted at 25/50/75%, {mismatches} end-state mismatches"))
}

fn main() {
    let mut results: Vec<(&str, Outcome, f64)> = Vec::new();
    let timed = |name: &'static str, f: &dyn Fn() -> Outcome, out: &mut Vec<(&str, Outcome, f64)>| {
        let t = Instant::now();
        let o = f();
        out.push((name, o, t.elapsed().as_secs_f64()));
    };
    timed("guarantee formula exactness", &bound_exactness, &mut results);
    timed("chain end-to-end bound", &chain_bound, &mut results);
    let t = Instant::now();
    let (grid, memory) = grid_bound_and_memory();
    let el = t.elapsed().as_secs_f64();
    results.push(("grid end-to-end bound and feasibility", grid, el));
    results.push(("memory accounting", memory, 0.0));
    timed("monotone backbone bound", &backbone_bound, &mut results);
    let t = Instant::now();
    let (det, rand) = double_greedy();
    let el = t.elapsed().as_secs_f64();
    results.push(("double greedy deterministic", det, el));
    results.push(("double greedy randomized mean", rand, 0.0));
    timed("conservation and disjointness", &conservation, &mut results);
    timed("decomposable estimation", &decomposable, &mut results);
    timed("anytime snapshots", &anytime, &mut results);

    let mut failed = 0;
    for (name, o, secs) in &results {
        println!("{} {name}: {} ({secs:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
