//! Guarantee and invariant suites on generated small instances, checked
//! against exhaustive optima. Backs the CLI `verify` command.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bruteforce::{brute_opt_with, unconstrained_opt};
use crate::constraints::UniformMatroid;
use crate::indstream::{IndStream, IndStreamConfig};
use crate::instances::{random_instance, ConstraintFamily, Instance, ObjectiveFamily};
use crate::localsearch::{chain_length, guarantee_bound, Chain, ChainConfig, Grid, GridConfig};
use crate::objectives::{eval_owned, Modular};
use crate::session::{Algorithm, Session, SessionConfig};
use crate::unconstrained::{unconstrained_max, DoubleGreedyConfig};
use crate::{Element, ElementId, ExecMode, Result};

const TOL: f64 = 1e-9;
const GRID_EPS: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Instances per suite.
    pub trials: usize,
    pub exec: ExecMode,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            trials: 50,
            exec: ExecMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// First violation, if any.
    pub example: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Tally {
    name: &'static str,
    checked: usize,
    violations: usize,
    example: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            checked: 0,
            violations: 0,
            example: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.example.is_none() {
                self.example = Some(what());
            }
        }
    }

    fn done(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            checked: self.checked,
            violations: self.violations,
            example: self.example,
        }
    }
}

const OBJECTIVES: [ObjectiveFamily; 2] = [ObjectiveFamily::CoverageCut, ObjectiveFamily::LogDet];
const CONSTRAINTS: [ConstraintFamily; 3] =
    [ConstraintFamily::Uniform, ConstraintFamily::Partition, ConstraintFamily::Matchoid];

fn generate(rng: &mut ChaCha8Rng, i: usize, d: usize) -> Result<Instance> {
    let n = rng.random_range(6..=12);
    random_instance(rng, n, OBJECTIVES[i % 2], CONSTRAINTS[(i / 2) % 3], d)
}

fn refs(set: &[Element]) -> Vec<&Element> {
    set.iter().collect()
}

fn formula_suite() -> Result<SuiteResult> {
    let mut t = Tally::new("guarantee-formula");
    for p in 1..=4 {
        let alpha = 1.0 / (4.0 * p as f64);
        let sp = (p as f64).sqrt();
        let c1 = 1.0 / (1.0 + 2.0 * sp).powi(2);
        let got = guarantee_bound(alpha, 0.5, 0, 0.0)?;
        t.check((got - c1).abs() <= 1e-12, || format!("p={p}: {got} vs {c1}"));
        for d in 1..=3 {
            for eps in [0.0, 0.1] {
                let c2 = (1.0 - eps) / (1.0 + 4.0 * p as f64 + 4.0 * sp + d as f64 * (2.0 + 1.0 / sp));
                let got = guarantee_bound(alpha, 0.5, d, eps)?;
                t.check((got - c2).abs() <= 1e-12, || format!("p={p} d={d} eps={eps}: {got} vs {c2}"));
            }
        }
    }
    Ok(t.done())
}

fn chain_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut t = Tally::new("chain-bound");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.trials {
        let inst = generate(&mut rng, i, 0)?;
        let chain_cfg = ChainConfig {
            backbone: inst.backbone(),
            greedy: DoubleGreedyConfig::deterministic(),
            length: None,
        };
        let mut chain = Chain::new(inst.oracle.clone(), inst.constraint.clone(), chain_cfg)?;
        for e in &inst.ground {
            chain.process(e.clone(), None)?;
        }
        let sel = chain.finalize()?;
        let opt = brute_opt_with(cfg.exec, inst.oracle.as_ref(), &inst.ground, Some(inst.constraint.as_ref()), None)?;
        let bound = guarantee_bound(inst.alpha(), 1.0 / 3.0, 0, 0.0)?;
        let ok = sel.value >= bound * opt.best_value - TOL && inst.constraint.is_independent(&refs(&sel.elements));
        t.check(ok, || format!("{}: f = {}, OPT = {}, bound = {bound}", inst.label, sel.value, opt.best_value));
    }
    Ok(t.done())
}

fn grid_suites(cfg: &VerifyConfig) -> Result<(SuiteResult, SuiteResult)> {
    let mut bound_t = Tally::new("grid-bound");
    let mut mem_t = Tally::new("memory-accounting");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    for i in 0..cfg.trials {
        let d = 1 + i % 2;
        let inst = generate(&mut rng, i, d)?;
        let grid_cfg = GridConfig {
            backbone: inst.backbone(),
            greedy: DoubleGreedyConfig::deterministic(),
            exec: cfg.exec,
            ..GridConfig::new(GRID_EPS, inst.k)
        };
        let mut grid = Grid::new(inst.oracle.clone(), inst.constraint.clone(), inst.knapsacks, grid_cfg)?;
        let q = chain_length(inst.alpha(), 1.0 / 3.0)?;
        let max_runs = ((inst.k as f64).ln() / GRID_EPS.ln_1p() - 1e-9).ceil().max(0.0) as usize + 2;
        let mut mem_ok = true;
        for e in &inst.ground {
            grid.process(e.clone())?;
            mem_ok &= grid.active_indices().len() <= max_runs;
            mem_ok &= grid.runs().all(|(_, c)| {
                let s = c.stats();
                s.high_water <= q * s.max_instance_high_water()
            });
        }
        let gs = grid.stats();
        mem_ok &= gs.high_water <= gs.max_runs * q * gs.max_instance_high_water;
        mem_t.check(mem_ok, || format!("{}: {gs:?}", inst.label));

        let sel = grid.finalize()?;
        let opt = brute_opt_with(
            cfg.exec,
            inst.oracle.as_ref(),
            &inst.ground,
            Some(inst.constraint.as_ref()),
            Some(&inst.knapsacks),
        )?;
        let bound = guarantee_bound(inst.alpha(), 1.0 / 3.0, d, GRID_EPS)?;
        let set = refs(&sel.elements);
        let ok = sel.value >= bound * opt.best_value - TOL
            && inst.constraint.is_independent(&set)
            && inst.knapsacks.feasible(&set)?;
        bound_t.check(ok, || format!("{}: f = {}, OPT = {}, bound = {bound}", inst.label, sel.value, opt.best_value));
    }
    Ok((bound_t.done(), mem_t.done()))
}

fn backbone_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut t = Tally::new("backbone-monotone");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    for _ in 0..cfg.trials {
        let n = rng.random_range(4..=12);
        let inst = random_instance(&mut rng, n, ObjectiveFamily::Coverage, ConstraintFamily::Uniform, 0)?;
        let mut b = IndStream::new(inst.oracle.clone(), inst.constraint.clone(), IndStreamConfig::for_matchoid(1))?;
        for e in &inst.ground {
            b.process(e.clone())?;
        }
        let value = eval_owned(inst.oracle.as_ref(), b.current_solution())?;
        let opt = brute_opt_with(cfg.exec, inst.oracle.as_ref(), &inst.ground, Some(inst.constraint.as_ref()), None)?;
        t.check(value >= opt.best_value / 4.0 - TOL, || {
            format!("{}: f = {value}, OPT = {}", inst.label, opt.best_value)
        });
    }
    Ok(t.done())
}

fn double_greedy_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    const SEEDS: u64 = 100;
    let mut t = Tally::new("double-greedy");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(3));
    for i in 0..cfg.trials {
        let inst = generate(&mut rng, i, 0)?;
        let opt = unconstrained_opt(inst.oracle.as_ref(), &inst.ground)?.best_value;
        let det = unconstrained_max(inst.oracle.as_ref(), &inst.ground, &DoubleGreedyConfig::deterministic())?;
        let det_value = eval_owned(inst.oracle.as_ref(), &det)?;
        t.check(det_value >= opt / 3.0 - TOL, || format!("{}: deterministic {det_value}, OPT = {opt}", inst.label));
        let values = (0..SEEDS)
            .map(|s| {
                let r = unconstrained_max(inst.oracle.as_ref(), &inst.ground, &DoubleGreedyConfig::randomized(s))?;
                eval_owned(inst.oracle.as_ref(), &r)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean = values.iter().sum::<f64>() / SEEDS as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (SEEDS - 1) as f64;
        let se = (var / SEEDS as f64).sqrt();
        t.check(mean >= 0.5 * opt - 3.0 * se - TOL, || {
            format!("{}: randomized mean {mean} (se {se}), OPT = {opt}", inst.label)
        });
    }
    Ok(t.done())
}

fn conservation_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut t = Tally::new("conservation");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(4));
    let n = (cfg.trials * 100).max(100) as ElementId;
    let oracle = Arc::new(Modular::new((0..n).map(|id| (id, rng.random_range(0.0..1.0)))));
    let chain_cfg = ChainConfig {
        length: Some(3),
        ..ChainConfig::default()
    };
    let mut chain = Chain::new(oracle, Arc::new(UniformMatroid::new(8)), chain_cfg)?;
    for id in 0..n {
        chain.process(Element::new(id), None)?;
        if (id + 1) % 100 != 0 {
            continue;
        }
        let mut seen = BTreeSet::new();
        let mut held = 0;
        let mut ok = true;
        for inst in chain.instances() {
            let s = inst.stats();
            let size = inst.current_solution().len();
            held += size;
            ok &= s.accepted + s.rejected == s.processed && size + s.rejected + s.evicted == s.processed;
            ok &= inst.current_solution().iter().all(|e| seen.insert(e.id));
        }
        let cs = chain.stats();
        ok &= held + cs.dropped == cs.pushed;
        t.check(ok, || format!("after {} elements: {cs:?}", id + 1));
    }
    Ok(t.done())
}

fn anytime_suite(cfg: &VerifyConfig) -> Result<SuiteResult> {
    let mut t = Tally::new("anytime");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(5));
    for i in 0..cfg.trials {
        let d = i % 3;
        let inst = generate(&mut rng, i, d)?;
        let greedy = DoubleGreedyConfig::randomized(i as u64);
        let algorithm = if d == 0 {
            Algorithm::Chain(ChainConfig {
                backbone: inst.backbone(),
                greedy,
                length: None,
            })
        } else {
            Algorithm::Grid(GridConfig {
                backbone: inst.backbone(),
                greedy,
                exec: cfg.exec,
                ..GridConfig::new(GRID_EPS, inst.k)
            })
        };
        let config = SessionConfig {
            algorithm,
            knapsacks: inst.knapsacks,
        };
        let n = inst.ground.len();
        let marks = [n / 4, n / 2, 3 * n / 4];
        let mut probed = Session::open(inst.oracle.clone(), inst.constraint.clone(), config)?;
        let mut fresh = Session::open(inst.oracle.clone(), inst.constraint.clone(), config)?;
        for (pos, e) in inst.ground.iter().enumerate() {
            if marks.contains(&pos) {
                probed.snapshot()?;
            }
            probed.push(e.clone())?;
            fresh.push(e.clone())?;
        }
        let (a, sa) = probed.close()?;
        let (b, sb) = fresh.close()?;
        t.check(a == b && sa.runs == sb.runs, || format!("{}: end states differ", inst.label));
    }
    Ok(t.done())
}

/// Runs every suite; a suite passes when it has no violations.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteResult>> {
    let (grid, memory) = grid_suites(cfg)?;
    Ok(vec![
        formula_suite()?,
        chain_suite(cfg)?,
        grid,
        memory,
        backbone_suite(cfg)?,
        double_greedy_suite(cfg)?,
        conservation_suite(cfg)?,
        anytime_suite(cfg)?,
    ])
}
