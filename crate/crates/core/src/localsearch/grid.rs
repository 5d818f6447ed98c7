use std::collections::BTreeSet;
use std::sync::Arc;

use super::{density_floor, CandidateKind, Chain, ChainConfig, Provenance, Selection};
use crate::constraints::{IndependenceOracle, KnapsackSpec};
use crate::indstream::IndStreamConfig;
use crate::objectives::{eval_owned, ValueOracle};
use crate::parallel::{map, map_mut};
use crate::unconstrained::DoubleGreedyConfig;
use crate::{Element, ElementId, Error, ExecMode, Result};

/// Slack applied before flooring grid logarithms so that thresholds landing
/// exactly on a power of `1 + eps` are not lost to rounding.
const INDEX_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub backbone: IndStreamConfig,
    pub greedy: DoubleGreedyConfig,
    /// Overrides the chain length of every run.
    pub length: Option<usize>,
    /// Grid ratio: thresholds are `(1 + eps)^j`.
    pub eps: f64,
    /// Upper bound on the size of any feasible solution.
    pub k: usize,
    pub exec: ExecMode,
}

impl GridConfig {
    pub fn new(eps: f64, k: usize) -> Self {
        GridConfig {
            backbone: IndStreamConfig::default(),
            greedy: DoubleGreedyConfig::default(),
            length: None,
            eps,
            k,
            exec: ExecMode::default(),
        }
    }

    fn chain(&self) -> ChainConfig {
        ChainConfig {
            backbone: self.backbone,
            greedy: self.greedy,
            length: self.length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::config(format!("eps = {} must be positive", self.eps)));
        }
        if self.k == 0 {
            return Err(Error::config("k must be at least 1"));
        }
        self.backbone.validate()?;
        self.chain().length().map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GridStats {
    /// Most runs alive at once.
    pub max_runs: usize,
    /// Most elements held across all runs at once.
    pub high_water: usize,
    /// Largest high-water mark of any single run's chain.
    pub max_chain_high_water: usize,
    /// Largest high-water mark of any single backbone instance.
    pub max_instance_high_water: usize,
    pub created: usize,
    pub retired: usize,
}

/// Thresholded chains over a lazily maintained geometric grid of densities.
#[derive(Clone)]
pub struct Grid {
    oracle: Arc<dyn ValueOracle>,
    constraint: Arc<dyn IndependenceOracle>,
    knapsacks: KnapsackSpec,
    config: GridConfig,
    /// Runs keyed by grid index, ascending.
    runs: Vec<(i64, Chain)>,
    m: f64,
    e_m: Option<Element>,
    seen: BTreeSet<ElementId>,
    stats: GridStats,
}

impl Grid {
    pub fn new(
        oracle: Arc<dyn ValueOracle>,
        constraint: Arc<dyn IndependenceOracle>,
        knapsacks: KnapsackSpec,
        config: GridConfig,
    ) -> Result<Self> {
        config.validate()?;
        density_floor(1.0, config.backbone.alpha, config.greedy.beta(), knapsacks.d)?;
        let mut grid = Grid {
            oracle,
            constraint,
            knapsacks,
            config,
            runs: Vec::new(),
            m: 0.0,
            e_m: None,
            seen: BTreeSet::new(),
            stats: GridStats::default(),
        };
        if knapsacks.d == 0 {
            // Without knapsacks every density gate passes, so one ungated
            // chain stands in for the whole grid.
            grid.create(0)?;
        }
        Ok(grid)
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn knapsacks(&self) -> KnapsackSpec {
        self.knapsacks
    }

    /// Best feasible singleton value seen so far.
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn e_m(&self) -> Option<&Element> {
        self.e_m.as_ref()
    }

    /// Lower end of the current threshold range, `None` before any feasible
    /// singleton with positive value.
    pub fn gamma(&self) -> Option<f64> {
        if self.m > 0.0 {
            density_floor(self.m, self.config.backbone.alpha, self.config.greedy.beta(), self.knapsacks.d).ok()
        } else {
            None
        }
    }

    pub fn threshold(&self, j: i64) -> f64 {
        (1.0 + self.config.eps).powi(j as i32)
    }

    pub fn active_indices(&self) -> Vec<i64> {
        self.runs.iter().map(|(j, _)| *j).collect()
    }

    pub fn runs(&self) -> impl Iterator<Item = (i64, &Chain)> {
        self.runs.iter().map(|(j, c)| (*j, c))
    }

    pub fn memory(&self) -> usize {
        self.runs.iter().map(|(_, c)| c.memory()).sum()
    }

    pub fn stats(&self) -> GridStats {
        self.stats.clone()
    }

    fn log_index(&self, x: f64) -> i64 {
        (x.ln() / self.config.eps.ln_1p() + INDEX_SLACK).floor() as i64
    }

    fn create(&mut self, j: i64) -> Result<()> {
        let chain = Chain::new(self.oracle.clone(), self.constraint.clone(), self.config.chain())?;
        let pos = self.runs.partition_point(|(i, _)| *i < j);
        self.runs.insert(pos, (j, chain));
        self.stats.created += 1;
        Ok(())
    }

    fn refresh_runs(&mut self) -> Result<()> {
        if self.knapsacks.d == 0 {
            return Ok(());
        }
        let Some(gamma) = self.gamma() else {
            return Ok(());
        };
        let lo = self.log_index(gamma);
        let hi = self.log_index(gamma * self.config.k as f64);
        let before = self.runs.len();
        self.runs.retain(|(j, _)| *j >= lo);
        self.stats.retired += before - self.runs.len();
        for j in lo..=hi {
            if self.runs.binary_search_by_key(&j, |(i, _)| *i).is_err() {
                self.create(j)?;
            }
        }
        Ok(())
    }

    pub fn process(&mut self, e: Element) -> Result<()> {
        self.knapsacks.check(&e)?;
        if !self.seen.insert(e.id) {
            return Err(Error::precondition(format!("element {} was already streamed", e.id)));
        }
        if self.knapsacks.singleton_feasible(&e)? && self.constraint.is_independent(&[&e]) {
            let v = self.oracle.eval(&[&e])?;
            if v > self.m {
                self.m = v;
                self.e_m = Some(e.clone());
            }
        }
        self.refresh_runs()?;

        let ungated = self.knapsacks.d == 0;
        let eps = self.config.eps;
        let knapsacks = self.knapsacks;
        let results = map_mut(self.config.exec, &mut self.runs, |(j, chain)| {
            if ungated {
                chain.process(e.clone(), None)
            } else {
                let rho = (1.0 + eps).powi(*j as i32);
                chain.process(e.clone(), Some((rho, &knapsacks)))
            }
        });
        results.into_iter().collect::<Result<Vec<()>>>()?;

        self.stats.max_runs = self.stats.max_runs.max(self.runs.len());
        self.stats.high_water = self.stats.high_water.max(self.memory());
        for (_, c) in &self.runs {
            let s = c.stats();
            self.stats.max_chain_high_water = self.stats.max_chain_high_water.max(s.high_water);
            self.stats.max_instance_high_water =
                self.stats.max_instance_high_water.max(s.max_instance_high_water());
        }
        Ok(())
    }

    /// Best run result, or the best feasible singleton when it is strictly
    /// better. Ties go to the lowest grid index.
    pub fn finalize(&self) -> Result<Selection> {
        let finals = map(self.config.exec, &self.runs, |(_, c)| c.finalize());
        let mut best: Option<Selection> = None;
        for ((j, _), sel) in self.runs.iter().zip(finals) {
            let mut sel = sel?;
            sel.provenance.run = Some(*j);
            if best.as_ref().is_none_or(|b| sel.value > b.value) {
                best = Some(sel);
            }
        }
        let mut best = match best {
            Some(b) => b,
            None => Selection {
                value: eval_owned(self.oracle.as_ref(), &[])?,
                elements: Vec::new(),
                provenance: Provenance {
                    run: None,
                    instance: None,
                    kind: CandidateKind::Empty,
                },
            },
        };
        if let Some(e) = &self.e_m {
            let single = vec![e.clone()];
            let v = eval_owned(self.oracle.as_ref(), &single)?;
            if v > best.value {
                best = Selection {
                    elements: single,
                    value: v,
                    provenance: Provenance {
                        run: None,
                        instance: None,
                        kind: CandidateKind::MaxSingleton,
                    },
                };
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{UniformMatroid, Unconstrained};
    use crate::objectives::Modular;

    fn priced(id: ElementId, costs: &[f64]) -> Element {
        Element::new(id).with_costs(costs.to_vec())
    }

    fn cfg(eps: f64, k: usize) -> GridConfig {
        GridConfig {
            greedy: DoubleGreedyConfig::randomized(0),
            ..GridConfig::new(eps, k)
        }
    }

    #[test]
    fn first_element_creates_grid() {
        let f = Arc::new(Modular::new([(1, 1.0)]));
        let mut g = Grid::new(f, Arc::new(Unconstrained), KnapsackSpec::new(1), cfg(1.0, 4)).unwrap();
        assert!(g.active_indices().is_empty());
        g.process(priced(1, &[0.5])).unwrap();
        assert_eq!(g.m(), 1.0);
        assert!((g.gamma().unwrap() - 1.0 / 6.0).abs() < 1e-15);
        // γ = 1/6, γk = 2/3 on the base-2 grid
        assert_eq!(g.active_indices(), vec![-3, -2, -1]);
    }

    #[test]
    fn growing_m_retires_low_runs_only() {
        let f = Arc::new(Modular::new([(1, 1.0), (2, 4.0)]));
        let mut g = Grid::new(f, Arc::new(Unconstrained), KnapsackSpec::new(1), cfg(1.0, 4)).unwrap();
        g.process(priced(1, &[0.5])).unwrap();
        g.process(priced(2, &[0.5])).unwrap();
        // γ = 2/3, γk = 8/3
        assert_eq!(g.active_indices(), vec![-1, 0, 1]);
        let s = g.stats();
        assert_eq!((s.created, s.retired), (5, 2));
    }

    #[test]
    fn full_knapsack_singletons() {
        // Each element alone fills the knapsack, so runs overflow after their
        // first acceptance and the best singleton must still come back.
        let f = Arc::new(Modular::new([(1, 1.0), (2, 10.0), (3, 1.0)]));
        let knap = KnapsackSpec::new(1);
        let mut g = Grid::new(f, Arc::new(UniformMatroid::new(2)), knap, cfg(0.5, 2)).unwrap();
        for id in 1..=3 {
            g.process(priced(id, &[1.0])).unwrap();
        }
        let s = g.finalize().unwrap();
        assert_eq!(s.ids(), vec![2]);
        assert_eq!(s.value, 10.0);
        assert_eq!(g.e_m().map(|e| e.id), Some(2));
    }

    #[test]
    fn no_knapsacks_matches_chain() {
        let f = Arc::new(Modular::new((1..=8).map(|i| (i, (i * 7 % 5) as f64 + 0.5))));
        let c = Arc::new(UniformMatroid::new(3));
        let config = cfg(0.2, 3);
        let mut g = Grid::new(f.clone(), c.clone(), KnapsackSpec::new(0), config).unwrap();
        let mut chain = Chain::new(f, c, config.chain()).unwrap();
        for id in 1..=8 {
            g.process(Element::new(id)).unwrap();
            chain.process(Element::new(id), None).unwrap();
        }
        assert_eq!(g.active_indices(), vec![0]);
        assert_eq!(g.finalize().unwrap().ids(), chain.finalize().unwrap().ids());
    }

    #[test]
    fn cost_mismatch_is_domain_error() {
        let f = Arc::new(Modular::new([(1, 1.0)]));
        let mut g = Grid::new(f, Arc::new(Unconstrained), KnapsackSpec::new(2), cfg(0.2, 2)).unwrap();
        assert!(matches!(g.process(priced(1, &[0.5])), Err(Error::Domain(_))));
    }

    #[test]
    fn empty_stream() {
        let f = Arc::new(Modular::new([]));
        let g = Grid::new(f, Arc::new(Unconstrained), KnapsackSpec::new(1), cfg(0.2, 2)).unwrap();
        let s = g.finalize().unwrap();
        assert!(s.elements.is_empty());
        assert_eq!(s.provenance.kind, CandidateKind::Empty);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = Arc::new(Modular::new((1..=30).map(|i| (i, ((i * 13) % 11) as f64 + 1.0))));
        let c = Arc::new(UniformMatroid::new(4));
        let knap = KnapsackSpec::new(2);
        let mut seq = Grid::new(f.clone(), c.clone(), knap, GridConfig { exec: ExecMode::Sequential, ..cfg(0.2, 4) }).unwrap();
        let mut par = Grid::new(f, c, knap, GridConfig { exec: ExecMode::Parallel, ..cfg(0.2, 4) }).unwrap();
        for id in 1..=30u64 {
            let costs = [((id * 7) % 10) as f64 / 20.0, ((id * 3) % 10) as f64 / 20.0];
            seq.process(priced(id, &costs)).unwrap();
            par.process(priced(id, &costs)).unwrap();
        }
        assert_eq!(seq.finalize().unwrap(), par.finalize().unwrap());
        assert_eq!(seq.stats(), par.stats());
    }
}
