use std::sync::Arc;

use super::{chain_length, CandidateKind, Provenance, Selection};
use crate::constraints::{IndependenceOracle, KnapsackSpec};
use crate::indstream::{IndStream, IndStreamConfig, InstanceStats};
use crate::objectives::{eval_owned, ValueOracle};
use crate::unconstrained::{unconstrained_max, DoubleGreedyConfig};
use crate::{Element, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChainConfig {
    pub backbone: IndStreamConfig,
    pub greedy: DoubleGreedyConfig,
    /// Overrides the derived chain length `⌈√(2β/α) + 1⌉`.
    pub length: Option<usize>,
}

impl ChainConfig {
    pub fn length(&self) -> Result<usize> {
        match self.length {
            Some(0) => Err(Error::config("chain length must be at least 1")),
            Some(q) => Ok(q),
            None => chain_length(self.backbone.alpha, self.greedy.beta()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChainStats {
    /// Elements fed into the first instance.
    pub pushed: usize,
    /// Elements discarded by the last instance.
    pub dropped: usize,
    /// Largest number of elements held across all instances at once.
    pub high_water: usize,
    pub instances: Vec<InstanceStats>,
}

impl ChainStats {
    pub fn max_instance_high_water(&self) -> usize {
        self.instances.iter().map(|s| s.high_water).max().unwrap_or(0)
    }
}

/// `q` backbone instances; whatever instance `i` discards is offered to
/// instance `i + 1`, and the last instance's discards are dropped.
#[derive(Clone)]
pub struct Chain {
    instances: Vec<IndStream>,
    oracle: Arc<dyn ValueOracle>,
    greedy: DoubleGreedyConfig,
    pushed: usize,
    dropped: usize,
    high_water: usize,
}

impl Chain {
    pub fn new(
        oracle: Arc<dyn ValueOracle>,
        constraint: Arc<dyn IndependenceOracle>,
        config: ChainConfig,
    ) -> Result<Self> {
        let q = config.length()?;
        let instances = (0..q)
            .map(|_| IndStream::new(oracle.clone(), constraint.clone(), config.backbone))
            .collect::<Result<Vec<_>>>()?;
        Ok(Chain {
            instances,
            oracle,
            greedy: config.greedy,
            pushed: 0,
            dropped: 0,
            high_water: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instances(&self) -> &[IndStream] {
        &self.instances
    }

    pub fn memory(&self) -> usize {
        self.instances.iter().map(IndStream::memory).sum()
    }

    pub fn stats(&self) -> ChainStats {
        ChainStats {
            pushed: self.pushed,
            dropped: self.dropped,
            high_water: self.high_water,
            instances: self.instances.iter().map(IndStream::stats).collect(),
        }
    }

    /// Routes `e` through the chain. With a `(ρ, knapsacks)` gate every
    /// instance applies the density threshold.
    pub fn process(&mut self, e: Element, gate: Option<(f64, &KnapsackSpec)>) -> Result<()> {
        self.pushed += 1;
        let mut batch = vec![e];
        for inst in &mut self.instances {
            if batch.is_empty() {
                break;
            }
            batch.sort_by_key(|x| x.id);
            let mut next = Vec::new();
            for x in batch {
                let out = match gate {
                    Some((rho, knapsacks)) => inst.process_with_threshold(x, rho, knapsacks)?,
                    None => inst.process(x)?,
                };
                next.extend(out.discarded);
            }
            batch = next;
        }
        self.dropped += batch.len();
        self.high_water = self.high_water.max(self.memory());
        Ok(())
    }

    /// Best of every instance's solution and its double-greedy pruning (plus
    /// the overflow candidates of instances that hit a knapsack). Ties go to
    /// the lower instance, then to the unpruned solution. Does not modify the
    /// chain.
    pub fn finalize(&self) -> Result<Selection> {
        let mut best: Option<Selection> = None;
        let mut offer = |elements: Vec<Element>, instance: usize, kind: CandidateKind| -> Result<()> {
            let value = eval_owned(self.oracle.as_ref(), &elements)?;
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(Selection {
                    elements,
                    value,
                    provenance: Provenance {
                        run: None,
                        instance: Some(instance),
                        kind,
                    },
                });
            }
            Ok(())
        };
        for (i, inst) in self.instances.iter().enumerate() {
            let solution = inst.current_solution().to_vec();
            let greedy = self.greedy.with_seed(self.greedy.seed.wrapping_add(i as u64));
            let pruned = unconstrained_max(self.oracle.as_ref(), &solution, &greedy)?;
            offer(solution, i, CandidateKind::Constrained)?;
            offer(pruned, i, CandidateKind::Pruned)?;
            if let Some(rec) = inst.overflow_record() {
                offer(rec.before.clone(), i, CandidateKind::BeforeOverflow)?;
                offer(vec![rec.last.clone()], i, CandidateKind::OverflowElement)?;
            }
        }
        match best {
            Some(b) => Ok(b),
            None => Ok(Selection {
                value: eval_owned(self.oracle.as_ref(), &[])?,
                elements: Vec::new(),
                provenance: Provenance {
                    run: None,
                    instance: None,
                    kind: CandidateKind::Empty,
                },
            }),
        }
    }
}
