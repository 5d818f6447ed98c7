//! Monotone swap-based streaming backbone.
//!
//! Each instance keeps an independent solution `S` and a weight per member
//! (its marginal gain when it was accepted). An arriving element is added
//! outright when `S ∪ {e}` stays independent and its gain is positive.
//! Otherwise, for every matchoid part the element blocks, the cheapest member
//! whose removal repairs that part is selected; the swap happens when the
//! gain of `e` is at least `(1 + swap_margin)` times the total weight of the
//! evicted members. Whatever leaves the instance (the rejected element or the
//! evicted members) is returned to the caller so it can be routed onward.
//!
//! For a p-matchoid with `swap_margin = 1` this backbone is a `1/(4p)`
//! approximation for monotone objectives.

use std::sync::Arc;

use crate::constraints::{Exchange, IndependenceOracle, KnapsackSpec};
use crate::element::refs;
use crate::objectives::ValueOracle;
use crate::{Element, Error, Result, GAIN_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndStreamConfig {
    /// Swap margin `β'`: a swap needs `gain >= (1 + β') * evicted weight`.
    pub swap_margin: f64,
    /// Declared approximation factor of the backbone.
    pub alpha: f64,
}

impl IndStreamConfig {
    /// `1/(4p)` with the default swap margin of 1.
    pub fn for_matchoid(p: usize) -> Self {
        IndStreamConfig {
            swap_margin: 1.0,
            alpha: 1.0 / (4.0 * p.max(1) as f64),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.swap_margin > 0.0) || !self.swap_margin.is_finite() {
            return Err(Error::config(format!("swap margin {} must be positive", self.swap_margin)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config(format!("alpha {} must lie in (0, 1]", self.alpha)));
        }
        Ok(())
    }
}

impl Default for IndStreamConfig {
    fn default() -> Self {
        Self::for_matchoid(1)
    }
}

/// Result of offering one element to an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessOutcome {
    pub accepted: bool,
    /// `{e}` on rejection, the evicted members on a swap, empty otherwise.
    pub discarded: Vec<Element>,
}

/// Recorded when accepting an element would have exceeded a knapsack. The
/// instance stops accepting afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Overflow {
    /// The solution the element would have joined (after any swap-out).
    pub before: Vec<Element>,
    pub last: Element,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InstanceStats {
    pub processed: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub evicted: usize,
    pub high_water: usize,
}

#[derive(Clone)]
pub struct IndStream {
    solution: Vec<Element>,
    weights: Vec<f64>,
    oracle: Arc<dyn ValueOracle>,
    constraint: Arc<dyn IndependenceOracle>,
    config: IndStreamConfig,
    overflow: Option<Overflow>,
    stats: InstanceStats,
}

impl IndStream {
    pub fn new(
        oracle: Arc<dyn ValueOracle>,
        constraint: Arc<dyn IndependenceOracle>,
        config: IndStreamConfig,
    ) -> Result<Self> {
        config.validate()?;
        Ok(IndStream {
            solution: Vec::new(),
            weights: Vec::new(),
            oracle,
            constraint,
            config,
            overflow: None,
            stats: InstanceStats::default(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.config.alpha
    }

    pub fn current_solution(&self) -> &[Element] {
        &self.solution
    }

    /// Acceptance-time weights, aligned with `current_solution`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn overflow_record(&self) -> Option<&Overflow> {
        self.overflow.as_ref()
    }

    pub fn is_frozen(&self) -> bool {
        self.overflow.is_some()
    }

    pub fn stats(&self) -> InstanceStats {
        self.stats
    }

    /// Elements currently held, including an overflow record.
    pub fn memory(&self) -> usize {
        self.solution.len() + self.overflow.as_ref().map_or(0, |o| o.before.len() + 1)
    }

    pub fn process(&mut self, e: Element) -> Result<ProcessOutcome> {
        self.check_new(&e)?;
        if self.is_frozen() {
            return Ok(self.reject(e));
        }
        let gain = self.oracle.marginal_gain(&e, &refs(&self.solution))?;
        match self.decide(&e, gain)? {
            Some(evict) => Ok(self.commit(e, gain, evict)),
            None => Ok(self.reject(e)),
        }
    }

    /// Like [`process`](Self::process), but only considers `e` when its
    /// density `f_S(e) / Σ_j c_j(e)` is at least `rho`. Elements with zero total
    /// cost pass whenever their gain is positive; elements that exceed a
    /// knapsack on their own never pass.
    pub fn process_with_threshold(
        &mut self,
        e: Element,
        rho: f64,
        knapsacks: &KnapsackSpec,
    ) -> Result<ProcessOutcome> {
        self.check_new(&e)?;
        knapsacks.check(&e)?;
        if self.is_frozen() || !knapsacks.singleton_feasible(&e)? {
            return Ok(self.reject(e));
        }
        let gain = self.oracle.marginal_gain(&e, &refs(&self.solution))?;
        let cost = e.total_cost();
        let dense = if cost > 0.0 {
            gain / cost >= rho
        } else {
            gain > GAIN_TOLERANCE
        };
        if !dense {
            return Ok(self.reject(e));
        }
        let Some(evict) = self.decide(&e, gain)? else {
            return Ok(self.reject(e));
        };
        let kept: Vec<&Element> = self
            .solution
            .iter()
            .enumerate()
            .filter(|(i, _)| !evict.contains(i))
            .map(|(_, x)| x)
            .collect();
        let mut after = kept.clone();
        after.push(&e);
        if !knapsacks.feasible(&after)? {
            self.overflow = Some(Overflow {
                before: kept.into_iter().cloned().collect(),
                last: e.clone(),
            });
            let outcome = self.reject(e);
            self.stats.high_water = self.stats.high_water.max(self.memory());
            return Ok(outcome);
        }
        Ok(self.commit(e, gain, evict))
    }

    fn check_new(&self, e: &Element) -> Result<()> {
        if self.solution.iter().any(|x| x.id == e.id) {
            return Err(Error::precondition(format!(
                "element {} is already in this instance's solution",
                e.id
            )));
        }
        Ok(())
    }

    /// Positions to evict when `e` should be accepted, `None` to reject.
    fn decide(&self, e: &Element, gain: f64) -> Result<Option<Vec<usize>>> {
        if !(gain > GAIN_TOLERANCE) {
            return Ok(None);
        }
        let current = refs(&self.solution);
        let parts = match self.constraint.exchange_candidates(&current, e)? {
            Exchange::Free => return Ok(Some(Vec::new())),
            Exchange::Blocked => return Ok(None),
            Exchange::Swap(parts) => parts,
        };
        let mut evict: Vec<usize> = Vec::with_capacity(parts.len());
        for part in parts {
            let cheapest = part
                .iter()
                .filter_map(|id| self.solution.iter().position(|x| x.id == *id))
                .min_by(|&a, &b| self.weights[a].total_cmp(&self.weights[b]).then(a.cmp(&b)));
            match cheapest {
                Some(pos) if !evict.contains(&pos) => evict.push(pos),
                Some(_) => {}
                None => return Ok(None),
            }
        }
        let evicted_weight: f64 = evict.iter().map(|&i| self.weights[i]).sum();
        if gain < (1.0 + self.config.swap_margin) * evicted_weight {
            return Ok(None);
        }
        let mut trial: Vec<&Element> = current
            .iter()
            .enumerate()
            .filter(|(i, _)| !evict.contains(i))
            .map(|(_, x)| *x)
            .collect();
        trial.push(e);
        Ok(self.constraint.is_independent(&trial).then_some(evict))
    }

    fn commit(&mut self, e: Element, gain: f64, mut evict: Vec<usize>) -> ProcessOutcome {
        evict.sort_unstable_by(|a, b| b.cmp(a));
        let mut discarded = Vec::with_capacity(evict.len());
        for pos in evict {
            self.weights.remove(pos);
            discarded.push(self.solution.remove(pos));
        }
        discarded.reverse();
        self.solution.push(e);
        self.weights.push(gain);
        self.stats.processed += 1;
        self.stats.accepted += 1;
        self.stats.evicted += discarded.len();
        self.stats.high_water = self.stats.high_water.max(self.memory());
        ProcessOutcome {
            accepted: true,
            discarded,
        }
    }

    fn reject(&mut self, e: Element) -> ProcessOutcome {
        self.stats.processed += 1;
        self.stats.rejected += 1;
        ProcessOutcome {
            accepted: false,
            discarded: vec![e],
        }
    }
}
