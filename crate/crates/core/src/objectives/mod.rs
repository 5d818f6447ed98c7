//! Value oracles for non-negative submodular set functions.

mod coverage;
mod cut;
mod decomposable;
mod logdet;
mod modular;
mod reservoir;
mod seqdpp;
mod sum;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rand::Rng;

pub use coverage::Coverage;
pub use cut::GraphCut;
pub use decomposable::{
    sample_size_bound, ComponentFamily, DecomposableOracle, FacilityLocation,
};
pub use logdet::{exact_offset, suggest_offset, DppKernel, LogDet, LogDetValue, DET_FLOOR};
pub use modular::Modular;
pub use reservoir::{reservoir_update, Reservoir};
pub use seqdpp::{seqdpp_conditional_value, NormalizerCache, SequentialDpp};
pub use sum::WeightedSum;

use crate::{Element, ElementId, Error, Result};

/// A set function `f: 2^V -> R+` exposed through evaluation queries.
///
/// Implementations are immutable after construction (interior caches aside)
/// and may be queried concurrently.
pub trait ValueOracle: Send + Sync {
    fn eval(&self, set: &[&Element]) -> Result<f64>;

    /// `f(S ∪ {e}) - f(S)`. Negative values are allowed.
    fn marginal_gain(&self, e: &Element, set: &[&Element]) -> Result<f64> {
        if set.iter().any(|x| x.id == e.id) {
            return Err(Error::precondition(format!(
                "element {} is already in the base set",
                e.id
            )));
        }
        let mut with: Vec<&Element> = Vec::with_capacity(set.len() + 1);
        with.extend_from_slice(set);
        with.push(e);
        Ok(self.eval(&with)? - self.eval(set)?)
    }

    fn ground_size_hint(&self) -> Option<usize> {
        None
    }
}

impl<T: ValueOracle + ?Sized> ValueOracle for Arc<T> {
    fn eval(&self, set: &[&Element]) -> Result<f64> {
        (**self).eval(set)
    }

    fn marginal_gain(&self, e: &Element, set: &[&Element]) -> Result<f64> {
        (**self).marginal_gain(e, set)
    }

    fn ground_size_hint(&self) -> Option<usize> {
        (**self).ground_size_hint()
    }
}

impl<T: ValueOracle + ?Sized> ValueOracle for &T {
    fn eval(&self, set: &[&Element]) -> Result<f64> {
        (**self).eval(set)
    }

    fn marginal_gain(&self, e: &Element, set: &[&Element]) -> Result<f64> {
        (**self).marginal_gain(e, set)
    }

    fn ground_size_hint(&self) -> Option<usize> {
        (**self).ground_size_hint()
    }
}

/// Evaluates `oracle` on an owned element slice.
pub fn eval_owned(oracle: &dyn ValueOracle, set: &[Element]) -> Result<f64> {
    let refs: Vec<&Element> = set.iter().collect();
    oracle.eval(&refs)
}

/// Wraps an oracle and counts `eval` calls.
pub struct CountingOracle<O> {
    inner: O,
    evals: AtomicUsize,
}

impl<O: ValueOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        CountingOracle {
            inner,
            evals: AtomicUsize::new(0),
        }
    }

    pub fn evals(&self) -> usize {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.evals.store(0, Ordering::Relaxed);
    }
}

impl<O: ValueOracle> ValueOracle for CountingOracle<O> {
    fn eval(&self, set: &[&Element]) -> Result<f64> {
        self.evals.fetch_add(1, Ordering::Relaxed);
        self.inner.eval(set)
    }

    fn ground_size_hint(&self) -> Option<usize> {
        self.inner.ground_size_hint()
    }
}

/// A violated diminishing-returns triple: `f_S(e) < f_T(e)` with `S ⊆ T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub small: Vec<ElementId>,
    pub large: Vec<ElementId>,
    pub element: ElementId,
    pub gain_small: f64,
    pub gain_large: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityCheck {
    pub holds: bool,
    pub trials: usize,
    pub witness: Option<Counterexample>,
}

/// Spot-checks diminishing returns on random triples `S ⊆ T ⊆ ground`,
/// `e ∉ T`. Stops at the first violation larger than 1e-9.
pub fn check_submodularity<R: Rng + ?Sized>(
    oracle: &dyn ValueOracle,
    ground: &[Element],
    trials: usize,
    rng: &mut R,
) -> Result<SubmodularityCheck> {
    if ground.is_empty() {
        return Err(Error::precondition("submodularity check needs a non-empty ground set"));
    }
    for trial in 0..trials {
        let pick = rng.random_range(0..ground.len());
        let e = &ground[pick];
        let mut small = Vec::new();
        let mut large = Vec::new();
        for (i, x) in ground.iter().enumerate() {
            if i == pick || !rng.random_bool(0.5) {
                continue;
            }
            large.push(x);
            if rng.random_bool(0.5) {
                small.push(x);
            }
        }
        let gain_small = oracle.marginal_gain(e, &small)?;
        let gain_large = oracle.marginal_gain(e, &large)?;
        if gain_small < gain_large - 1e-9 {
            return Ok(SubmodularityCheck {
                holds: false,
                trials: trial + 1,
                witness: Some(Counterexample {
                    small: crate::sorted_ids(small.iter().copied()),
                    large: crate::sorted_ids(large.iter().copied()),
                    element: e.id,
                    gain_small,
                    gain_large,
                }),
            });
        }
    }
    Ok(SubmodularityCheck {
        holds: true,
        trials,
        witness: None,
    })
}

fn unknown(id: ElementId, what: &str) -> Error {
    Error::domain(format!("element {id} is not part of the {what} ground set"))
}
