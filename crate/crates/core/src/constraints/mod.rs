//! Independence systems and knapsack constraints.

mod knapsack;
mod matchoid;
mod partition;
mod uniform;

use std::sync::Arc;

pub use knapsack::{normalize_costs, KnapsackSpec, NormalizedCosts, KNAPSACK_SLACK};
pub use matchoid::{GroundSubset, Matchoid};
pub use partition::PartitionMatroid;
pub use uniform::UniformMatroid;

use crate::{Element, ElementId, Error, Result};

/// Outcome of searching single-element swaps that make `S ∪ {e}` independent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exchange {
    /// `S ∪ {e}` is already independent.
    Free,
    /// One entry per blocked part: the elements of `S` whose removal restores
    /// independence of that part.
    Swap(Vec<Vec<ElementId>>),
    /// Some blocked part cannot be repaired by removing a single element.
    Blocked,
}

/// A hereditary family of feasible sets, queried by membership.
pub trait IndependenceOracle: Send + Sync {
    fn is_independent(&self, set: &[&Element]) -> bool;

    /// Upper bound on the size of any independent set, when known.
    fn rank_hint(&self) -> Option<usize> {
        None
    }

    /// Single-swap repair candidates for adding `e` to the independent set
    /// `set`. The default treats the whole oracle as one part.
    fn exchange_candidates(&self, set: &[&Element], e: &Element) -> Result<Exchange> {
        check_exchange_pre(self, set, e)?;
        Ok(single_part_exchange(|s| self.is_independent(s), set, e))
    }

    /// Largest number of parts any element of `ground` belongs to (1 for a
    /// plain matroid).
    fn matchoid_p(&self, ground: &[Element]) -> usize {
        let _ = ground;
        1
    }
}

impl<T: IndependenceOracle + ?Sized> IndependenceOracle for Arc<T> {
    fn is_independent(&self, set: &[&Element]) -> bool {
        (**self).is_independent(set)
    }

    fn rank_hint(&self) -> Option<usize> {
        (**self).rank_hint()
    }

    fn exchange_candidates(&self, set: &[&Element], e: &Element) -> Result<Exchange> {
        (**self).exchange_candidates(set, e)
    }

    fn matchoid_p(&self, ground: &[Element]) -> usize {
        (**self).matchoid_p(ground)
    }
}

/// Every set is independent.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unconstrained;

impl IndependenceOracle for Unconstrained {
    fn is_independent(&self, _set: &[&Element]) -> bool {
        true
    }
}

pub(crate) fn check_exchange_pre<O: IndependenceOracle + ?Sized>(
    oracle: &O,
    set: &[&Element],
    e: &Element,
) -> Result<()> {
    if set.iter().any(|x| x.id == e.id) {
        return Err(Error::precondition(format!("element {} already in the set", e.id)));
    }
    if !oracle.is_independent(set) {
        return Err(Error::precondition("exchange requested on a dependent set"));
    }
    Ok(())
}

pub(crate) fn single_part_exchange<F>(independent: F, set: &[&Element], e: &Element) -> Exchange
where
    F: Fn(&[&Element]) -> bool,
{
    let mut with: Vec<&Element> = set.to_vec();
    with.push(e);
    if independent(&with) {
        return Exchange::Free;
    }
    let candidates = removal_candidates(&independent, set, e);
    if candidates.is_empty() {
        Exchange::Blocked
    } else {
        Exchange::Swap(vec![candidates])
    }
}

/// Elements `x` of `set` with `(set ∪ {e}) \ {x}` independent.
pub(crate) fn removal_candidates<F>(independent: &F, set: &[&Element], e: &Element) -> Vec<ElementId>
where
    F: Fn(&[&Element]) -> bool,
{
    let mut out = Vec::new();
    let mut trial: Vec<&Element> = Vec::with_capacity(set.len());
    for (i, x) in set.iter().enumerate() {
        trial.clear();
        trial.extend(set.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, y)| *y));
        trial.push(e);
        if independent(&trial) {
            out.push(x.id);
        }
    }
    out
}
