use std::collections::{BTreeSet, HashMap};

use super::{unknown, ValueOracle};
use crate::{Element, ElementId, Result};

/// Weighted set coverage: each element covers a set of universe items and
/// `f(S)` is the total weight of items covered by at least one member of `S`.
#[derive(Debug, Clone)]
pub struct Coverage {
    covers: HashMap<ElementId, Vec<usize>>,
    item_weights: Option<Vec<f64>>,
}

impl Coverage {
    /// Unit item weights.
    pub fn new<I, C>(covers: I) -> Self
    where
        I: IntoIterator<Item = (ElementId, C)>,
        C: IntoIterator<Item = usize>,
    {
        Coverage {
            covers: covers
                .into_iter()
                .map(|(id, items)| (id, items.into_iter().collect()))
                .collect(),
            item_weights: None,
        }
    }

    /// Items missing from `weights` count with weight zero.
    pub fn weighted<I, C>(covers: I, weights: Vec<f64>) -> Self
    where
        I: IntoIterator<Item = (ElementId, C)>,
        C: IntoIterator<Item = usize>,
    {
        let mut c = Coverage::new(covers);
        c.item_weights = Some(weights);
        c
    }

    fn item_weight(&self, item: usize) -> f64 {
        match &self.item_weights {
            Some(w) => w.get(item).copied().unwrap_or(0.0),
            None => 1.0,
        }
    }
}

impl ValueOracle for Coverage {
    fn eval(&self, set: &[&Element]) -> Result<f64> {
        let mut covered = BTreeSet::new();
        for e in set {
            let items = self.covers.get(&e.id).ok_or_else(|| unknown(e.id, "coverage"))?;
            covered.extend(items.iter().copied());
        }
        Ok(covered.into_iter().map(|i| self.item_weight(i)).sum())
    }

    fn ground_size_hint(&self) -> Option<usize> {
        Some(self.covers.len())
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::*;
    use crate::Error;

    fn ab() -> (Coverage, Vec<Element>) {
        // A = {1, 2}, B = {2, 3}
        (Coverage::new([(1, vec![1, 2]), (2, vec![2, 3])]), elems(&[1, 2]))
    }

    #[test]
    fn full_coverage_and_empty_set() {
        let (f, g) = ab();
        assert_eq!(eval_ids(&f, &g, &[1, 2]), 3.0);
        assert_eq!(eval_ids(&f, &g, &[]), 0.0);
    }

    #[test]
    fn first_pick_gains_its_size() {
        let (f, g) = ab();
        assert_eq!(f.marginal_gain(&g[0], &[]).unwrap(), 2.0);
    }

    #[test]
    fn unknown_id_is_domain_error() {
        let (f, _) = ab();
        let stray = Element::new(9);
        assert!(matches!(f.eval(&[&stray]), Err(Error::Domain(_))));
    }

    #[test]
    fn weighted_items() {
        let f = Coverage::weighted([(1, vec![0, 1]), (2, vec![1])], vec![0.5, 2.0]);
        let g = elems(&[1, 2]);
        assert_eq!(eval_ids(&f, &g, &[2]), 2.0);
        assert_eq!(eval_ids(&f, &g, &[1, 2]), 2.5);
    }

    #[test]
    fn weighted_sum_is_bitwise_stable() {
        let weights: Vec<f64> = (0..64).map(|i| 0.1 + (i as f64) * 0.013).collect();
        let f = Coverage::weighted((0..8u64).map(|id| (id, (0..64).filter(move |i| i % 8 != id as usize))), weights);
        let g = elems(&(0..8).collect::<Vec<_>>());
        let first = eval_ids(&f, &g, &[0, 3, 5]).to_bits();
        for _ in 0..50 {
            let again = Coverage::weighted(
                (0..8u64).map(|id| (id, (0..64).filter(move |i| i % 8 != id as usize))),
                (0..64).map(|i| 0.1 + (i as f64) * 0.013).collect(),
            );
            assert_eq!(eval_ids(&again, &g, &[0, 3, 5]).to_bits(), first);
        }
    }
}
