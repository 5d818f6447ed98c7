use std::collections::BTreeSet;
use std::sync::Arc;

use super::{check_exchange_pre, Exchange, IndependenceOracle};
use crate::{Element, ElementId, Result};

/// The ground subset `V_ℓ` a matchoid part acts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundSubset {
    All,
    /// Elements carrying this group label.
    Group(String),
    Ids(BTreeSet<ElementId>),
}

impl GroundSubset {
    pub fn contains(&self, e: &Element) -> bool {
        match self {
            GroundSubset::All => true,
            GroundSubset::Group(label) => e.in_group(label),
            GroundSubset::Ids(ids) => ids.contains(&e.id),
        }
    }
}

/// A collection of matroids over overlapping ground subsets; `S` is
/// independent iff `S ∩ V_ℓ` is independent in every part. When each element
/// lies in at most `p` of the `V_ℓ` this is a p-matchoid.
#[derive(Clone, Default)]
pub struct Matchoid {
    parts: Vec<(Arc<dyn IndependenceOracle>, GroundSubset)>,
}

impl Matchoid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn part(mut self, matroid: Arc<dyn IndependenceOracle>, ground: GroundSubset) -> Self {
        self.parts.push((matroid, ground));
        self
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    /// Sum of the parts' rank hints, if every part has one. Bounds the size
    /// of an independent set whenever the parts cover the ground set.
    pub fn part_rank_sum(&self) -> Option<usize> {
        self.parts.iter().map(|(m, _)| m.rank_hint()).sum()
    }

    fn restrict<'a>(set: &[&'a Element], ground: &GroundSubset) -> Vec<&'a Element> {
        set.iter().copied().filter(|e| ground.contains(e)).collect()
    }
}

impl IndependenceOracle for Matchoid {
    fn is_independent(&self, set: &[&Element]) -> bool {
        self.parts
            .iter()
            .all(|(m, ground)| m.is_independent(&Self::restrict(set, ground)))
    }

    fn rank_hint(&self) -> Option<usize> {
        self.parts
            .iter()
            .filter(|(_, g)| *g == GroundSubset::All)
            .filter_map(|(m, _)| m.rank_hint())
            .min()
    }

    fn exchange_candidates(&self, set: &[&Element], e: &Element) -> Result<Exchange> {
        check_exchange_pre(self, set, e)?;
        let mut blocked = Vec::new();
        for (m, ground) in &self.parts {
            if !ground.contains(e) {
                continue;
            }
            match m.exchange_candidates(&Self::restrict(set, ground), e)? {
                Exchange::Free => {}
                Exchange::Swap(parts) => blocked.extend(parts),
                Exchange::Blocked => return Ok(Exchange::Blocked),
            }
        }
        Ok(if blocked.is_empty() {
            Exchange::Free
        } else {
            Exchange::Swap(blocked)
        })
    }

    fn matchoid_p(&self, ground: &[Element]) -> usize {
        ground
            .iter()
            .map(|e| self.parts.iter().filter(|(_, g)| g.contains(e)).count())
            .max()
            .unwrap_or(0)
    }
}
