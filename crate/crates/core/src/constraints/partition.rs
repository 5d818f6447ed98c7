use super::IndependenceOracle;
use crate::Element;

/// Per-block caps `|S ∩ B_i| <= l_i`, where block `B_i` is the set of elements
/// carrying group label `label_i`. Elements outside every block are
/// unconstrained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMatroid {
    blocks: Vec<(String, usize)>,
}

impl PartitionMatroid {
    pub fn new<I, S>(blocks: I) -> Self
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        PartitionMatroid {
            blocks: blocks.into_iter().map(|(l, c)| (l.into(), c)).collect(),
        }
    }

    pub fn blocks(&self) -> &[(String, usize)] {
        &self.blocks
    }

    /// Sum of the block limits.
    pub fn limit_sum(&self) -> usize {
        self.blocks.iter().map(|(_, l)| l).sum()
    }
}

impl IndependenceOracle for PartitionMatroid {
    fn is_independent(&self, set: &[&Element]) -> bool {
        self.blocks
            .iter()
            .all(|(label, limit)| set.iter().filter(|e| e.in_group(label)).count() <= *limit)
    }
}
