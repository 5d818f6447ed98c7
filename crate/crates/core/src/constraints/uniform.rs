use super::IndependenceOracle;
use crate::Element;

/// All sets of size at most `limit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformMatroid {
    pub limit: usize,
}

impl UniformMatroid {
    pub fn new(limit: usize) -> Self {
        UniformMatroid { limit }
    }
}

impl IndependenceOracle for UniformMatroid {
    fn is_independent(&self, set: &[&Element]) -> bool {
        set.len() <= self.limit
    }

    fn rank_hint(&self) -> Option<usize> {
        Some(self.limit)
    }
}
