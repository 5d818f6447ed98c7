use std::collections::{HashMap, HashSet};

use super::{unknown, ValueOracle};
use crate::{Element, ElementId, Result};

/// Undirected weighted graph cut: `f(S) = Σ w(u, v)` over edges with exactly
/// one endpoint in `S`. Symmetric and non-monotone.
#[derive(Debug, Clone, Default)]
pub struct GraphCut {
    adjacency: HashMap<ElementId, Vec<(ElementId, f64)>>,
}

impl GraphCut {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers an isolated node.
    pub fn add_node(&mut self, id: ElementId) {
        self.adjacency.entry(id).or_default();
    }

    /// Adds an undirected edge; weights must be non-negative.
    pub fn add_edge(&mut self, u: ElementId, v: ElementId, weight: f64) {
        assert!(weight >= 0.0, "cut weights must be non-negative");
        self.adjacency.entry(u).or_default().push((v, weight));
        self.adjacency.entry(v).or_default().push((u, weight));
    }

    pub fn from_edges<I>(edges: I) -> Self
    where
        I: IntoIterator<Item = (ElementId, ElementId, f64)>,
    {
        let mut g = GraphCut::new();
        for (u, v, w) in edges {
            g.add_edge(u, v, w);
        }
        g
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }
}

impl ValueOracle for GraphCut {
    fn eval(&self, set: &[&Element]) -> Result<f64> {
        let members: HashSet<ElementId> = set.iter().map(|e| e.id).collect();
        let mut total = 0.0;
        for e in set {
            let edges = self.adjacency.get(&e.id).ok_or_else(|| unknown(e.id, "cut graph"))?;
            total += edges
                .iter()
                .filter(|(v, _)| !members.contains(v))
                .map(|(_, w)| w)
                .sum::<f64>();
        }
        Ok(total)
    }

    fn ground_size_hint(&self) -> Option<usize> {
        Some(self.adjacency.len())
    }
}
