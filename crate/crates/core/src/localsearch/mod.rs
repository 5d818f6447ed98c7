//! Streaming local search: a chain of backbone instances fed by each other's
//! discards (for independence systems), and a lazily instantiated grid of
//! density-thresholded chains (for additional knapsack constraints).

mod bounds;
mod chain;
mod grid;

pub use bounds::{chain_length, density_floor, guarantee_bound};
pub use chain::{Chain, ChainConfig, ChainStats};
pub use grid::{Grid, GridConfig, GridStats};

use crate::Element;

/// Which candidate a returned selection came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateKind {
    /// An instance's streaming solution `S_i`.
    Constrained,
    /// Double greedy applied to `S_i`.
    Pruned,
    /// The solution an instance held when a knapsack overflowed.
    BeforeOverflow,
    /// The element that would have overflowed the knapsack, on its own.
    OverflowElement,
    /// The best feasible singleton seen by a grid.
    MaxSingleton,
    /// Nothing to choose from.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    /// Grid index `j` of the threshold run (`ρ = (1+ε)^j`).
    pub run: Option<i64>,
    pub instance: Option<usize>,
    pub kind: CandidateKind,
}

/// A feasible set returned by a finalize call, with its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub elements: Vec<Element>,
    pub value: f64,
    pub provenance: Provenance,
}

impl Selection {
    pub fn ids(&self) -> Vec<crate::ElementId> {
        crate::sorted_ids(&self.elements)
    }
}
