use std::collections::HashMap;

use super::{unknown, ValueOracle};
use crate::{Element, ElementId, Result};

/// Additive function `f(S) = Σ w(e)`.
#[derive(Debug, Clone)]
pub struct Modular {
    weights: HashMap<ElementId, f64>,
}

impl Modular {
    pub fn new<I: IntoIterator<Item = (ElementId, f64)>>(weights: I) -> Self {
        Modular {
            weights: weights.into_iter().collect(),
        }
    }

    pub fn weight(&self, id: ElementId) -> Option<f64> {
        self.weights.get(&id).copied()
    }
}

impl ValueOracle for Modular {
    fn eval(&self, set: &[&Element]) -> Result<f64> {
        set.iter()
            .map(|e| self.weight(e.id).ok_or_else(|| unknown(e.id, "modular")))
            .sum()
    }

    fn ground_size_hint(&self) -> Option<usize> {
        Some(self.weights.len())
    }
}
