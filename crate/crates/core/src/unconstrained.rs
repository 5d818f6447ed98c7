//! Unconstrained maximization of a non-negative submodular function by
//! double greedy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::objectives::ValueOracle;
use crate::{Element, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreedyMode {
    /// Keep `e` iff `a >= b`; a 1/3 approximation on every run.
    #[default]
    Deterministic,
    /// Keep `e` with probability `a⁺ / (a⁺ + b⁺)`; 1/2 in expectation.
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DoubleGreedyConfig {
    pub mode: GreedyMode,
    pub seed: u64,
}

impl DoubleGreedyConfig {
    pub fn deterministic() -> Self {
        Self::default()
    }

    pub fn randomized(seed: u64) -> Self {
        DoubleGreedyConfig {
            mode: GreedyMode::Randomized,
            seed,
        }
    }

    /// Declared approximation factor of the configured mode.
    pub fn beta(&self) -> f64 {
        match self.mode {
            GreedyMode::Deterministic => 1.0 / 3.0,
            GreedyMode::Randomized => 0.5,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        DoubleGreedyConfig { seed, ..self }
    }
}

/// Double greedy over `ground` in ascending id order. Issues exactly four
/// oracle evaluations per element.
pub fn unconstrained_max(
    oracle: &dyn ValueOracle,
    ground: &[Element],
    config: &DoubleGreedyConfig,
) -> Result<Vec<Element>> {
    let mut order: Vec<&Element> = ground.iter().collect();
    order.sort_by_key(|e| e.id);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut grow: Vec<&Element> = Vec::with_capacity(order.len());
    let mut shrink: Vec<&Element> = order.clone();
    for e in order {
        let f_grow = oracle.eval(&grow)?;
        grow.push(e);
        let add = oracle.eval(&grow)? - f_grow;
        grow.pop();

        let f_shrink = oracle.eval(&shrink)?;
        let without: Vec<&Element> = shrink.iter().copied().filter(|x| x.id != e.id).collect();
        let remove = oracle.eval(&without)? - f_shrink;

        let keep = match config.mode {
            GreedyMode::Deterministic => add >= remove,
            GreedyMode::Randomized => {
                let (a, b) = (add.max(0.0), remove.max(0.0));
                if a + b > 0.0 {
                    rng.random::<f64>() < a / (a + b)
                } else {
                    add >= remove
                }
            }
        };
        if keep {
            grow.push(e);
        } else {
            shrink = without;
        }
    }
    Ok(grow.into_iter().cloned().collect())
}
