use crate::{Element, Error, Result};

/// Slack absorbing floating point error in knapsack sums.
pub const KNAPSACK_SLACK: f64 = 1e-12;

/// `d` knapsacks with unit capacity; costs live on the elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KnapsackSpec {
    pub d: usize,
}

impl KnapsackSpec {
    pub fn new(d: usize) -> Self {
        KnapsackSpec { d }
    }

    pub fn check(&self, e: &Element) -> Result<()> {
        if e.costs.len() != self.d {
            return Err(Error::domain(format!(
                "element {} carries {} costs, expected {}",
                e.id,
                e.costs.len(),
                self.d
            )));
        }
        Ok(())
    }

    /// Per-knapsack cost totals of `set`.
    pub fn totals(&self, set: &[&Element]) -> Result<Vec<f64>> {
        let mut totals = vec![0.0; self.d];
        for e in set {
            self.check(e)?;
            for (t, c) in totals.iter_mut().zip(&e.costs) {
                *t += c;
            }
        }
        Ok(totals)
    }

    pub fn feasible(&self, set: &[&Element]) -> Result<bool> {
        Ok(self.totals(set)?.iter().all(|&t| t <= 1.0 + KNAPSACK_SLACK))
    }

    /// Whether `{e}` fits on its own. Elements failing this never enter a
    /// solution.
    pub fn singleton_feasible(&self, e: &Element) -> Result<bool> {
        self.check(e)?;
        Ok(e.costs.iter().all(|&c| c <= 1.0 + KNAPSACK_SLACK))
    }
}

/// Costs divided by knapsack capacity, with elements that no longer fit on
/// their own flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCosts {
    pub costs: Vec<Vec<f64>>,
    pub singleton_infeasible: Vec<bool>,
}

pub fn normalize_costs(raw: &[Vec<f64>], capacities: &[f64]) -> Result<NormalizedCosts> {
    if let Some(c) = capacities.iter().find(|&&c| !(c > 0.0)) {
        return Err(Error::config(format!("knapsack capacity {c} must be positive")));
    }
    let mut costs = Vec::with_capacity(raw.len());
    let mut flags = Vec::with_capacity(raw.len());
    for (row_idx, row) in raw.iter().enumerate() {
        if row.len() != capacities.len() {
            return Err(Error::domain(format!(
                "cost row {row_idx} has {} entries for {} knapsacks",
                row.len(),
                capacities.len()
            )));
        }
        if let Some(c) = row.iter().find(|&&c| !(c >= 0.0)) {
            return Err(Error::domain(format!("negative or invalid cost {c} in row {row_idx}")));
        }
        let scaled: Vec<f64> = row.iter().zip(capacities).map(|(c, cap)| c / cap).collect();
        flags.push(scaled.iter().any(|&c| c > 1.0 + KNAPSACK_SLACK));
        costs.push(scaled);
    }
    Ok(NormalizedCosts {
        costs,
        singleton_infeasible: flags,
    })
}
