use std::sync::Arc;

use super::ValueOracle;
use crate::{Element, Error, Result};

/// Non-negative combination `Σ λ_i f_i` of oracles; submodular whenever
/// every term is.
#[derive(Clone, Default)]
pub struct WeightedSum {
    terms: Vec<(f64, Arc<dyn ValueOracle>)>,
}

impl WeightedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, weight: f64, oracle: Arc<dyn ValueOracle>) -> Result<Self> {
        if !(weight >= 0.0) {
            return Err(Error::config(format!("mixture weight {weight} must be non-negative")));
        }
        self.terms.push((weight, oracle));
        Ok(self)
    }
}

impl ValueOracle for WeightedSum {
    fn eval(&self, set: &[&Element]) -> Result<f64> {
        let mut total = 0.0;
        for (w, f) in &self.terms {
            total += w * f.eval(set)?;
        }
        Ok(total)
    }

    fn ground_size_hint(&self) -> Option<usize> {
        self.terms.iter().filter_map(|(_, f)| f.ground_size_hint()).max()
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::super::{Coverage, GraphCut};
    use super::*;

    #[test]
    fn mixture_adds_terms() {
        let f = WeightedSum::new()
            .term(1.0, Arc::new(Coverage::new([(1, vec![0]), (2, vec![0, 1])])))
            .unwrap()
            .term(0.5, Arc::new(GraphCut::from_edges([(1, 2, 2.0)])))
            .unwrap();
        let g = elems(&[1, 2]);
        assert_eq!(eval_ids(&f, &g, &[1]), 1.0 + 1.0);
        assert_eq!(eval_ids(&f, &g, &[1, 2]), 2.0);
        assert!(WeightedSum::new().term(-1.0, Arc::new(GraphCut::new())).is_err());
    }
}
