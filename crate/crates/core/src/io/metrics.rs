use std::collections::BTreeSet;

use crate::{ElementId, Error, Result};

/// Precision, recall and F-score of a selection, averaged over references.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
}

fn against(selected: &BTreeSet<ElementId>, reference: &BTreeSet<ElementId>) -> Metrics {
    let hits = selected.intersection(reference).count() as f64;
    let precision = match (selected.is_empty(), reference.is_empty()) {
        (true, true) => 1.0,
        (true, false) => 0.0,
        _ => hits / selected.len() as f64,
    };
    let recall = if reference.is_empty() {
        1.0
    } else {
        hits / reference.len() as f64
    };
    let f_score = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Metrics {
        precision,
        recall,
        f_score,
    }
}

/// Id-overlap metrics of `selected` against each reference summary, averaged.
pub fn summary_metrics(selected: &[ElementId], references: &[Vec<ElementId>]) -> Result<Metrics> {
    if references.is_empty() {
        return Err(Error::config("summary metrics need at least one reference"));
    }
    let s: BTreeSet<ElementId> = selected.iter().copied().collect();
    let mut total = Metrics::default();
    for r in references {
        let m = against(&s, &r.iter().copied().collect());
        total.precision += m.precision;
        total.recall += m.recall;
        total.f_score += m.f_score;
    }
    let n = references.len() as f64;
    Ok(Metrics {
        precision: total.precision / n,
        recall: total.recall / n,
        f_score: total.f_score / n,
    })
}
