use std::collections::BTreeSet;

pub type ElementId = u64;

/// A stream item.
///
/// `costs` holds one normalized cost per configured knapsack (capacity 1), and
/// `groups` carries the labels used by partition matroids and matchoid parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: ElementId,
    pub features: Option<Vec<f64>>,
    pub costs: Vec<f64>,
    pub groups: BTreeSet<String>,
}

impl Element {
    pub fn new(id: ElementId) -> Self {
        Element {
            id,
            features: None,
            costs: Vec::new(),
            groups: BTreeSet::new(),
        }
    }

    pub fn with_costs(mut self, costs: impl Into<Vec<f64>>) -> Self {
        self.costs = costs.into();
        self
    }

    pub fn with_features(mut self, features: impl Into<Vec<f64>>) -> Self {
        self.features = Some(features.into());
        self
    }

    pub fn with_groups<I, S>(mut self, groups: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.groups = groups.into_iter().map(Into::into).collect();
        self
    }

    pub fn in_group(&self, label: &str) -> bool {
        self.groups.contains(label)
    }

    /// Sum of the element's costs over all knapsacks.
    pub fn total_cost(&self) -> f64 {
        self.costs.iter().sum()
    }
}

/// Ids of `set` in ascending order.
pub fn sorted_ids<'a, I>(set: I) -> Vec<ElementId>
where
    I: IntoIterator<Item = &'a Element>,
{
    let mut ids: Vec<ElementId> = set.into_iter().map(|e| e.id).collect();
    ids.sort_unstable();
    ids
}

pub(crate) fn refs(set: &[Element]) -> Vec<&Element> {
    set.iter().collect()
}
