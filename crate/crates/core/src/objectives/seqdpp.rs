use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use super::{DppKernel, ValueOracle};
use crate::{Element, ElementId, Error, Result};

type NormalizerKey = (Vec<ElementId>, Vec<ElementId>);

/// Memo of `ln det(I_t + L_{S_{t-1} ∪ V_t})` keyed by the sorted ids of the
/// previous selection and the segment. Concurrent inserts of the same key
/// write the same value.
#[derive(Debug, Default)]
pub struct NormalizerCache {
    values: RwLock<HashMap<NormalizerKey, f64>>,
    computed: AtomicUsize,
}

impl NormalizerCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of normalizers actually computed (cache misses).
    pub fn computed(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    fn get_or_compute(
        &self,
        kernel: &DppKernel,
        prev: &[ElementId],
        segment: &[ElementId],
    ) -> Result<f64> {
        let mut key = (prev.to_vec(), segment.to_vec());
        key.0.sort_unstable();
        key.1.sort_unstable();
        if let Some(v) = self.values.read().expect("normalizer cache poisoned").get(&key) {
            return Ok(*v);
        }
        let ids: Vec<ElementId> = key.0.iter().chain(key.1.iter()).copied().collect();
        let diag: Vec<f64> = key
            .0
            .iter()
            .map(|_| 0.0)
            .chain(key.1.iter().map(|_| 1.0))
            .collect();
        let value = kernel.log_det_shifted(&ids, &diag)?.value;
        self.computed.fetch_add(1, Ordering::Relaxed);
        self.values
            .write()
            .expect("normalizer cache poisoned")
            .insert(key, value);
        Ok(value)
    }
}

/// Conditional log-probability of selecting `selected` from `segment` given
/// the previous segment's selection `prev`:
///
/// `ln det(L_{S_t ∪ S_{t-1}}) - ln det(I_t + L_{S_{t-1} ∪ V_t})`
///
/// where `I_t` has zeros on `prev` and ones on `segment`.
pub fn seqdpp_conditional_value(
    kernel: &DppKernel,
    selected: &[ElementId],
    prev: &[ElementId],
    segment: &[ElementId],
    cache: &NormalizerCache,
) -> Result<f64> {
    let seg: BTreeSet<ElementId> = segment.iter().copied().collect();
    if let Some(id) = prev.iter().find(|id| seg.contains(id)) {
        return Err(Error::precondition(format!(
            "element {id} is both in the previous selection and the segment"
        )));
    }
    if let Some(id) = selected.iter().find(|id| !seg.contains(id)) {
        return Err(Error::precondition(format!("selected element {id} is outside the segment")));
    }
    let union: Vec<ElementId> = selected.iter().chain(prev.iter()).copied().collect();
    let numerator = kernel.log_det(&union)?.value;
    let normalizer = cache.get_or_compute(kernel, prev, segment)?;
    Ok(numerator - normalizer)
}

/// The sequential-DPP objective over one segment, conditioned on the previous
/// segment's selection, shifted by `offset` for non-negativity.
#[derive(Debug, Clone)]
pub struct SequentialDpp {
    kernel: Arc<DppKernel>,
    prev: Vec<ElementId>,
    segment: Vec<ElementId>,
    members: BTreeSet<ElementId>,
    offset: f64,
    cache: Arc<NormalizerCache>,
}

impl SequentialDpp {
    pub fn new(
        kernel: Arc<DppKernel>,
        prev: Vec<ElementId>,
        segment: Vec<ElementId>,
        offset: f64,
        cache: Arc<NormalizerCache>,
    ) -> Result<Self> {
        let members: BTreeSet<ElementId> = segment.iter().copied().collect();
        if prev.iter().any(|id| members.contains(id)) {
            return Err(Error::precondition("previous selection overlaps the segment"));
        }
        if !(offset >= 0.0) {
            return Err(Error::config("sequential DPP offset must be >= 0"));
        }
        Ok(SequentialDpp {
            kernel,
            prev,
            segment,
            members,
            offset,
            cache,
        })
    }

    pub fn segment(&self) -> &[ElementId] {
        &self.segment
    }
}

impl ValueOracle for SequentialDpp {
    fn eval(&self, set: &[&Element]) -> Result<f64> {
        let ids: Vec<ElementId> = set.iter().map(|e| e.id).collect();
        if let Some(id) = ids.iter().find(|id| !self.members.contains(id)) {
            return Err(Error::domain(format!("element {id} is not in the current segment")));
        }
        let v = seqdpp_conditional_value(&self.kernel, &ids, &self.prev, &self.segment, &self.cache)?;
        Ok(v + self.offset)
    }

    fn ground_size_hint(&self) -> Option<usize> {
        Some(self.segment.len())
    }
}
