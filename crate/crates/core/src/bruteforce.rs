//! Exhaustive optima for small instances, used as ground truth in tests and
//! by the `verify` command.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::constraints::{IndependenceOracle, KnapsackSpec};
use crate::objectives::ValueOracle;
use crate::parallel::map;
use crate::{Element, ElementId, Error, ExecMode, Result};

/// Largest ground set accepted by the exhaustive search.
pub const BRUTE_FORCE_CAP: usize = 20;

/// Masks per parallel work unit.
const CHUNK_BITS: u32 = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub best_set: Vec<Element>,
    pub best_value: f64,
    pub subsets_enumerated: u64,
}

impl BruteForceResult {
    pub fn ids(&self) -> Vec<ElementId> {
        crate::sorted_ids(&self.best_set)
    }
}

struct Candidate {
    value: f64,
    ids: Vec<ElementId>,
    mask: u64,
}

/// Higher value wins, then fewer elements, then lexicographically smaller ids.
fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.value.total_cmp(&b.value) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => (a.ids.len(), &a.ids) < (b.ids.len(), &b.ids),
    }
}

fn check_ground(ground: &[Element]) -> Result<()> {
    if ground.len() > BRUTE_FORCE_CAP {
        return Err(Error::Capacity {
            size: ground.len(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    let mut ids = BTreeSet::new();
    if let Some(dup) = ground.iter().find(|e| !ids.insert(e.id)) {
        return Err(Error::precondition(format!("element {} appears twice in the ground set", dup.id)));
    }
    Ok(())
}

fn members(ground: &[Element], mask: u64) -> Vec<&Element> {
    ground
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e)
        .collect()
}

fn feasible(
    set: &[&Element],
    constraint: Option<&dyn IndependenceOracle>,
    knapsacks: Option<&KnapsackSpec>,
) -> Result<bool> {
    if let Some(k) = knapsacks {
        if !k.feasible(set)? {
            return Ok(false);
        }
    }
    Ok(constraint.is_none_or(|c| c.is_independent(set)))
}

/// Maximizer of `oracle` over every subset of `ground` that is independent
/// and fits the knapsacks. Each subset is evaluated exactly once.
pub fn brute_opt(
    oracle: &dyn ValueOracle,
    ground: &[Element],
    constraint: Option<&dyn IndependenceOracle>,
    knapsacks: Option<&KnapsackSpec>,
) -> Result<BruteForceResult> {
    brute_opt_with(ExecMode::default(), oracle, ground, constraint, knapsacks)
}

pub fn brute_opt_with(
    mode: ExecMode,
    oracle: &dyn ValueOracle,
    ground: &[Element],
    constraint: Option<&dyn IndependenceOracle>,
    knapsacks: Option<&KnapsackSpec>,
) -> Result<BruteForceResult> {
    check_ground(ground)?;
    let total: u64 = 1 << ground.len();
    let chunk = 1u64 << CHUNK_BITS;
    let chunks: Vec<u64> = (0..total.div_ceil(chunk)).collect();

    let scan = |&c: &u64| -> Result<Option<Candidate>> {
        let mut best: Option<Candidate> = None;
        for mask in c * chunk..((c + 1) * chunk).min(total) {
            let set = members(ground, mask);
            if !feasible(&set, constraint, knapsacks)? {
                continue;
            }
            let mut ids: Vec<ElementId> = set.iter().map(|e| e.id).collect();
            ids.sort_unstable();
            let cand = Candidate {
                value: oracle.eval(&set)?,
                ids,
                mask,
            };
            if best.as_ref().is_none_or(|b| better(&cand, b)) {
                best = Some(cand);
            }
        }
        Ok(best)
    };

    let mut best: Option<Candidate> = None;
    for part in map(mode, &chunks, scan) {
        if let Some(cand) = part? {
            if best.as_ref().is_none_or(|b| better(&cand, b)) {
                best = Some(cand);
            }
        }
    }
    let best = best.ok_or_else(|| Error::precondition("the empty set is infeasible"))?;
    Ok(BruteForceResult {
        best_set: members(ground, best.mask).into_iter().cloned().collect(),
        best_value: best.value,
        subsets_enumerated: total,
    })
}

/// Unconstrained maximum over all subsets of `ground`.
pub fn unconstrained_opt(oracle: &dyn ValueOracle, ground: &[Element]) -> Result<BruteForceResult> {
    brute_opt(oracle, ground, None, None)
}

/// Size of the largest feasible subset of `ground`.
pub fn max_feasible_cardinality(
    ground: &[Element],
    constraint: Option<&dyn IndependenceOracle>,
    knapsacks: Option<&KnapsackSpec>,
) -> Result<usize> {
    check_ground(ground)?;
    let mut best = 0;
    for mask in 0..1u64 << ground.len() {
        let size = mask.count_ones() as usize;
        if size > best && feasible(&members(ground, mask), constraint, knapsacks)? {
            best = size;
        }
    }
    Ok(best)
}
