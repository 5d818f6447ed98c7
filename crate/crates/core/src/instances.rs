//! Random small instances for property tests, verification and benchmarks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::constraints::{GroundSubset, IndependenceOracle, KnapsackSpec, Matchoid, PartitionMatroid, UniformMatroid};
use crate::indstream::IndStreamConfig;
use crate::objectives::{exact_offset, Coverage, DppKernel, GraphCut, LogDet, ValueOracle, WeightedSum};
use crate::{Element, ElementId, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveFamily {
    /// Weighted coverage (monotone).
    Coverage,
    /// Convex combination of weighted coverage and a graph cut.
    CoverageCut,
    /// Log-determinant of a random positive definite kernel, shifted to be
    /// non-negative on every subset.
    LogDet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintFamily {
    Uniform,
    Partition,
    /// Two families of group labels, one rank-limited part per label; every
    /// element carries one label of each family.
    Matchoid,
}

/// A generated instance. `ground` is in stream order.
#[derive(Clone)]
pub struct Instance {
    pub label: String,
    pub ground: Vec<Element>,
    pub oracle: Arc<dyn ValueOracle>,
    pub constraint: Arc<dyn IndependenceOracle>,
    pub knapsacks: KnapsackSpec,
    /// Matchoid parameter of the constraint.
    pub p: usize,
    /// Upper bound on the size of any independent set, from the ranks.
    pub k: usize,
}

impl Instance {
    pub fn backbone(&self) -> IndStreamConfig {
        IndStreamConfig::for_matchoid(self.p)
    }

    pub fn alpha(&self) -> f64 {
        self.backbone().alpha
    }
}

pub fn random_coverage<R: Rng + ?Sized>(rng: &mut R, ids: &[ElementId]) -> Coverage {
    let universe = (2 * ids.len()).max(2);
    let covers: Vec<(ElementId, Vec<usize>)> = ids
        .iter()
        .map(|&id| {
            let size = rng.random_range(1..=4);
            (id, (0..size).map(|_| rng.random_range(0..universe)).collect())
        })
        .collect();
    let weights = (0..universe).map(|_| rng.random_range(0.1..1.0)).collect();
    Coverage::weighted(covers, weights)
}

pub fn random_cut<R: Rng + ?Sized>(rng: &mut R, ids: &[ElementId], edge_prob: f64) -> GraphCut {
    let mut g = GraphCut::new();
    for &id in ids {
        g.add_node(id);
    }
    for (i, &u) in ids.iter().enumerate() {
        for &v in &ids[i + 1..] {
            if rng.random_bool(edge_prob) {
                g.add_edge(u, v, rng.random_range(0.1..1.0));
            }
        }
    }
    g
}

pub fn random_coverage_cut<R: Rng + ?Sized>(rng: &mut R, ids: &[ElementId]) -> Result<WeightedSum> {
    let w: f64 = rng.random_range(0.0..1.0);
    WeightedSum::new()
        .term(w, Arc::new(random_coverage(rng, ids)))?
        .term(1.0 - w, Arc::new(random_cut(rng, ids, 0.4)))
}

/// `L = B Bᵀ / r + 0.1 I` with `B` uniform in `[-1, 1]^{n×r}`.
pub fn random_kernel<R: Rng + ?Sized>(rng: &mut R, ids: &[ElementId], rank: usize) -> Result<DppKernel> {
    let n = ids.len();
    let b: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..rank).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let dot: f64 = b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum();
                    dot / rank.max(1) as f64 + if i == j { 0.1 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    DppKernel::with_ids(rows, ids.to_vec())
}

pub fn random_logdet<R: Rng + ?Sized>(rng: &mut R, ids: &[ElementId]) -> Result<LogDet> {
    let kernel = random_kernel(rng, ids, ids.len().max(1))?;
    let offset = exact_offset(&kernel, ids)?;
    LogDet::new(Arc::new(kernel), offset)
}

/// Costs in `[0, 1)` for `d` unit-capacity knapsacks.
pub fn random_costs<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random::<f64>()).collect()
}

/// Builds a constraint over `ground`, assigning group labels as needed.
/// Returns the constraint with its matchoid parameter and rank bound.
pub fn random_constraint<R: Rng + ?Sized>(
    rng: &mut R,
    ground: &mut [Element],
    family: ConstraintFamily,
) -> (Arc<dyn IndependenceOracle>, usize, usize) {
    let n = ground.len();
    match family {
        ConstraintFamily::Uniform => {
            let l = rng.random_range(1..=(n / 2 + 1).max(1));
            (Arc::new(UniformMatroid::new(l)), 1, l.min(n))
        }
        ConstraintFamily::Partition => {
            let blocks = rng.random_range(2..=3usize);
            for e in ground.iter_mut() {
                e.groups.insert(format!("g{}", rng.random_range(0..blocks)));
            }
            let limits: Vec<(String, usize)> =
                (0..blocks).map(|b| (format!("g{b}"), rng.random_range(1..=2))).collect();
            let m = PartitionMatroid::new(limits);
            let k = m.limit_sum().min(n);
            (Arc::new(m), 1, k)
        }
        ConstraintFamily::Matchoid => {
            let (na, nb) = (rng.random_range(2..=3usize), rng.random_range(2..=3usize));
            for e in ground.iter_mut() {
                e.groups.insert(format!("a{}", rng.random_range(0..na)));
                e.groups.insert(format!("b{}", rng.random_range(0..nb)));
            }
            let mut m = Matchoid::new();
            let (mut sum_a, mut sum_b) = (0, 0);
            for (prefix, count, sum) in [("a", na, &mut sum_a), ("b", nb, &mut sum_b)] {
                for i in 0..count {
                    let l = rng.random_range(1..=2);
                    *sum += l;
                    m = m.part(Arc::new(UniformMatroid::new(l)), GroundSubset::Group(format!("{prefix}{i}")));
                }
            }
            (Arc::new(m), 2, sum_a.min(sum_b).min(n))
        }
    }
}

/// A random instance on `n` elements with ids `1..=n` in shuffled stream
/// order, carrying `d` random costs each.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    objective: ObjectiveFamily,
    constraint: ConstraintFamily,
    d: usize,
) -> Result<Instance> {
    let ids: Vec<ElementId> = (1..=n as ElementId).collect();
    let oracle: Arc<dyn ValueOracle> = match objective {
        ObjectiveFamily::Coverage => Arc::new(random_coverage(rng, &ids)),
        ObjectiveFamily::CoverageCut => Arc::new(random_coverage_cut(rng, &ids)?),
        ObjectiveFamily::LogDet => Arc::new(random_logdet(rng, &ids)?),
    };
    let mut ground: Vec<Element> = ids
        .iter()
        .map(|&id| Element::new(id).with_costs(random_costs(rng, d)))
        .collect();
    let (constraint_oracle, p, k) = random_constraint(rng, &mut ground, constraint);
    ground.shuffle(rng);
    Ok(Instance {
        label: format!("{objective:?}/{constraint:?}/n={n}/d={d}"),
        ground,
        oracle,
        constraint: constraint_oracle,
        knapsacks: KnapsackSpec::new(d),
        p,
        k: k.max(1),
    })
}
