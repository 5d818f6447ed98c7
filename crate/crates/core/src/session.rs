//! Streaming session API: open a session, push elements one at a time, take
//! snapshots at any point, and close it for the final summary and counters.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::constraints::{IndependenceOracle, KnapsackSpec};
use crate::localsearch::{Chain, ChainConfig, ChainStats, Grid, GridConfig, GridStats, Selection};
use crate::objectives::{suggest_offset, DppKernel, NormalizerCache, SequentialDpp, ValueOracle};
use crate::{Element, ElementId, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    /// Chain of backbone instances, independence constraint only.
    Chain(ChainConfig),
    /// Density-threshold grid of chains, for knapsack constraints.
    Grid(GridConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub algorithm: Algorithm,
    pub knapsacks: KnapsackSpec,
}

#[derive(Clone)]
enum Engine {
    Chain(Chain),
    Grid(Box<Grid>),
}

/// Point-in-time view of a session.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub selection: Selection,
    pub pushed: usize,
    /// Elements currently held.
    pub memory: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SessionStats {
    pub pushed: usize,
    pub total_update: Duration,
    pub max_update: Duration,
    pub high_water: usize,
    pub chain: Option<ChainStats>,
    pub grid: Option<GridStats>,
    /// Counters of every live chain, keyed by grid index (none for a plain
    /// chain).
    pub runs: Vec<(Option<i64>, ChainStats)>,
}

impl SessionStats {
    /// Mean wall-clock time per pushed element, in seconds.
    pub fn mean_update_secs(&self) -> f64 {
        if self.pushed == 0 {
            0.0
        } else {
            self.total_update.as_secs_f64() / self.pushed as f64
        }
    }
}

#[derive(Clone)]
pub struct Session {
    engine: Engine,
    stats: SessionStats,
}

impl Session {
    pub fn open(
        oracle: Arc<dyn ValueOracle>,
        constraint: Arc<dyn IndependenceOracle>,
        config: SessionConfig,
    ) -> Result<Self> {
        let engine = match config.algorithm {
            Algorithm::Chain(c) => {
                if config.knapsacks.d > 0 {
                    return Err(Error::config("knapsack constraints need the grid algorithm"));
                }
                Engine::Chain(Chain::new(oracle, constraint, c)?)
            }
            Algorithm::Grid(g) => Engine::Grid(Box::new(Grid::new(oracle, constraint, config.knapsacks, g)?)),
        };
        Ok(Session {
            engine,
            stats: SessionStats::default(),
        })
    }

    pub fn push(&mut self, e: Element) -> Result<()> {
        let start = Instant::now();
        match &mut self.engine {
            Engine::Chain(c) => c.process(e, None)?,
            Engine::Grid(g) => g.process(e)?,
        }
        let took = start.elapsed();
        self.stats.pushed += 1;
        self.stats.total_update += took;
        self.stats.max_update = self.stats.max_update.max(took);
        self.stats.high_water = self.stats.high_water.max(self.memory());
        Ok(())
    }

    pub fn memory(&self) -> usize {
        match &self.engine {
            Engine::Chain(c) => c.memory(),
            Engine::Grid(g) => g.memory(),
        }
    }

    /// Current best selection. Leaves the session untouched.
    pub fn snapshot(&self) -> Result<Snapshot> {
        let selection = match &self.engine {
            Engine::Chain(c) => c.finalize()?,
            Engine::Grid(g) => g.finalize()?,
        };
        Ok(Snapshot {
            selection,
            pushed: self.stats.pushed,
            memory: self.memory(),
        })
    }

    pub fn stats(&self) -> SessionStats {
        let mut stats = self.stats.clone();
        match &self.engine {
            Engine::Chain(c) => {
                stats.chain = Some(c.stats());
                stats.runs = vec![(None, c.stats())];
            }
            Engine::Grid(g) => {
                stats.grid = Some(g.stats());
                stats.runs = g.runs().map(|(j, c)| (Some(j), c.stats())).collect();
            }
        }
        stats
    }

    pub fn close(self) -> Result<(Snapshot, SessionStats)> {
        Ok((self.snapshot()?, self.stats()))
    }
}

/// Drives a sequential DPP: the stream is cut into segments of
/// `segment_size` elements, each segment is summarised by a fresh session
/// whose objective is conditioned on the previous segment's selection. A
/// final partial segment is summarised as-is.
pub struct SegmentDriver {
    kernel: Arc<DppKernel>,
    constraint: Arc<dyn IndependenceOracle>,
    config: SessionConfig,
    segment_size: usize,
    base_offset: f64,
    cache: Arc<NormalizerCache>,
    buffer: Vec<Element>,
    prev: Vec<ElementId>,
    selected: Vec<Element>,
    segments: usize,
    log_probability: f64,
    stats: SessionStats,
}

/// Result of a sequential-DPP pass.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSummary {
    /// Per-segment selections, concatenated in segment order.
    pub selected: Vec<Element>,
    /// Sum over segments of the conditional log-probability of each
    /// selection given the previous one (offsets removed).
    pub log_probability: f64,
    pub segments: usize,
    pub stats: SessionStats,
}

impl SegmentDriver {
    pub fn new(
        kernel: Arc<DppKernel>,
        constraint: Arc<dyn IndependenceOracle>,
        config: SessionConfig,
        segment_size: usize,
    ) -> Result<Self> {
        if segment_size == 0 {
            return Err(Error::config("segment size must be at least 1"));
        }
        let base_offset = suggest_offset(&kernel)?;
        Ok(SegmentDriver {
            kernel,
            constraint,
            config,
            segment_size,
            base_offset,
            cache: Arc::new(NormalizerCache::new()),
            buffer: Vec::new(),
            prev: Vec::new(),
            selected: Vec::new(),
            segments: 0,
            log_probability: 0.0,
            stats: SessionStats::default(),
        })
    }

    pub fn push(&mut self, e: Element) -> Result<()> {
        self.buffer.push(e);
        if self.buffer.len() == self.segment_size {
            self.flush()?;
        }
        Ok(())
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    /// Selections of all completed segments, in segment order.
    pub fn selected(&self) -> &[Element] {
        &self.selected
    }

    fn flush(&mut self) -> Result<()> {
        if self.buffer.is_empty() {
            return Ok(());
        }
        let segment: Vec<ElementId> = self.buffer.iter().map(|e| e.id).collect();
        // Shift by the normalizer so the conditioned objective starts from the
        // same non-negativity margin as the raw kernel.
        let empty = crate::objectives::seqdpp_conditional_value(&self.kernel, &[], &self.prev, &segment, &self.cache)?;
        let offset = (self.base_offset - empty).max(0.0);
        let oracle = SequentialDpp::new(self.kernel.clone(), self.prev.clone(), segment, offset, self.cache.clone())?;
        let mut session = Session::open(Arc::new(oracle), self.constraint.clone(), self.config)?;
        for e in self.buffer.drain(..) {
            session.push(e)?;
        }
        let (snap, stats) = session.close()?;
        self.log_probability += snap.selection.value - offset;
        self.prev = snap.selection.ids();
        self.selected.extend(snap.selection.elements);
        self.segments += 1;
        self.stats.pushed += stats.pushed;
        self.stats.total_update += stats.total_update;
        self.stats.max_update = self.stats.max_update.max(stats.max_update);
        self.stats.high_water = self.stats.high_water.max(stats.high_water + self.prev.len());
        Ok(())
    }

    /// Summarises any partial segment.
    pub fn close(mut self) -> Result<SegmentSummary> {
        self.flush()?;
        Ok(SegmentSummary {
            selected: self.selected,
            log_probability: self.log_probability,
            segments: self.segments,
            stats: self.stats,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::UniformMatroid;
    use crate::instances::{random_instance, ConstraintFamily, ObjectiveFamily};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid_config(k: usize) -> SessionConfig {
        SessionConfig {
            algorithm: Algorithm::Grid(GridConfig::new(0.2, k)),
            knapsacks: KnapsackSpec::new(1),
        }
    }

    #[test]
    fn snapshots_do_not_disturb_the_stream() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = random_instance(&mut rng, 12, ObjectiveFamily::CoverageCut, ConstraintFamily::Partition, 1).unwrap();
        let mut a = Session::open(inst.oracle.clone(), inst.constraint.clone(), grid_config(inst.k)).unwrap();
        let mut b = Session::open(inst.oracle.clone(), inst.constraint.clone(), grid_config(inst.k)).unwrap();
        for e in &inst.ground {
            a.push(e.clone()).unwrap();
            a.snapshot().unwrap();
            b.push(e.clone()).unwrap();
        }
        assert_eq!(a.close().unwrap().0, b.close().unwrap().0);
    }

    #[test]
    fn chain_rejects_knapsacks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = random_instance(&mut rng, 4, ObjectiveFamily::Coverage, ConstraintFamily::Uniform, 1).unwrap();
        let cfg = SessionConfig {
            algorithm: Algorithm::Chain(ChainConfig::default()),
            knapsacks: KnapsackSpec::new(1),
        };
        assert!(matches!(Session::open(inst.oracle, inst.constraint, cfg), Err(Error::Config(_))));
    }

    #[test]
    fn empty_session() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = random_instance(&mut rng, 4, ObjectiveFamily::Coverage, ConstraintFamily::Uniform, 1).unwrap();
        let s = Session::open(inst.oracle, inst.constraint, grid_config(2)).unwrap();
        let (snap, stats) = s.close().unwrap();
        assert!(snap.selection.elements.is_empty());
        assert_eq!(stats.pushed, 0);
    }

    #[test]
    fn segments_condition_on_previous_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ids: Vec<ElementId> = (1..=10).collect();
        let kernel = Arc::new(crate::instances::random_kernel(&mut rng, &ids, 4).unwrap());
        let cfg = SessionConfig {
            algorithm: Algorithm::Chain(ChainConfig::default()),
            knapsacks: KnapsackSpec::new(0),
        };
        let mut driver = SegmentDriver::new(kernel, Arc::new(UniformMatroid::new(2)), cfg, 4).unwrap();
        for &id in &ids {
            driver.push(Element::new(id)).unwrap();
        }
        assert_eq!(driver.segments(), 2);
        let summary = driver.close().unwrap();
        assert_eq!(summary.segments, 3);
        assert_eq!(summary.stats.pushed, 10);
        assert!(summary.log_probability <= 1e-9);
        let selected = summary.selected;
        // segments {1..4}, {5..8}, {9, 10}; at most two picks each
        assert!(selected.len() <= 6);
        let mut seen = std::collections::BTreeSet::new();
        assert!(selected.iter().all(|e| seen.insert(e.id)));
    }
}
