use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{AlgorithmChoice, ConstraintSpec, ObjectiveSpec, RunConfig};
use super::metrics::summary_metrics;
use super::report::{InstanceRow, SummaryReport};
use super::stream::load_stream;
use crate::constraints::{GroundSubset, IndependenceOracle, KnapsackSpec, Matchoid, PartitionMatroid, Unconstrained, UniformMatroid};
use crate::indstream::IndStreamConfig;
use crate::localsearch::{ChainConfig, GridConfig};
use crate::objectives::{
    eval_owned, sample_size_bound, suggest_offset, Coverage, DecomposableOracle, DppKernel, FacilityLocation, GraphCut,
    LogDet, Reservoir, ValueOracle,
};
use crate::session::{Algorithm, SegmentDriver, Session, SessionConfig, SessionStats};
use crate::unconstrained::DoubleGreedyConfig;
use crate::{Element, ElementId, Error, Result};

fn lines_of(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| (i, l.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).map(str::to_string).collect()))
        .collect())
}

fn token<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::parse(line, format!("invalid token {tok:?}")))
}

fn load_coverage(path: &Path) -> Result<Coverage> {
    let mut covers = Vec::new();
    for (line, toks) in lines_of(path)? {
        let id: ElementId = token(line, &toks[0])?;
        let items = toks[1..].iter().map(|t| token::<usize>(line, t)).collect::<Result<Vec<_>>>()?;
        covers.push((id, items));
    }
    Ok(Coverage::new(covers))
}

fn load_graph(path: &Path, stream: &[Element]) -> Result<GraphCut> {
    let mut g = GraphCut::new();
    for e in stream {
        g.add_node(e.id);
    }
    for (line, toks) in lines_of(path)? {
        if toks.len() != 3 {
            return Err(Error::parse(line, "expected `u v weight`"));
        }
        let w: f64 = token(line, &toks[2])?;
        if !(w >= 0.0) {
            return Err(Error::parse(line, "edge weights must be non-negative"));
        }
        g.add_edge(token(line, &toks[0])?, token(line, &toks[1])?, w);
    }
    Ok(g)
}

/// Reference summaries: whitespace- or comma-separated ids, one file each.
pub fn load_references(paths: &[impl AsRef<Path>]) -> Result<Vec<Vec<ElementId>>> {
    paths
        .iter()
        .map(|p| {
            let mut ids = Vec::new();
            for (line, toks) in lines_of(p.as_ref())? {
                for t in toks {
                    ids.push(token(line, &t)?);
                }
            }
            Ok(ids)
        })
        .collect()
}

/// Builds the independence oracle and its matchoid parameter.
fn build_constraint(spec: &ConstraintSpec, stream: &[Element]) -> (Arc<dyn IndependenceOracle>, usize) {
    match spec {
        ConstraintSpec::None => (Arc::new(Unconstrained), 1),
        ConstraintSpec::Uniform(l) => (Arc::new(UniformMatroid::new(*l)), 1),
        ConstraintSpec::Partition(blocks) => (Arc::new(PartitionMatroid::new(blocks.clone())), 1),
        ConstraintSpec::Matchoid(parts) => {
            let m = parts.iter().fold(Matchoid::new(), |m, (label, limit)| {
                m.part(Arc::new(UniformMatroid::new(*limit)), GroundSubset::Group(label.clone()))
            });
            let p = m.matchoid_p(stream).max(1);
            (Arc::new(m), p)
        }
    }
}

/// Largest feasible size implied by the constraint, else the stream length.
fn default_k(spec: &ConstraintSpec, stream: &[Element]) -> usize {
    let covered = |labels: &[(String, usize)]| stream.iter().all(|e| labels.iter().any(|(l, _)| e.in_group(l)));
    let k = match spec {
        ConstraintSpec::Uniform(l) => *l,
        ConstraintSpec::Partition(b) | ConstraintSpec::Matchoid(b) if covered(b) => b.iter().map(|(_, l)| l).sum(),
        _ => stream.len(),
    };
    k.clamp(1, stream.len().max(1))
}

fn decomposable(
    stream: &[Element],
    bandwidth: f64,
    sample_size: Option<usize>,
    eps: f64,
    delta: f64,
    k: usize,
    seed: u64,
) -> Result<DecomposableOracle> {
    if stream.is_empty() {
        return Err(Error::config("the decomposable objective needs a non-empty stream"));
    }
    let w = match sample_size {
        Some(w) => w,
        None => sample_size_bound(k, eps, delta, stream.len().max(2))?,
    }
    .clamp(1, stream.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reservoir = Reservoir::new(w);
    for e in stream {
        reservoir.offer(e.clone(), &mut rng);
    }
    // Facility-location components already lie in [0, 1].
    DecomposableOracle::with_scale(Arc::new(FacilityLocation::new(bandwidth)?), reservoir.into_sample(), 1.0)
}

fn instance_rows(run: Option<i64>, stats: &crate::localsearch::ChainStats) -> impl Iterator<Item = InstanceRow> + '_ {
    stats.instances.iter().enumerate().map(move |(i, s)| InstanceRow {
        run,
        instance: i,
        processed: s.processed,
        accepted: s.accepted,
        rejected: s.rejected,
        evicted: s.evicted,
        high_water: s.high_water,
    })
}

/// Streams the configured input through the configured algorithm.
pub fn execute(config: &RunConfig) -> Result<SummaryReport> {
    let input = config.input.as_ref().ok_or_else(|| Error::config("input is required"))?;
    let objective = config.objective.as_ref().ok_or_else(|| Error::config("objective is required"))?;
    let stream = load_stream(input, config.stream_format()?, &config.costs)?;
    let knapsacks = KnapsackSpec::new(config.d());
    let (constraint, p) = build_constraint(&config.constraint, &stream);
    let k = config.k.unwrap_or_else(|| default_k(&config.constraint, &stream));

    let mut backbone = IndStreamConfig::for_matchoid(p);
    backbone.swap_margin = config.swap_margin;
    if let Some(a) = config.alpha {
        backbone.alpha = a;
    }
    let greedy = DoubleGreedyConfig {
        mode: config.greedy,
        seed: config.seed,
    };
    let use_grid = match config.algorithm {
        AlgorithmChoice::Auto => config.d() > 0,
        AlgorithmChoice::Chain => false,
        AlgorithmChoice::Grid => true,
    };
    let algorithm = if use_grid {
        Algorithm::Grid(GridConfig {
            backbone,
            greedy,
            length: config.chain_length,
            eps: config.eps,
            k,
            exec: config.exec,
        })
    } else {
        Algorithm::Chain(ChainConfig {
            backbone,
            greedy,
            length: config.chain_length,
        })
    };
    let session_config = SessionConfig { algorithm, knapsacks };

    let mut report = SummaryReport {
        algorithm: if use_grid { "grid" } else { "chain" }.to_string(),
        elements: stream.len(),
        ..SummaryReport::default()
    };
    let stats: SessionStats;
    if let ObjectiveSpec::SeqDpp { kernel, segment_size } = objective {
        let kernel = Arc::new(DppKernel::load(kernel)?);
        let mut driver = SegmentDriver::new(kernel, constraint, session_config, *segment_size)?;
        for e in stream {
            driver.push(e)?;
        }
        let summary = driver.close()?;
        report.algorithm = format!("seqdpp-{}", report.algorithm);
        report.selected = summary.selected.iter().map(|e| e.id).collect();
        report.value = summary.log_probability;
        stats = summary.stats;
    } else {
        let oracle: Arc<dyn ValueOracle> = match objective {
            ObjectiveSpec::Coverage { file } => Arc::new(load_coverage(file)?),
            ObjectiveSpec::Cut { file } => Arc::new(load_graph(file, &stream)?),
            ObjectiveSpec::LogDet { kernel, offset } => {
                let kernel = DppKernel::load(kernel)?;
                let offset = match offset {
                    Some(o) => *o,
                    None => suggest_offset(&kernel)?,
                };
                Arc::new(LogDet::new(Arc::new(kernel), offset)?)
            }
            ObjectiveSpec::Decomposable {
                bandwidth,
                sample_size,
                sample_eps,
                sample_delta,
            } => Arc::new(decomposable(&stream, *bandwidth, *sample_size, *sample_eps, *sample_delta, k, config.seed)?),
            ObjectiveSpec::SeqDpp { .. } => unreachable!("handled above"),
        };
        let mut session = Session::open(oracle.clone(), constraint, session_config)?;
        for e in stream {
            session.push(e)?;
        }
        let (snap, s) = session.close()?;
        report.selected = snap.selection.ids();
        report.value = eval_owned(oracle.as_ref(), &snap.selection.elements)?;
        stats = s;
    }

    report.mean_update_secs = stats.mean_update_secs();
    report.max_update_secs = stats.max_update.as_secs_f64();
    report.high_water = stats.high_water;
    report.max_runs = match &stats.grid {
        Some(g) => g.max_runs,
        None => usize::from(stats.chain.is_some()),
    };
    report.instances = stats.runs.iter().flat_map(|(run, c)| instance_rows(*run, c)).collect();
    if !config.references.is_empty() {
        let refs = load_references(&config.references)?;
        report.references = refs.len();
        report.metrics = Some(summary_metrics(&report.selected, &refs)?);
    }
    Ok(report)
}
