use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{Context, Result};
use streamsub::constraints::{KnapsackSpec, UniformMatroid};
use streamsub::instances::{random_costs, random_coverage, random_kernel};
use streamsub::io::RunConfig;
use streamsub::localsearch::{ChainConfig, GridConfig};
use streamsub::session::{Algorithm, SegmentDriver, Session, SessionConfig, SessionStats};
use streamsub::{Element, ElementId, ExecMode};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const HEADER: &str = "sweep\tvalue\texec\telements\tmean_update_us\tmax_runs\thigh_water";

/// Largest kernel used by the segment sweep; log-det work grows cubically.
const KERNEL_CAP: usize = 400;

struct Row {
    sweep: &'static str,
    value: String,
    exec: &'static str,
    elements: usize,
    mean_us: f64,
    max_runs: usize,
    high_water: usize,
}

fn exec_name(mode: ExecMode) -> &'static str {
    match mode {
        ExecMode::Sequential => "sequential",
        ExecMode::Parallel => "parallel",
    }
}

/// Mean per-element time over `repeats` passes; counters from the last pass.
fn timed(repeats: usize, mut pass: impl FnMut() -> Result<SessionStats>) -> Result<(f64, SessionStats)> {
    let mut total = 0.0;
    let mut last = SessionStats::default();
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        last = pass()?;
        total += start.elapsed().as_secs_f64() / last.pushed.max(1) as f64;
    }
    Ok((total / repeats.max(1) as f64 * 1e6, last))
}

pub fn run(config: &Path) -> Result<()> {
    let cfg = RunConfig::load(config).with_context(|| format!("reading config {}", config.display()))?;
    let n = cfg.bench_elements.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ids: Vec<ElementId> = (0..n as ElementId).collect();
    let oracle = Arc::new(random_coverage(&mut rng, &ids));
    let limit = 10.min(n);
    let constraint = Arc::new(UniformMatroid::new(limit));
    let plain: Vec<Element> = ids.iter().map(|&id| Element::new(id)).collect();
    let priced: Vec<Element> = ids
        .iter()
        .map(|&id| Element::new(id).with_costs(random_costs(&mut rng, 1)))
        .collect();
    let mut rows = Vec::new();

    for &q in &cfg.bench_lengths {
        let session_cfg = SessionConfig {
            algorithm: Algorithm::Chain(ChainConfig {
                length: Some(q),
                ..ChainConfig::default()
            }),
            knapsacks: KnapsackSpec::new(0),
        };
        let (mean_us, stats) = timed(cfg.bench_repeats, || {
            let mut s = Session::open(oracle.clone(), constraint.clone(), session_cfg)?;
            for e in &plain {
                s.push(e.clone())?;
            }
            Ok(s.stats())
        })?;
        rows.push(Row {
            sweep: "chain_length",
            value: q.to_string(),
            exec: "sequential",
            elements: n,
            mean_us,
            max_runs: 1,
            high_water: stats.high_water,
        });
    }

    for &eps in &cfg.bench_eps {
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            let session_cfg = SessionConfig {
                algorithm: Algorithm::Grid(GridConfig {
                    exec: mode,
                    ..GridConfig::new(eps, limit)
                }),
                knapsacks: KnapsackSpec::new(1),
            };
            let (mean_us, stats) = timed(cfg.bench_repeats, || {
                let mut s = Session::open(oracle.clone(), constraint.clone(), session_cfg)?;
                for e in &priced {
                    s.push(e.clone())?;
                }
                Ok(s.stats())
            })?;
            rows.push(Row {
                sweep: "grid_eps",
                value: eps.to_string(),
                exec: exec_name(mode),
                elements: n,
                mean_us,
                max_runs: stats.grid.map_or(0, |g| g.max_runs),
                high_water: stats.high_water,
            });
        }
    }

    let kn = n.min(KERNEL_CAP);
    let kernel = Arc::new(random_kernel(&mut rng, &ids[..kn], 8)?);
    for &segment in &cfg.bench_segments {
        let session_cfg = SessionConfig {
            algorithm: Algorithm::Chain(ChainConfig::default()),
            knapsacks: KnapsackSpec::new(0),
        };
        let (mean_us, stats) = timed(cfg.bench_repeats, || {
            let mut d = SegmentDriver::new(kernel.clone(), Arc::new(UniformMatroid::new(3)), session_cfg, segment)?;
            for e in &plain[..kn] {
                d.push(e.clone())?;
            }
            Ok(d.close()?.stats)
        })?;
        rows.push(Row {
            sweep: "segment_size",
            value: segment.to_string(),
            exec: "sequential",
            elements: kn,
            mean_us,
            max_runs: 1,
            high_water: stats.high_water,
        });
    }

    println!("{HEADER}");
    for r in rows {
        println!(
            "{}\t{}\t{}\t{}\t{:.3}\t{}\t{}",
            r.sweep, r.value, r.exec, r.elements, r.mean_us, r.max_runs, r.high_water
        );
    }
    Ok(())
}
