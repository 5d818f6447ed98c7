use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::stream::{CostColumns, StreamFormat};
use crate::unconstrained::GreedyMode;
use crate::{Error, ExecMode, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveSpec {
    /// Unit-weight coverage; each line of `file` is `id item item ...`.
    Coverage { file: PathBuf },
    /// Graph cut; each line of `file` is `u v weight`.
    Cut { file: PathBuf },
    /// Shifted log-determinant of a dense kernel file. Without an explicit
    /// offset a heuristic one is derived from the kernel.
    LogDet { kernel: PathBuf, offset: Option<f64> },
    /// Sequential DPP over segments of `segment_size` stream elements.
    SeqDpp { kernel: PathBuf, segment_size: usize },
    /// Facility location on element features, averaged over a reservoir
    /// sample of the stream.
    Decomposable {
        bandwidth: f64,
        sample_size: Option<usize>,
        sample_eps: f64,
        sample_delta: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintSpec {
    None,
    Uniform(usize),
    /// Per-label block limits of one partition matroid.
    Partition(Vec<(String, usize)>),
    /// One rank-limited part per label.
    Matchoid(Vec<(String, usize)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmChoice {
    /// Grid when knapsacks are configured, chain otherwise.
    Auto,
    Chain,
    Grid,
}

/// Settings for `run` and `bench`, read from a flat `key = value` file.
/// Relative paths resolve against the config file's directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub format: Option<StreamFormat>,
    pub objective: Option<ObjectiveSpec>,
    pub constraint: ConstraintSpec,
    pub costs: CostColumns,
    pub algorithm: AlgorithmChoice,
    pub alpha: Option<f64>,
    pub swap_margin: f64,
    pub greedy: GreedyMode,
    pub seed: u64,
    pub eps: f64,
    pub k: Option<usize>,
    pub chain_length: Option<usize>,
    pub exec: ExecMode,
    pub references: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub bench_elements: usize,
    pub bench_lengths: Vec<usize>,
    pub bench_eps: Vec<f64>,
    pub bench_segments: Vec<usize>,
    pub bench_repeats: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            format: None,
            objective: None,
            constraint: ConstraintSpec::None,
            costs: CostColumns::none(),
            algorithm: AlgorithmChoice::Auto,
            alpha: None,
            swap_margin: 1.0,
            greedy: GreedyMode::Deterministic,
            seed: 0,
            eps: 0.2,
            k: None,
            chain_length: None,
            exec: ExecMode::default(),
            references: Vec::new(),
            output: None,
            table: None,
            bench_elements: 2000,
            bench_lengths: vec![2, 3, 5],
            bench_eps: vec![0.5, 0.2, 0.1],
            bench_segments: vec![10, 20, 40],
            bench_repeats: 3,
        }
    }
}

const KEYS: &[&str] = &[
    "input", "format", "objective", "coverage_file", "graph_file", "kernel_file", "offset",
    "segment_size", "bandwidth", "sample_size", "sample_eps", "sample_delta", "constraint", "limit",
    "blocks", "knapsacks", "capacities", "cost_columns", "algorithm", "alpha", "swap_margin",
    "greedy", "seed", "eps", "k", "chain_length", "exec", "references", "output", "table",
    "bench_elements", "bench_lengths", "bench_eps", "bench_segments", "bench_repeats",
];

struct Entries {
    values: BTreeMap<String, (usize, String)>,
    base: PathBuf,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.values.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(line, format!("invalid value {v:?} for {key}"))),
        }
    }

    fn require<T: std::str::FromStr>(&self, key: &str, why: &str) -> Result<T> {
        self.parse(key)?
            .ok_or_else(|| Error::config(format!("{key} is required {why}")))
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::parse(line, format!("invalid entry {s:?} in {key}")))
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(|(_, v)| self.base.join(v))
    }

    fn existing(&self, key: &str, why: &str) -> Result<PathBuf> {
        let p = self.path(key).ok_or_else(|| Error::config(format!("{key} is required {why}")))?;
        check_exists(&p)?;
        Ok(p)
    }

    fn labels(&self, key: &str) -> Result<Vec<(String, usize)>> {
        let (line, v) = self
            .raw(key)
            .ok_or_else(|| Error::config(format!("{key} is required for this constraint")))?;
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|entry| {
                let (label, limit) = entry
                    .split_once(':')
                    .ok_or_else(|| Error::parse(line, format!("expected label:limit, got {entry:?}")))?;
                let limit = limit
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line, format!("invalid limit in {entry:?}")))?;
                Ok((label.trim().to_string(), limit))
            })
            .collect()
    }
}

fn check_exists(p: &Path) -> Result<()> {
    if p.exists() {
        Ok(())
    } else {
        Err(Error::config(format!("file {} does not exist", p.display())))
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::parse(&text, &base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected key = value, got {content:?}")))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::parse(line, format!("unknown key {key:?}")));
            }
            if values.insert(key.to_string(), (line, value.trim().to_string())).is_some() {
                return Err(Error::parse(line, format!("duplicate key {key:?}")));
            }
        }
        let entries = Entries {
            values,
            base: base.to_path_buf(),
        };
        Self::from_entries(&entries)
    }

    fn from_entries(e: &Entries) -> Result<Self> {
        let d = RunConfig::default();
        let input = e.path("input");
        if let Some(p) = &input {
            check_exists(p)?;
        }
        let format = match e.raw("format") {
            Some((line, v)) => Some(StreamFormat::parse(v).map_err(|err| Error::parse(line, err.to_string()))?),
            None => None,
        };

        let objective = match e.raw("objective") {
            None => None,
            Some((line, kind)) => Some(match kind {
                "coverage" => ObjectiveSpec::Coverage {
                    file: e.existing("coverage_file", "for the coverage objective")?,
                },
                "cut" => ObjectiveSpec::Cut {
                    file: e.existing("graph_file", "for the cut objective")?,
                },
                "logdet" => ObjectiveSpec::LogDet {
                    kernel: e.existing("kernel_file", "for the logdet objective")?,
                    offset: e.parse("offset")?,
                },
                "seqdpp" => ObjectiveSpec::SeqDpp {
                    kernel: e.existing("kernel_file", "for the seqdpp objective")?,
                    segment_size: e.require("segment_size", "for the seqdpp objective")?,
                },
                "decomposable" => ObjectiveSpec::Decomposable {
                    bandwidth: e.parse("bandwidth")?.unwrap_or(1.0),
                    sample_size: e.parse("sample_size")?,
                    sample_eps: e.parse("sample_eps")?.unwrap_or(0.5),
                    sample_delta: e.parse("sample_delta")?.unwrap_or(0.1),
                },
                other => return Err(Error::parse(line, format!("unknown objective {other:?}"))),
            }),
        };

        let constraint = match e.raw("constraint") {
            None => ConstraintSpec::None,
            Some((line, kind)) => match kind {
                "none" => ConstraintSpec::None,
                "uniform" => ConstraintSpec::Uniform(e.require("limit", "for a uniform matroid")?),
                "partition" => ConstraintSpec::Partition(e.labels("blocks")?),
                "matchoid" => ConstraintSpec::Matchoid(e.labels("blocks")?),
                other => return Err(Error::parse(line, format!("unknown constraint {other:?}"))),
            },
        };

        let knapsacks: usize = e.parse("knapsacks")?.unwrap_or(0);
        let names: Vec<String> = e.list("cost_columns")?.unwrap_or_else(|| CostColumns::standard(knapsacks).names);
        let capacities: Vec<f64> = e.list("capacities")?.unwrap_or_else(|| vec![1.0; knapsacks]);
        if names.len() != knapsacks || capacities.len() != knapsacks {
            return Err(Error::config(format!(
                "knapsacks = {knapsacks} but {} cost columns and {} capacities",
                names.len(),
                capacities.len()
            )));
        }

        let algorithm = match e.raw("algorithm") {
            None | Some((_, "auto")) => AlgorithmChoice::Auto,
            Some((_, "chain")) => AlgorithmChoice::Chain,
            Some((_, "grid")) => AlgorithmChoice::Grid,
            Some((line, other)) => return Err(Error::parse(line, format!("unknown algorithm {other:?}"))),
        };
        let greedy = match e.raw("greedy") {
            None | Some((_, "deterministic")) => GreedyMode::Deterministic,
            Some((_, "randomized")) => GreedyMode::Randomized,
            Some((line, other)) => return Err(Error::parse(line, format!("unknown greedy mode {other:?}"))),
        };
        let exec = match e.raw("exec") {
            None => ExecMode::default(),
            Some((_, "parallel")) => ExecMode::Parallel,
            Some((_, "sequential")) => ExecMode::Sequential,
            Some((line, other)) => return Err(Error::parse(line, format!("unknown exec mode {other:?}"))),
        };
        let references = match e.raw("references") {
            None => Vec::new(),
            Some((_, v)) => {
                let paths: Vec<PathBuf> = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| e.base.join(s))
                    .collect();
                for p in &paths {
                    check_exists(p)?;
                }
                paths
            }
        };

        Ok(RunConfig {
            input,
            format,
            objective,
            constraint,
            costs: CostColumns { names, capacities },
            algorithm,
            alpha: e.parse("alpha")?,
            swap_margin: e.parse("swap_margin")?.unwrap_or(d.swap_margin),
            greedy,
            seed: e.parse("seed")?.unwrap_or(d.seed),
            eps: e.parse("eps")?.unwrap_or(d.eps),
            k: e.parse("k")?,
            chain_length: e.parse("chain_length")?,
            exec,
            references,
            output: e.path("output"),
            table: e.path("table"),
            bench_elements: e.parse("bench_elements")?.unwrap_or(d.bench_elements),
            bench_lengths: e.list("bench_lengths")?.unwrap_or(d.bench_lengths),
            bench_eps: e.list("bench_eps")?.unwrap_or(d.bench_eps),
            bench_segments: e.list("bench_segments")?.unwrap_or(d.bench_segments),
            bench_repeats: e.parse("bench_repeats")?.unwrap_or(d.bench_repeats),
        })
    }

    pub fn d(&self) -> usize {
        self.costs.d()
    }

    /// Stream format from `format`, else from the input's extension.
    pub fn stream_format(&self) -> Result<StreamFormat> {
        match (self.format, &self.input) {
            (Some(f), _) => Ok(f),
            (None, Some(p)) => StreamFormat::from_path(p),
            (None, None) => Err(Error::config("no input stream configured")),
        }
    }
}
