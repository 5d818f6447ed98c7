use std::fmt::Write as _;

use super::metrics::Metrics;
use crate::{ElementId, Error, Result};

/// Counters of one backbone instance. `run` is the grid index, absent for a
/// plain chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceRow {
    pub run: Option<i64>,
    pub instance: usize,
    pub processed: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub evicted: usize,
    pub high_water: usize,
}

const TABLE_HEADER: &str = "run\tinstance\tprocessed\taccepted\trejected\tevicted\thigh_water";

impl InstanceRow {
    fn fields(&self) -> String {
        let run = self.run.map_or("-".to_string(), |r| r.to_string());
        format!(
            "{run}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.instance, self.processed, self.accepted, self.rejected, self.evicted, self.high_water
        )
    }

    fn parse(line: usize, text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 7 {
            return Err(Error::parse(line, format!("expected 7 instance fields, got {}", parts.len())));
        }
        let num = |i: usize| -> Result<usize> {
            parts[i]
                .parse()
                .map_err(|_| Error::parse(line, format!("invalid count {:?}", parts[i])))
        };
        let run = match parts[0] {
            "-" => None,
            r => Some(r.parse().map_err(|_| Error::parse(line, format!("invalid run {r:?}")))?),
        };
        Ok(InstanceRow {
            run,
            instance: num(1)?,
            processed: num(2)?,
            accepted: num(3)?,
            rejected: num(4)?,
            evicted: num(5)?,
            high_water: num(6)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryReport {
    pub algorithm: String,
    pub elements: usize,
    pub selected: Vec<ElementId>,
    pub value: f64,
    pub mean_update_secs: f64,
    pub max_update_secs: f64,
    pub high_water: usize,
    pub max_runs: usize,
    /// Averaged over `references` reference summaries, when any were given.
    pub metrics: Option<Metrics>,
    pub references: usize,
    pub instances: Vec<InstanceRow>,
}

impl SummaryReport {
    /// Line-delimited `key = value` form. Reals use the shortest
    /// representation that reads back to the same bits.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let ids: Vec<String> = self.selected.iter().map(|id| id.to_string()).collect();
        let _ = writeln!(out, "algorithm = {}", self.algorithm);
        let _ = writeln!(out, "elements = {}", self.elements);
        let _ = writeln!(out, "selected = {}", ids.join(","));
        let _ = writeln!(out, "value = {:?}", self.value);
        let _ = writeln!(out, "mean_update_secs = {:?}", self.mean_update_secs);
        let _ = writeln!(out, "max_update_secs = {:?}", self.max_update_secs);
        let _ = writeln!(out, "high_water = {}", self.high_water);
        let _ = writeln!(out, "max_runs = {}", self.max_runs);
        let _ = writeln!(out, "references = {}", self.references);
        if let Some(m) = &self.metrics {
            let _ = writeln!(out, "precision = {:?}", m.precision);
            let _ = writeln!(out, "recall = {:?}", m.recall);
            let _ = writeln!(out, "f_score = {:?}", m.f_score);
        }
        for row in &self.instances {
            let _ = writeln!(out, "instance = {}", row.fields());
        }
        out
    }

    pub fn parse_kv(text: &str) -> Result<Self> {
        let mut r = SummaryReport::default();
        let (mut p, mut rc, mut f) = (None, None, None);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let (key, value) = raw
                .split_once('=')
                .ok_or_else(|| Error::parse(line, "expected key = value"))?;
            let value = value.trim();
            let real = || -> Result<f64> {
                value.parse().map_err(|_| Error::parse(line, format!("invalid real {value:?}")))
            };
            let count = || -> Result<usize> {
                value.parse().map_err(|_| Error::parse(line, format!("invalid count {value:?}")))
            };
            match key.trim() {
                "algorithm" => r.algorithm = value.to_string(),
                "elements" => r.elements = count()?,
                "selected" => {
                    r.selected = value
                        .split(',')
                        .filter(|s| !s.is_empty())
                        .map(|s| s.trim().parse().map_err(|_| Error::parse(line, format!("invalid id {s:?}"))))
                        .collect::<Result<Vec<ElementId>>>()?
                }
                "value" => r.value = real()?,
                "mean_update_secs" => r.mean_update_secs = real()?,
                "max_update_secs" => r.max_update_secs = real()?,
                "high_water" => r.high_water = count()?,
                "max_runs" => r.max_runs = count()?,
                "references" => r.references = count()?,
                "precision" => p = Some(real()?),
                "recall" => rc = Some(real()?),
                "f_score" => f = Some(real()?),
                "instance" => r.instances.push(InstanceRow::parse(line, value)?),
                other => return Err(Error::parse(line, format!("unknown report key {other:?}"))),
            }
        }
        r.metrics = match (p, rc, f) {
            (Some(precision), Some(recall), Some(f_score)) => Some(Metrics {
                precision,
                recall,
                f_score,
            }),
            (None, None, None) => None,
            _ => return Err(Error::parse(0, "incomplete metrics")),
        };
        Ok(r)
    }

    /// Tab-separated per-instance table with a header row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(TABLE_HEADER);
        out.push('\n');
        for row in &self.instances {
            out.push_str(&row.fields());
            out.push('\n');
        }
        out
    }

    pub fn parse_tsv(text: &str) -> Result<Vec<InstanceRow>> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == TABLE_HEADER => {}
            _ => return Err(Error::parse(1, "missing table header")),
        }
        lines
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| InstanceRow::parse(i + 1, l))
            .collect()
    }
}
