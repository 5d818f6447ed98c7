use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

use crate::constraints::KNAPSACK_SLACK;
use crate::{Element, ElementId, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamFormat {
    Csv,
    Jsonl,
}

impl StreamFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(StreamFormat::Csv),
            Some("jsonl") | Some("ndjson") => Ok(StreamFormat::Jsonl),
            _ => Err(Error::config(format!("cannot infer stream format of {}", path.display()))),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "csv" => Ok(StreamFormat::Csv),
            "jsonl" => Ok(StreamFormat::Jsonl),
            other => Err(Error::config(format!("unknown stream format {other:?}"))),
        }
    }
}

/// Cost columns and knapsack capacities. Raw costs are divided by the
/// capacity of their knapsack.
#[derive(Debug, Clone, PartialEq)]
pub struct CostColumns {
    pub names: Vec<String>,
    pub capacities: Vec<f64>,
}

impl CostColumns {
    pub fn none() -> Self {
        CostColumns {
            names: Vec::new(),
            capacities: Vec::new(),
        }
    }

    /// `cost_1..cost_d` with unit capacities.
    pub fn standard(d: usize) -> Self {
        CostColumns {
            names: (1..=d).map(|j| format!("cost_{j}")).collect(),
            capacities: vec![1.0; d],
        }
    }

    pub fn d(&self) -> usize {
        self.names.len()
    }

    fn validate(&self) -> Result<()> {
        if self.names.len() != self.capacities.len() {
            return Err(Error::config(format!(
                "{} cost columns but {} capacities",
                self.names.len(),
                self.capacities.len()
            )));
        }
        if let Some(c) = self.capacities.iter().find(|&&c| !(c > 0.0) || !c.is_finite()) {
            return Err(Error::config(format!("knapsack capacity {c} must be positive")));
        }
        Ok(())
    }
}

pub fn load_stream(path: impl AsRef<Path>, format: StreamFormat, costs: &CostColumns) -> Result<Vec<Element>> {
    let text = std::fs::read_to_string(path)?;
    parse_stream(&text, format, costs)
}

/// Parses a stream, keeping file order. Costs come out normalized.
pub fn parse_stream(text: &str, format: StreamFormat, costs: &CostColumns) -> Result<Vec<Element>> {
    costs.validate()?;
    let rows = match format {
        StreamFormat::Csv => parse_csv(text, costs)?,
        StreamFormat::Jsonl => parse_jsonl(text, costs)?,
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(rows.len());
    for (line, mut e) in rows {
        if !seen.insert(e.id) {
            return Err(Error::parse(line, format!("duplicate id {}", e.id)));
        }
        for (c, cap) in e.costs.iter_mut().zip(&costs.capacities) {
            if !(*c >= 0.0) || !c.is_finite() {
                return Err(Error::parse(line, format!("cost {c} must be finite and non-negative")));
            }
            *c /= cap;
            // Rounding can push an exactly-full singleton just over 1.
            if (*c - 1.0).abs() <= KNAPSACK_SLACK {
                *c = c.min(1.0);
            }
        }
        out.push(e);
    }
    Ok(out)
}

fn parse_id(line: usize, raw: &str) -> Result<ElementId> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(Error::parse(line, "missing id"));
    }
    raw.parse().map_err(|_| Error::parse(line, format!("invalid id {raw:?}")))
}

fn parse_real(line: usize, column: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid number {raw:?} in column {column}")))
}

fn is_feature_column(name: &str) -> bool {
    name.starts_with("feature") || name.starts_with("f_")
}

fn parse_csv(text: &str, costs: &CostColumns) -> Result<Vec<(usize, Element)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = match reader.headers() {
        Ok(h) => h.iter().map(str::to_string).collect(),
        Err(e) => return Err(Error::parse(1, e.to_string())),
    };
    if header.iter().all(|h| h.is_empty()) && text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let id_col = header
        .iter()
        .position(|h| h == "id")
        .ok_or_else(|| Error::parse(1, "missing id column"))?;
    let cost_cols = costs
        .names
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::parse(1, format!("missing cost column {name}")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let feature_cols: Vec<usize> = (0..header.len()).filter(|&i| is_feature_column(&header[i])).collect();
    let group_col = header.iter().position(|h| h == "groups");

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| record.get(i).unwrap_or("");
        let mut e = Element::new(parse_id(line, field(id_col))?);
        let raw_features: Vec<&str> = feature_cols.iter().map(|&i| field(i)).collect();
        if raw_features.iter().any(|f| !f.is_empty()) {
            let features = feature_cols
                .iter()
                .zip(&raw_features)
                .map(|(&i, raw)| parse_real(line, &header[i], raw))
                .collect::<Result<Vec<f64>>>()?;
            e.features = Some(features);
        }
        e.costs = cost_cols
            .iter()
            .map(|&i| parse_real(line, &header[i], field(i)))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(g) = group_col {
            e.groups = field(g)
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
        }
        out.push((line, e));
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRow {
    id: ElementId,
    #[serde(default)]
    features: Option<Vec<f64>>,
    #[serde(default)]
    costs: Vec<f64>,
    #[serde(default)]
    groups: Vec<String>,
}

fn parse_jsonl(text: &str, costs: &CostColumns) -> Result<Vec<(usize, Element)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let row: JsonRow = serde_json::from_str(raw).map_err(|e| Error::parse(line, e.to_string()))?;
        if row.costs.len() != costs.d() {
            return Err(Error::parse(
                line,
                format!("expected {} costs, found {}", costs.d(), row.costs.len()),
            ));
        }
        let mut e = Element::new(row.id).with_costs(row.costs);
        e.features = row.features;
        e.groups = row.groups.into_iter().collect();
        out.push((line, e));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_row_mapping() {
        let text = "id,feature_1,cost_1,groups\n7,,0.3,g1;g2\n";
        let s = parse_stream(text, StreamFormat::Csv, &CostColumns::standard(1)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].id, 7);
        assert_eq!(s[0].costs, vec![0.3]);
        assert_eq!(s[0].features, None);
        assert_eq!(s[0].groups, ["g1", "g2"].iter().map(|g| g.to_string()).collect());
    }

    #[test]
    fn empty_inputs() {
        assert!(parse_stream("", StreamFormat::Csv, &CostColumns::none()).unwrap().is_empty());
        assert!(parse_stream("id,cost_1\n", StreamFormat::Csv, &CostColumns::standard(1)).unwrap().is_empty());
        assert!(parse_stream("", StreamFormat::Jsonl, &CostColumns::none()).unwrap().is_empty());
    }

    #[test]
    fn duplicate_id_reports_line() {
        let text = "id\n1\n2\n1\n";
        match parse_stream(text, StreamFormat::Csv, &CostColumns::none()) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("duplicate"));
            }
            other => panic!("{other:?}"),
        }
        let text = "{\"id\": 1}\n{\"id\": 1}\n";
        assert!(matches!(
            parse_stream(text, StreamFormat::Jsonl, &CostColumns::none()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn missing_and_malformed() {
        let none = CostColumns::none();
        assert!(matches!(parse_stream("x\n1\n", StreamFormat::Csv, &none), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_stream("id,x\n,3\n", StreamFormat::Csv, &none), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_stream("id\nabc\n", StreamFormat::Csv, &none), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_stream("id\n1\n2,3\n", StreamFormat::Csv, &none), Err(Error::Parse { line: 3, .. })));
        let one = CostColumns::standard(1);
        assert!(matches!(parse_stream("id,cost_1\n1,zz\n", StreamFormat::Csv, &one), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_stream("id\n1\n", StreamFormat::Csv, &one), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_stream("{\"id\": 1}\n", StreamFormat::Jsonl, &one), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_stream("{\"id\": 1\n", StreamFormat::Jsonl, &none), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn costs_normalized_by_capacity() {
        let cols = CostColumns {
            names: vec!["w".into(), "t".into()],
            capacities: vec![2.0, 0.5],
        };
        let text = "id,w,t,f_x,f_y\n3,1.0,1.0,0.5,1.5\n";
        let s = parse_stream(text, StreamFormat::Csv, &cols).unwrap();
        assert_eq!(s[0].costs, vec![0.5, 2.0]);
        assert_eq!(s[0].features, Some(vec![0.5, 1.5]));
    }

    #[test]
    fn jsonl_rows_keep_file_order() {
        let text = "{\"id\": 9, \"costs\": [0.5], \"groups\": [\"a\"]}\n\n{\"id\": 2, \"features\": [1.0, 2.0], \"costs\": [0.25]}\n";
        let s = parse_stream(text, StreamFormat::Jsonl, &CostColumns::standard(1)).unwrap();
        assert_eq!(s.iter().map(|e| e.id).collect::<Vec<_>>(), vec![9, 2]);
        assert_eq!(s[1].features, Some(vec![1.0, 2.0]));
        assert!(s[0].in_group("a"));
    }
}
