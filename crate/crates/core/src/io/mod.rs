//! Stream ingestion, run configuration, summary metrics and reports.

mod config;
mod metrics;
mod report;
mod run;
mod stream;

pub use config::{AlgorithmChoice, ConstraintSpec, ObjectiveSpec, RunConfig};
pub use metrics::{summary_metrics, Metrics};
pub use report::{InstanceRow, SummaryReport};
pub use run::{execute, load_references};
pub use stream::{load_stream, parse_stream, CostColumns, StreamFormat};
