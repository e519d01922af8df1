//! File formats: circuit JSON, CSV/JSON-lines inputs, and metric reports.

mod circuit_json;
mod report;
mod tabular;

pub use circuit_json::{parse_circuit, serialize_circuit};
pub use report::{
    cell, merge_reports, parse_report, render_report, Format, MetricReport, ReportMeta,
    TrainingBlock, TOOL_NAME,
};
pub use tabular::{
    parse_feature_matrix, parse_gradient_log, parse_training_log, serialize_feature_matrix,
    serialize_gradient_log, serialize_training_log, TRAINING_HEADER,
};
