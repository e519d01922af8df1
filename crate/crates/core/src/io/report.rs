use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::circuit_json::json_error;
use crate::circuit_metrics::CircuitMetricsReport;
use crate::error::{Error, Result};
use crate::features::FeatureMetricsReport;
use crate::metric::MetricValue;
use crate::training::{RelativeMetricsReport, TrainingMetricsReport};

pub const TOOL_NAME: &str = "qmetric";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl ReportMeta {
    pub fn new(seed: u64) -> Self {
        ReportMeta {
            tool: TOOL_NAME.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config: BTreeMap::new(),
            warnings: Vec::new(),
            timestamp: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingBlock {
    pub hybrid: TrainingMetricsReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<TrainingMetricsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative: Option<RelativeMetricsReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricReport {
    pub meta: ReportMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitMetricsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<FeatureMetricsReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training: Option<TrainingBlock>,
}

impl MetricReport {
    pub fn new(meta: ReportMeta) -> Self {
        MetricReport {
            meta,
            circuit: None,
            features: None,
            training: None,
        }
    }

    pub fn has_block(&self) -> bool {
        self.circuit.is_some() || self.features.is_some() || self.training.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::invalid(format!("unknown format '{other}'"))),
        }
    }
}

pub fn parse_report(text: &str) -> Result<MetricReport> {
    let report: MetricReport = serde_json::from_str(text).map_err(json_error)?;
    if !report.has_block() {
        return Err(Error::parse("report", "no metric blocks"));
    }
    Ok(report)
}

/// Combines reports block by block; later reports win on conflicts.
pub fn merge_reports(reports: Vec<MetricReport>) -> Result<MetricReport> {
    let mut iter = reports.into_iter();
    let mut merged = iter
        .next()
        .ok_or_else(|| Error::invalid("nothing to merge"))?;
    for r in iter {
        merged.meta.warnings.extend(r.meta.warnings);
        merged.meta.config.extend(r.meta.config);
        merged.meta.seed = r.meta.seed;
        if r.circuit.is_some() {
            merged.circuit = r.circuit;
        }
        if r.features.is_some() {
            merged.features = r.features;
        }
        if r.training.is_some() {
            merged.training = r.training;
        }
    }
    Ok(merged)
}

pub fn render_report(report: &MetricReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Markdown => render_markdown(report),
    }
}

/// Markdown cell text for a metric value.
pub fn cell(v: &MetricValue) -> String {
    match v {
        MetricValue::Value(x) => format!("{x:.4}"),
        MetricValue::Unreached => "×".to_string(),
        MetricValue::Infinite => "∞".to_string(),
        MetricValue::Undefined => "undefined".to_string(),
    }
}

fn opt_cell(v: Option<&MetricValue>) -> String {
    v.map_or_else(|| "—".to_string(), cell)
}

fn render_markdown(r: &MetricReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Metric report\n");
    if let Some(c) = &r.circuit {
        circuit_table(&mut out, c);
    }
    if let Some(f) = &r.features {
        feature_table(&mut out, f);
    }
    if let Some(t) = &r.training {
        training_table(&mut out, t);
    }
    let _ = writeln!(out, "## Run\n");
    let _ = writeln!(out, "- tool: {} {}", r.meta.tool, r.meta.version);
    let _ = writeln!(out, "- seed: {}", r.meta.seed);
    for (k, v) in &r.meta.config {
        let _ = writeln!(out, "- {k}: {v}");
    }
    if let Some(ts) = &r.meta.timestamp {
        let _ = writeln!(out, "- timestamp: {ts}");
    }
    if !r.meta.warnings.is_empty() {
        let _ = writeln!(out, "\n### Warnings\n");
        for w in &r.meta.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out
}

fn row(out: &mut String, cells: &[&str]) {
    let _ = writeln!(out, "| {} |", cells.join(" | "));
}

fn circuit_table(out: &mut String, c: &CircuitMetricsReport) {
    let _ = writeln!(out, "## Quantum Circuit Metrics\n");
    row(out, &["Metric", "Value", "Interpretation"]);
    row(out, &["---", "---", "---"]);
    let a = c.subsystem_a.len() as f64;
    let b = c.subsystem_b.len() as f64;
    let entries = [
        ("Expressibility (QCE)", &c.qce, gloss::qce(&c.qce)),
        ("Fidelity under noise (QCF)", &c.qcf, gloss::qcf(&c.qcf)),
        ("Locality ratio (QLR)", &c.qlr, gloss::qlr(&c.qlr)),
        ("Entanglement entropy (EEE)", &c.eee, gloss::eee(&c.eee, a)),
        (
            "Mutual information (QMI)",
            &c.qmi,
            gloss::qmi(&c.qmi, a.min(b)),
        ),
    ];
    for (name, v, g) in entries {
        row(out, &[name, &cell(v), &g]);
    }
    if let Some(v) = &c.qvc {
        row(out, &["Volume-style capacity (QVC)", &cell(v), ""]);
    }
    let s = &c.gate_stats;
    let _ = writeln!(
        out,
        "\n{} qubits, {} parameters, {} gates ({} single-qubit, {} two-qubit), depth {}.\n",
        c.num_qubits, c.num_params, s.n_total, s.n_single, s.n_two, s.depth
    );
}

fn feature_table(out: &mut String, f: &FeatureMetricsReport) {
    let _ = writeln!(out, "## Quantum Feature Space Metrics\n");
    row(out, &["Metric", "Value", "Interpretation"]);
    row(out, &["---", "---", "---"]);
    row(
        out,
        &[
            "Compression ratio (FMCR)",
            &opt_cell(f.fmcr.as_ref()),
            &f.fmcr
                .as_ref()
                .map_or_else(String::new, |v| gloss::fmcr(v, f.d_in)),
        ],
    );
    row(
        out,
        &[
            "Effective dimension (EDQFS)",
            &cell(&f.edqfs),
            &gloss::edqfs(&f.edqfs),
        ],
    );
    row(
        out,
        &[
            "Activation diversity (QLAD)",
            &opt_cell(f.qlad.as_ref()),
            &f.qlad.as_ref().map_or_else(String::new, gloss::qlad),
        ],
    );
    row(
        out,
        &[
            "Output sensitivity (QOS)",
            &opt_cell(f.qos.as_ref()),
            &f.qos.as_ref().map_or_else(String::new, gloss::qos),
        ],
    );
    let _ = writeln!(
        out,
        "\n{} samples of dimension {}, variance threshold {}.\n",
        f.n_samples, f.feature_dim, f.variance_threshold
    );
}

fn training_table(out: &mut String, t: &TrainingBlock) {
    let h = &t.hybrid;
    let c = t.classical.as_ref();
    let _ = writeln!(out, "## Training Dynamics Metrics\n");
    row(out, &["Metric", "Hybrid", "Classical", "Interpretation"]);
    row(out, &["---", "---", "---", "---"]);
    row(
        out,
        &[
            "Stability index (TSI)",
            &cell(&h.tsi),
            &opt_cell(c.map(|c| &c.tsi)),
            &gloss::tsi(&h.tsi, c.map(|c| &c.tsi)),
        ],
    );
    row(
        out,
        &[
            "Efficiency index (TEI)",
            &cell(&h.tei),
            &opt_cell(c.map(|c| &c.tei)),
            &gloss::tei(&h.tei, c.map(|c| &c.tei), h.accuracy_threshold),
        ],
    );
    row(
        out,
        &[
            "Gradient norm (QGN)",
            &opt_cell(h.qgn.as_ref()),
            &opt_cell(c.and_then(|c| c.qgn.as_ref())),
            &h.qgn.as_ref().map_or_else(String::new, gloss::qgn),
        ],
    );
    row(
        out,
        &[
            "Plateau indicator (BPI)",
            &opt_cell(h.bpi.as_ref()),
            &opt_cell(c.and_then(|c| c.bpi.as_ref())),
            &h.bpi.as_ref().map_or_else(String::new, gloss::bpi),
        ],
    );
    if let Some(rel) = &t.relative {
        row(
            out,
            &[
                "Relative stability (r-QLSI)",
                &cell(&rel.rqlsi),
                "—",
                &gloss::rqlsi(&rel.rqlsi),
            ],
        );
        row(
            out,
            &[
                "Relative efficiency (r-QTEI)",
                &cell(&rel.rqtei),
                "—",
                &gloss::rqtei(&rel.rqtei),
            ],
        );
    }
    let _ = writeln!(
        out,
        "\n{} epochs, {} trainable parameters, tail window {} epochs, accuracy threshold {}.\n",
        h.epochs, h.num_params, h.tail_window, h.accuracy_threshold
    );
}

mod gloss {
    use crate::metric::MetricValue;

    fn special(v: &MetricValue) -> Option<String> {
        match v {
            MetricValue::Value(_) => None,
            MetricValue::Undefined => Some("not defined for this input".into()),
            MetricValue::Unreached => Some("threshold never reached".into()),
            MetricValue::Infinite => Some("unbounded".into()),
        }
    }

    fn graded(v: &MetricValue, bands: &[(f64, &str)], top: &str) -> String {
        if let Some(s) = special(v) {
            return s;
        }
        let x = v.value().unwrap_or(0.0);
        bands
            .iter()
            .find(|(limit, _)| x < *limit)
            .map_or(top, |(_, label)| label)
            .to_string()
    }

    pub fn qce(v: &MetricValue) -> String {
        graded(
            v,
            &[
                (0.5, "low expressibility"),
                (0.9, "moderate expressibility"),
            ],
            "high expressibility",
        )
    }

    pub fn qcf(v: &MetricValue) -> String {
        graded(
            v,
            &[
                (0.9, "strong noise degradation"),
                (0.999, "mild noise degradation"),
            ],
            "essentially unaffected by noise",
        )
    }

    pub fn qlr(v: &MetricValue) -> String {
        graded(
            v,
            &[
                (0.4, "entangling-heavy"),
                (0.8, "mixed local and entangling gates"),
            ],
            "mostly local gates",
        )
    }

    pub fn eee(v: &MetricValue, max_bits: f64) -> String {
        if let Some(s) = special(v) {
            return s;
        }
        let x = v.value().unwrap_or(0.0) / max_bits.max(1.0);
        if x < 0.05 {
            "negligible entanglement across the cut".into()
        } else if x < 0.5 {
            "partial entanglement across the cut".into()
        } else {
            "strong entanglement across the cut".into()
        }
    }

    pub fn qmi(v: &MetricValue, min_size: f64) -> String {
        if let Some(s) = special(v) {
            return s;
        }
        let x = v.value().unwrap_or(0.0) / (2.0 * min_size.max(1.0));
        if x < 0.05 {
            "negligible correlations".into()
        } else if x < 0.5 {
            "moderate correlations".into()
        } else {
            "strong correlations".into()
        }
    }

    pub fn fmcr(v: &MetricValue, d_in: Option<usize>) -> String {
        if let Some(s) = special(v) {
            return s;
        }
        let x = v.value().unwrap_or(1.0);
        let ratio = if x > 1.0 + 1e-9 {
            "compression"
        } else if x < 1.0 - 1e-9 {
            "expansion"
        } else {
            "no compression"
        };
        match d_in {
            Some(d) => format!(
                "{ratio} of {d} input dimensions to {:.1} effective",
                d as f64 / x
            ),
            None => ratio.to_string(),
        }
    }

    pub fn edqfs(v: &MetricValue) -> String {
        if let Some(s) = special(v) {
            return s;
        }
        let x = v.value().unwrap_or(0.0);
        if x < 1.05 {
            "variance concentrated in one direction".into()
        } else {
            format!("variance spread over about {x:.1} directions")
        }
    }

    pub fn qlad(v: &MetricValue) -> String {
        if v.value() == Some(0.0) {
            return "collapsed outputs".into();
        }
        graded(
            v,
            &[(1e-3, "low activation diversity")],
            "diverse activations",
        )
    }

    pub fn qos(v: &MetricValue) -> String {
        graded(
            v,
            &[
                (1.0, "damps small input perturbations"),
                (5.0, "moderately sensitive"),
            ],
            "highly sensitive",
        )
    }

    pub fn tsi(h: &MetricValue, c: Option<&MetricValue>) -> String {
        match (h.value(), c.and_then(|c| c.value())) {
            (Some(h), Some(c)) if h < c => "hybrid steadier near convergence".into(),
            (Some(h), Some(c)) if h > c => "classical steadier near convergence".into(),
            (Some(_), Some(_)) => "equally steady".into(),
            _ => graded(
                h,
                &[(1.0, "validation steadier than training")],
                "validation fluctuates at least as much as training",
            ),
        }
    }

    pub fn tei(h: &MetricValue, c: Option<&MetricValue>, threshold: f64) -> String {
        let pct = format!("{:.0}%", threshold * 100.0);
        match (h, c) {
            (MetricValue::Unreached, Some(MetricValue::Value(_))) => {
                format!("only the classical model exceeds {pct} accuracy")
            }
            (MetricValue::Value(_), Some(MetricValue::Unreached)) => {
                format!("only the hybrid model exceeds {pct} accuracy")
            }
            (MetricValue::Unreached, _) => format!("never exceeds {pct} accuracy"),
            _ => format!("accuracy above {pct}; higher is faster per parameter"),
        }
    }

    pub fn qgn(v: &MetricValue) -> String {
        graded(
            v,
            &[(1e-3, "vanishing gradients"), (1.0, "moderate gradients")],
            "large gradients",
        )
    }

    pub fn bpi(v: &MetricValue) -> String {
        graded(
            v,
            &[
                (1e-6, "barren plateau likely"),
                (0.1, "small but non-vanishing gradients"),
            ],
            "healthy gradient magnitude",
        )
    }

    pub fn rqlsi(v: &MetricValue) -> String {
        graded(
            v,
            &[(1.0, "hybrid steadier")],
            "classical at least as steady",
        )
    }

    pub fn rqtei(v: &MetricValue) -> String {
        match v {
            MetricValue::Infinite => "classical reaches the threshold, hybrid does not".into(),
            MetricValue::Unreached => "hybrid reaches the threshold, classical does not".into(),
            MetricValue::Undefined => "neither model reaches the threshold".into(),
            MetricValue::Value(x) if *x > 1.0 => "hybrid more efficient per parameter".into(),
            MetricValue::Value(_) => "classical at least as efficient per parameter".into(),
        }
    }
}
