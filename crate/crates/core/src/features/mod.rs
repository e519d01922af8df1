//! Feature-space metrics: PCA compression ratio (FMCR), participation-ratio
//! effective dimension (EDQFS), activation diversity (QLAD) and output
//! sensitivity (QOS), plus measurement-probability feature extraction.

mod matrix;
mod pca;
mod qos;

pub use matrix::{FeatureMatrix, RowSemantics};
pub use pca::{covariance, pca_spectrum, PcaSpectrum};
pub use qos::{qos, ConstantMap, Evaluator, LinearMap, QnnEvaluator, QosConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metric::MetricValue;
use crate::sim::{simulate_statevector, Circuit};

pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 0.95;

/// `d_in / d_eff`, where `d_eff` is the number of leading principal
/// components whose cumulative variance fraction reaches `threshold`.
pub fn fmcr(features: &FeatureMatrix, d_in: usize, threshold: f64) -> Result<f64> {
    if d_in == 0 {
        return Err(Error::invalid("input dimensionality must be at least 1"));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid(format!(
            "variance threshold {threshold} is outside (0, 1]"
        )));
    }
    let spectrum = pca_spectrum(features)?;
    Ok(d_in as f64 / spectrum.components_for(threshold) as f64)
}

/// Participation ratio `(Σλ)² / Σλ²` of the PCA spectrum.
pub fn edqfs(features: &FeatureMatrix) -> Result<f64> {
    Ok(pca_spectrum(features)?.participation_ratio())
}

/// Mean over rows of the population variance of each probability row.
pub fn qlad(features: &FeatureMatrix) -> Result<f64> {
    if features.semantics() != RowSemantics::Probability {
        return Err(Error::invalid(
            "activation diversity needs probability rows",
        ));
    }
    let k = features.dim();
    if k < 2 {
        return Err(Error::invalid("probability rows need at least 2 outcomes"));
    }
    let total: f64 = features
        .data()
        .row_iter()
        .map(|row| {
            let first = row[0];
            if row.iter().all(|&v| v == first) {
                return 0.0;
            }
            let mean = row.sum() / k as f64;
            row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k as f64
        })
        .sum();
    Ok(total / features.n_samples() as f64)
}

/// Measurement probabilities of `feature_map` bound to each input row.
pub fn extract_quantum_features(
    feature_map: &Circuit,
    inputs: &FeatureMatrix,
    execution: Execution,
) -> Result<FeatureMatrix> {
    if feature_map.num_params() != inputs.dim() {
        return Err(Error::invalid(format!(
            "feature map has {} slots but inputs have {} columns",
            feature_map.num_params(),
            inputs.dim()
        )));
    }
    let rows = execution.try_map(inputs.n_samples(), |i| {
        let bound = feature_map.bind(&inputs.row(i))?;
        Ok::<_, Error>(simulate_statevector(&bound)?.probabilities())
    })?;
    FeatureMatrix::from_rows(&rows, RowSemantics::Probability)
}

/// Feature-space block of a metric report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMetricsReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fmcr: Option<MetricValue>,
    pub edqfs: MetricValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qlad: Option<MetricValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qos: Option<MetricValue>,
    pub n_samples: usize,
    pub feature_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_in: Option<usize>,
    pub variance_threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_components: Option<usize>,
    pub eigenvalues: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qos_config: Option<QosConfig>,
}

/// Configuration for [`evaluate_features`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureMetricsConfig {
    pub d_in: Option<usize>,
    pub threshold: f64,
}

impl Default for FeatureMetricsConfig {
    fn default() -> Self {
        FeatureMetricsConfig {
            d_in: None,
            threshold: DEFAULT_VARIANCE_THRESHOLD,
        }
    }
}

/// Computes FMCR (when `d_in` is known), EDQFS and, for probability rows,
/// QLAD. QOS is attached separately with [`FeatureMetricsReport::with_qos`].
///
/// A zero-variance matrix leaves FMCR and EDQFS undefined with a warning;
/// QLAD is still reported since it is well defined there.
pub fn evaluate_features(
    features: &FeatureMatrix,
    cfg: &FeatureMetricsConfig,
) -> Result<(FeatureMetricsReport, Vec<String>)> {
    let mut warnings = Vec::new();
    let qlad_value = match features.semantics() {
        RowSemantics::Probability => Some(qlad(features)?),
        RowSemantics::Generic => None,
    };
    let spectrum = match pca_spectrum(features) {
        Ok(s) => Some(s),
        Err(Error::DegenerateData(msg)) if qlad_value.is_some() => {
            warnings.push(format!("{msg}; FMCR and EDQFS are undefined"));
            None
        }
        Err(e) => return Err(e),
    };
    let (fmcr_value, components) = match (cfg.d_in, &spectrum) {
        (Some(d), Some(s)) => (
            Some(fmcr(features, d, cfg.threshold)?.into()),
            Some(s.components_for(cfg.threshold)),
        ),
        (Some(_), None) => (Some(MetricValue::Undefined), None),
        (None, _) => (None, None),
    };
    let report = FeatureMetricsReport {
        fmcr: fmcr_value,
        edqfs: spectrum
            .as_ref()
            .map_or(MetricValue::Undefined, |s| s.participation_ratio().into()),
        qlad: qlad_value.map(MetricValue::from),
        qos: None,
        n_samples: features.n_samples(),
        feature_dim: features.dim(),
        d_in: cfg.d_in,
        variance_threshold: cfg.threshold,
        effective_components: components,
        eigenvalues: spectrum.map_or_else(Vec::new, |s| {
            s.eigenvalues
                .iter()
                .map(|&l| crate::metric::round_sig6(l))
                .collect()
        }),
        qos_config: None,
    };
    Ok((report, warnings))
}

impl FeatureMetricsReport {
    pub fn with_qos(mut self, value: f64, cfg: QosConfig) -> Self {
        self.qos = Some(value.into());
        self.qos_config = Some(cfg);
        self
    }
}
