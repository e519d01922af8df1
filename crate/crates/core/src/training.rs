//! Training-dynamics metrics computed from epoch logs: stability (TSI),
//! efficiency (TEI), quantum gradient norm (QGN), barren-plateau indicator
//! (BPI) and the hybrid-vs-classical ratios RQLSI and r-QTEI.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricValue;

pub const DEFAULT_TAIL_FRACTION: f64 = 0.10;
pub const DEFAULT_ACCURACY_THRESHOLD: f64 = 0.90;
const MIN_TRAIN_SPREAD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: u32,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingLog {
    epochs: Vec<EpochRecord>,
    num_params: usize,
}

impl TrainingLog {
    pub fn new(epochs: Vec<EpochRecord>, num_params: usize) -> Result<Self> {
        if epochs.is_empty() {
            return Err(Error::invalid("training log has no epochs"));
        }
        if num_params == 0 {
            return Err(Error::invalid("parameter count must be at least 1"));
        }
        for (i, r) in epochs.iter().enumerate() {
            if r.epoch == 0 {
                return Err(Error::invalid(format!("record {i}: epochs are 1-based")));
            }
            if !(r.train_loss.is_finite() && r.val_loss.is_finite()) {
                return Err(Error::invalid(format!("record {i}: non-finite loss")));
            }
            if !(0.0..=1.0).contains(&r.val_accuracy) {
                return Err(Error::invalid(format!(
                    "record {i}: accuracy {} outside [0, 1]",
                    r.val_accuracy
                )));
            }
        }
        if epochs.windows(2).any(|w| w[1].epoch <= w[0].epoch) {
            return Err(Error::invalid("epochs not strictly increasing"));
        }
        Ok(TrainingLog { epochs, num_params })
    }

    pub fn epochs(&self) -> &[EpochRecord] {
        &self.epochs
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    /// Same records, scaled losses. Used by property tests.
    pub fn map_losses(&self, f: impl Fn(f64) -> f64) -> Result<TrainingLog> {
        let epochs = self
            .epochs
            .iter()
            .map(|r| EpochRecord {
                train_loss: f(r.train_loss),
                val_loss: f(r.val_loss),
                ..*r
            })
            .collect();
        TrainingLog::new(epochs, self.num_params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientEntry {
    pub epoch: u32,
    pub grads: Vec<f64>,
}

/// Flattened quantum-parameter gradients, one entry per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientLog {
    entries: Vec<GradientEntry>,
}

impl GradientLog {
    pub fn new(entries: Vec<GradientEntry>) -> Result<Self> {
        if let Some(i) = entries.iter().position(|e| e.grads.is_empty()) {
            return Err(Error::invalid(format!("gradient entry {i} is empty")));
        }
        if let Some(i) = entries
            .iter()
            .position(|e| e.grads.iter().any(|g| !g.is_finite()))
        {
            return Err(Error::invalid(format!(
                "gradient entry {i} has a non-finite value"
            )));
        }
        if entries.windows(2).any(|w| w[1].epoch < w[0].epoch) {
            return Err(Error::invalid("gradient epochs decrease"));
        }
        Ok(GradientLog { entries })
    }

    pub fn entries(&self) -> &[GradientEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(epoch, ‖g‖₂)` per entry.
    pub fn norm_series(&self) -> Vec<(u32, f64)> {
        self.entries
            .iter()
            .map(|e| (e.epoch, l2(&e.grads)))
            .collect()
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn population_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

/// Tail window length `max(2, ceil(fraction · epochs))`.
pub fn tail_window(total_epochs: usize, tail_fraction: f64) -> usize {
    // shave roundoff so that e.g. 0.1 * 30 gives 3, not 4
    let raw = tail_fraction * total_epochs as f64;
    let w = (raw - raw.abs() * 1e-12).ceil().max(0.0) as usize;
    w.clamp(2, total_epochs.max(2))
}

/// Ratio of validation- to training-loss population standard deviation over
/// the tail window. `None` when the training loss is flat in the tail.
pub fn tsi(log: &TrainingLog, tail_fraction: f64) -> Result<Option<f64>> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "tail fraction {tail_fraction} is outside (0, 1]"
        )));
    }
    if log.len() < 2 {
        return Err(Error::invalid(format!(
            "stability needs a tail of at least 2 epochs, log has {}",
            log.len()
        )));
    }
    let w = tail_window(log.len(), tail_fraction);
    let tail = &log.epochs[log.len() - w..];
    let train: Vec<f64> = tail.iter().map(|r| r.train_loss).collect();
    let val: Vec<f64> = tail.iter().map(|r| r.val_loss).collect();
    let s_train = population_std(&train);
    if s_train < MIN_TRAIN_SPREAD {
        return Ok(None);
    }
    Ok(Some(population_std(&val) / s_train))
}

/// First epoch whose validation accuracy strictly exceeds the threshold.
pub fn crossing_epoch(log: &TrainingLog, acc_threshold: f64) -> Option<u32> {
    log.epochs
        .iter()
        .find(|r| r.val_accuracy > acc_threshold)
        .map(|r| r.epoch)
}

/// Crossing epoch divided by the parameter count; `None` if never crossed.
pub fn tei(log: &TrainingLog, acc_threshold: f64) -> Option<f64> {
    crossing_epoch(log, acc_threshold).map(|e| e as f64 / log.num_params as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpochSelector {
    #[default]
    Last,
    /// The last entry logged for this epoch.
    Epoch(u32),
}

/// L2 norm of the selected gradient entry.
pub fn qgn(grads: &GradientLog, selector: EpochSelector) -> Result<f64> {
    let entry = match selector {
        EpochSelector::Last => grads.entries.last(),
        EpochSelector::Epoch(e) => grads.entries.iter().rev().find(|g| g.epoch == e),
    };
    entry
        .map(|e| l2(&e.grads))
        .ok_or_else(|| Error::invalid(format!("no gradient entry for {selector:?}")))
}

/// Mean over entries of the squared gradient norm.
pub fn bpi(grads: &GradientLog) -> Result<f64> {
    if grads.entries.is_empty() {
        return Err(Error::invalid("gradient log is empty"));
    }
    let total: f64 = grads
        .entries
        .iter()
        .map(|e| e.grads.iter().map(|g| g * g).sum::<f64>())
        .sum();
    Ok(total / grads.entries.len() as f64)
}

/// `TSI_hybrid / TSI_classical`; `None` when either is undefined or the
/// classical value is zero.
pub fn rqlsi(
    hybrid: &TrainingLog,
    classical: &TrainingLog,
    tail_fraction: f64,
) -> Result<Option<f64>> {
    let h = tsi(hybrid, tail_fraction)?;
    let c = tsi(classical, tail_fraction)?;
    Ok(match (h, c) {
        (Some(h), Some(c)) if c > 0.0 => Some(h / c),
        _ => None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelativeEfficiency {
    Ratio(f64),
    HybridUnreached,
    ClassicalUnreached,
    BothUnreached,
}

impl RelativeEfficiency {
    pub fn outcome(self) -> &'static str {
        match self {
            RelativeEfficiency::Ratio(_) => "ratio",
            RelativeEfficiency::HybridUnreached => "hybrid_unreached",
            RelativeEfficiency::ClassicalUnreached => "classical_unreached",
            RelativeEfficiency::BothUnreached => "both_unreached",
        }
    }

    /// Hybrid-only failure is an infinite ratio; a classical failure leaves
    /// the ratio unreached; both failing leaves it undefined.
    pub fn as_metric(self) -> MetricValue {
        match self {
            RelativeEfficiency::Ratio(r) => MetricValue::Value(r),
            RelativeEfficiency::HybridUnreached => MetricValue::Infinite,
            RelativeEfficiency::ClassicalUnreached => MetricValue::Unreached,
            RelativeEfficiency::BothUnreached => MetricValue::Undefined,
        }
    }
}

/// `TEI_hybrid / TEI_classical`, with unreached thresholds as categories.
pub fn rqtei(
    hybrid: &TrainingLog,
    classical: &TrainingLog,
    acc_threshold: f64,
) -> RelativeEfficiency {
    match (tei(hybrid, acc_threshold), tei(classical, acc_threshold)) {
        (Some(h), Some(c)) => RelativeEfficiency::Ratio(h / c),
        (None, Some(_)) => RelativeEfficiency::HybridUnreached,
        (Some(_), None) => RelativeEfficiency::ClassicalUnreached,
        (None, None) => RelativeEfficiency::BothUnreached,
    }
}

/// Per-model training block of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetricsReport {
    pub tsi: MetricValue,
    pub tei: MetricValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossing_epoch: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qgn: Option<MetricValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bpi: Option<MetricValue>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qgn_series: Vec<(u32, f64)>,
    pub epochs: usize,
    pub num_params: usize,
    pub tail_fraction: f64,
    pub tail_window: usize,
    pub accuracy_threshold: f64,
}

/// Relative hybrid-vs-classical block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeMetricsReport {
    pub rqlsi: MetricValue,
    pub rqtei: MetricValue,
    pub rqtei_outcome: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingMetricsConfig {
    pub tail_fraction: f64,
    pub accuracy_threshold: f64,
    pub qgn_epoch: EpochSelector,
}

impl Default for TrainingMetricsConfig {
    fn default() -> Self {
        TrainingMetricsConfig {
            tail_fraction: DEFAULT_TAIL_FRACTION,
            accuracy_threshold: DEFAULT_ACCURACY_THRESHOLD,
            qgn_epoch: EpochSelector::Last,
        }
    }
}

pub fn evaluate_training(
    log: &TrainingLog,
    grads: Option<&GradientLog>,
    cfg: &TrainingMetricsConfig,
) -> Result<TrainingMetricsReport> {
    let (qgn_value, bpi_value, series) = match grads {
        Some(g) => (
            Some(qgn(g, cfg.qgn_epoch)?.into()),
            Some(bpi(g)?.into()),
            g.norm_series()
                .into_iter()
                .map(|(e, n)| (e, crate::metric::round_sig6(n)))
                .collect(),
        ),
        None => (None, None, Vec::new()),
    };
    Ok(TrainingMetricsReport {
        tsi: tsi(log, cfg.tail_fraction)?.into(),
        tei: tei(log, cfg.accuracy_threshold).map_or(MetricValue::Unreached, MetricValue::Value),
        crossing_epoch: crossing_epoch(log, cfg.accuracy_threshold),
        qgn: qgn_value,
        bpi: bpi_value,
        qgn_series: series,
        epochs: log.len(),
        num_params: log.num_params(),
        tail_fraction: cfg.tail_fraction,
        tail_window: tail_window(log.len(), cfg.tail_fraction),
        accuracy_threshold: cfg.accuracy_threshold,
    })
}

pub fn evaluate_relative(
    hybrid: &TrainingLog,
    classical: &TrainingLog,
    cfg: &TrainingMetricsConfig,
) -> Result<RelativeMetricsReport> {
    let eff = rqtei(hybrid, classical, cfg.accuracy_threshold);
    Ok(RelativeMetricsReport {
        rqlsi: rqlsi(hybrid, classical, cfg.tail_fraction)?.into(),
        rqtei: eff.as_metric(),
        rqtei_outcome: eff.outcome().to_string(),
    })
}
