use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};

/// Eigenvalues of the sample covariance, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaSpectrum {
    pub eigenvalues: Vec<f64>,
    pub total_variance: f64,
    /// `cumulative_ratio[m]` is the variance fraction of the first `m + 1`
    /// components.
    pub cumulative_ratio: Vec<f64>,
}

/// Sample covariance (column-centred, divisor `n - 1`).
pub fn covariance(features: &FeatureMatrix) -> Result<DMatrix<f64>> {
    let x = features.data();
    let n = x.nrows();
    if n < 2 {
        return Err(Error::invalid(format!(
            "PCA needs at least 2 samples, got {n}"
        )));
    }
    let means = x.row_mean();
    let mut centred = x.clone();
    for mut row in centred.row_iter_mut() {
        row -= &means;
    }
    Ok(centred.transpose() * &centred / (n as f64 - 1.0))
}

/// Eigen-decomposes the sample covariance. Eigenvalues below the numerical
/// rank tolerance `d · ε · λ_max` are set to zero.
pub fn pca_spectrum(features: &FeatureMatrix) -> Result<PcaSpectrum> {
    let cov = covariance(features)?;
    let trace = cov.trace();
    let scale = cov.diagonal().amax();
    if trace <= 0.0 || scale == 0.0 {
        return Err(Error::DegenerateData(
            "feature matrix has zero total variance".to_string(),
        ));
    }
    let mut ev: Vec<f64> = cov.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let cutoff = ev[0].abs() * ev.len() as f64 * f64::EPSILON;
    for l in &mut ev {
        if *l <= cutoff {
            *l = 0.0;
        }
    }
    let total: f64 = ev.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateData(
            "feature matrix has zero total variance".to_string(),
        ));
    }
    let mut acc = 0.0;
    let cumulative_ratio = ev
        .iter()
        .map(|l| {
            acc += l;
            acc / total
        })
        .collect();
    Ok(PcaSpectrum {
        eigenvalues: ev,
        total_variance: total,
        cumulative_ratio,
    })
}

impl PcaSpectrum {
    /// Number of eigenvalues above zero.
    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > 0.0).count()
    }

    /// Smallest number of leading components whose variance fraction reaches
    /// `threshold`.
    pub fn components_for(&self, threshold: f64) -> usize {
        const SLACK: f64 = 1e-12;
        self.cumulative_ratio
            .iter()
            .position(|&r| r >= threshold - SLACK)
            .map_or(self.cumulative_ratio.len(), |i| i + 1)
    }

    /// Participation ratio `(Σλ)² / Σλ²`.
    pub fn participation_ratio(&self) -> f64 {
        let s: f64 = self.eigenvalues.iter().sum();
        let s2: f64 = self.eigenvalues.iter().map(|l| l * l).sum();
        s * s / s2
    }
}
