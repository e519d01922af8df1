use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PROB_ENTRY_TOLERANCE: f64 = -1e-9;
pub const PROB_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowSemantics {
    #[default]
    Generic,
    /// Every row is a probability vector.
    Probability,
}

/// `n_samples × d` real matrix, one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: DMatrix<f64>,
    semantics: RowSemantics,
}

impl FeatureMatrix {
    pub fn new(data: DMatrix<f64>, semantics: RowSemantics) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::invalid("feature matrix is empty"));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("feature matrix contains {v}")));
        }
        if semantics == RowSemantics::Probability {
            for (i, row) in data.row_iter().enumerate() {
                if let Some(v) = row.iter().find(|&&v| v < PROB_ENTRY_TOLERANCE) {
                    return Err(Error::invalid(format!(
                        "row {i} has negative probability {v}"
                    )));
                }
                let s = row.sum();
                if (s - 1.0).abs() > PROB_SUM_TOLERANCE {
                    return Err(Error::invalid(format!("row {i} sums to {s}, not 1")));
                }
            }
        }
        Ok(FeatureMatrix { data, semantics })
    }

    /// Builds from row vectors of equal length.
    pub fn from_rows(rows: &[Vec<f64>], semantics: RowSemantics) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::invalid(format!(
                "row {i} has {} entries, expected {d}",
                r.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, d, |r, c| rows[r][c]), semantics)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn semantics(&self) -> RowSemantics {
        self.semantics
    }

    pub fn n_samples(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.data.row(i).iter().copied().collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_samples()).map(|i| self.row(i)).collect()
    }

    /// Reinterprets the rows, validating them if the new semantics demand it.
    pub fn with_semantics(self, semantics: RowSemantics) -> Result<Self> {
        Self::new(self.data, semantics)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_rows_are_validated() {
        assert!(FeatureMatrix::from_rows(&[vec![0.5, 0.5]], RowSemantics::Probability).is_ok());
        assert!(FeatureMatrix::from_rows(&[vec![0.5, 0.6]], RowSemantics::Probability).is_err());
        assert!(FeatureMatrix::from_rows(&[vec![1.5, -0.5]], RowSemantics::Probability).is_err());
        assert!(FeatureMatrix::from_rows(&[vec![1.5, -0.5]], RowSemantics::Generic).is_ok());
    }

    #[test]
    fn ragged_and_non_finite_rows_are_rejected() {
        assert!(
            FeatureMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]], RowSemantics::Generic).is_err()
        );
        assert!(FeatureMatrix::from_rows(&[vec![f64::NAN]], RowSemantics::Generic).is_err());
        assert!(FeatureMatrix::from_rows(&[], RowSemantics::Generic).is_err());
    }
}
