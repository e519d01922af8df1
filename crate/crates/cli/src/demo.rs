use qmetric::features::{FeatureMatrix, RowSemantics};
use qmetric::io::{parse_gradient_log, parse_training_log};
use qmetric::rng;
use qmetric::training::{GradientLog, TrainingLog};
use rand_distr::{Distribution, Normal};

pub const SAMPLES: usize = 500;
pub const HYBRID_PARAMS: usize = 12;
pub const CLASSICAL_PARAMS: usize = 50;

const HYBRID_LOG: &str = include_str!("../data/hybrid.csv");
const CLASSICAL_LOG: &str = include_str!("../data/classical.csv");
const HYBRID_GRADS: &str = include_str!("../data/hybrid_grads.jsonl");

const CENTERS: [[f64; 3]; 2] = [[0.6, 2.2, 1.0], [2.2, 0.6, 2.0]];
const SPREAD: f64 = 0.35;
const DATA_STREAM: u64 = 0xDA7A;

/// Two Gaussian clusters in 3-D, alternating row by row.
pub fn two_clusters(seed: u64, n: usize) -> FeatureMatrix {
    let noise = Normal::new(0.0, SPREAD).expect("positive spread");
    let mut r = rng::stream(seed, DATA_STREAM);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            CENTERS[i % 2]
                .iter()
                .map(|c| c + noise.sample(&mut r))
                .collect()
        })
        .collect();
    FeatureMatrix::from_rows(&rows, RowSemantics::Generic).expect("finite synthetic data")
}

pub fn logs() -> (TrainingLog, TrainingLog, GradientLog) {
    (
        parse_training_log(HYBRID_LOG, HYBRID_PARAMS).expect("bundled hybrid log"),
        parse_training_log(CLASSICAL_LOG, CLASSICAL_PARAMS).expect("bundled classical log"),
        parse_gradient_log(HYBRID_GRADS).expect("bundled gradients"),
    )
}
