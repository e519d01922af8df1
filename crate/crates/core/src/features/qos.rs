use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng;
use crate::sim::{
    build_real_amplitudes, build_zz_feature_map, simulate_statevector, Circuit, Entanglement,
    PauliString,
};

/// Deterministic map from an input vector to an output vector.
pub trait Evaluator: Sync {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;
}

impl<F> Evaluator for F
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self(x))
    }
}

/// `f(x) = c x`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap {
    pub scale: f64,
}

impl Evaluator for LinearMap {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.iter().map(|v| self.scale * v).collect())
    }
}

/// `f(x) = output` for every input.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantMap {
    pub output: Vec<f64>,
}

impl Evaluator for ConstantMap {
    fn evaluate(&self, _x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.output.clone())
    }
}

/// Quantum model: the input fills the first `data_dim` parameter slots, fixed
/// weights fill the rest, and the output is one Pauli expectation per
/// observable.
#[derive(Debug, Clone, PartialEq)]
pub struct QnnEvaluator {
    model: Circuit,
    data_dim: usize,
    weights: Vec<f64>,
    observables: Vec<PauliString>,
}

impl QnnEvaluator {
    pub fn new(
        model: Circuit,
        data_dim: usize,
        weights: Vec<f64>,
        observables: Vec<PauliString>,
    ) -> Result<Self> {
        if model.num_params() != data_dim + weights.len() {
            return Err(Error::invalid(format!(
                "model has {} slots but {data_dim} inputs + {} weights were given",
                model.num_params(),
                weights.len()
            )));
        }
        if observables.is_empty() {
            return Err(Error::invalid("model needs at least one observable"));
        }
        if let Some(o) = observables.iter().find(|o| o.len() != model.num_qubits()) {
            return Err(Error::invalid(format!(
                "observable {o} does not match {} qubits",
                model.num_qubits()
            )));
        }
        Ok(QnnEvaluator {
            model,
            data_dim,
            weights,
            observables,
        })
    }

    /// ZZ feature map (1 rep) + reverse-linear RealAmplitudes (3 reps) over
    /// `data_dim` qubits, weights drawn uniformly from `[0, 2π)` with `seed`,
    /// measuring `Z` on every qubit.
    pub fn builtin(data_dim: usize, seed: u64) -> Result<Self> {
        use rand::Rng;
        let fm = build_zz_feature_map(data_dim, 1)?;
        let ansatz = build_real_amplitudes(data_dim, 3, Entanglement::ReverseLinear)?;
        let model = fm.compose(&ansatz)?;
        let mut r = rng::stream(seed, u64::MAX - 1);
        let weights = (0..ansatz.num_params())
            .map(|_| r.random::<f64>() * std::f64::consts::TAU)
            .collect();
        Self::new(model, data_dim, weights, vec![PauliString::all_z(data_dim)])
    }

    pub fn with_observables(mut self, observables: Vec<PauliString>) -> Result<Self> {
        self.observables = observables;
        Self::new(self.model, self.data_dim, self.weights, self.observables)
    }

    pub fn model(&self) -> &Circuit {
        &self.model
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn data_dim(&self) -> usize {
        self.data_dim
    }
}

impl Evaluator for QnnEvaluator {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.data_dim {
            return Err(Error::invalid(format!(
                "model expects {} inputs, got {}",
                self.data_dim,
                x.len()
            )));
        }
        let params: Vec<f64> = x.iter().chain(&self.weights).copied().collect();
        let state = simulate_statevector(&self.model.bind(&params)?)?;
        self.observables
            .iter()
            .map(|o| state.expectation(o))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosConfig {
    /// Standard deviation of each perturbation component.
    pub sigma: f64,
    /// Perturbations per sample.
    pub k: usize,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for QosConfig {
    fn default() -> Self {
        QosConfig {
            sigma: 0.01,
            k: 10,
            seed: 42,
            execution: Execution::default(),
        }
    }
}

const MIN_PERTURBATION_NORM: f64 = 1e-12;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Mean of `‖f(x+ε) - f(x)‖² / ‖ε‖²` over `k` Gaussian perturbations of every
/// input row. Perturbation `j` of row `i` uses random stream `(seed, i, j)`.
pub fn qos(model: &dyn Evaluator, inputs: &FeatureMatrix, cfg: &QosConfig) -> Result<f64> {
    if !(cfg.sigma > 0.0 && cfg.sigma.is_finite()) {
        return Err(Error::invalid(format!(
            "QOS sigma must be positive, got {}",
            cfg.sigma
        )));
    }
    if cfg.k == 0 {
        return Err(Error::invalid(
            "QOS needs at least one perturbation per sample",
        ));
    }
    let normal = Normal::new(0.0, cfg.sigma).map_err(|e| Error::invalid(e.to_string()))?;
    let d = inputs.dim();
    let per_sample = cfg.execution.try_map(inputs.n_samples(), |i| {
        let x = inputs.row(i);
        let fx = model.evaluate(&x)?;
        let mut ratios = Vec::with_capacity(cfg.k);
        for j in 0..cfg.k {
            let mut r = rng::stream2(cfg.seed, i as u64, j as u64);
            let mut eps: Vec<f64> = (0..d).map(|_| normal.sample(&mut r)).collect();
            let mut norm2: f64 = eps.iter().map(|e| e * e).sum();
            if norm2.sqrt() < MIN_PERTURBATION_NORM {
                eps = (0..d).map(|_| normal.sample(&mut r)).collect();
                norm2 = eps.iter().map(|e| e * e).sum();
                if norm2.sqrt() < MIN_PERTURBATION_NORM {
                    return Err(Error::DegenerateData(format!(
                        "perturbation {j} of sample {i} has vanishing norm"
                    )));
                }
            }
            let xp: Vec<f64> = x.iter().zip(&eps).map(|(a, e)| a + e).collect();
            let fxp = model.evaluate(&xp)?;
            if fxp.len() != fx.len() {
                return Err(Error::invalid(format!(
                    "model output dimension changed from {} to {}",
                    fx.len(),
                    fxp.len()
                )));
            }
            ratios.push(sq_dist(&fxp, &fx) / norm2);
        }
        Ok(ratios)
    })?;
    let total: f64 = per_sample.iter().flatten().sum();
    let count = inputs.n_samples() * cfg.k;
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::RowSemantics;

    fn inputs() -> FeatureMatrix {
        FeatureMatrix::from_rows(
            &[
                vec![0.1, 0.2, 0.3],
                vec![1.0, -1.0, 0.5],
                vec![2.0, 0.0, 3.0],
            ],
            RowSemantics::Generic,
        )
        .unwrap()
    }

    #[test]
    fn linear_maps_scale_quadratically() {
        let cfg = QosConfig::default();
        let id = qos(&LinearMap { scale: 1.0 }, &inputs(), &cfg).unwrap();
        assert!((id - 1.0).abs() < 1e-12);
        let three = qos(&LinearMap { scale: 3.0 }, &inputs(), &cfg).unwrap();
        assert!((three - 9.0).abs() < 1e-12);
        let zero = qos(
            &ConstantMap {
                output: vec![1.0, 2.0],
            },
            &inputs(),
            &cfg,
        )
        .unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn closures_are_evaluators() {
        let f = |x: &[f64]| vec![x.iter().sum::<f64>()];
        // ‖Σε‖² / ‖ε‖² averages to 1 for iid components, but is seed-dependent
        let v = qos(&f, &inputs(), &QosConfig::default()).unwrap();
        assert!(v > 0.0 && v <= 3.0 + 1e-12);
    }

    #[test]
    fn seeded_determinism() {
        let m = QnnEvaluator::builtin(3, 7).unwrap();
        let cfg = QosConfig {
            seed: 7,
            ..QosConfig::default()
        };
        let a = qos(&m, &inputs(), &cfg).unwrap();
        let b = qos(
            &m,
            &inputs(),
            &QosConfig {
                execution: Execution::Serial,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(a > 0.0);
    }

    #[test]
    fn config_errors() {
        let bad = QosConfig {
            sigma: 0.0,
            ..QosConfig::default()
        };
        assert!(qos(&LinearMap { scale: 1.0 }, &inputs(), &bad).is_err());
        let bad = QosConfig {
            k: 0,
            ..QosConfig::default()
        };
        assert!(qos(&LinearMap { scale: 1.0 }, &inputs(), &bad).is_err());
    }

    #[test]
    fn qnn_shape_checks() {
        let m = QnnEvaluator::builtin(3, 1).unwrap();
        assert_eq!(m.weights().len(), 12);
        assert!(m.evaluate(&[0.0; 2]).is_err());
        let out = m.evaluate(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].abs() <= 1.0 + 1e-12);
        assert!(m
            .clone()
            .with_observables(vec!["ZZ".parse().unwrap()])
            .is_err());
    }
}
