//! Circuit-level metrics: expressibility (QCE), noise fidelity (QCF), locality
//! ratio (QLR), effective entanglement entropy (EEE) and quantum mutual
//! information (QMI).

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metric::MetricValue;
use crate::rng;
use crate::sim::{
    simulate_density, simulate_statevector, state_fidelity, von_neumann_entropy, Circuit,
    DensityMatrix, GateStats, NoiseModel, PartialTrace, QuantumState,
};

/// Closed sampling interval for one parameter slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
}

impl ParamRange {
    pub const FULL_TURN: ParamRange = ParamRange { lo: 0.0, hi: TAU };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(Error::invalid(format!("bad parameter range [{lo}, {hi}]")));
        }
        Ok(ParamRange { lo, hi })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.lo + (self.hi - self.lo) * rng.random::<f64>()
    }
}

impl FromStr for ParamRange {
    type Err = Error;

    /// `lo:hi`
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("range '{s}' is not lo:hi")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("range bound '{t}' is not a number")))
        };
        ParamRange::new(num(lo)?, num(hi)?)
    }
}

/// How the sum of pairwise overlaps is normalized in [`qce`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QceNormalization {
    /// `1 - Σ_{i<j} |<ψi|ψj>|² / (N(N-1))`. A parameter-independent circuit
    /// scores 0.5 and a Haar-random d-dimensional ensemble `1 - 1/(2d)`.
    #[default]
    HalfPairMean,
    /// `1 - mean over unordered pairs of |<ψi|ψj>|²`. A parameter-independent
    /// circuit scores 0 and a Haar-random ensemble `1 - 1/d`.
    PairMean,
}

impl fmt::Display for QceNormalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QceNormalization::HalfPairMean => "half_pair_mean",
            QceNormalization::PairMean => "pair_mean",
        })
    }
}

impl FromStr for QceNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "half_pair_mean" => Ok(QceNormalization::HalfPairMean),
            "pair_mean" => Ok(QceNormalization::PairMean),
            _ => Err(Error::invalid(format!(
                "unknown QCE normalization '{s}' (expected half-pair-mean or pair-mean)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub num_samples: usize,
    /// Empty: `[0, 2π]` for every slot. One entry: applied to every slot.
    /// Otherwise one entry per slot.
    pub ranges: Vec<ParamRange>,
    pub seed: u64,
    pub normalization: QceNormalization,
    /// Score parameterless circuits instead of rejecting them.
    pub allow_parameterless: bool,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            num_samples: 50,
            ranges: Vec::new(),
            seed: 42,
            normalization: QceNormalization::default(),
            allow_parameterless: false,
            execution: Execution::default(),
        }
    }
}

impl SamplingConfig {
    pub fn with_seed(seed: u64) -> Self {
        SamplingConfig {
            seed,
            ..Self::default()
        }
    }

    fn range_for(&self, slot: usize) -> ParamRange {
        match self.ranges.len() {
            0 => ParamRange::FULL_TURN,
            1 => self.ranges[0],
            _ => self.ranges[slot],
        }
    }

    fn check(&self, num_params: usize) -> Result<()> {
        if self.num_samples < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 samples for pairwise fidelity, got {}",
                self.num_samples
            )));
        }
        if self.ranges.len() > 1 && self.ranges.len() != num_params {
            return Err(Error::invalid(format!(
                "{} parameter ranges for {num_params} slots",
                self.ranges.len()
            )));
        }
        Ok(())
    }

    /// Parameter vector drawn from stream `key`.
    pub fn draw(&self, num_params: usize, key: u64) -> Vec<f64> {
        let mut rng = rng::stream(self.seed, key);
        (0..num_params)
            .map(|slot| self.range_for(slot).sample(&mut rng))
            .collect()
    }
}

/// Stream key reserved for binding free parameters outside of QCE sampling.
const BINDING_STREAM: u64 = u64::MAX;

/// Draws one seeded parameter vector for a circuit with free slots.
pub fn random_binding(circuit: &Circuit, cfg: &SamplingConfig) -> Result<Vec<f64>> {
    if cfg.ranges.len() > 1 && cfg.ranges.len() != circuit.num_params() {
        return Err(Error::invalid(format!(
            "{} parameter ranges for {} slots",
            cfg.ranges.len(),
            circuit.num_params()
        )));
    }
    Ok(cfg.draw(circuit.num_params(), BINDING_STREAM))
}

/// Statevectors for `cfg.num_samples` independent uniform parameter draws.
/// Sample `i` uses random stream `(seed, i)`.
pub fn sample_states(circuit: &Circuit, cfg: &SamplingConfig) -> Result<Vec<QuantumState>> {
    cfg.check(circuit.num_params())?;
    cfg.execution.try_map(cfg.num_samples, |i| {
        let params = cfg.draw(circuit.num_params(), i as u64);
        simulate_statevector(&circuit.bind(&params)?)
    })
}

/// Sum of `|<ψi|ψj>|²` over unordered pairs. Row sums are computed
/// independently and then added in index order.
pub fn pairwise_overlap_sum(states: &[QuantumState], execution: Execution) -> f64 {
    execution
        .map(states.len(), |i| {
            states[i + 1..]
                .iter()
                .map(|s| states[i].overlap(s))
                .sum::<f64>()
        })
        .into_iter()
        .sum()
}

/// Expressibility from the pairwise fidelity of randomly parameterized states.
pub fn qce(circuit: &Circuit, cfg: &SamplingConfig) -> Result<f64> {
    if circuit.num_params() == 0 && !cfg.allow_parameterless {
        return Err(Error::invalid(
            "circuit has no parameters, so its expressibility is trivially minimal",
        ));
    }
    let states = sample_states(circuit, cfg)?;
    let n = states.len() as f64;
    let sum = pairwise_overlap_sum(&states, cfg.execution);
    let denom = match cfg.normalization {
        QceNormalization::HalfPairMean => n * (n - 1.0),
        QceNormalization::PairMean => n * (n - 1.0) / 2.0,
    };
    Ok((1.0 - sum / denom).clamp(0.0, 1.0))
}

/// Fidelity between the ideal output state and the output under `noise`.
pub fn qcf(circuit: &Circuit, noise: &NoiseModel) -> Result<f64> {
    let ideal = DensityMatrix::from_pure(&simulate_statevector(circuit)?);
    let noisy = simulate_density(circuit, noise)?;
    state_fidelity(&ideal, &noisy)
}

/// Fraction of gates that act on a single qubit.
pub fn qlr(circuit: &Circuit) -> Result<f64> {
    let stats = circuit.stats();
    if stats.n_total == 0 {
        return Err(Error::invalid("locality ratio of an empty circuit"));
    }
    Ok(stats.n_single as f64 / stats.n_total as f64)
}

fn check_subsystem(name: &str, set: &[usize], n: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::invalid(format!("subsystem {name} is empty")));
    }
    if let Some(q) = set.iter().find(|&&q| q >= n) {
        return Err(Error::invalid(format!(
            "subsystem {name} names qubit {q} of a {n}-qubit circuit"
        )));
    }
    Ok(())
}

/// Von Neumann entropy (bits) of subsystem `a` of a pure state.
pub fn subsystem_entropy(state: &QuantumState, a: &[usize]) -> Result<f64> {
    check_subsystem("A", a, state.num_qubits())?;
    von_neumann_entropy(&state.partial_trace(a)?)
}

/// `S(A) + S(B) - S(AB)` for disjoint subsystems of a pure state.
pub fn mutual_information(state: &QuantumState, a: &[usize], b: &[usize]) -> Result<f64> {
    let n = state.num_qubits();
    check_subsystem("A", a, n)?;
    check_subsystem("B", b, n)?;
    if let Some(q) = a.iter().find(|q| b.contains(q)) {
        return Err(Error::invalid(format!("subsystems overlap on qubit {q}")));
    }
    let mut ab: Vec<usize> = a.iter().chain(b).copied().collect();
    ab.sort_unstable();
    let s_ab = if ab.len() == n {
        // the whole register of a pure state
        0.0
    } else {
        von_neumann_entropy(&state.partial_trace(&ab)?)?
    };
    Ok(subsystem_entropy(state, a)? + subsystem_entropy(state, b)? - s_ab)
}

/// Entanglement entropy of subsystem `a` in the output of a bound circuit.
pub fn eee(circuit: &Circuit, subsystem: &[usize]) -> Result<f64> {
    let n = circuit.num_qubits();
    check_subsystem("A", subsystem, n)?;
    let mut distinct = subsystem.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() >= n {
        return Err(Error::invalid(
            "entanglement entropy needs a strict subset of the qubits",
        ));
    }
    subsystem_entropy(&simulate_statevector(circuit)?, subsystem)
}

/// Mutual information between subsystems `a` and `b` of a bound circuit's
/// output state.
pub fn qmi(circuit: &Circuit, a: &[usize], b: &[usize]) -> Result<f64> {
    mutual_information(&simulate_statevector(circuit)?, a, b)
}

/// Configuration for [`evaluate_circuit`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircuitMetricsConfig {
    pub sampling: SamplingConfig,
    pub noise: NoiseModel,
    /// Defaults to `{0}`.
    pub subsystem_a: Option<Vec<usize>>,
    /// Defaults to the complement of `subsystem_a`.
    pub subsystem_b: Option<Vec<usize>>,
    /// Values for the circuit's free slots used by QCF, EEE and QMI. Drawn
    /// from the sampling seed when absent.
    pub binding: Option<Vec<f64>>,
}

/// The five circuit metrics plus the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitMetricsReport {
    pub qce: MetricValue,
    pub qcf: MetricValue,
    pub qlr: MetricValue,
    pub eee: MetricValue,
    pub qmi: MetricValue,
    /// Reserved; never computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qvc: Option<MetricValue>,
    pub gate_stats: GateStats,
    pub num_qubits: usize,
    pub num_params: usize,
    pub seed: u64,
    pub num_samples: usize,
    pub qce_normalization: QceNormalization,
    pub subsystem_a: Vec<usize>,
    pub subsystem_b: Vec<usize>,
    pub noise: String,
    pub bound_params: Vec<f64>,
}

/// Runs every circuit metric. Returns the report and any warnings.
pub fn evaluate_circuit(
    circuit: &Circuit,
    cfg: &CircuitMetricsConfig,
) -> Result<(CircuitMetricsReport, Vec<String>)> {
    let mut warnings = Vec::new();
    let n = circuit.num_qubits();
    if n < 2 {
        return Err(Error::invalid(
            "entanglement metrics need at least 2 qubits",
        ));
    }
    let a = cfg.subsystem_a.clone().unwrap_or_else(|| vec![0]);
    let b = match &cfg.subsystem_b {
        Some(b) => b.clone(),
        None => (0..n).filter(|q| !a.contains(q)).collect(),
    };

    let qce_value = if circuit.num_params() == 0 {
        warnings.push("circuit has no parameters; QCE is not meaningful".to_string());
        let cfg = SamplingConfig {
            allow_parameterless: true,
            ..cfg.sampling.clone()
        };
        qce(circuit, &cfg)?
    } else {
        qce(circuit, &cfg.sampling)?
    };

    let bound_params = match &cfg.binding {
        Some(p) => p.clone(),
        None => {
            if circuit.num_params() > 0 {
                warnings.push(format!(
                    "bound {} free parameter(s) with seeded uniform values for QCF/EEE/QMI",
                    circuit.num_params()
                ));
            }
            random_binding(circuit, &cfg.sampling)?
        }
    };
    let bound = circuit.bind(&bound_params)?;
    if cfg.noise.is_noiseless() {
        warnings.push("QCF computed without noise is identically 1".to_string());
    }
    let state = simulate_statevector(&bound)?;

    let report = CircuitMetricsReport {
        qce: qce_value.into(),
        qcf: qcf(&bound, &cfg.noise)?.into(),
        qlr: qlr(circuit)?.into(),
        eee: eee(&bound, &a)?.into(),
        qmi: mutual_information(&state, &a, &b)?.into(),
        qvc: None,
        gate_stats: circuit.stats(),
        num_qubits: n,
        num_params: circuit.num_params(),
        seed: cfg.sampling.seed,
        num_samples: cfg.sampling.num_samples,
        qce_normalization: cfg.sampling.normalization,
        subsystem_a: a,
        subsystem_b: b,
        noise: cfg.noise.to_string(),
        bound_params,
    };
    Ok((report, warnings))
}
