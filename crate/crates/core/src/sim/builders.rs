//! Standard feature-map and ansatz constructions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::angle::AngleExpr;
use super::circuit::Circuit;
use super::gate::Gate;
use crate::error::{Error, Result};

/// Pairwise phase-entangling feature map with parameter slots `0..n` holding
/// the data vector `x`.
///
/// Each repetition applies `H` to every qubit, `P(2 x_i)` to qubit `i`, then
/// for every pair `j < k`: `CX(j,k) P(2 (π - x_j)(π - x_k)) CX(j,k)` with the
/// phase on qubit `k`.
pub fn build_zz_feature_map(num_qubits: usize, reps: usize) -> Result<Circuit> {
    if num_qubits < 2 {
        return Err(Error::invalid(format!(
            "ZZ feature map needs at least 2 qubits to entangle, got {num_qubits}"
        )));
    }
    if reps == 0 {
        return Err(Error::invalid(
            "ZZ feature map needs at least one repetition",
        ));
    }
    let n = num_qubits;
    let mut gates = Vec::with_capacity(reps * (2 * n + 3 * n * (n - 1) / 2));
    for _ in 0..reps {
        gates.extend((0..n).map(Gate::h));
        gates.extend((0..n).map(|i| Gate::p(i, AngleExpr::scale(2.0, AngleExpr::var(i)))));
        for j in 0..n {
            for k in j + 1..n {
                let phase = AngleExpr::scale(
                    2.0,
                    AngleExpr::product(vec![
                        AngleExpr::pi_minus_var(j),
                        AngleExpr::pi_minus_var(k),
                    ]),
                );
                gates.push(Gate::cx(j, k));
                gates.push(Gate::p(k, phase));
                gates.push(Gate::cx(j, k));
            }
        }
    }
    Circuit::new(n, gates)
}

/// CX layout between the rotation layers of [`build_real_amplitudes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entanglement {
    /// `CX(i, i+1)` for descending `i`.
    #[default]
    ReverseLinear,
    /// `CX(i, i+1)` for ascending `i`.
    Linear,
    /// `CX(j, k)` for every `j < k`.
    Full,
}

impl Entanglement {
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Entanglement::Linear => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
            Entanglement::ReverseLinear => {
                (0..n.saturating_sub(1)).rev().map(|i| (i, i + 1)).collect()
            }
            Entanglement::Full => (0..n)
                .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
                .collect(),
        }
    }
}

impl fmt::Display for Entanglement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Entanglement::ReverseLinear => "reverse_linear",
            Entanglement::Linear => "linear",
            Entanglement::Full => "full",
        })
    }
}

impl FromStr for Entanglement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "reverse_linear" => Ok(Entanglement::ReverseLinear),
            "linear" => Ok(Entanglement::Linear),
            "full" => Ok(Entanglement::Full),
            _ => Err(Error::invalid(format!(
                "unknown entanglement pattern '{s}'"
            ))),
        }
    }
}

/// RY/CX hardware-efficient ansatz with `n (reps + 1)` parameter slots:
/// `reps` blocks of (RY layer, CX layer) followed by a closing RY layer.
pub fn build_real_amplitudes(
    num_qubits: usize,
    reps: usize,
    entanglement: Entanglement,
) -> Result<Circuit> {
    if num_qubits < 2 {
        return Err(Error::invalid(format!(
            "RealAmplitudes needs at least 2 qubits, got {num_qubits}"
        )));
    }
    if reps == 0 {
        return Err(Error::invalid(
            "RealAmplitudes needs at least one repetition",
        ));
    }
    let n = num_qubits;
    let pairs = entanglement.pairs(n);
    let mut gates = Vec::with_capacity(n * (reps + 1) + reps * pairs.len());
    for r in 0..reps {
        gates.extend((0..n).map(|i| Gate::ry(i, AngleExpr::var(r * n + i))));
        gates.extend(pairs.iter().map(|&(c, t)| Gate::cx(c, t)));
    }
    gates.extend((0..n).map(|i| Gate::ry(i, AngleExpr::var(reps * n + i))));
    Circuit::new(n, gates)
}

/// Three-qubit ZZ feature map (1 repetition) followed by a reverse-linear
/// RealAmplitudes ansatz with 3 repetitions: 33 gates, 15 parameter slots
/// (3 data, 12 trainable).
pub fn case_study_circuit() -> Circuit {
    let fm = build_zz_feature_map(3, 1).expect("valid feature map");
    let ansatz = build_real_amplitudes(3, 3, Entanglement::ReverseLinear).expect("valid ansatz");
    fm.compose(&ansatz).expect("matching widths")
}
