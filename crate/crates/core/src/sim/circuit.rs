use serde::{Deserialize, Serialize};

use super::gate::Gate;
use crate::error::{Error, Result};

/// Ordered gate list over `num_qubits` qubits. The first gate in the list is
/// the first one applied to `|0...0>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    num_params: usize,
}

/// Gate census of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateStats {
    pub n_single: usize,
    pub n_two: usize,
    pub n_total: usize,
    pub depth: usize,
}

impl Circuit {
    /// Builds a circuit; the parameter count is `1 + max referenced slot`.
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::invalid("circuit needs at least one qubit"));
        }
        for (pos, g) in gates.iter().enumerate() {
            if let Some(&q) = g.qubits().iter().find(|&&q| q >= num_qubits) {
                return Err(Error::invalid(format!(
                    "gate {pos} ({}) uses qubit {q} but the circuit has {num_qubits}",
                    g.kind()
                )));
            }
        }
        let num_params = gates
            .iter()
            .filter_map(|g| g.angle().and_then(|a| a.max_slot()))
            .max()
            .map_or(0, |m| m + 1);
        Ok(Circuit {
            num_qubits,
            gates,
            num_params,
        })
    }

    pub fn empty(num_qubits: usize) -> Result<Self> {
        Self::new(num_qubits, Vec::new())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn is_bound(&self) -> bool {
        self.num_params == 0 && self.gates.iter().all(Gate::is_bound)
    }

    /// Evaluates every angle on `params`, returning a parameter-free circuit.
    pub fn bind(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.num_params {
            return Err(Error::invalid(format!(
                "circuit has {} parameter slots, got {} values",
                self.num_params,
                params.len()
            )));
        }
        let gates = self
            .gates
            .iter()
            .map(|g| g.bind(params))
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            num_qubits: self.num_qubits,
            gates,
            num_params: 0,
        })
    }

    /// Appends `other` after `self`. The slots of `other` are renumbered to
    /// follow those of `self`.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::invalid(format!(
                "cannot compose a {}-qubit circuit with a {}-qubit circuit",
                self.num_qubits, other.num_qubits
            )));
        }
        let offset = self.num_params;
        let gates = self
            .gates
            .iter()
            .cloned()
            .chain(other.gates.iter().map(|g| g.shift_slots(offset)))
            .collect();
        Ok(Circuit {
            num_qubits: self.num_qubits,
            gates,
            num_params: self.num_params + other.num_params,
        })
    }

    pub fn stats(&self) -> GateStats {
        gate_stats(self)
    }
}

/// Counts gates by arity and computes depth as the longest chain of gates
/// that share a qubit.
pub fn gate_stats(circuit: &Circuit) -> GateStats {
    let mut frontier = vec![0usize; circuit.num_qubits];
    let mut stats = GateStats::default();
    for g in &circuit.gates {
        match g.qubits().len() {
            1 => stats.n_single += 1,
            _ => stats.n_two += 1,
        }
        let level = 1 + g.qubits().iter().map(|&q| frontier[q]).max().unwrap_or(0);
        for &q in g.qubits() {
            frontier[q] = level;
        }
        stats.depth = stats.depth.max(level);
    }
    stats.n_total = circuit.gates.len();
    stats
}
