use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::Circuit;
use super::gate::Gate;
use super::kernel;
use crate::error::{Error, Result};

/// Qubit-count guards applied before allocating simulator buffers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimLimits {
    pub max_statevector_qubits: usize,
    pub max_density_qubits: usize,
}

impl Default for SimLimits {
    fn default() -> Self {
        SimLimits {
            max_statevector_qubits: 20,
            max_density_qubits: 10,
        }
    }
}

/// Normalized pure state over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

pub const NORM_TOLERANCE: f64 = 1e-10;

impl QuantumState {
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        QuantumState {
            num_qubits,
            amplitudes,
        }
    }

    /// Wraps an amplitude vector; its length must be a power of two and its
    /// norm 1 within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::invalid(format!(
                "state length {len} is not a power of two >= 2"
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("state norm {norm} is not 1")));
        }
        Ok(QuantumState {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`
    pub fn overlap(&self, other: &QuantumState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Computational-basis measurement probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn apply(&mut self, gate: &Gate) -> Result<()> {
        match gate.qubits() {
            [q] => kernel::apply_1q(&mut self.amplitudes, *q, &gate.matrix_1q()?),
            [a, b] => kernel::apply_2q(&mut self.amplitudes, *a, *b, &gate.matrix_2q()?),
            _ => unreachable!("gate arity is validated on construction"),
        }
        Ok(())
    }

    /// `<psi| P |psi>` for a Pauli string of matching length.
    pub fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        if pauli.len() != self.num_qubits {
            return Err(Error::invalid(format!(
                "Pauli string of length {} for a {}-qubit state",
                pauli.len(),
                self.num_qubits
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            // P|i> = phase * |j>, so <psi|P|psi> = sum_i conj(psi_j) phase psi_i
            let mut j = i;
            let mut phase = Complex64::new(1.0, 0.0);
            for (q, p) in pauli.0.iter().enumerate() {
                let bit = (i >> q) & 1;
                match p {
                    Pauli::I => {}
                    Pauli::X => j ^= 1 << q,
                    Pauli::Y => {
                        j ^= 1 << q;
                        phase *= if bit == 0 {
                            Complex64::new(0.0, 1.0)
                        } else {
                            Complex64::new(0.0, -1.0)
                        };
                    }
                    Pauli::Z => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                }
            }
            acc += self.amplitudes[j].conj() * phase * a;
        }
        Ok(acc.re)
    }
}

/// Applies a bound circuit to `|0...0>` under the default qubit guard.
pub fn simulate_statevector(circuit: &Circuit) -> Result<QuantumState> {
    simulate_statevector_with(circuit, &SimLimits::default())
}

pub fn simulate_statevector_with(circuit: &Circuit, limits: &SimLimits) -> Result<QuantumState> {
    if !circuit.is_bound() {
        return Err(Error::invalid(format!(
            "circuit has {} unbound parameter slot(s)",
            circuit.num_params()
        )));
    }
    if circuit.num_qubits() > limits.max_statevector_qubits {
        return Err(Error::ResourceLimit(format!(
            "{} qubits exceeds the statevector limit of {}",
            circuit.num_qubits(),
            limits.max_statevector_qubits
        )));
    }
    let mut state = QuantumState::zero(circuit.num_qubits());
    for g in circuit.gates() {
        state.apply(g)?;
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Tensor product of Paulis; character `i` acts on qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    /// `Z` on every qubit.
    pub fn all_z(n: usize) -> Self {
        PauliString(vec![Pauli::Z; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::invalid(format!("'{c}' is not a Pauli letter"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            f.write_str(match p {
                Pauli::I => "I",
                Pauli::X => "X",
                Pauli::Y => "Y",
                Pauli::Z => "Z",
            })?;
        }
        Ok(())
    }
}
