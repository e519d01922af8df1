use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gate::{single_qubit_matrix, GateKind, Mat2, Mat4};
use crate::error::{Error, Result};

/// Per-gate noise: depolarizing after every gate (separate one- and two-qubit
/// rates) and optional amplitude damping after every single-qubit gate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub depolarizing_1q: f64,
    pub depolarizing_2q: f64,
    #[serde(default)]
    pub amplitude_damping: f64,
}

impl NoiseModel {
    pub fn new(depolarizing_1q: f64, depolarizing_2q: f64, amplitude_damping: f64) -> Result<Self> {
        for (name, p) in [
            ("p1", depolarizing_1q),
            ("p2", depolarizing_2q),
            ("gamma", amplitude_damping),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!(
                    "noise rate {name}={p} is outside [0, 1]"
                )));
            }
        }
        Ok(NoiseModel {
            depolarizing_1q,
            depolarizing_2q,
            amplitude_damping,
        })
    }

    pub fn none() -> Self {
        NoiseModel::default()
    }

    /// Uniform depolarizing rate `p` on every gate.
    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(p, p, 0.0)
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing_1q == 0.0 && self.depolarizing_2q == 0.0 && self.amplitude_damping == 0.0
    }

    /// Kraus operators applied after a single-qubit gate, one channel per entry.
    pub(crate) fn channels_1q(&self) -> Vec<Vec<Mat2>> {
        let mut out = Vec::new();
        if self.depolarizing_1q > 0.0 {
            out.push(depolarizing_kraus_1q(self.depolarizing_1q));
        }
        if self.amplitude_damping > 0.0 {
            out.push(amplitude_damping_kraus(self.amplitude_damping));
        }
        out
    }

    pub(crate) fn channel_2q(&self) -> Option<Vec<Mat4>> {
        (self.depolarizing_2q > 0.0).then(|| depolarizing_kraus_2q(self.depolarizing_2q))
    }
}

/// Parses `none` or `depolarizing:p1=<f>,p2=<f>[,gamma=<f>]`.
impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "none" {
            return Ok(NoiseModel::none());
        }
        let body = s.strip_prefix("depolarizing:").ok_or_else(|| {
            Error::invalid(format!(
                "noise spec '{s}' must be 'none' or 'depolarizing:p1=<f>,p2=<f>[,gamma=<f>]'"
            ))
        })?;
        let (mut p1, mut p2, mut gamma) = (None, None, None);
        for item in body.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("noise term '{item}' is not key=value")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("noise rate '{value}' is not a number")))?;
            let slot = match key.trim() {
                "p1" => &mut p1,
                "p2" => &mut p2,
                "gamma" => &mut gamma,
                other => return Err(Error::invalid(format!("unknown noise key '{other}'"))),
            };
            if slot.replace(v).is_some() {
                return Err(Error::invalid(format!(
                    "noise key '{}' given twice",
                    key.trim()
                )));
            }
        }
        let p1 = p1.ok_or_else(|| Error::invalid("noise spec is missing p1"))?;
        let p2 = p2.ok_or_else(|| Error::invalid("noise spec is missing p2"))?;
        NoiseModel::new(p1, p2, gamma.unwrap_or(0.0))
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_noiseless() {
            return f.write_str("none");
        }
        write!(
            f,
            "depolarizing:p1={},p2={}",
            self.depolarizing_1q, self.depolarizing_2q
        )?;
        if self.amplitude_damping > 0.0 {
            write!(f, ",gamma={}", self.amplitude_damping)?;
        }
        Ok(())
    }
}

/// `[I, X, Y, Z]`
fn paulis() -> [Mat2; 4] {
    let m = |k| single_qubit_matrix(k, 0.0).expect("fixed Pauli gate");
    [identity2(), m(GateKind::X), m(GateKind::Y), m(GateKind::Z)]
}

fn identity2() -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[one, zero], [zero, one]]
}

fn scaled2(m: &Mat2, s: f64) -> Mat2 {
    m.map(|row| row.map(|z| z * s))
}

/// `rho -> (1-p) rho + p I/2` on one qubit: `{sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}`.
pub fn depolarizing_kraus_1q(p: f64) -> Vec<Mat2> {
    let [i, x, y, z] = paulis();
    let w = (p / 4.0).sqrt();
    vec![
        scaled2(&i, (1.0 - 0.75 * p).sqrt()),
        scaled2(&x, w),
        scaled2(&y, w),
        scaled2(&z, w),
    ]
}

/// `rho -> (1-p) rho + p I/4` on two qubits, as the 16 two-qubit Paulis.
pub fn depolarizing_kraus_2q(p: f64) -> Vec<Mat4> {
    let ps = paulis();
    let mut out = Vec::with_capacity(16);
    for (ia, a) in ps.iter().enumerate() {
        for (ib, b) in ps.iter().enumerate() {
            let w = if ia == 0 && ib == 0 {
                (1.0 - 15.0 * p / 16.0).sqrt()
            } else {
                (p / 16.0).sqrt()
            };
            let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
            for r in 0..4 {
                for c in 0..4 {
                    m[r][c] = a[r >> 1][c >> 1] * b[r & 1][c & 1] * w;
                }
            }
            out.push(m);
        }
    }
    out
}

pub fn amplitude_damping_kraus(gamma: f64) -> Vec<Mat2> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    vec![
        [
            [one, zero],
            [zero, Complex64::new((1.0 - gamma).sqrt(), 0.0)],
        ],
        [[zero, Complex64::new(gamma.sqrt(), 0.0)], [zero, zero]],
    ]
}
