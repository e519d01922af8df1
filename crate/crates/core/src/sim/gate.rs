use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::angle::AngleExpr;
use crate::error::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];
/// Two-qubit operator in the basis `|a b>` with index `2a + b`, where `a` is
/// the gate's first qubit.
pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    RX,
    RY,
    RZ,
    P,
    CX,
    CZ,
}

impl GateKind {
    pub const ALL: [GateKind; 12] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::P,
        GateKind::CX,
        GateKind::CZ,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ => 2,
            _ => 1,
        }
    }

    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::P
        )
    }

    /// Lower-case name used in circuit documents.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::RX => "rx",
            GateKind::RY => "ry",
            GateKind::RZ => "rz",
            GateKind::P => "p",
            GateKind::CX => "cx",
            GateKind::CZ => "cz",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown gate '{s}'")))
    }
}

/// One gate application. Two-qubit gates list the control qubit first.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
    angle: Option<AngleExpr>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, angle: Option<AngleExpr>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::invalid(format!(
                "gate {kind} acts on {} qubit(s), got {}",
                kind.arity(),
                qubits.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::invalid(format!(
                "gate {kind} needs distinct qubits, got {} twice",
                qubits[0]
            )));
        }
        match (kind.is_parameterized(), angle.is_some()) {
            (true, false) => return Err(Error::invalid(format!("gate {kind} requires an angle"))),
            (false, true) => return Err(Error::invalid(format!("gate {kind} takes no angle"))),
            _ => {}
        }
        Ok(Gate {
            kind,
            qubits,
            angle,
        })
    }

    pub fn fixed(kind: GateKind, qubit: usize) -> Self {
        Self::new(kind, vec![qubit], None).expect("fixed single-qubit gate")
    }

    pub fn rotation(kind: GateKind, qubit: usize, angle: impl Into<AngleExpr>) -> Self {
        Self::new(kind, vec![qubit], Some(angle.into())).expect("rotation gate")
    }

    pub fn h(q: usize) -> Self {
        Self::fixed(GateKind::H, q)
    }

    pub fn x(q: usize) -> Self {
        Self::fixed(GateKind::X, q)
    }

    pub fn ry(q: usize, angle: impl Into<AngleExpr>) -> Self {
        Self::rotation(GateKind::RY, q, angle)
    }

    pub fn p(q: usize, angle: impl Into<AngleExpr>) -> Self {
        Self::rotation(GateKind::P, q, angle)
    }

    /// Panics if `control == target`.
    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::CX, vec![control, target], None).expect("distinct cx qubits")
    }

    /// Panics if `a == b`.
    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::CZ, vec![a, b], None).expect("distinct cz qubits")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn angle(&self) -> Option<&AngleExpr> {
        self.angle.as_ref()
    }

    pub fn is_bound(&self) -> bool {
        self.angle.as_ref().is_none_or(AngleExpr::is_const)
    }

    pub(crate) fn bind(&self, params: &[f64]) -> Result<Gate> {
        let angle = match &self.angle {
            Some(a) => Some(AngleExpr::constant(a.eval(params)?)),
            None => None,
        };
        Ok(Gate {
            kind: self.kind,
            qubits: self.qubits.clone(),
            angle,
        })
    }

    pub(crate) fn shift_slots(&self, offset: usize) -> Gate {
        Gate {
            kind: self.kind,
            qubits: self.qubits.clone(),
            angle: self.angle.as_ref().map(|a| a.shift_slots(offset)),
        }
    }

    fn const_angle(&self) -> Result<f64> {
        match &self.angle {
            Some(AngleExpr::Const { value }) => Ok(*value),
            Some(_) => Err(Error::invalid(format!(
                "gate {} has an unbound parameter",
                self.kind
            ))),
            None => Ok(0.0),
        }
    }

    /// Matrix of a bound single-qubit gate.
    pub fn matrix_1q(&self) -> Result<Mat2> {
        let theta = self.const_angle()?;
        single_qubit_matrix(self.kind, theta)
    }

    /// Matrix of a two-qubit gate.
    pub fn matrix_2q(&self) -> Result<Mat4> {
        two_qubit_matrix(self.kind)
    }
}

pub fn single_qubit_matrix(kind: GateKind, theta: f64) -> Result<Mat2> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    Ok(match kind {
        GateKind::H => [[h, h], [h, -h]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::T => [
            [ONE, ZERO],
            [
                ZERO,
                Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            ],
        ],
        GateKind::RX => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        GateKind::RY => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        GateKind::RZ => [
            [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
        ],
        GateKind::P => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, theta)]],
        GateKind::CX | GateKind::CZ => {
            return Err(Error::invalid(format!("{kind} is not a single-qubit gate")))
        }
    })
}

pub fn two_qubit_matrix(kind: GateKind) -> Result<Mat4> {
    let mut m = [[ZERO; 4]; 4];
    match kind {
        GateKind::CX => {
            m[0][0] = ONE;
            m[1][1] = ONE;
            m[2][3] = ONE;
            m[3][2] = ONE;
        }
        GateKind::CZ => {
            m[0][0] = ONE;
            m[1][1] = ONE;
            m[2][2] = ONE;
            m[3][3] = -ONE;
        }
        _ => return Err(Error::invalid(format!("{kind} is not a two-qubit gate"))),
    }
    Ok(m)
}
