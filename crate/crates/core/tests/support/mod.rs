//! Brute-force reference implementations, written without the crate's own
//! kernels: dense unitaries built by embedding each gate in the full space,
//! and partial traces by summing over environment indices.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use qmetric::sim::{AngleExpr, Circuit, Gate, GateKind};
use rand::Rng;

pub type Dense = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn one_qubit(kind: GateKind, theta: f64) -> [[Complex64; 2]; 2] {
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let h = FRAC_1_SQRT_2;
    match kind {
        GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        GateKind::Y => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        GateKind::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        GateKind::S => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
        GateKind::T => [
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, PI / 4.0)],
        ],
        // exp(-i θ/2 σ) = cos(θ/2) I - i sin(θ/2) σ
        GateKind::RX => [[c(cs, 0.0), c(0.0, -sn)], [c(0.0, -sn), c(cs, 0.0)]],
        GateKind::RY => [[c(cs, 0.0), c(-sn, 0.0)], [c(sn, 0.0), c(cs, 0.0)]],
        GateKind::RZ => [[c(cs, -sn), c(0.0, 0.0)], [c(0.0, 0.0), c(cs, sn)]],
        GateKind::P => [
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), Complex64::from_polar(1.0, theta)],
        ],
        GateKind::CX | GateKind::CZ => unreachable!("two-qubit gate"),
    }
}

/// Action on `(a, b)` bits: returns the output bits and phase.
fn two_qubit(kind: GateKind, a: usize, b: usize) -> (usize, usize, f64) {
    match kind {
        GateKind::CX => (a, a ^ b, 1.0),
        GateKind::CZ => (a, b, if a == 1 && b == 1 { -1.0 } else { 1.0 }),
        _ => unreachable!("one-qubit gate"),
    }
}

fn bit(i: usize, q: usize) -> usize {
    (i >> q) & 1
}

pub fn embed(gate: &Gate, n: usize) -> Dense {
    let dim = 1 << n;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    let qs = gate.qubits();
    if qs.len() == 1 {
        let theta = gate
            .angle()
            .map_or(0.0, |a| a.eval(&[]).expect("bound gate"));
        let u = one_qubit(gate.kind(), theta);
        let q = qs[0];
        for (r, row) in m.iter_mut().enumerate() {
            for (col, entry) in row.iter_mut().enumerate() {
                if (r ^ col) & !(1 << q) == 0 {
                    *entry = u[bit(r, q)][bit(col, q)];
                }
            }
        }
    } else {
        let (qa, qb) = (qs[0], qs[1]);
        #[allow(clippy::needless_range_loop)]
        for col in 0..dim {
            let (a, b, phase) = two_qubit(gate.kind(), bit(col, qa), bit(col, qb));
            let r = (col & !(1 << qa) & !(1 << qb)) | (a << qa) | (b << qb);
            m[r][col] = c(phase, 0.0);
        }
    }
    m
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn unitary(circuit: &Circuit) -> Dense {
    let n = circuit.num_qubits();
    let dim = 1 << n;
    let mut u: Dense = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    for g in circuit.gates() {
        u = matmul(&embed(g, n), &u);
    }
    u
}

/// `U|0...0>`, the first column of the full unitary.
pub fn final_state(circuit: &Circuit) -> Vec<Complex64> {
    unitary(circuit).iter().map(|row| row[0]).collect()
}

/// `ρ_keep[i][j] = Σ_env ψ(i, env) ψ*(j, env)`; kept qubit `keep[k]` is bit k.
pub fn reduced(psi: &[Complex64], n: usize, keep: &[usize]) -> Dense {
    let env: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = 1 << keep.len();
    let full = |sub: usize, e: usize| -> usize {
        let mut idx = 0;
        for (pos, &q) in keep.iter().enumerate() {
            idx |= bit(sub, pos) << q;
        }
        for (pos, &q) in env.iter().enumerate() {
            idx |= bit(e, pos) << q;
        }
        idx
    };
    let mut rho = vec![vec![c(0.0, 0.0); k]; k];
    for (i, row) in rho.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            for e in 0..1 << env.len() {
                *entry += psi[full(i, e)] * psi[full(j, e)].conj();
            }
        }
    }
    rho
}

fn random_kind(rng: &mut impl Rng, n: usize) -> GateKind {
    let kinds: Vec<GateKind> = GateKind::ALL
        .into_iter()
        .filter(|k| n >= 2 || k.arity() == 1)
        .collect();
    kinds[rng.random_range(0..kinds.len())]
}

fn random_pair(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let a = rng.random_range(0..n);
    vec![a, (a + rng.random_range(1..n)) % n]
}

/// Bound circuit with `len` random gates over `n` qubits.
pub fn random_circuit(rng: &mut impl Rng, n: usize, len: usize) -> Circuit {
    let gates = (0..len)
        .map(|_| {
            let kind = random_kind(rng, n);
            if kind.arity() == 2 {
                Gate::new(kind, random_pair(rng, n), None).unwrap()
            } else {
                let angle = kind
                    .is_parameterized()
                    .then(|| AngleExpr::constant(rng.random_range(-TAU..TAU)));
                Gate::new(kind, vec![rng.random_range(0..n)], angle).unwrap()
            }
        })
        .collect();
    Circuit::new(n, gates).unwrap()
}

pub fn random_angle(rng: &mut impl Rng, depth: usize) -> AngleExpr {
    let pick = if depth == 0 {
        rng.random_range(0..3)
    } else {
        rng.random_range(0..6)
    };
    match pick {
        0 => AngleExpr::constant(rng.random_range(-10.0..10.0)),
        1 => AngleExpr::var(rng.random_range(0..6)),
        2 => AngleExpr::pi_minus_var(rng.random_range(0..6)),
        3 => AngleExpr::scale(rng.random_range(-3.0..3.0), random_angle(rng, depth - 1)),
        4 => AngleExpr::sum(
            (0..rng.random_range(1..4))
                .map(|_| random_angle(rng, depth - 1))
                .collect(),
        ),
        _ => AngleExpr::product(
            (0..rng.random_range(1..3))
                .map(|_| random_angle(rng, depth - 1))
                .collect(),
        ),
    }
}

/// Circuit with symbolic angle expressions, for round-trip checks.
pub fn random_symbolic_circuit(rng: &mut impl Rng, n: usize, len: usize) -> Circuit {
    let gates = (0..len)
        .map(|_| {
            let kind = random_kind(rng, n);
            if kind.arity() == 2 {
                Gate::new(kind, random_pair(rng, n), None).unwrap()
            } else {
                let depth = rng.random_range(0..3);
                let angle = kind.is_parameterized().then(|| random_angle(rng, depth));
                Gate::new(kind, vec![rng.random_range(0..n)], angle).unwrap()
            }
        })
        .collect();
    Circuit::new(n, gates).unwrap()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
