use nalgebra::DMatrix;
use num_complex::Complex64;

use super::circuit::Circuit;
use super::gate::{Mat2, Mat4};
use super::kernel;
use super::noise::NoiseModel;
use super::state::{QuantumState, SimLimits};
use crate::error::{Error, Result};

pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const PSD_TOLERANCE: f64 = -1e-9;
/// Eigenvalues at or below this contribute nothing to the entropy.
pub const EIGEN_CLAMP: f64 = 1e-12;
pub const PURITY_TOLERANCE: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite matrix over `num_qubits`
/// qubits. Basis index bit `q` is qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates and wraps a matrix.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = matrix.nrows();
        if d != matrix.ncols() || d < 2 || !d.is_power_of_two() {
            return Err(Error::invalid(format!(
                "density matrix must be square with a power-of-two dimension >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = hermitian_defect(&matrix);
        if asym > HERMITIAN_TOLERANCE {
            return Err(Error::invalid(format!(
                "matrix is not Hermitian (defect {asym:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::invalid(format!("trace {tr} is not 1")));
        }
        let min = hermitian_eigenvalues(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < PSD_TOLERANCE {
            return Err(Error::invalid(format!(
                "matrix is not positive semidefinite (eigenvalue {min:e})"
            )));
        }
        Ok(DensityMatrix {
            num_qubits: d.trailing_zeros() as usize,
            matrix,
        })
    }

    pub fn from_pure(state: &QuantumState) -> Self {
        let a = state.amplitudes();
        let d = a.len();
        DensityMatrix {
            num_qubits: state.num_qubits(),
            matrix: DMatrix::from_fn(d, d, |r, c| a[r] * a[c].conj()),
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        DensityMatrix {
            num_qubits,
            matrix: DMatrix::from_diagonal_element(d, d, Complex64::new(1.0 / d as f64, 0.0)),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        // Tr(rho rho) = sum |rho_ij|^2 for Hermitian rho
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= PURITY_TOLERANCE
    }

    /// Eigenvalues in ascending order, after symmetrizing away roundoff.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = hermitian_eigenvalues(&self.matrix);
        ev.sort_by(f64::total_cmp);
        ev
    }

    fn apply_unitary_1q(&mut self, q: usize, m: &Mat2) {
        let n = self.num_qubits;
        let data = self.matrix.as_mut_slice();
        // column-major storage: index = col * d + row, so row bits come first
        kernel::apply_1q(data, q, m);
        kernel::apply_1q(data, q + n, &kernel::conj2(m));
    }

    fn apply_unitary_2q(&mut self, a: usize, b: usize, m: &Mat4) {
        let n = self.num_qubits;
        let data = self.matrix.as_mut_slice();
        kernel::apply_2q(data, a, b, m);
        kernel::apply_2q(data, a + n, b + n, &kernel::conj4(m));
    }

    fn apply_channel_1q(&mut self, q: usize, kraus: &[Mat2]) {
        let mut acc = DMatrix::zeros(self.dim(), self.dim());
        for k in kraus {
            let mut term = self.clone();
            term.apply_unitary_1q(q, k);
            acc += term.matrix;
        }
        self.matrix = acc;
    }

    fn apply_channel_2q(&mut self, a: usize, b: usize, kraus: &[Mat4]) {
        let mut acc = DMatrix::zeros(self.dim(), self.dim());
        for k in kraus {
            let mut term = self.clone();
            term.apply_unitary_2q(a, b, k);
            acc += term.matrix;
        }
        self.matrix = acc;
    }
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let d = m.nrows();
    let mut worst: f64 = 0.0;
    for c in 0..d {
        for r in 0..=c {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

fn symmetrized(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    symmetrized(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// Evolves `|0...0><0...0|` through a bound circuit, applying `U rho U†` per
/// gate followed by the noise channels on the gate's qubits.
pub fn simulate_density(circuit: &Circuit, noise: &NoiseModel) -> Result<DensityMatrix> {
    simulate_density_with(circuit, noise, &SimLimits::default())
}

pub fn simulate_density_with(
    circuit: &Circuit,
    noise: &NoiseModel,
    limits: &SimLimits,
) -> Result<DensityMatrix> {
    if !circuit.is_bound() {
        return Err(Error::invalid(format!(
            "circuit has {} unbound parameter slot(s)",
            circuit.num_params()
        )));
    }
    if circuit.num_qubits() > limits.max_density_qubits {
        return Err(Error::ResourceLimit(format!(
            "{} qubits exceeds the density-matrix limit of {}",
            circuit.num_qubits(),
            limits.max_density_qubits
        )));
    }
    let mut rho = DensityMatrix::from_pure(&QuantumState::zero(circuit.num_qubits()));
    let channels_1q = noise.channels_1q();
    let channel_2q = noise.channel_2q();
    for g in circuit.gates() {
        match g.qubits() {
            [q] => {
                rho.apply_unitary_1q(*q, &g.matrix_1q()?);
                for ch in &channels_1q {
                    rho.apply_channel_1q(*q, ch);
                }
            }
            [a, b] => {
                rho.apply_unitary_2q(*a, *b, &g.matrix_2q()?);
                if let Some(ch) = &channel_2q {
                    rho.apply_channel_2q(*a, *b, ch);
                }
            }
            _ => unreachable!("gate arity is validated on construction"),
        }
    }
    Ok(rho)
}

/// Sorts `keep` and checks it names distinct qubits below `n`.
fn checked_keep(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::invalid("partial trace must keep at least one qubit"));
    }
    let mut k = keep.to_vec();
    k.sort_unstable();
    if k.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!("duplicate qubit in {keep:?}")));
    }
    if let Some(&q) = k.iter().find(|&&q| q >= n) {
        return Err(Error::invalid(format!(
            "qubit {q} out of range for {n} qubits"
        )));
    }
    Ok(k)
}

/// Full-register offsets for every assignment of `qubits`, where bit `i` of
/// the local index drives `qubits[i]`.
fn offsets(qubits: &[usize]) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|local| {
            qubits
                .iter()
                .enumerate()
                .filter(|(i, _)| (local >> i) & 1 == 1)
                .map(|(_, &q)| 1usize << q)
                .sum()
        })
        .collect()
}

fn split(keep: &[usize], n: usize) -> (Vec<usize>, Vec<usize>) {
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    (offsets(keep), offsets(&traced))
}

/// Reduction onto a subset of qubits. The kept qubits are sorted ascending;
/// the `i`-th of them becomes qubit `i` of the result.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

impl PartialTrace for QuantumState {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = checked_keep(keep, self.num_qubits())?;
        let (ka, kt) = split(&keep, self.num_qubits());
        let psi = self.amplitudes();
        let dk = ka.len();
        let m = DMatrix::from_fn(dk, dk, |r, c| {
            kt.iter()
                .map(|&t| psi[ka[r] | t] * psi[ka[c] | t].conj())
                .sum::<Complex64>()
        });
        Ok(DensityMatrix {
            num_qubits: keep.len(),
            matrix: m,
        })
    }
}

impl PartialTrace for DensityMatrix {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = checked_keep(keep, self.num_qubits)?;
        let (ka, kt) = split(&keep, self.num_qubits);
        let rho = &self.matrix;
        let dk = ka.len();
        let m = DMatrix::from_fn(dk, dk, |r, c| {
            kt.iter()
                .map(|&t| rho[(ka[r] | t, ka[c] | t)])
                .sum::<Complex64>()
        });
        Ok(DensityMatrix {
            num_qubits: keep.len(),
            matrix: m,
        })
    }
}

/// `-Σ λ log2 λ` over the spectrum, in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let defect = hermitian_defect(&rho.matrix);
    if defect > HERMITIAN_TOLERANCE {
        return Err(Error::invalid(format!(
            "entropy of a non-Hermitian matrix (defect {defect:e})"
        )));
    }
    let s: f64 = hermitian_eigenvalues(&rho.matrix)
        .into_iter()
        .filter(|&l| l > EIGEN_CLAMP)
        .map(|l| -l * l.log2())
        .sum();
    Ok(s.clamp(0.0, rho.num_qubits as f64))
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, clamped to
/// `[0, 1]`. When either argument is pure this reduces to `Tr(rho sigma)`.
pub fn state_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::invalid(format!(
            "fidelity between {}x{} and {}x{} matrices",
            rho.dim(),
            rho.dim(),
            sigma.dim(),
            sigma.dim()
        )));
    }
    let f = if rho.is_pure() || sigma.is_pure() {
        // Tr(A B) for Hermitian A, B = Σ_ij A_ij conj(B_ij)
        rho.matrix
            .iter()
            .zip(sigma.matrix.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
    } else {
        let eig = symmetrized(&rho.matrix).symmetric_eigen();
        let sqrt_diag = DMatrix::from_diagonal(
            &eig.eigenvalues
                .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0)),
        );
        let v = &eig.eigenvectors;
        let sqrt_rho = v * sqrt_diag * v.adjoint();
        let inner = &sqrt_rho * &sigma.matrix * &sqrt_rho;
        let tr: f64 = hermitian_eigenvalues(&inner)
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .sum();
        tr * tr
    };
    Ok(f.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gate::Gate;
    use crate::sim::state::simulate_statevector;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(v: &[f64]) -> DensityMatrix {
        let d = v.len();
        DensityMatrix::new(DMatrix::from_fn(d, d, |r, cc| {
            if r == cc {
                c(v[r])
            } else {
                c(0.0)
            }
        }))
        .unwrap()
    }

    fn bell_circuit() -> Circuit {
        Circuit::new(2, vec![Gate::h(0), Gate::cx(0, 1)]).unwrap()
    }

    fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
        a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let mut m = DMatrix::from_diagonal_element(2, 2, c(0.5));
        m[(0, 1)] = c(0.3);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(DMatrix::from_diagonal_element(2, 2, c(0.6))).is_err());
        let neg = DMatrix::from_fn(
            2,
            2,
            |r, cc| if r == cc { c([1.5, -0.5][r]) } else { c(0.0) },
        );
        assert!(DensityMatrix::new(neg).is_err());
        assert!(DensityMatrix::new(DMatrix::from_diagonal_element(3, 3, c(1.0 / 3.0))).is_err());
    }

    #[test]
    fn noiseless_density_is_pure_projector() {
        let rho = simulate_density(&bell_circuit(), &NoiseModel::none()).unwrap();
        let psi = simulate_statevector(&bell_circuit()).unwrap();
        assert!(close(
            rho.matrix(),
            DensityMatrix::from_pure(&psi).matrix(),
            1e-10
        ));
        assert!(rho.is_pure());
    }

    #[test]
    fn full_depolarization_of_x() {
        let circ = Circuit::new(1, vec![Gate::x(0)]).unwrap();
        let rho = simulate_density(&circ, &NoiseModel::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(close(
            rho.matrix(),
            DensityMatrix::maximally_mixed(1).matrix(),
            1e-12
        ));
    }

    #[test]
    fn amplitude_damping_relaxes_excited_state() {
        let circ = Circuit::new(1, vec![Gate::x(0)]).unwrap();
        let rho = simulate_density(&circ, &NoiseModel::new(0.0, 0.0, 0.3).unwrap()).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.3).abs() < 1e-12);
        assert!((rho.matrix()[(1, 1)].re - 0.7).abs() < 1e-12);
    }

    #[test]
    fn density_guard() {
        let circ = Circuit::new(11, vec![]).unwrap();
        assert!(matches!(
            simulate_density(&circ, &NoiseModel::none()),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn bell_reduced_state_is_mixed() {
        let psi = simulate_statevector(&bell_circuit()).unwrap();
        let r = psi.partial_trace(&[0]).unwrap();
        assert!(close(
            r.matrix(),
            DensityMatrix::maximally_mixed(1).matrix(),
            1e-15
        ));
        assert!((von_neumann_entropy(&r).unwrap() - 1.0).abs() < 1e-12);
        let rd = DensityMatrix::from_pure(&psi).partial_trace(&[1]).unwrap();
        assert!(close(rd.matrix(), r.matrix(), 1e-15));
    }

    #[test]
    fn product_state_reduction() {
        // qubit 0 in |0>, qubit 1 in |+>
        let psi = simulate_statevector(&Circuit::new(2, vec![Gate::h(1)]).unwrap()).unwrap();
        let r = psi.partial_trace(&[1]).unwrap();
        let plus = DMatrix::from_element(2, 2, c(0.5));
        assert!(close(r.matrix(), &plus, 1e-15));
        assert!((r.purity() - 1.0).abs() < 1e-12);
        assert!(von_neumann_entropy(&r).unwrap().abs() < 1e-10);
    }

    #[test]
    fn partial_trace_argument_errors() {
        let psi = QuantumState::zero(2);
        assert!(psi.partial_trace(&[]).is_err());
        assert!(psi.partial_trace(&[2]).is_err());
        assert!(psi.partial_trace(&[1, 1]).is_err());
        assert_eq!(psi.partial_trace(&[1, 0]).unwrap().num_qubits(), 2);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(von_neumann_entropy(&diag(&[1.0, 0.0])).unwrap(), 0.0);
        assert!((von_neumann_entropy(&diag(&[0.5, 0.5])).unwrap() - 1.0).abs() < 1e-15);
        assert!(
            (von_neumann_entropy(&DensityMatrix::maximally_mixed(3)).unwrap() - 3.0).abs() < 1e-12
        );
    }

    #[test]
    fn entropy_inverts_bisection_oracle() {
        // binary entropy h(a) = 0.8345 solved for a > 1/2 by bisection
        let h = |a: f64| -a * a.log2() - (1.0 - a) * (1.0 - a).log2();
        let (mut lo, mut hi) = (0.5, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.8345 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = 0.5 * (lo + hi);
        assert!((a - 0.73479).abs() < 1e-5);
        let s = von_neumann_entropy(&diag(&[a, 1.0 - a])).unwrap();
        assert!((s - 0.8345).abs() < 1e-9);
    }

    #[test]
    fn fidelity_values() {
        let plus = DensityMatrix::new(DMatrix::from_element(2, 2, c(0.5))).unwrap();
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((state_fidelity(&plus, &plus).unwrap() - 1.0).abs() < 1e-12);
        assert!((state_fidelity(&plus, &mixed).unwrap() - 0.5).abs() < 1e-12);
        assert!((state_fidelity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-12);
        let zero = diag(&[1.0, 0.0]);
        let one = diag(&[0.0, 1.0]);
        assert_eq!(state_fidelity(&zero, &one).unwrap(), 0.0);
        assert!(state_fidelity(&zero, &DensityMatrix::maximally_mixed(2)).is_err());
    }

    #[test]
    fn mixed_fidelity_closed_form() {
        // commuting diagonal states: F = (Σ sqrt(p_i q_i))^2
        let a = diag(&[0.7, 0.3]);
        let b = diag(&[0.2, 0.8]);
        let want = ((0.7f64 * 0.2).sqrt() + (0.3f64 * 0.8).sqrt()).powi(2);
        let f = state_fidelity(&a, &b).unwrap();
        assert!((f - want).abs() < 1e-12);
        assert!((state_fidelity(&b, &a).unwrap() - f).abs() < 1e-9);
    }

    #[test]
    fn noisy_bell_keeps_unit_trace() {
        let rho =
            simulate_density(&bell_circuit(), &NoiseModel::new(0.05, 0.1, 0.02).unwrap()).unwrap();
        let tr = rho.matrix().trace();
        assert!((tr.re - 1.0).abs() < 1e-12);
        assert!(DensityMatrix::new(rho.into_matrix()).is_ok());
    }
}
