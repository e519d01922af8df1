mod support;

use num_complex::Complex64;
use qmetric::rng;
use qmetric::sim::{
    simulate_density, simulate_statevector, von_neumann_entropy, Circuit, DensityMatrix, Gate,
    GateKind, NoiseModel, PartialTrace, QuantumState,
};
use rand::Rng;
use support::{embed, final_state, matmul, max_abs_diff, random_circuit, reduced, Dense};

#[test]
fn statevector_matches_full_unitary() {
    let mut r = rng::stream(2024, 0);
    for _ in 0..200 {
        let n = r.random_range(1..=4);
        let len = r.random_range(0..=20);
        let c = random_circuit(&mut r, n, len);
        let got = simulate_statevector(&c).unwrap();
        let want = final_state(&c);
        assert!(max_abs_diff(got.amplitudes(), &want) < 1e-9, "{c:?}");
    }
}

#[test]
fn partial_trace_matches_index_summation() {
    let mut r = rng::stream(7, 1);
    for _ in 0..100 {
        let n = r.random_range(2..=4);
        let c = random_circuit(&mut r, n, 16);
        let psi = simulate_statevector(&c).unwrap();
        let mut keep: Vec<usize> = (0..n).filter(|_| r.random_bool(0.5)).collect();
        if keep.is_empty() {
            keep.push(r.random_range(0..n));
        }
        let got = psi.partial_trace(&keep).unwrap();
        let want = reduced(psi.amplitudes(), n, &keep);
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                assert!((got.matrix()[(i, j)] - w).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn ghz_keeps_two_qubit_classical_mixture() {
    let c = Circuit::new(3, vec![Gate::h(0), Gate::cx(0, 1), Gate::cx(1, 2)]).unwrap();
    let psi = simulate_statevector(&c).unwrap();
    let rho = psi.partial_trace(&[0, 1]).unwrap();
    let want = reduced(psi.amplitudes(), 3, &[0, 1]);
    assert!((want[0][0].re - 0.5).abs() < 1e-15 && (want[3][3].re - 0.5).abs() < 1e-15);
    for (i, row) in want.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            assert!((rho.matrix()[(i, j)] - w).norm() < 1e-15);
        }
    }
}

#[test]
fn entropies_of_reference_states() {
    let bell = Circuit::new(2, vec![Gate::h(0), Gate::cx(0, 1)]).unwrap();
    let ghz = Circuit::new(3, vec![Gate::h(0), Gate::cx(0, 1), Gate::cx(0, 2)]).unwrap();
    let product = Circuit::new(2, vec![Gate::h(0), Gate::ry(1, 0.7)]).unwrap();
    let s = |c: &Circuit| {
        let rho = simulate_statevector(c)
            .unwrap()
            .partial_trace(&[0])
            .unwrap();
        von_neumann_entropy(&rho).unwrap()
    };
    assert!((s(&bell) - 1.0).abs() < 1e-10);
    assert!((s(&ghz) - 1.0).abs() < 1e-10);
    assert!(s(&product).abs() < 1e-10);
}

fn dagger(m: &Dense) -> Dense {
    (0..m.len())
        .map(|i| (0..m.len()).map(|j| m[j][i].conj()).collect())
        .collect()
}

fn conjugate_by(u: &Dense, rho: &Dense) -> Dense {
    matmul(&matmul(u, rho), &dagger(u))
}

#[test]
fn noisy_bell_matches_dense_kraus_sum() {
    let p = 0.1;
    let h = Gate::h(0);
    let cx = Gate::cx(0, 1);
    let noise = NoiseModel::new(0.0, p, 0.0).unwrap();
    let got = simulate_density(
        &Circuit::new(2, vec![h.clone(), cx.clone()]).unwrap(),
        &noise,
    )
    .unwrap();

    let zero = Complex64::new(0.0, 0.0);
    let mut rho: Dense = vec![vec![zero; 4]; 4];
    rho[0][0] = Complex64::new(1.0, 0.0);
    rho = conjugate_by(&embed(&h, 2), &rho);
    rho = conjugate_by(&embed(&cx, 2), &rho);

    let paulis = [
        None,
        Some(GateKind::X),
        Some(GateKind::Y),
        Some(GateKind::Z),
    ];
    let mut out: Dense = vec![vec![zero; 4]; 4];
    for a in paulis {
        for b in paulis {
            let mut op: Dense = embed(&Gate::rotation(GateKind::RZ, 0, 0.0), 2);
            for (q, k) in [(0, a), (1, b)] {
                if let Some(k) = k {
                    op = matmul(&embed(&Gate::fixed(k, q), 2), &op);
                }
            }
            let w = if a.is_none() && b.is_none() {
                1.0 - 15.0 * p / 16.0
            } else {
                p / 16.0
            };
            let term = conjugate_by(&op, &rho);
            for i in 0..4 {
                for j in 0..4 {
                    out[i][j] += term[i][j] * w;
                }
            }
        }
    }
    for (i, row) in out.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            assert!((got.matrix()[(i, j)] - w).norm() < 1e-12, "({i},{j})");
        }
    }
    // the channel reduces to (1 - p) ρ + p I/4 on a pure input
    assert!((got.purity() - (0.925f64.powi(2) + 3.0 * 0.025f64.powi(2))).abs() < 1e-12);
}

#[test]
fn noiseless_density_is_outer_product() {
    let mut r = rng::stream(99, 3);
    for _ in 0..20 {
        let n = r.random_range(1..=3);
        let c = random_circuit(&mut r, n, 12);
        let rho = simulate_density(&c, &NoiseModel::none()).unwrap();
        let pure = DensityMatrix::from_pure(&simulate_statevector(&c).unwrap());
        assert!((rho.matrix() - pure.matrix()).norm() < 1e-10);
    }
}

#[test]
fn resource_guard() {
    let c = Circuit::empty(21).unwrap();
    assert!(matches!(
        simulate_statevector(&c),
        Err(qmetric::Error::ResourceLimit(_))
    ));
    let c = Circuit::empty(11).unwrap();
    assert!(matches!(
        simulate_density(&c, &NoiseModel::none()),
        Err(qmetric::Error::ResourceLimit(_))
    ));
    assert_eq!(QuantumState::zero(3).dim(), 8);
}
