mod support;

use proptest::prelude::*;
use qmetric::circuit_metrics::{
    eee, mutual_information, qce, qcf, qlr, subsystem_entropy, SamplingConfig,
};
use qmetric::features::{edqfs, fmcr, pca_spectrum, FeatureMatrix, RowSemantics};
use qmetric::rng;
use qmetric::sim::{
    case_study_circuit, simulate_statevector, state_fidelity, von_neumann_entropy, DensityMatrix,
    NoiseModel, PartialTrace,
};
use qmetric::training::{crossing_epoch, tei, tsi, EpochRecord, TrainingLog};
use qmetric::Execution;
use support::random_circuit;

fn circuit_from(seed: u64, n: usize, len: usize) -> qmetric::sim::Circuit {
    random_circuit(&mut rng::stream(seed, 0), n, len)
}

fn training_log() -> impl Strategy<Value = TrainingLog> {
    (
        prop::collection::vec((0.01f64..5.0, 0.01f64..5.0, 0.0f64..=1.0), 2..40),
        1usize..500,
    )
        .prop_map(|(rows, p)| {
            let epochs = rows
                .into_iter()
                .enumerate()
                .map(|(i, (t, v, a))| EpochRecord {
                    epoch: i as u32 + 1,
                    train_loss: t,
                    val_loss: v,
                    val_accuracy: a,
                })
                .collect();
            TrainingLog::new(epochs, p).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simulation_preserves_norm(seed in any::<u64>(), n in 1usize..=5, len in 0usize..30) {
        let psi = simulate_statevector(&circuit_from(seed, n, len)).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn schmidt_symmetry(seed in any::<u64>(), n in 2usize..=4, len in 0usize..25, mask in 1u32..15) {
        let psi = simulate_statevector(&circuit_from(seed, n, len)).unwrap();
        let a: Vec<usize> = (0..n).filter(|q| mask & (1 << q) != 0).collect();
        let b: Vec<usize> = (0..n).filter(|q| mask & (1 << q) == 0).collect();
        prop_assume!(!a.is_empty() && !b.is_empty());
        let sa = subsystem_entropy(&psi, &a).unwrap();
        let sb = subsystem_entropy(&psi, &b).unwrap();
        prop_assert!((sa - sb).abs() < 1e-8);
        prop_assert!(sa >= 0.0 && sa <= a.len().min(b.len()) as f64 + 1e-9);
    }

    #[test]
    fn mutual_information_is_twice_entropy(seed in any::<u64>(), n in 2usize..=4, len in 0usize..25) {
        let c = circuit_from(seed, n, len);
        let psi = simulate_statevector(&c).unwrap();
        let b: Vec<usize> = (1..n).collect();
        let i = mutual_information(&psi, &[0], &b).unwrap();
        let s = eee(&c, &[0]).unwrap();
        prop_assert!((i - 2.0 * s).abs() < 1e-8);
    }

    #[test]
    fn locality_ratio_matches_recount(seed in any::<u64>(), n in 2usize..=4, len in 1usize..40) {
        let c = circuit_from(seed, n, len);
        let singles = c.gates().iter().filter(|g| g.qubits().len() == 1).count();
        prop_assert_eq!(qlr(&c).unwrap(), singles as f64 / c.gates().len() as f64);
    }

    #[test]
    fn fidelity_falls_with_noise(seed in any::<u64>(), p in 0.0f64..0.2, dp in 0.005f64..0.1) {
        let c = case_study_circuit();
        let cfg = SamplingConfig::with_seed(seed);
        let bound = c.bind(&cfg.draw(c.num_params(), 0)).unwrap();
        let lo = qcf(&bound, &NoiseModel::new(p, p, 0.0).unwrap()).unwrap();
        let hi = qcf(&bound, &NoiseModel::new(p + dp, p + dp, 0.0).unwrap()).unwrap();
        prop_assert!(hi < lo, "{lo} -> {hi}");
        prop_assert!((0.0..=1.0).contains(&hi));
    }

    #[test]
    fn fidelity_is_symmetric(s1 in any::<u64>(), s2 in any::<u64>(), p in 0.0f64..0.5) {
        let noise = NoiseModel::new(p, p, p / 2.0).unwrap();
        let a = qmetric::sim::simulate_density(&circuit_from(s1, 2, 8), &noise).unwrap();
        let b = qmetric::sim::simulate_density(&circuit_from(s2, 2, 8), &noise).unwrap();
        let ab = state_fidelity(&a, &b).unwrap();
        let ba = state_fidelity(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-7, "{ab} vs {ba}");
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((state_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn entropy_within_bounds(seed in any::<u64>(), n in 1usize..=3, p in 0.0f64..1.0) {
        let rho = qmetric::sim::simulate_density(
            &circuit_from(seed, n, 10),
            &NoiseModel::new(p, p, 0.0).unwrap(),
        ).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        prop_assert!(s >= 0.0 && s <= n as f64);
        let mixed = von_neumann_entropy(&DensityMatrix::maximally_mixed(n)).unwrap();
        prop_assert!(s <= mixed + 1e-9);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(seed in any::<u64>(), n in 2usize..=4, q in 0usize..4) {
        let psi = simulate_statevector(&circuit_from(seed, n, 15)).unwrap();
        let rho = psi.partial_trace(&[q % n]).unwrap();
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pca_metrics_are_rotation_invariant(
        rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 4..30),
        angles in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let x = FeatureMatrix::from_rows(&rows, RowSemantics::Generic).unwrap();
        prop_assume!(edqfs(&x).is_ok());
        // product of plane rotations in (0,1), (1,2), (0,2)
        let mut rotated = rows.clone();
        for (k, (i, j)) in [(0, 1), (1, 2), (0, 2)].into_iter().enumerate() {
            let (c, s) = (angles[k].cos(), angles[k].sin());
            for r in rotated.iter_mut() {
                let (a, b) = (r[i], r[j]);
                r[i] = c * a - s * b;
                r[j] = s * a + c * b;
            }
        }
        let y = FeatureMatrix::from_rows(&rotated, RowSemantics::Generic).unwrap();
        prop_assert!((edqfs(&x).unwrap() - edqfs(&y).unwrap()).abs() < 1e-6);
        let spectrum = pca_spectrum(&x).unwrap();
        let on_threshold = spectrum.cumulative_ratio.iter().any(|r| (r - 0.95).abs() < 1e-6);
        if !on_threshold {
            prop_assert_eq!(fmcr(&x, 3, 0.95).unwrap(), fmcr(&y, 3, 0.95).unwrap());
        }
    }

    #[test]
    fn stability_ignores_affine_loss_changes(log in training_log(), scale in 0.1f64..10.0, shift in -0.005f64..3.0) {
        prop_assume!(tsi(&log, 0.2).unwrap().is_some());
        let t = tsi(&log, 0.2).unwrap().unwrap();
        let moved = log.map_losses(|v| scale * v + shift).unwrap();
        let u = tsi(&moved, 0.2).unwrap().unwrap();
        prop_assert!((t - u).abs() <= 1e-7 * t.max(1.0), "{t} vs {u}");
    }

    #[test]
    fn efficiency_monotone_in_threshold(log in training_log(), lo in 0.0f64..1.0, gap in 0.0f64..0.5) {
        let hi = (lo + gap).min(1.0);
        match (tei(&log, lo), tei(&log, hi)) {
            (Some(a), Some(b)) => prop_assert!(b >= a),
            (None, Some(_)) => prop_assert!(false, "lower threshold unreached but higher reached"),
            _ => {}
        }
        if let Some(e) = crossing_epoch(&log, lo) {
            prop_assert!(log.epochs()[e as usize - 1].val_accuracy > lo);
        }
    }

    #[test]
    fn expressibility_is_execution_independent(seed in any::<u64>()) {
        let c = case_study_circuit();
        let serial = SamplingConfig { num_samples: 12, execution: Execution::Serial, ..SamplingConfig::with_seed(seed) };
        let parallel = SamplingConfig { execution: Execution::Parallel, ..serial.clone() };
        let a = qce(&c, &serial).unwrap();
        prop_assert_eq!(a.to_bits(), qce(&c, &parallel).unwrap().to_bits());
        prop_assert!((0.0..=1.0).contains(&a));
    }
}
