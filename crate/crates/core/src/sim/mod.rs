//! Parameterized-circuit simulator: gates, circuits, statevector and noisy
//! density-matrix evolution, partial trace, entropy and fidelity.

mod angle;
mod builders;
mod circuit;
mod density;
mod gate;
mod kernel;
mod noise;
mod state;

pub use angle::AngleExpr;
pub use builders::{build_real_amplitudes, build_zz_feature_map, case_study_circuit, Entanglement};
pub use circuit::{gate_stats, Circuit, GateStats};
pub use density::{
    simulate_density, simulate_density_with, state_fidelity, von_neumann_entropy, DensityMatrix,
    PartialTrace,
};
pub use gate::{single_qubit_matrix, two_qubit_matrix, Gate, GateKind, Mat2, Mat4};
pub use noise::{
    amplitude_damping_kraus, depolarizing_kraus_1q, depolarizing_kraus_2q, NoiseModel,
};
pub use state::{
    simulate_statevector, simulate_statevector_with, Pauli, PauliString, QuantumState, SimLimits,
};
