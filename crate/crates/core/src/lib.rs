//! Interpretable diagnostics for hybrid quantum-classical models.
//!
//! The crate is organized in three metric families plus the machinery they
//! share:
//!
//! * [`circuit_metrics`]: expressibility, noise fidelity, locality ratio,
//!   entanglement entropy and mutual information of a parameterized circuit.
//! * [`features`]: PCA-based compression and effective dimension, activation
//!   diversity of measurement distributions and output sensitivity.
//! * [`training`]: stability, efficiency, gradient-norm and barren-plateau
//!   indicators computed from training logs.
//!
//! [`sim`] is a small self-contained circuit simulator and [`io`] handles the
//! file formats and report rendering.

pub mod circuit_metrics;
pub mod error;
pub mod exec;
pub mod features;
pub mod io;
pub mod metric;
pub mod rng;
pub mod sim;
pub mod training;

pub use error::{Error, Result};
pub use exec::Execution;
pub use metric::MetricValue;
