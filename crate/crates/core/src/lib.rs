//! Density-matrix simulation of two-level and bright/dark multilevel quantum
//! systems driven by chirped laser pulses whose phase is a truncated Taylor
//! series.
//!
//! Conventions: time in ps, frequencies in angular rad/ps, ħ = 1, ground
//! state at index 0 and bright state at index 1.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod gates;
pub mod linalg;
pub mod propagator;
pub mod pulse;
pub mod quantum_system;
pub mod units;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use propagator::{
    evolve_density, evolve_statevector, DensityMatrix, DensityTrajectory, IntegratorConfig, Method,
};
pub use pulse::{ChirpCoefficients, EnvelopeShape, EnvelopeSpec, PulseSpec};
pub use quantum_system::{DrivenSystem, HamiltonianSource, QuantumSystem};
