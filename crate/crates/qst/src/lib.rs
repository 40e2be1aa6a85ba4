//! Dense-matrix simulator for quantum state transfer (QST) through a hybrid
//! electromechanical chain: a superconducting qubit coupled to a
//! transmission-line resonator (strength `g1`), a nanomechanical resonator
//! coupled to an NV-center spin (strength `g2`), and the two resonators
//! linked by a parametric photon-hopping interaction (strength `J`).
//!
//! The library integrates the Lindblad master equation for the full density
//! matrix, extracts single-excitation populations and the conditional
//! transfer fidelity, and provides parameter sweeps that locate the
//! intermediate-coupling optimum of the chain. A closed-system
//! eigendecomposition oracle for the equivalent 4-site chain is included for
//! cross-checking the integrator.
//!
//! All quantities are expressed in normalized units with `g2 = 1` setting
//! the frequency scale (times in `1/g2`). Physically, `g2/2π ≈ 115 kHz` for
//! a magnetized nanobeam above an NV center, which puts the default decay
//! rates (`ξ = 0.03`, `ζ = 0.001`) at the few-kHz level; those physical
//! numbers are documentation only and never enter the simulation.
//!
//! # Layout
//!
//! - [`hilbert`]: composite Hilbert-space bookkeeping, dense operators,
//!   states, density matrices, embedding and partial traces.
//! - [`model`]: the chain Hamiltonian, collapse channels, initial/target
//!   states, and NV dressed-state parameters.
//! - [`dynamics`]: the RK4 Lindblad integrator, the closed-chain oracle,
//!   and observable extraction (populations, fidelity, maxima).
//! - [`sweep`]: 1-D parameter sweeps, regime classification, and analytic
//!   transfer-time predictors.
//! - [`cli`]: the `qst` command-line front end (configs, CSV output,
//!   figure-reproduction presets).

pub mod cli;
pub mod dynamics;
pub mod hilbert;
pub mod model;
pub mod sweep;

pub use dynamics::{
    evolve_closed_chain, evolve_master, fidelity, max_fidelity, populations, IntegratorConfig,
    Trajectory,
};
pub use hilbert::{DensityMatrix, Operator, StateVector, SubsystemLayout};
pub use model::{DecoherenceRates, ModelParams, NvDressing};
pub use sweep::{Regime, SweepAxis, SweepResult, SweepSpec};

/// Errors shared across the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {0}: every subsystem dimension must be at least 2")]
    InvalidDimension(usize),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("slot {slot}: local operator has dimension {got}, layout expects {expected}")]
    SlotDimMismatch {
        slot: usize,
        got: usize,
        expected: usize,
    },
    #[error("subsystem index {slot} out of range for a layout with {count} subsystems")]
    InvalidSlot { slot: usize, count: usize },
    #[error("dimension mismatch in {context}: got {got}, expected {expected}")]
    DimensionMismatch {
        context: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("invalid detuning {0}: must be positive")]
    InvalidDetuning(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("state is not normalized: |norm - 1| = {0:.3e}")]
    NotNormalized(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("integration diverged at step {step} (t = {t}): non-finite entries in the state")]
    IntegrationDiverged { step: usize, t: f64 },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("sweep point {index} (axis value {value}): {source}")]
    SweepPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
