//! Entanglement dynamics of two qubits coupled to a common lossy cavity
//! mode, tracked through the maximal CHSH value of their reduced state.
//!
//! A single shared excitation exchanged with a Lorentzian (pseudomode)
//! reservoir splits the pair into a sub-radiant combination the reservoir
//! cannot see and a super-radiant one that decays and revives with the
//! cavity memory. Asymmetric coupling stores part of the excitation in the
//! protected combination, which is what lets Bell-inequality violations
//! die and later return.
//!
//! The crate provides:
//!
//! - the closed-form single-excitation solution, including the damped
//!   extension with equal spontaneous emission on both qubits
//!   ([`analytic`]);
//! - maximal CHSH values for X-structured and general states ([`bell`]);
//! - the pseudomode master equation with an adaptive Dormand-Prince
//!   integrator ([`lindblad`], [`ode`]);
//! - Bell traces, Cartesian sweeps, violation intervals, revival counts,
//!   and the spontaneous-emission threshold search ([`sweep`]);
//! - validated parameter records and the standard gauge ([`params`]).
//!
//! The `testkit` feature adds seeded random states and a brute-force CHSH
//! evaluator for downstream test suites.

pub mod analytic;
pub mod bell;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod ode;
pub mod params;
pub mod sweep;
#[cfg(feature = "testkit")]
pub mod testkit;

pub use analytic::{
    amplitudes_at, damped_amplitudes_at, damped_memory_amplitude, density_matrix,
    memory_amplitude, project_initial, Amplitudes, InitialProjection, TwoQubitState,
};
pub use bell::{bell_result, chsh_max_horodecki, chsh_max_xstate, violation_margin, BellResult};
pub use error::{Error, Result};
pub use lindblad::{build_generator, PseudomodeGenerator};
pub use ode::IntegratorConfig;
pub use params::{
    derive_params, params_from_regime, CouplingConfig, DecayConfig, DerivedParams, ReservoirSpec,
};
pub use sweep::{
    bell_at, bell_trace, count_revivals, find_threshold, max_violation, peak_violation, sweep,
    trace_violation_intervals, violation_intervals, Model, SweepGrid, SweepRow, ThresholdResult,
    TimeGrid,
};
