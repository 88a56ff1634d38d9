//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A density matrix was handed to the X-state Bell formula but carries
    /// weight outside the diagonal/anti-diagonal beyond tolerance. Callers
    /// should fall back to the general Horodecki evaluation.
    #[error("state is not X-structured: off-pattern entry of magnitude {magnitude:.3e}")]
    NotXStructured { magnitude: f64 },

    /// Single-excitation amplitudes with norm above one beyond tolerance;
    /// signals a numerical fault upstream of the state reconstruction.
    #[error("amplitude norm {norm} exceeds 1 beyond tolerance")]
    AmplitudeNorm { norm: f64 },

    /// Adaptive integrator drove the step size below the representable
    /// minimum while error control still rejected the step.
    #[error("integrator step size underflow at tau = {tau}")]
    StepSizeUnderflow { tau: f64 },

    /// Matrix dimensions inconsistent with the generator.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Integrator failure while sweeping, annotated with the trajectory.
    #[error("trajectory failed at tau = {tau}, r1 = {r1}: {source}")]
    Trajectory {
        tau: f64,
        r1: f64,
        #[source]
        source: Box<Error>,
    },

    /// The threshold bisection bracket does not straddle a sign change of
    /// the violation functional.
    #[error(
        "invalid threshold bracket: V(low) = {v_low:.3e}, V(high) = {v_high:.3e} \
         (need V(low) > 0 >= V(high))"
    )]
    InvalidBracket { v_low: f64, v_high: f64 },

    /// An aggregation was asked for on an empty collection.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}
