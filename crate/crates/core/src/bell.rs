//! Maximal CHSH Bell function of two-qubit states.
//!
//! Two evaluation paths are provided and kept deliberately independent so
//! they can cross-check each other:
//!
//! * [`chsh_max_xstate`] — closed form for X-structured states built from
//!   the three quantities u1, u2, u3 (diagonal balance and anti-diagonal
//!   coherences), maximizing u_i + u_j over the three unordered pairs.
//! * [`chsh_max_horodecki`] — the general criterion: B = 2 sqrt(M) with M
//!   the sum of the two largest eigenvalues of T^T T, where T is the 3x3
//!   Pauli correlation matrix.
//!
//! For the states produced by this crate (rho14 = 0) the two agree exactly.
//! For X states with both anti-diagonal coherences nonzero the closed form
//! is known to under-report, so [`violation_margin`] only dispatches to it
//! when rho14 vanishes at the structure tolerance.

use ndarray::Array2;

use crate::analytic::TwoQubitState;
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, symmetric_eigenvalues, trace, C64};

/// Tolerance below which an entry is considered structurally zero when
/// testing for the X pattern.
pub const X_STRUCTURE_TOL: f64 = 1e-10;

/// Maximal CHSH value, the index pair attaining it, and the violation
/// margin max(0, B - 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellResult {
    pub b: f64,
    /// For the X-state path: the 1-based indices into (u1, u2, u3) of the
    /// maximizing pair. For the Horodecki path: the 1-based descending ranks
    /// of the two retained eigenvalues, always (1, 2).
    pub pair: (usize, usize),
    pub violation: f64,
}

impl BellResult {
    fn from_b(b: f64, pair: (usize, usize)) -> Self {
        BellResult {
            b,
            pair,
            violation: (b - 2.0).max(0.0),
        }
    }
}

/// 3x3 Pauli correlation matrix T_ij = Tr[rho (sigma_i x sigma_j)].
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(pub Array2<f64>);

/// Largest off-pattern magnitude relative to the X structure (nonzero
/// entries allowed only on the diagonal and the anti-diagonal).
fn x_structure_defect(rho: &Array2<C64>) -> f64 {
    let mut worst = 0.0f64;
    for ((i, j), v) in rho.indexed_iter() {
        let on_pattern = i == j || i + j == 3;
        if !on_pattern {
            worst = worst.max(v.norm());
        }
    }
    worst
}

/// Closed-form maximal CHSH value for X-structured states.
///
/// u1 = (rho11 + rho44 - rho22 - rho33)^2,
/// u2 = 4(|rho23|^2 + |rho14|^2),
/// u3 = 4(|rho23|^2 - |rho14|^2),
/// B  = 2 max_{i != j} sqrt(u_i + u_j), negative pair sums clamped to zero.
///
/// u1 is additionally capped at 1: the diagonal balance is a difference of
/// probabilities summing to one, so |..| <= 1 holds for every density
/// matrix and the cap only removes last-ulp rounding (keeping B(0) <= 2
/// exact for product initial states).
pub fn chsh_max_xstate(state: &TwoQubitState) -> Result<BellResult> {
    let rho = state.rho();
    let defect = x_structure_defect(rho);
    if defect > X_STRUCTURE_TOL {
        return Err(Error::NotXStructured { magnitude: defect });
    }
    let diag_balance = rho[[0, 0]].re + rho[[3, 3]].re - rho[[1, 1]].re - rho[[2, 2]].re;
    let u1 = (diag_balance * diag_balance).min(1.0);
    let q = rho[[1, 2]].norm_sqr(); // |rho23|^2
    let p = rho[[0, 3]].norm_sqr(); // |rho14|^2
    let u2 = 4.0 * (q + p);
    let u3 = 4.0 * (q - p);
    let candidates = [((1, 2), u1 + u2), ((1, 3), u1 + u3), ((2, 3), u2 + u3)];
    let mut best = candidates[0];
    for cand in &candidates[1..] {
        if cand.1 > best.1 {
            best = *cand;
        }
    }
    Ok(BellResult::from_b(2.0 * best.1.max(0.0).sqrt(), best.0))
}

/// Pauli correlation matrix of an arbitrary two-qubit state.
pub fn correlation_matrix(state: &TwoQubitState) -> CorrelationMatrix {
    let sigma = pauli();
    let mut t = Array2::zeros((3, 3));
    for i in 0..3 {
        for j in 0..3 {
            let op = kron(&sigma[i], &sigma[j]);
            t[[i, j]] = trace(&state.rho().dot(&op)).re;
        }
    }
    CorrelationMatrix(t)
}

/// General maximal CHSH value: B = 2 sqrt(e1 + e2) with e1 >= e2 the two
/// largest eigenvalues of T^T T.
pub fn chsh_max_horodecki(state: &TwoQubitState) -> BellResult {
    let t = correlation_matrix(state).0;
    let m = t.t().dot(&t);
    let mut eig = symmetric_eigenvalues(&m);
    eig.sort_by(|a, b| b.total_cmp(a));
    let sum = (eig[0] + eig[1]).max(0.0);
    BellResult::from_b(2.0 * sum.sqrt(), (1, 2))
}

/// Bell result with automatic dispatch: the X-state closed form when the
/// state is X-structured with vanishing rho14 (where it is exact), the
/// Horodecki criterion otherwise.
pub fn bell_result(state: &TwoQubitState) -> BellResult {
    let rho = state.rho();
    if x_structure_defect(rho) <= X_STRUCTURE_TOL && rho[[0, 3]].norm() <= X_STRUCTURE_TOL {
        if let Ok(res) = chsh_max_xstate(state) {
            return res;
        }
    }
    chsh_max_horodecki(state)
}

/// Violation margin max(0, B - 2) of the dispatched Bell result.
pub fn violation_margin(state: &TwoQubitState) -> f64 {
    bell_result(state).violation
}
