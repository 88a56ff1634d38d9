//! Seeded random-state generators and a brute-force CHSH evaluator for test
//! suites (enabled with the `testkit` feature).
//!
//! Everything here is deterministic given the seed, so tests built on it are
//! reproducible bit for bit.

use std::f64::consts::TAU;

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analytic::{Amplitudes, TwoQubitState};
use crate::bell::correlation_matrix;
use crate::linalg::{dagger, hermitize, kron, pauli, trace, C64};

/// Deterministic generator for reproducible tests.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal deviate via Box-Muller. The first uniform is shifted
/// into (0, 1] so the logarithm stays finite.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (TAU * v).cos()
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(standard_normal(rng), standard_normal(rng))
}

/// Ginibre-ensemble density matrix G G^dagger / tr(G G^dagger): Hermitian,
/// positive, unit trace, and full rank with probability one.
pub fn random_density_matrix(rng: &mut ChaCha8Rng, dim: usize) -> Array2<C64> {
    let g = Array2::from_shape_fn((dim, dim), |_| complex_normal(rng));
    let m = g.dot(&dagger(&g));
    let tr = trace(&m).re;
    hermitize(&m.mapv(|x| x / tr))
}

/// Random full-rank two-qubit state from the Ginibre ensemble.
pub fn random_two_qubit_state(rng: &mut ChaCha8Rng) -> TwoQubitState {
    TwoQubitState::new(random_density_matrix(rng, 4))
}

/// Random X-structured state with vanishing |00><11| coherence, the family
/// the single-excitation dynamics produces. Positivity is guaranteed by
/// drawing |rho23| inside sqrt(rho22 rho33).
pub fn random_x_state(rng: &mut ChaCha8Rng) -> TwoQubitState {
    // Exponential weights normalized to the probability simplex.
    let mut p = [0.0f64; 4];
    let mut sum = 0.0;
    for w in &mut p {
        *w = -(1.0 - rng.random::<f64>()).ln();
        sum += *w;
    }
    for w in &mut p {
        *w /= sum;
    }
    let mag = rng.random::<f64>() * (p[1] * p[2]).sqrt();
    let coh = C64::from_polar(mag, TAU * rng.random::<f64>());
    let mut rho = Array2::zeros((4, 4));
    for (k, &w) in p.iter().enumerate() {
        rho[[k, k]] = C64::new(w, 0.0);
    }
    rho[[1, 2]] = coh;
    rho[[2, 1]] = coh.conj();
    TwoQubitState::new(rho)
}

/// Haar-random 2x2 unitary (up to an irrelevant global phase): a uniformly
/// random unit column plus its orthogonal complement with a uniform
/// relative phase.
pub fn random_unitary_2(rng: &mut ChaCha8Rng) -> Array2<C64> {
    loop {
        let a = complex_normal(rng);
        let b = complex_normal(rng);
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n < 1e-6 {
            continue;
        }
        let (a, b) = (a / n, b / n);
        let phase = C64::from_polar(1.0, TAU * rng.random::<f64>());
        let mut u = Array2::zeros((2, 2));
        u[[0, 0]] = a;
        u[[1, 0]] = b;
        u[[0, 1]] = -b.conj() * phase;
        u[[1, 1]] = a.conj() * phase;
        return u;
    }
}

/// Random single-excitation amplitudes: uniform direction, squared norm
/// uniform in [0.25, 1] (bounded away from the vacuum).
pub fn random_amplitudes(rng: &mut ChaCha8Rng) -> Amplitudes {
    loop {
        let c1 = complex_normal(rng);
        let c2 = complex_normal(rng);
        let n = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        if n < 1e-6 {
            continue;
        }
        let scale = (0.25 + 0.75 * rng.random::<f64>()).sqrt() / n;
        return Amplitudes {
            c1: c1 * scale,
            c2: c2 * scale,
        };
    }
}

/// Uniformly random direction on the Bloch sphere.
pub fn random_unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v = [
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
        ];
        let n = norm3(v);
        if n > 1e-6 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn apply3(t: &Array2<f64>, v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = t[[i, 0]] * v[0] + t[[i, 1]] * v[1] + t[[i, 2]] * v[2];
    }
    out
}

/// Spin operator along a direction: v . sigma.
pub fn direction_operator(v: [f64; 3]) -> Array2<C64> {
    let sigma = pauli();
    let mut op = Array2::zeros((2, 2));
    for (vk, sk) in v.iter().zip(&sigma) {
        op = op + sk.mapv(|x| x * *vk);
    }
    op
}

/// CHSH expectation Tr[rho (A (x) (B + B') + A' (x) (B - B'))] for concrete
/// measurement directions. Evaluated directly from the operators, with no
/// shortcut through the correlation matrix.
pub fn chsh_value(
    state: &TwoQubitState,
    a: [f64; 3],
    a_prime: [f64; 3],
    b: [f64; 3],
    b_prime: [f64; 3],
) -> f64 {
    let oa = direction_operator(a);
    let oap = direction_operator(a_prime);
    let ob = direction_operator(b);
    let obp = direction_operator(b_prime);
    let bell_op = kron(&oa, &(&ob + &obp)) + kron(&oap, &(&ob - &obp));
    trace(&state.rho().dot(&bell_op)).re
}

/// Stochastic lower bound on the CHSH maximum: random directions for the
/// second party, the optimal first-party response for each draw, and the
/// settings scored through [`chsh_value`]. Converges to the true maximum
/// from below as `samples` grows.
pub fn brute_force_chsh(rng: &mut ChaCha8Rng, state: &TwoQubitState, samples: usize) -> f64 {
    let t = correlation_matrix(state).0;
    let mut best = f64::NEG_INFINITY;
    for _ in 0..samples {
        let b = random_unit_vector(rng);
        let bp = random_unit_vector(rng);
        // E(a, b) = a . (T b), so the best unit a aligns with T(b + b')
        // and the best a' with T(b - b').
        let a = unit_or_random(apply3(&t, add3(b, bp)), rng);
        let ap = unit_or_random(apply3(&t, sub3(b, bp)), rng);
        best = best.max(chsh_value(state, a, ap, b, bp).abs());
    }
    best
}

fn unit_or_random(v: [f64; 3], rng: &mut ChaCha8Rng) -> [f64; 3] {
    let n = norm3(v);
    if n > 1e-12 {
        [v[0] / n, v[1] / n, v[2] / n]
    } else {
        random_unit_vector(rng)
    }
}
