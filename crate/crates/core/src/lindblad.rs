//! Pseudomode master equation for two qubits coupled to a lossy cavity mode.
//!
//! The Lorentzian reservoir is replaced by one discrete cavity mode with
//! amplitude decay `lambda`, coherently coupled to both qubits:
//!
//!   H = R (r1 sp1 + r2 sp2) a + h.c.,
//!   d rho/dt = -i [H, rho]
//!              + lambda (2 a rho a+ - a+a rho - rho a+a)
//!              + sum_i (gamma_i / 2) (2 sm_i rho sp_i - n_i rho - rho n_i).
//!
//! Integrating this equation and tracing out the mode reproduces the exact
//! reduced dynamics of the memory-kernel model, which is what the analytic
//! module computes in closed form; the two paths cross-validate each other.
//!
//! Basis ordering: the joint index is `qq * (cutoff + 1) + n` where the
//! qubit sector qq runs over {0: |11>, 1: |10>, 2: |01>, 3: |00>} and n is
//! the photon number. All matrix products go through a fixed-order scalar
//! accumulation, so enlarging the photon cutoff — which only adds states
//! that are never populated from the single-excitation sector — reproduces
//! the smaller-cutoff trajectory bit for bit.

use ndarray::Array2;

use crate::analytic::TwoQubitState;
use crate::error::{Error, Result};
use crate::linalg::{dagger, hermitize, kron, C64};
use crate::ode::{integrate_to_grid, IntegratorConfig};
use crate::params::{DecayConfig, DerivedParams};

/// Precomputed generator of the pseudomode master equation.
#[derive(Debug, Clone)]
pub struct PseudomodeGenerator {
    dim: usize,
    cutoff: usize,
    lambda: f64,
    gamma: [f64; 2],
    hamiltonian: Array2<C64>,
    field_lower: Array2<C64>,
    field_raise: Array2<C64>,
    qubit_lower: [Array2<C64>; 2],
    qubit_raise: [Array2<C64>; 2],
    /// Diagonals of a+a and sp_i sm_i in the joint basis.
    field_occ: Vec<f64>,
    qubit_occ: [Vec<f64>; 2],
    /// Diagonal of the total excitation number n1 + n2 + a+a.
    total_occ: Vec<f64>,
}

/// Matrix product with a fixed scalar accumulation order (ascending k).
/// Appending rows/columns that are exactly zero on one factor then leaves
/// every shared entry bitwise unchanged, which the cutoff-independence
/// guarantee relies on.
fn mat_mul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (n, m) = a.dim();
    let (m2, p) = b.dim();
    debug_assert_eq!(m, m2, "inner dimensions must agree");
    let mut out = Array2::zeros((n, p));
    for i in 0..n {
        for j in 0..p {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..m {
                acc += a[[i, k]] * b[[k, j]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// rho -> D rho with D diagonal.
fn scale_rows(diag: &[f64], m: &Array2<C64>) -> Array2<C64> {
    let mut out = m.clone();
    for (i, mut row) in out.rows_mut().into_iter().enumerate() {
        for v in row.iter_mut() {
            *v *= diag[i];
        }
    }
    out
}

/// rho -> rho D with D diagonal.
fn scale_cols(m: &Array2<C64>, diag: &[f64]) -> Array2<C64> {
    let mut out = m.clone();
    for mut row in out.rows_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v *= diag[j];
        }
    }
    out
}

fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

/// Build the generator for the given parameters and photon-number cutoff.
/// A cutoff of 1 is exact for single-excitation initial states; larger
/// cutoffs only add provably unpopulated states.
pub fn build_generator(
    params: &DerivedParams,
    decay: &DecayConfig,
    cutoff: usize,
) -> Result<PseudomodeGenerator> {
    decay.validate()?;
    if cutoff < 1 {
        return Err(Error::InvalidParameter(format!(
            "photon cutoff must be at least 1, got {cutoff}"
        )));
    }
    if !(params.lambda > 0.0) || !(params.rabi >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "generator needs lambda > 0 and R >= 0, got lambda = {}, R = {}",
            params.lambda, params.rabi
        )));
    }
    let nf = cutoff + 1;
    let dim = 4 * nf;

    let mut sm = Array2::zeros((2, 2));
    sm[[1, 0]] = C64::new(1.0, 0.0); // sigma_minus in the (|1>, |0>) basis
    let mut a = Array2::zeros((nf, nf));
    for n in 1..nf {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    let id2 = identity(2);
    let idf = identity(nf);

    let qubit_lower = [
        kron(&kron(&sm, &id2), &idf),
        kron(&kron(&id2, &sm), &idf),
    ];
    let qubit_raise = [dagger(&qubit_lower[0]), dagger(&qubit_lower[1])];
    let field_lower = kron(&kron(&id2, &id2), &a);
    let field_raise = dagger(&field_lower);

    // H = R (r1 sp1 + r2 sp2) a + h.c.; forming x + x+ keeps the matrix
    // Hermitian to the last bit.
    let coupling = &qubit_raise[0] * C64::new(params.rabi * params.r1, 0.0)
        + &qubit_raise[1] * C64::new(params.rabi * params.r2, 0.0);
    let half = mat_mul(&coupling, &field_lower);
    let hamiltonian = &half + &dagger(&half);

    let occ = |sector_excited: fn(usize) -> f64| -> Vec<f64> {
        (0..dim).map(|idx| sector_excited(idx / nf)).collect()
    };
    let qubit_occ = [
        occ(|qq| if qq == 0 || qq == 1 { 1.0 } else { 0.0 }),
        occ(|qq| if qq == 0 || qq == 2 { 1.0 } else { 0.0 }),
    ];
    let field_occ: Vec<f64> = (0..dim).map(|idx| (idx % nf) as f64).collect();
    let total_occ: Vec<f64> = (0..dim)
        .map(|i| qubit_occ[0][i] + qubit_occ[1][i] + field_occ[i])
        .collect();

    Ok(PseudomodeGenerator {
        dim,
        cutoff,
        lambda: params.lambda,
        gamma: [decay.gamma1, decay.gamma2],
        hamiltonian,
        field_lower,
        field_raise,
        qubit_lower,
        qubit_raise,
        field_occ,
        qubit_occ,
        total_occ,
    })
}

impl PseudomodeGenerator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn hamiltonian(&self) -> &Array2<C64> {
        &self.hamiltonian
    }

    /// Joint index of qubit sector `qq` (0: |11>, 1: |10>, 2: |01>,
    /// 3: |00>) with `photons` quanta in the mode.
    pub fn index_of(&self, qq: usize, photons: usize) -> usize {
        assert!(qq < 4 && photons <= self.cutoff, "basis label out of range");
        qq * (self.cutoff + 1) + photons
    }

    fn check_dim(&self, rho: &Array2<C64>) -> Result<()> {
        if rho.dim() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rho.dim().0,
            });
        }
        Ok(())
    }

    /// Right-hand side in scaled time tau = lambda t.
    pub fn rhs_tau(&self, rho: &Array2<C64>) -> Array2<C64> {
        let h = &self.hamiltonian;
        let commutator = mat_mul(h, rho) - mat_mul(rho, h);
        let mut d = commutator.mapv(|v| v * C64::new(0.0, -1.0));

        let jump = mat_mul(&mat_mul(&self.field_lower, rho), &self.field_raise);
        d = d + (jump * 2.0 - scale_rows(&self.field_occ, rho) - scale_cols(rho, &self.field_occ))
            * self.lambda;

        for i in 0..2 {
            if self.gamma[i] > 0.0 {
                let jump = mat_mul(&mat_mul(&self.qubit_lower[i], rho), &self.qubit_raise[i]);
                d = d + (jump * 2.0
                    - scale_rows(&self.qubit_occ[i], rho)
                    - scale_cols(rho, &self.qubit_occ[i]))
                    * (0.5 * self.gamma[i]);
            }
        }
        d.mapv_inplace(|v| v / self.lambda);
        d
    }

    /// Integrate the master equation over an ascending tau grid, handing the
    /// (symmetrized) state at each grid point to `sink`.
    pub fn evolve<S>(
        &self,
        rho0: &Array2<C64>,
        tau_grid: &[f64],
        cfg: &IntegratorConfig,
        mut sink: S,
    ) -> Result<()>
    where
        S: FnMut(usize, Array2<C64>),
    {
        self.check_dim(rho0)?;
        integrate_to_grid(
            |rho| self.rhs_tau(rho),
            rho0,
            tau_grid,
            cfg,
            |k, rho| sink(k, hermitize(&rho)),
        )
    }

    /// Integrate from tau0 to tau1 and return the final (symmetrized) state.
    pub fn evolve_span(
        &self,
        rho0: &Array2<C64>,
        tau0: f64,
        tau1: f64,
        cfg: &IntegratorConfig,
    ) -> Result<Array2<C64>> {
        self.check_dim(rho0)?;
        let raw = crate::ode::integrate_span(|rho| self.rhs_tau(rho), rho0, tau0, tau1, cfg)?;
        Ok(hermitize(&raw))
    }

    /// Partial trace over the cavity mode.
    pub fn reduce_qubits(&self, rho: &Array2<C64>) -> Result<TwoQubitState> {
        self.check_dim(rho)?;
        let nf = self.cutoff + 1;
        let mut q = Array2::zeros((4, 4));
        for qq in 0..4 {
            for pp in 0..4 {
                let mut acc = C64::new(0.0, 0.0);
                for n in 0..nf {
                    acc += rho[[qq * nf + n, pp * nf + n]];
                }
                q[[qq, pp]] = acc;
            }
        }
        Ok(TwoQubitState::new(q))
    }

    /// Expectation of the total excitation number n1 + n2 + a+a.
    pub fn excitation_number(&self, rho: &Array2<C64>) -> Result<f64> {
        self.check_dim(rho)?;
        let mut acc = 0.0;
        for i in 0..self.dim {
            acc += self.total_occ[i] * rho[[i, i]].re;
        }
        Ok(acc)
    }

    /// Density matrix for qubit amplitudes (c1, c2) on |10>, |01> with the
    /// mode in vacuum; any norm deficit becomes incoherent ground-state
    /// population, mirroring the analytic initial conditions.
    pub fn single_excitation_state(&self, c1: C64, c2: C64) -> Result<Array2<C64>> {
        let n = c1.norm_sqr() + c2.norm_sqr();
        if n > 1.0 + 1e-12 {
            return Err(Error::AmplitudeNorm { norm: n });
        }
        let mut psi = vec![C64::new(0.0, 0.0); self.dim];
        psi[self.index_of(1, 0)] = c1;
        psi[self.index_of(2, 0)] = c2;
        let mut rho = Array2::zeros((self.dim, self.dim));
        for i in 0..self.dim {
            for j in 0..self.dim {
                rho[[i, j]] = psi[i] * psi[j].conj();
            }
        }
        let ground = self.index_of(3, 0);
        rho[[ground, ground]] += C64::new((1.0 - n).max(0.0), 0.0);
        Ok(rho)
    }
}
