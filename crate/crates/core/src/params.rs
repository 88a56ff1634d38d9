//! Physical parameters and derived quantities.
//!
//! Unit conventions: the reservoir spectral width `lambda` is the base rate
//! unit and all times are scaled, tau = lambda * t. The Markovian rate
//! `gamma0` never enters the dynamics directly; it is a reporting unit tied
//! to the coupling strength by gamma0 = S * lambda, so that spontaneous
//! emission rates quoted as fractions of gamma0 convert to multiples of
//! lambda internally.

use crate::error::{Error, Result};

/// Reservoir coupling weights of the two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    pub alpha1: f64,
    pub alpha2: f64,
}

/// Lorentzian reservoir: spectral width `lambda` (cavity loss rate) and
/// height parameter `w` (proportional to the vacuum Rabi frequency).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirSpec {
    pub lambda: f64,
    pub w: f64,
}

/// Spontaneous-emission rates of the qubits plus the Markovian reporting
/// unit gamma0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma0: f64,
}

/// Quantities derived from the configuration records.
///
/// `omega_sq` = lambda^2 - 4 R^2 is kept signed; downstream code chooses the
/// complex square root explicitly, which keeps the overdamped/oscillatory
/// branch switch visible at the call site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub r1: f64,
    pub r2: f64,
    pub alpha_t: f64,
    /// Vacuum Rabi frequency R = alpha_t * w.
    pub rabi: f64,
    /// Dimensionless coupling strength S = R / lambda.
    pub strength: f64,
    /// lambda^2 - 4 R^2, signed.
    pub omega_sq: f64,
    /// Base rate unit, copied from the reservoir record for convenience.
    pub lambda: f64,
}

impl CouplingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1 >= 0.0) || !(self.alpha2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "couplings must be non-negative, got ({}, {})",
                self.alpha1, self.alpha2
            )));
        }
        if self.alpha1 == 0.0 && self.alpha2 == 0.0 {
            return Err(Error::InvalidParameter(
                "couplings must not both be zero".into(),
            ));
        }
        Ok(())
    }
}

impl ReservoirSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.w >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "w must be non-negative, got {}",
                self.w
            )));
        }
        Ok(())
    }
}

impl DecayConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma1 >= 0.0) || !(self.gamma2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decay rates must be non-negative, got ({}, {})",
                self.gamma1, self.gamma2
            )));
        }
        if !(self.gamma0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma0 must be positive, got {}",
                self.gamma0
            )));
        }
        Ok(())
    }
}

/// Populate all derived quantities. Pure: equal inputs give bitwise-equal
/// outputs.
pub fn derive_params(
    coupling: &CouplingConfig,
    reservoir: &ReservoirSpec,
    decay: &DecayConfig,
) -> Result<DerivedParams> {
    coupling.validate()?;
    reservoir.validate()?;
    decay.validate()?;
    let alpha_t = (coupling.alpha1 * coupling.alpha1 + coupling.alpha2 * coupling.alpha2).sqrt();
    if alpha_t == 0.0 {
        return Err(Error::InvalidParameter("total coupling is zero".into()));
    }
    let r1 = coupling.alpha1 / alpha_t;
    let r2 = coupling.alpha2 / alpha_t;
    let rabi = alpha_t * reservoir.w;
    let lambda = reservoir.lambda;
    Ok(DerivedParams {
        r1,
        r2,
        alpha_t,
        rabi,
        strength: rabi / lambda,
        omega_sq: lambda * lambda - 4.0 * rabi * rabi,
        lambda,
    })
}

/// Convenience constructor for the standard regimes: given the coupling
/// strength S, qubit 1's relative coupling r1, and the spontaneous-emission
/// rate as a fraction of gamma0, produce configuration records in the
/// lambda = 1, alpha_t = 1 gauge (so w = R = S and gamma0 = S * lambda).
/// Both qubits get the same emission rate.
pub fn params_from_regime(
    strength: f64,
    r1: f64,
    gamma_s_over_gamma0: f64,
) -> Result<(CouplingConfig, ReservoirSpec, DecayConfig)> {
    if !(strength > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "strength must be positive, got {strength}"
        )));
    }
    if !(0.0..=1.0).contains(&r1) {
        return Err(Error::InvalidParameter(format!(
            "r1 must lie in [0, 1], got {r1}"
        )));
    }
    if !(gamma_s_over_gamma0 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gammaS/gamma0 must be non-negative, got {gamma_s_over_gamma0}"
        )));
    }
    let lambda = 1.0;
    let gamma0 = strength * lambda;
    let gamma = gamma_s_over_gamma0 * gamma0;
    Ok((
        CouplingConfig {
            alpha1: r1,
            alpha2: (1.0 - r1 * r1).sqrt(),
        },
        ReservoirSpec { lambda, w: strength },
        DecayConfig {
            gamma1: gamma,
            gamma2: gamma,
            gamma0,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn derive(s: f64, r1: f64, ratio: f64) -> DerivedParams {
        let (c, r, d) = params_from_regime(s, r1, ratio).unwrap();
        derive_params(&c, &r, &d).unwrap()
    }

    #[test]
    fn equal_couplings_give_symmetric_r() {
        let c = CouplingConfig { alpha1: 1.0, alpha2: 1.0 };
        let r = ReservoirSpec { lambda: 1.0, w: 10.0 };
        let d = DecayConfig { gamma1: 0.0, gamma2: 0.0, gamma0: 10.0 };
        let p = derive_params(&c, &r, &d).unwrap();
        let inv_sqrt2 = 1.0 / 2f64.sqrt();
        assert!((p.r1 - inv_sqrt2).abs() < 1e-15);
        assert!((p.r2 - inv_sqrt2).abs() < 1e-15);
        assert!((p.r1 * p.r1 + p.r2 * p.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn s_ten_regime_rates() {
        // S = 10 with lambda as unit: R = 10 lambda = gamma0.
        let (c, r, d) = params_from_regime(10.0, 0.4, 0.0).unwrap();
        let p = derive_params(&c, &r, &d).unwrap();
        assert_eq!(p.lambda, 1.0);
        assert_eq!(p.rabi, 10.0);
        assert_eq!(d.gamma0, 10.0);
        assert_eq!(p.strength, 10.0);
        assert_eq!(p.omega_sq, 1.0 - 400.0);
        assert_eq!(d.gamma1, 0.0);
        assert_eq!(d.gamma2, 0.0);
    }

    #[test]
    fn gamma_over_fifty_is_point_two_lambda() {
        let (_, _, d) = params_from_regime(10.0, 0.4, 1.0 / 50.0).unwrap();
        assert!((d.gamma1 - 0.2).abs() < 1e-15);
        assert!((d.gamma2 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn overdamped_regime_positive_omega_sq() {
        let p = derive(0.25, 1.0, 0.0);
        assert!((p.omega_sq - (1.0 - 4.0 * 0.0625)).abs() < 1e-12);
        assert!(p.omega_sq > 0.0);
    }

    #[test]
    fn regime_round_trip_reproduces_s_and_r1() {
        for &r1 in &[0.0, 0.01, 0.4, 1.0 / 2f64.sqrt(), 0.93, 1.0] {
            for &s in &[0.1, 0.5, 1.0, 10.0] {
                let p = derive(s, r1, 0.0);
                assert!((p.r1 - r1).abs() < 1e-12, "r1 mismatch at {r1}");
                assert!((p.strength - s).abs() < 1e-12, "S mismatch at {s}");
                assert!((p.r1 * p.r1 + p.r2 * p.r2 - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derive_is_pure_and_bitwise_reproducible() {
        let c = CouplingConfig { alpha1: 0.3, alpha2: 0.7 };
        let r = ReservoirSpec { lambda: 1.0, w: 7.3 };
        let d = DecayConfig { gamma1: 0.1, gamma2: 0.2, gamma0: 7.3 };
        let a = derive_params(&c, &r, &d).unwrap();
        let b = derive_params(&c, &r, &d).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(CouplingConfig { alpha1: 0.0, alpha2: 0.0 }.validate().is_err());
        assert!(CouplingConfig { alpha1: -1.0, alpha2: 1.0 }.validate().is_err());
        assert!(ReservoirSpec { lambda: 0.0, w: 1.0 }.validate().is_err());
        assert!(ReservoirSpec { lambda: 1.0, w: -1.0 }.validate().is_err());
        assert!(DecayConfig { gamma1: -0.1, gamma2: 0.0, gamma0: 1.0 }.validate().is_err());
        assert!(DecayConfig { gamma1: 0.0, gamma2: 0.0, gamma0: 0.0 }.validate().is_err());
        assert!(params_from_regime(10.0, 1.5, 0.0).is_err());
        assert!(params_from_regime(10.0, -0.1, 0.0).is_err());
        assert!(params_from_regime(0.0, 0.4, 0.0).is_err());
        assert!(params_from_regime(10.0, 0.4, -1.0).is_err());
    }
}
