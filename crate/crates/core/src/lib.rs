//! Photon polarization correlations in e⁺e⁻ → γγ annihilation in flight.
//!
//! The crate evaluates the leading-order QED relative transition probability
//! for linearly polarized photon pairs, reduces it to conditional joint and
//! marginal polarization probabilities for two detection geometries, and
//! builds the Clauser–Horne statistic on top of them.
//!
//! Two geometries are supported (see [`ProcessKind`]):
//!
//! * [`ProcessKind::Process1`]: the pair moves along `z`, photons are detected
//!   along `x`. Probabilities depend on the positron speed `β` and on both
//!   analyzer angles separately.
//! * [`ProcessKind::Process2`]: photons are detected along `z` and the pair
//!   axis is averaged over all orientations. Joint probabilities depend only
//!   on the analyzer angle difference and marginals are exactly `1/2`.
//!
//! Every closed form is cross-checked by an independent numerical route in
//! [`oracle`], which is what the `polcorr oracle` command runs.

pub mod amplitude;
pub mod bell;
pub mod closed_form;
mod error;
pub mod integrals;
pub mod kinematics;
pub mod montecarlo;
pub mod oracle;
pub mod quadrature;
pub mod search;

pub use amplitude::{PrValue, ProcessKind};
pub use bell::{classify, s_beta_scan, s_statistic, AngleQuad, SReport, Verdict};
pub use closed_form::{
    joint, joint_p1, joint_p2, marginal, marginal_p1, marginal_p2, statistical_dependence_gap,
    JointProbability, MarginalProbability, Which,
};
pub use error::{Error, Result};
pub use kinematics::{CmEvent, FourVector, PolarizationBasis, ThreeVector};
pub use montecarlo::{McEstimate, OutcomePair, RngSeed};
pub use quadrature::QuadratureSpec;
pub use search::{Objective, SearchConfig, SearchResult};

use serde::{Deserialize, Serialize};

/// Positron (or electron) speed in units of `c`, `β = |p| / p⁰ ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Beta(f64);

impl Beta {
    pub const ZERO: Beta = Beta(0.0);
    pub const ONE: Beta = Beta(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Beta(value))
        } else {
            Err(Error::InvalidInput(format!(
                "beta must lie in [0, 1], got {value}"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Rest mass in units of `p⁰`, `m = √(1 − β²)`.
    pub fn mass(self) -> f64 {
        (1.0 - self.0 * self.0).max(0.0).sqrt()
    }
}

impl TryFrom<f64> for Beta {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Beta::new(value)
    }
}

impl From<Beta> for f64 {
    fn from(b: Beta) -> f64 {
        b.0
    }
}

impl std::fmt::Display for Beta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_domain() {
        assert!(Beta::new(0.0).is_ok());
        assert!(Beta::new(1.0).is_ok());
        assert!(Beta::new(-1e-300).is_err());
        assert!(Beta::new(1.0 + f64::EPSILON).is_err());
        assert!(Beta::new(f64::NAN).is_err());
    }

    #[test]
    fn mass_from_beta() {
        assert!((Beta::new(0.6).unwrap().mass() - 0.8).abs() < 1e-15);
        assert_eq!(Beta::ONE.mass(), 0.0);
    }
}
