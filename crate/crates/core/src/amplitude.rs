//! Unnormalized relative transition probability `P_r` for e⁺e⁻ → γγ with
//! linearly polarized photons, up to an overall constant.
//!
//! Three evaluation routes are provided and must agree:
//! the covariant form built from gauge-projected polarization four-vectors,
//! the c.m. three-vector form, and scalar forms specialized to each
//! detection geometry.

use serde::{Deserialize, Serialize};

use crate::kinematics::{
    build_cm_event, gauge_projected_polarization, photon_direction, polarization_p1,
    polarization_p2, CmEvent, FourVector, ThreeVector,
};
use crate::{Beta, Error, Result};

/// Detection geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    /// Pair moving along `z`, photons detected at opposite ends of the `x` axis.
    Process1,
    /// Photons detected along `z`; the pair axis is averaged over all orientations.
    Process2,
}

impl ProcessKind {
    pub fn number(self) -> u8 {
        match self {
            ProcessKind::Process1 => 1,
            ProcessKind::Process2 => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(ProcessKind::Process1),
            2 => Ok(ProcessKind::Process2),
            _ => Err(Error::InvalidInput(format!(
                "process must be 1 or 2, got {n}"
            ))),
        }
    }
}

impl std::fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "process {}", self.number())
    }
}

/// Unnormalized relative probability.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct PrValue(pub f64);

impl PrValue {
    pub fn get(self) -> f64 {
        self.0
    }
}

fn check_denominator(den: f64) -> Result<f64> {
    if den == 0.0 || !den.is_finite() {
        Err(Error::DegenerateKinematics(format!(
            "(p₁·k₁)(p₁·k₂) = {den}"
        )))
    } else {
        Ok(den)
    }
}

/// `¼ (k₁·k₂)² / ((p₁·k₁)(p₁·k₂)) − (ε₁·ε₂)²` with Minkowski products.
pub fn relative_probability_covariant(
    p1: FourVector,
    k1: FourVector,
    k2: FourVector,
    eps1: FourVector,
    eps2: FourVector,
) -> Result<PrValue> {
    let den = check_denominator(p1.dot(k1) * p1.dot(k2))?;
    let k1k2 = k1.dot(k2);
    let e12 = eps1.dot(eps2);
    Ok(PrValue(0.25 * k1k2 * k1k2 / den - e12 * e12))
}

/// c.m. form: the polarization product reduces to
/// `e⃗₁·e⃗₂ + (e⃗₁·p⃗)(e⃗₂·p⃗)(k₁·k₂) / ((p₁·k₁)(p₁·k₂))`.
pub fn relative_probability_cm(
    event: &CmEvent,
    e1: ThreeVector,
    e2: ThreeVector,
) -> Result<PrValue> {
    let p = event.p1.spatial;
    let den = check_denominator(event.p1.dot(event.k1) * event.p1.dot(event.k2))?;
    let k1k2 = event.k1.dot(event.k2);
    let inner = e1.dot(e2) + e1.dot(p) * e2.dot(p) * k1k2 / den;
    Ok(PrValue(0.25 * k1k2 * k1k2 / den - inner * inner))
}

/// Shared scalar structure of both specialized forms. `c1`, `c2` are the
/// cosines that carry the polarization–momentum overlap and `cos_diff` is
/// `cos(χ₁ − χ₂)`.
fn reduced_form(beta: f64, cos_theta: f64, c1: f64, c2: f64, cos_diff: f64) -> Result<PrValue> {
    let b2 = beta * beta;
    let d = 1.0 - b2 * cos_theta * cos_theta;
    if d <= 0.0 {
        return Err(Error::DegenerateKinematics(
            "1 − β²cos²θ = 0 (β = 1 with the photon along the pair axis)".into(),
        ));
    }
    let m2 = 1.0 - b2;
    let x = cos_diff - 2.0 * c1 * c2;
    let value =
        (1.0 - 4.0 * m2 * c1 * c2 * x) / d - 4.0 * m2 * m2 * c1 * c1 * c2 * c2 / (d * d) - x * x;
    Ok(PrValue(value))
}

/// Process-1 scalar form; `theta` is the angle between the photon and the
/// pair axis.
pub fn pr_process1(beta: Beta, theta: f64, chi1: f64, chi2: f64) -> Result<PrValue> {
    reduced_form(
        beta.get(),
        theta.cos(),
        chi1.cos(),
        chi2.cos(),
        (chi1 - chi2).cos(),
    )
}

/// Process-2 scalar form; `(theta, phi)` orient the pair axis relative to
/// the photon axis `z`.
pub fn pr_process2(beta: Beta, theta: f64, phi: f64, chi1: f64, chi2: f64) -> Result<PrValue> {
    reduced_form(
        beta.get(),
        theta.cos(),
        (phi + chi1).cos(),
        (phi + chi2).cos(),
        (chi1 - chi2).cos(),
    )
}

/// Explicit geometric configuration for one evaluation of `P_r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Configuration {
    pub process: ProcessKind,
    pub event: CmEvent,
    pub e1: ThreeVector,
    pub e2: ThreeVector,
    theta: f64,
    phi: f64,
    chi1: f64,
    chi2: f64,
}

impl Configuration {
    /// Process 1: pair along `z`, photon 1 along `photon_direction(θ, φ)`.
    pub fn process1(beta: Beta, theta: f64, phi: f64, chi1: f64, chi2: f64) -> Result<Self> {
        let k = photon_direction(theta, phi);
        let event = build_cm_event(beta, ThreeVector::Z, k)?;
        Ok(Configuration {
            process: ProcessKind::Process1,
            event,
            e1: polarization_p1(theta, phi, chi1),
            e2: polarization_p1(theta, phi, chi2),
            theta,
            phi,
            chi1,
            chi2,
        })
    }

    /// Process 2: photon 1 along `z`, pair along `photon_direction(θ, φ)`.
    pub fn process2(beta: Beta, theta: f64, phi: f64, chi1: f64, chi2: f64) -> Result<Self> {
        let p = photon_direction(theta, phi);
        let event = build_cm_event(beta, p, ThreeVector::Z)?;
        Ok(Configuration {
            process: ProcessKind::Process2,
            event,
            e1: polarization_p2(chi1),
            e2: polarization_p2(chi2),
            theta,
            phi,
            chi1,
            chi2,
        })
    }

    pub fn new(
        process: ProcessKind,
        beta: Beta,
        theta: f64,
        phi: f64,
        chi1: f64,
        chi2: f64,
    ) -> Result<Self> {
        match process {
            ProcessKind::Process1 => Self::process1(beta, theta, phi, chi1, chi2),
            ProcessKind::Process2 => Self::process2(beta, theta, phi, chi1, chi2),
        }
    }

    pub fn covariant(&self) -> Result<PrValue> {
        let ev = &self.event;
        let eps1 = gauge_projected_polarization(FourVector::spatial(self.e1), ev.p1, ev.k1)?;
        let eps2 = gauge_projected_polarization(FourVector::spatial(self.e2), ev.p1, ev.k2)?;
        relative_probability_covariant(ev.p1, ev.k1, ev.k2, eps1, eps2)
    }

    pub fn cm(&self) -> Result<PrValue> {
        relative_probability_cm(&self.event, self.e1, self.e2)
    }

    pub fn specialized(&self) -> Result<PrValue> {
        let beta = self.event.beta;
        match self.process {
            ProcessKind::Process1 => pr_process1(beta, self.theta, self.chi1, self.chi2),
            ProcessKind::Process2 => pr_process2(beta, self.theta, self.phi, self.chi1, self.chi2),
        }
    }

    /// Magnitude of the leading `¼(k₁·k₂)²/((p₁·k₁)(p₁·k₂))` term, the natural
    /// scale against which round-off in `P_r` is measured.
    pub fn leading_scale(&self) -> f64 {
        let ev = &self.event;
        let k1k2 = ev.k1.dot(ev.k2);
        (0.25 * k1k2 * k1k2 / (ev.p1.dot(ev.k1) * ev.p1.dot(ev.k2))).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn beta(b: f64) -> Beta {
        Beta::new(b).unwrap()
    }

    #[test]
    fn covariant_threshold_values() {
        // Parallel polarizations are forbidden at threshold.
        for &theta in &[0.3, FRAC_PI_2, 2.0] {
            let c = Configuration::process1(Beta::ZERO, theta, 0.5, 0.0, 0.0).unwrap();
            assert!(c.covariant().unwrap().get().abs() < 1e-15);
        }
        // Perpendicular polarizations carry all the weight: the four outcomes
        // of the quadruple are {0, 1, 1, 0}, so P_r = 1 = 2 × average.
        let outcomes: Vec<f64> = [
            (0.0, 0.0),
            (FRAC_PI_2, 0.0),
            (0.0, FRAC_PI_2),
            (FRAC_PI_2, FRAC_PI_2),
        ]
        .iter()
        .map(|&(a, b)| {
            Configuration::process1(Beta::ZERO, 1.0, 0.2, a, b)
                .unwrap()
                .covariant()
                .unwrap()
                .get()
        })
        .collect();
        let mean = outcomes.iter().sum::<f64>() / 4.0;
        assert!((outcomes[2] - 2.0 * mean).abs() < 1e-14);
        assert!((outcomes[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cm_form_without_momentum_overlap() {
        // e⃗·p⃗ = 0 for both photons: χ = π/2 in the process-1 geometry.
        let c = Configuration::process1(beta(0.6), 0.8, 0.0, FRAC_PI_2, FRAC_PI_2).unwrap();
        let ev = &c.event;
        let k1k2 = ev.k1.dot(ev.k2);
        let den = ev.p1.dot(ev.k1) * ev.p1.dot(ev.k2);
        let want = 0.25 * k1k2 * k1k2 / den - c.e1.dot(c.e2).powi(2);
        assert!((c.cm().unwrap().get() - want).abs() < 1e-15);
    }

    #[test]
    fn process1_examples() {
        for &theta in &[0.0, 0.4, FRAC_PI_2, 3.0] {
            assert!(
                pr_process1(Beta::ZERO, theta, 0.0, 0.0)
                    .unwrap()
                    .get()
                    .abs()
                    < 1e-15
            );
            assert!(
                (pr_process1(Beta::ZERO, theta, 0.0, FRAC_PI_2)
                    .unwrap()
                    .get()
                    - 1.0)
                    .abs()
                    < 1e-15
            );
        }
        let a = pr_process1(beta(0.5), 1.0, 0.3, 1.4).unwrap().get();
        let b = pr_process1(beta(0.5), 1.0, 0.3 + PI, 1.4 + PI)
            .unwrap()
            .get();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn process1_degenerate_at_light_speed_on_axis() {
        assert!(matches!(
            pr_process1(Beta::ONE, 0.0, 0.1, 0.2),
            Err(Error::DegenerateKinematics(_))
        ));
        assert!(pr_process1(Beta::ONE, 1.0, 0.1, 0.2).is_ok());
    }

    #[test]
    fn process2_examples() {
        for &(theta, c1, c2) in &[(0.4, 0.1, 1.2), (2.2, -0.7, 0.5)] {
            let p2 = pr_process2(Beta::ZERO, theta, 0.0, c1, c2).unwrap().get();
            let p1 = pr_process1(Beta::ZERO, theta, c1, c2).unwrap().get();
            assert!((p1 - p2).abs() < 1e-14);
        }
        let s = 0.37;
        let a = pr_process2(beta(0.7), 1.1, 0.4, 0.2 + s, 0.9 + s)
            .unwrap()
            .get();
        let b = pr_process2(beta(0.7), 1.1, 0.4 + s, 0.2, 0.9)
            .unwrap()
            .get();
        assert!((a - b).abs() < 1e-14);
        // θ = π/2: the denominators are exactly one.
        let c1 = (0.4f64 + 0.2).cos();
        let c2 = (0.4f64 + 0.9).cos();
        let x = (0.2f64 - 0.9).cos() - 2.0 * c1 * c2;
        let want = 1.0 - 4.0 * 0.51 * c1 * c2 * x - 4.0 * 0.51 * 0.51 * c1 * c1 * c2 * c2 - x * x;
        let got = pr_process2(beta(0.7), FRAC_PI_2, 0.4, 0.2, 0.9)
            .unwrap()
            .get();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn non_negative_on_grid() {
        let betas: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).chain([0.99]).collect();
        let grid = |n: usize, hi: f64| (0..n).map(move |i| hi * i as f64 / (n - 1) as f64);
        for &b in &betas {
            for theta in grid(25, PI) {
                for c1 in grid(25, PI) {
                    for c2 in grid(25, PI) {
                        let v = pr_process1(beta(b), theta, c1, c2).unwrap().get();
                        assert!(v >= -1e-10, "β={b} θ={theta} χ=({c1},{c2}) → {v}");
                        let w = pr_process2(beta(b), theta, c1 - c2, c1, c2).unwrap().get();
                        assert!(w >= -1e-10, "β={b} θ={theta} χ=({c1},{c2}) → {w}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn three_levels_agree(
            b in 0.0..0.99f64, theta in 0.0..PI, phi in -PI..PI,
            c1 in -PI..PI, c2 in -PI..PI, p2 in any::<bool>(),
        ) {
            let process = if p2 { ProcessKind::Process2 } else { ProcessKind::Process1 };
            let c = Configuration::new(process, beta(b), theta, phi, c1, c2).unwrap();
            let scale = c.leading_scale();
            let cov = c.covariant().unwrap().get();
            let cm = c.cm().unwrap().get();
            let sp = c.specialized().unwrap().get();
            prop_assert!((cov - cm).abs() <= 1e-11 * scale);
            prop_assert!((cov - sp).abs() <= 1e-11 * scale);
        }

        #[test]
        fn process1_even_in_theta(b in 0.0..0.99f64, theta in 0.0..PI, c1 in -PI..PI, c2 in -PI..PI) {
            let a = pr_process1(beta(b), theta, c1, c2).unwrap().get();
            let r = pr_process1(beta(b), PI - theta, c1, c2).unwrap().get();
            prop_assert!((a - r).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn covariant_gauge_invariant(
            b in 0.0..0.99f64, theta in 0.0..PI, phi in -PI..PI,
            c1 in -PI..PI, c2 in -PI..PI, g1 in -10.0..10.0f64, g2 in -10.0..10.0f64,
        ) {
            let c = Configuration::process1(beta(b), theta, phi, c1, c2).unwrap();
            let ev = c.event;
            let e1 = FourVector::spatial(c.e1);
            let e2 = FourVector::spatial(c.e2);
            let plain = c.covariant().unwrap().get();
            let eps1 = gauge_projected_polarization(e1 + ev.k1 * g1, ev.p1, ev.k1).unwrap();
            let eps2 = gauge_projected_polarization(e2 + ev.k2 * g2, ev.p1, ev.k2).unwrap();
            let shifted = relative_probability_covariant(ev.p1, ev.k1, ev.k2, eps1, eps2).unwrap().get();
            prop_assert!((plain - shifted).abs() <= 1e-12 * c.leading_scale());
        }
    }
}
