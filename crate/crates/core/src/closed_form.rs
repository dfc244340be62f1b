//! Conditional joint and single-photon polarization probabilities.
//!
//! A photon found "along χ" and one found "along χ + π/2" are the two
//! outcomes of a linear analyzer, so one measurement setting `(χ₁, χ₂)` has
//! four outcomes (see [`crate::integrals::quadruple_angles`]) whose joint
//! probabilities sum to one.

use serde::Serialize;

use crate::amplitude::ProcessKind;
use crate::integrals::{a_of_beta, b_of_beta, f_delta, n_delta, quadruple_angles, DeltaWindow};
use crate::{Beta, Error, Result};

/// Which photon a single-photon probability refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointProbability {
    pub value: f64,
    pub process: ProcessKind,
    pub beta: Beta,
    pub chi1: f64,
    pub chi2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarginalProbability {
    pub value: f64,
    pub which: Which,
    pub process: ProcessKind,
    pub beta: Beta,
    pub chi: f64,
}

const RANGE_SLACK: f64 = 1e-12;

fn checked_probability(raw: f64) -> f64 {
    assert!(
        (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&raw),
        "probability {raw} outside [0, 1] beyond round-off"
    );
    raw.clamp(0.0, 1.0)
}

/// `1 + 2β²(1 − β²)`, half the process-1 normalization.
fn process1_norm(b: f64) -> f64 {
    let b2 = b * b;
    1.0 + 2.0 * b2 * (1.0 - b2)
}

/// Process 1: `[1 − (cos(χ₁−χ₂) − 2β²cosχ₁cosχ₂)²] / (2[1 + 2β²(1−β²)])`.
pub fn joint_p1(beta: Beta, chi1: f64, chi2: f64) -> JointProbability {
    let b = beta.get();
    let y = (chi1 - chi2).cos() - 2.0 * b * b * chi1.cos() * chi2.cos();
    JointProbability {
        value: checked_probability((1.0 - y * y) / (2.0 * process1_norm(b))),
        process: ProcessKind::Process1,
        beta,
        chi1,
        chi2,
    }
}

/// Process 1 single-photon probability; the same function of its angle for
/// either photon.
pub fn marginal_p1(beta: Beta, chi: f64, which: Which) -> MarginalProbability {
    let b = beta.get();
    let b2 = b * b;
    let raw = (1.0 + 4.0 * b2 * (1.0 - b2) * chi.cos().powi(2)) / (2.0 * process1_norm(b));
    MarginalProbability {
        value: checked_probability(raw),
        which,
        process: ProcessKind::Process1,
        beta,
        chi,
    }
}

/// Process 2: `[A(β) + B(β)cos²(χ₁−χ₂)] / (2[2A(β) + B(β)])`, with the
/// `β = 1` value `1/4` substituted for the divergent `A`.
pub fn joint_p2(beta: Beta, chi1: f64, chi2: f64) -> JointProbability {
    let raw = if beta == Beta::ONE {
        0.25
    } else {
        let a = a_of_beta(beta);
        let b = b_of_beta(beta);
        (a + b * (chi1 - chi2).cos().powi(2)) / (2.0 * (2.0 * a + b))
    };
    JointProbability {
        value: checked_probability(raw),
        process: ProcessKind::Process2,
        beta,
        chi1,
        chi2,
    }
}

/// Process 2 single-photon probability: exactly `1/2`.
pub fn marginal_p2(beta: Beta, chi: f64, which: Which) -> MarginalProbability {
    MarginalProbability {
        value: 0.5,
        which,
        process: ProcessKind::Process2,
        beta,
        chi,
    }
}

pub fn joint(process: ProcessKind, beta: Beta, chi1: f64, chi2: f64) -> JointProbability {
    match process {
        ProcessKind::Process1 => joint_p1(beta, chi1, chi2),
        ProcessKind::Process2 => joint_p2(beta, chi1, chi2),
    }
}

pub fn marginal(process: ProcessKind, beta: Beta, chi: f64, which: Which) -> MarginalProbability {
    match process {
        ProcessKind::Process1 => marginal_p1(beta, chi, which),
        ProcessKind::Process2 => marginal_p2(beta, chi, which),
    }
}

/// Joint probabilities of the four outcomes of setting `(χ₁, χ₂)`, ordered
/// `(χ₁,χ₂)`, `(χ₁+π/2,χ₂)`, `(χ₁,χ₂+π/2)`, `(χ₁+π/2,χ₂+π/2)`.
pub fn quadruple(process: ProcessKind, beta: Beta, chi1: f64, chi2: f64) -> [f64; 4] {
    quadruple_angles(chi1, chi2).map(|(a, b)| joint(process, beta, a, b).value)
}

/// `P(χ₁,χ₂) − P(χ₁,−)·P(−,χ₂)`; nonzero whenever the polarizations are
/// statistically dependent.
pub fn statistical_dependence_gap(process: ProcessKind, beta: Beta, chi1: f64, chi2: f64) -> f64 {
    if process == ProcessKind::Process2 && beta == Beta::ONE {
        return 0.0;
    }
    joint(process, beta, chi1, chi2).value
        - marginal(process, beta, chi1, Which::First).value
            * marginal(process, beta, chi2, Which::Second).value
}

/// Default window sequence for [`joint_p1_via_delta_limit`].
pub const DEFAULT_DELTA_SEQUENCE: [f64; 11] = [
    1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6,
];

/// Successive-ratio threshold for declaring the window limit converged.
pub const DELTA_LIMIT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaLimit {
    /// Richardson-extrapolated limit of `F_δ/N_δ`.
    pub estimate: f64,
    /// Window at which successive ratios first agreed within [`DELTA_LIMIT_TOL`].
    pub converged_at: f64,
    /// `(δ, F_δ/N_δ)` for every window evaluated.
    pub history: Vec<(f64, f64)>,
}

/// Builds the process-1 joint probability as the limit `δ → 0` of
/// `F_δ(χ₁,χ₂)/N_δ`, independently of the closed form.
///
/// The window-averaged integrand is even about `θ = π/2`, so the ratio
/// approaches its limit as `δ²`; the returned estimate removes that leading
/// term from the last two ratios.
pub fn joint_p1_via_delta_limit(
    beta: Beta,
    chi1: f64,
    chi2: f64,
    deltas: &[f64],
) -> Result<DeltaLimit> {
    if deltas.len() < 2 {
        return Err(Error::InvalidInput(
            "delta sequence needs at least two windows".into(),
        ));
    }
    if deltas.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::InvalidInput(
            "delta sequence must be strictly decreasing".into(),
        ));
    }
    let mut history = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let w = DeltaWindow::new(d)?;
        let ratio = f_delta(beta, chi1, chi2, w)? / n_delta(beta, w)?;
        if let Some(&(d_prev, r_prev)) = history.last() {
            let step: f64 = ratio - r_prev;
            if step.abs() < DELTA_LIMIT_TOL {
                let d2 = d * d;
                let estimate = ratio + step * d2 / (d_prev * d_prev - d2);
                history.push((d, ratio));
                return Ok(DeltaLimit {
                    estimate,
                    converged_at: d,
                    history,
                });
            }
        }
        history.push((d, ratio));
    }
    let (estimate, error_bound) = match history.as_slice() {
        [.., (_, a), (_, b)] => (*b, (b - a).abs()),
        _ => unreachable!("at least two windows evaluated"),
    };
    Err(Error::Convergence {
        message: format!(
            "F_δ/N_δ did not settle within {DELTA_LIMIT_TOL:e} down to δ = {}",
            deltas[deltas.len() - 1]
        ),
        estimate,
        error_bound,
    })
}
