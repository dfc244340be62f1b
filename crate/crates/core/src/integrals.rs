//! Closed-form angular integrals of the relative probability and the
//! normalizations built from them.
//!
//! Process 1 integrates over a window `θ ∈ [π/2 − δ, π/2 + δ]` around the
//! detector axis (the `φ` integral only contributes a common factor).
//! Process 2 integrates over the full sphere of pair orientations.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::{Beta, Error, Result};

/// Half-width `δ` of the θ window centered on `π/2`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct DeltaWindow(f64);

impl DeltaWindow {
    /// The full range `θ ∈ [0, π]`.
    pub const FULL: DeltaWindow = DeltaWindow(FRAC_PI_2);

    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta <= FRAC_PI_2 {
            Ok(DeltaWindow(delta))
        } else {
            Err(Error::InvalidInput(format!(
                "window half-width must lie in (0, π/2], got {delta}"
            )))
        }
    }

    pub fn delta(self) -> f64 {
        self.0
    }

    pub fn bounds(self) -> (f64, f64) {
        (FRAC_PI_2 - self.0, FRAC_PI_2 + self.0)
    }
}

const SERIES_SWITCH: f64 = 1e-6;

/// `(1/β) ln((1 + βs)/(1 − βs))`, continuous through `β = 0` where it is `2s`.
fn log_ratio_over_beta(beta: f64, s: f64) -> Result<f64> {
    let x = beta * s;
    if x >= 1.0 {
        return Err(Error::Domain(format!(
            "β·sin δ = {x} ≥ 1: the θ integral diverges"
        )));
    }
    if x < SERIES_SWITCH {
        Ok(2.0 * s * (1.0 + x * x / 3.0))
    } else {
        Ok(2.0 * x.atanh() / beta)
    }
}

/// `∫ sinθ dθ / (1 − β²cos²θ)` over the window.
pub fn int_theta_1(beta: Beta, w: DeltaWindow) -> Result<f64> {
    log_ratio_over_beta(beta.get(), w.delta().sin())
}

/// `∫ sinθ dθ / (1 − β²cos²θ)²` over the window.
pub fn int_theta_2(beta: Beta, w: DeltaWindow) -> Result<f64> {
    let s = w.delta().sin();
    let b = beta.get();
    let lr = log_ratio_over_beta(b, s)?;
    Ok(s / (1.0 - b * b * s * s) + 0.5 * lr)
}

/// Window-integrated process-1 relative probability `F_δ(χ₁, χ₂)`.
pub fn f_delta(beta: Beta, chi1: f64, chi2: f64, w: DeltaWindow) -> Result<f64> {
    let b2 = beta.get() * beta.get();
    let m2 = 1.0 - b2;
    let i1 = int_theta_1(beta, w)?;
    let i2 = int_theta_2(beta, w)?;
    let (c1, c2) = (chi1.cos(), chi2.cos());
    let x = (chi1 - chi2).cos() - 2.0 * c1 * c2;
    Ok((1.0 - 4.0 * m2 * c1 * c2 * x) * i1
        - 4.0 * m2 * m2 * c1 * c1 * c2 * c2 * i2
        - 2.0 * w.delta().sin() * x * x)
}

/// Closed form of the normalization `N_δ`, the sum of `F_δ` over the four
/// outcomes `(χ₁, χ₂)`, `(χ₁ + π/2, χ₂)`, `(χ₁, χ₂ + π/2)`, `(χ₁ + π/2, χ₂ + π/2)`.
pub fn n_delta(beta: Beta, w: DeltaWindow) -> Result<f64> {
    let b = beta.get();
    let m2 = 1.0 - b * b;
    let s = w.delta().sin();
    let lr = log_ratio_over_beta(b, s)?;
    Ok((4.0 + 4.0 * m2 - 2.0 * m2 * m2) * lr - 4.0 * m2 * m2 * s / (1.0 - b * b * s * s) - 4.0 * s)
}

/// `N_δ` recomputed as the explicit four-term sum of [`f_delta`].
pub fn n_delta_sum(beta: Beta, chi1: f64, chi2: f64, w: DeltaWindow) -> Result<f64> {
    quadruple_angles(chi1, chi2)
        .iter()
        .map(|&(a, b)| f_delta(beta, a, b, w))
        .sum()
}

/// The four outcome angle pairs of one measurement setting.
pub fn quadruple_angles(chi1: f64, chi2: f64) -> [(f64, f64); 4] {
    [
        (chi1, chi2),
        (chi1 + FRAC_PI_2, chi2),
        (chi1, chi2 + FRAC_PI_2),
        (chi1 + FRAC_PI_2, chi2 + FRAC_PI_2),
    ]
}

/// Partial sums for single-photon measurements:
/// `F_δ(χ₁,χ₂) + F_δ(χ₁,χ₂+π/2)` (depends on `χ₁` only) and
/// `F_δ(χ₁,χ₂) + F_δ(χ₁+π/2,χ₂)` (depends on `χ₂` only).
pub fn marginal_sums_delta(beta: Beta, chi1: f64, chi2: f64, w: DeltaWindow) -> Result<(f64, f64)> {
    let b = beta.get();
    let b2 = b * b;
    let m2 = 1.0 - b2;
    let s = w.delta().sin();
    let lr = log_ratio_over_beta(b, s)?;
    let tail = 4.0 * m2 * m2 * s / (1.0 - b2 * s * s);
    let one = |chi: f64| {
        let c2 = chi.cos().powi(2);
        (2.0 + 2.0 * (1.0 - b2 * b2) * c2) * lr - tail * c2 - 2.0 * s
    };
    Ok((one(chi1), one(chi2)))
}

/// `(∫₀^{2π} cos(φ+χ₁)cos(φ+χ₂) dφ, ∫₀^{2π} cos²(φ+χ₁)cos²(φ+χ₂) dφ)`.
pub fn phi_integrals(chi1: f64, chi2: f64) -> (f64, f64) {
    let c = (chi1 - chi2).cos();
    (PI * c, 0.25 * PI * (1.0 + 2.0 * c * c))
}

/// `A(β)`: the `χ`-independent part of the sphere-integrated process-2
/// relative probability, divided by `2π`. Diverges logarithmically at
/// `β = 1`, where `f64::INFINITY` is returned.
pub fn a_of_beta(beta: Beta) -> f64 {
    let b = beta.get();
    if b == 1.0 {
        return f64::INFINITY;
    }
    let b2 = b * b;
    let m2 = 1.0 - b2;
    // (1/(4β)) ln(...) = lr/4 with lr = (1/β) ln(...).
    let lr = log_ratio_over_beta(b, 1.0).expect("β < 1");
    (4.0 * (2.0 - b2) - m2 * m2) * lr / 4.0 - 1.5 + 0.5 * b2
}

/// `B(β)`: coefficient of `cos²(χ₁ − χ₂)`; vanishes at `β = 1`.
pub fn b_of_beta(beta: Beta) -> f64 {
    let b = beta.get();
    if b == 1.0 {
        return 0.0;
    }
    let m2 = 1.0 - b * b;
    let lr = log_ratio_over_beta(b, 1.0).expect("β < 1");
    -m2 * (1.0 + m2 * lr / 2.0)
}

/// `N(β)`, the process-2 normalization, in its own closed form
/// `[4(2 − β²) − 2(1 − β²)²] (1/β) ln((1+β)/(1−β)) − 8 + 4β²`.
pub fn n_of_beta(beta: Beta) -> f64 {
    let b = beta.get();
    if b == 1.0 {
        return f64::INFINITY;
    }
    let b2 = b * b;
    let m2 = 1.0 - b2;
    let lr = log_ratio_over_beta(b, 1.0).expect("β < 1");
    (4.0 * (2.0 - b2) - 2.0 * m2 * m2) * lr - 8.0 + 4.0 * b2
}
