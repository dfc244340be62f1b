//! Independent numerical cross-checks of every closed form.
//!
//! Each suite compares an analytic route against a route that shares no
//! algebra with it: adaptive quadrature of the unreduced integrand, the
//! `δ → 0` window construction, or a different level of kinematic
//! reduction.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{pr_process1, pr_process2, Configuration, ProcessKind};
use crate::closed_form::{joint_p1, joint_p1_via_delta_limit, joint_p2, DEFAULT_DELTA_SEQUENCE};
use crate::integrals::{
    a_of_beta, b_of_beta, f_delta, int_theta_1, int_theta_2, n_delta, n_delta_sum, n_of_beta,
    phi_integrals, quadruple_angles, DeltaWindow,
};
use crate::quadrature::{quad_adaptive, QuadratureSpec};
use crate::{Beta, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleLevel {
    Integrals,
    DeltaLimit,
    Amplitude,
    Process2Angular,
}

impl OracleLevel {
    pub const ALL: [OracleLevel; 4] = [
        OracleLevel::Integrals,
        OracleLevel::DeltaLimit,
        OracleLevel::Amplitude,
        OracleLevel::Process2Angular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleLevel::Integrals => "integrals",
            OracleLevel::DeltaLimit => "delta-limit",
            OracleLevel::Amplitude => "amplitude",
            OracleLevel::Process2Angular => "process2-angular",
        }
    }
}

/// Pass thresholds for each suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleTolerances {
    /// Relative deviation of analytic integrals from quadrature.
    pub integral_rel: f64,
    /// Relative deviation for the process-2 normalization identity and the
    /// window-normalization sum.
    pub identity_rel: f64,
    /// Window integral `F_δ` vs quadrature, relative to `N_δ`.
    pub window_rel: f64,
    /// Absolute deviation of the `δ → 0` construction from the closed form.
    pub delta_limit_abs: f64,
    /// Spread between kinematic reduction levels, relative to the leading term.
    pub amplitude_rel: f64,
    /// Residual of the sphere integral against `A + B cos²(χ₁ − χ₂)`,
    /// relative to the largest integral.
    pub angular_fit_rel: f64,
    /// Absolute deviation of quadrature-normalized process-2 probabilities.
    pub angular_prob_abs: f64,
}

impl Default for OracleTolerances {
    fn default() -> Self {
        OracleTolerances {
            integral_rel: 1e-10,
            identity_rel: 1e-12,
            window_rel: 1e-9,
            delta_limit_abs: 1e-7,
            amplitude_rel: 1e-11,
            angular_fit_rel: 1e-9,
            angular_prob_abs: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub samples: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleCheck {
    fn new(name: &str, deviations: &[f64], tolerance: f64) -> Self {
        let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
        OracleCheck {
            name: name.to_string(),
            samples: deviations.len(),
            max_deviation,
            // NaN never passes.
            passed: deviations.iter().all(|d| *d <= tolerance),
            tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub level: OracleLevel,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_oracle(level: OracleLevel, tol: &OracleTolerances) -> Result<OracleReport> {
    let checks = match level {
        OracleLevel::Integrals => integrals_suite(tol)?,
        OracleLevel::DeltaLimit => delta_limit_suite(tol)?,
        OracleLevel::Amplitude => amplitude_suite(tol)?,
        OracleLevel::Process2Angular => process2_angular_suite(tol)?,
    };
    Ok(OracleReport { level, checks })
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn fine_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_refinements: 4000,
    }
}

fn beta(b: f64) -> Beta {
    Beta::new(b).expect("oracle grids stay inside [0, 1]")
}

/// The `β × δ` grid of the window-integral checks (50 points).
pub fn window_grid() -> Vec<(f64, f64)> {
    let betas = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    let deltas = [0.01, 0.1, 0.4, 1.0, FRAC_PI_2];
    betas
        .iter()
        .flat_map(|&b| deltas.iter().map(move |&d| (b, d)))
        .collect()
}

fn integrals_suite(tol: &OracleTolerances) -> Result<Vec<OracleCheck>> {
    let spec = fine_spec();
    let grid = window_grid();

    let window = |power: i32| -> Result<Vec<f64>> {
        grid.par_iter()
            .map(|&(b, d)| {
                let w = DeltaWindow::new(d)?;
                let (lo, hi) = w.bounds();
                let q = quad_adaptive(
                    |t: f64| t.sin() / (1.0 - b * b * t.cos().powi(2)).powi(power),
                    lo,
                    hi,
                    &spec,
                )?;
                let analytic = match power {
                    1 => int_theta_1(beta(b), w)?,
                    _ => int_theta_2(beta(b), w)?,
                };
                Ok(rel(analytic, q))
            })
            .collect()
    };
    let theta1 = window(1)?;
    let theta2 = window(2)?;

    let sphere_betas: Vec<f64> = (1..=50).map(|i| 0.98 * i as f64 / 50.0).collect();
    let sphere = |power: i32| -> Result<Vec<f64>> {
        sphere_betas
            .par_iter()
            .map(|&b| {
                let q = quad_adaptive(
                    |t: f64| t.sin() / (1.0 - b * b * t.cos().powi(2)).powi(power),
                    0.0,
                    PI,
                    &spec,
                )?;
                let l = ((1.0 + b) / (1.0 - b)).ln();
                let analytic = match power {
                    1 => l / b,
                    _ => (b / (1.0 - b * b) + 0.5 * l) / b,
                };
                Ok(rel(analytic, q))
            })
            .collect()
    };
    let sphere1 = sphere(1)?;
    let sphere2 = sphere(2)?;

    let chi_pairs: Vec<(f64, f64)> = (0..50)
        .map(|i| {
            let t = i as f64;
            (0.13 * t - 2.0, 3.0 - 0.11 * t)
        })
        .collect();
    let phi = |which: usize| -> Result<Vec<f64>> {
        chi_pairs
            .par_iter()
            .map(|&(c1, c2)| {
                let q = quad_adaptive(
                    |p: f64| {
                        let x = (p + c1).cos() * (p + c2).cos();
                        if which == 0 {
                            x
                        } else {
                            x * x
                        }
                    },
                    0.0,
                    2.0 * PI,
                    &spec,
                )?;
                let (a, b) = phi_integrals(c1, c2);
                let analytic = if which == 0 { a } else { b };
                // The first integral can vanish; measure it against π.
                Ok(if which == 0 {
                    (analytic - q).abs() / PI
                } else {
                    rel(analytic, q)
                })
            })
            .collect()
    };
    let phi1 = phi(0)?;
    let phi2 = phi(1)?;

    let seeds = [(0.0, 0.0), (0.3, 1.1), (2.0, -0.4)];
    let mut norm_sum = Vec::new();
    let mut window_f = Vec::new();
    for &(b, d) in &grid {
        let w = DeltaWindow::new(d)?;
        let n = n_delta(beta(b), w)?;
        for &(c1, c2) in &seeds {
            norm_sum.push(rel(n_delta_sum(beta(b), c1, c2, w)?, n));
        }
        let (c1, c2) = (0.4, 1.3);
        let (lo, hi) = w.bounds();
        let q = quad_adaptive(
            |t: f64| t.sin() * pr_process1(beta(b), t, c1, c2).map_or(f64::NAN, |v| v.get()),
            lo,
            hi,
            &spec,
        )?;
        window_f.push((f_delta(beta(b), c1, c2, w)? - q).abs() / n);
    }

    let identity: Vec<f64> = (1..100)
        .map(|i| {
            let b = beta(i as f64 / 100.0);
            rel(n_of_beta(b), 2.0 * (2.0 * a_of_beta(b) + b_of_beta(b)))
        })
        .collect();

    Ok(vec![
        OracleCheck::new(
            "theta window integral, first power",
            &theta1,
            tol.integral_rel,
        ),
        OracleCheck::new(
            "theta window integral, second power",
            &theta2,
            tol.integral_rel,
        ),
        OracleCheck::new(
            "full sphere theta integral, first power",
            &sphere1,
            tol.integral_rel,
        ),
        OracleCheck::new(
            "full sphere theta integral, second power",
            &sphere2,
            tol.integral_rel,
        ),
        OracleCheck::new("phi integral of cos*cos", &phi1, tol.integral_rel),
        OracleCheck::new("phi integral of cos^2*cos^2", &phi2, tol.integral_rel),
        OracleCheck::new(
            "window integral F_delta vs quadrature",
            &window_f,
            tol.window_rel,
        ),
        OracleCheck::new(
            "N_delta closed form vs four-outcome sum",
            &norm_sum,
            tol.identity_rel,
        ),
        OracleCheck::new(
            "N(beta) = 2[2A(beta) + B(beta)]",
            &identity,
            tol.identity_rel,
        ),
    ])
}

/// The `5 × 5 × 5` grid of the window-limit check.
pub fn delta_limit_grid() -> Vec<(f64, f64, f64)> {
    let betas = [0.0, 0.25, 0.5, 0.75, 0.99];
    let chis = [0.0, 0.4, 0.9, 1.6, 2.5];
    let mut grid = Vec::with_capacity(125);
    for &b in &betas {
        for &c1 in &chis {
            for &c2 in &chis {
                grid.push((b, c1, c2));
            }
        }
    }
    grid
}

fn delta_limit_suite(tol: &OracleTolerances) -> Result<Vec<OracleCheck>> {
    let deviations: Vec<f64> = delta_limit_grid()
        .par_iter()
        .map(|&(b, c1, c2)| {
            let lim = joint_p1_via_delta_limit(beta(b), c1, c2, &DEFAULT_DELTA_SEQUENCE)?;
            Ok((lim.estimate - joint_p1(beta(b), c1, c2).value).abs())
        })
        .collect::<Result<_>>()?;
    Ok(vec![OracleCheck::new(
        "F_delta/N_delta limit vs closed-form joint probability",
        &deviations,
        tol.delta_limit_abs,
    )])
}

/// Random `(β, θ, φ, χ₁, χ₂)` tuples for the reduction-level check.
pub fn amplitude_tuples(seed: u64, n: usize) -> Vec<[f64; 5]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            [
                rng.gen_range(0.0..0.99),
                rng.gen_range(0.0..PI),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
            ]
        })
        .collect()
}

/// Spread among the covariant, c.m. and specialized evaluations, relative to
/// the larger of the values and the leading term.
pub fn reduction_spread(c: &Configuration) -> Result<f64> {
    let v = [c.covariant()?.get(), c.cm()?.get(), c.specialized()?.get()];
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = v.iter().fold(c.leading_scale(), |m, x| m.max(x.abs()));
    Ok((hi - lo) / scale)
}

fn amplitude_suite(tol: &OracleTolerances) -> Result<Vec<OracleCheck>> {
    let mut checks = Vec::new();
    for (process, seed) in [(ProcessKind::Process1, 11), (ProcessKind::Process2, 22)] {
        let spreads: Vec<f64> = amplitude_tuples(seed, 1000)
            .iter()
            .map(|&[b, theta, phi, c1, c2]| {
                reduction_spread(&Configuration::new(process, beta(b), theta, phi, c1, c2)?)
            })
            .collect::<Result<_>>()?;
        let name = format!("{process}: covariant vs c.m. vs specialized");
        checks.push(OracleCheck::new(&name, &spreads, tol.amplitude_rel));
    }
    Ok(checks)
}

/// `∫₀^π sinθ dθ ∫₀^{2π} dφ P_r` for process 2, by nested adaptive quadrature.
pub fn process2_sphere_integral(b: Beta, chi1: f64, chi2: f64) -> Result<f64> {
    let inner_spec = QuadratureSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        max_refinements: 1000,
    };
    let outer_spec = QuadratureSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_refinements: 1000,
    };
    // Errors inside the integrand surface as NaN and fail the outer call.
    let ring = |theta: f64| {
        quad_adaptive(
            |phi: f64| pr_process2(b, theta, phi, chi1, chi2).map_or(f64::NAN, |v| v.get()),
            0.0,
            2.0 * PI,
            &inner_spec,
        )
        .unwrap_or(f64::NAN)
    };
    quad_adaptive(|theta: f64| theta.sin() * ring(theta), 0.0, PI, &outer_spec)
}

/// Least-squares fit of `y = a + b x`; returns `(a, b, max |residual|)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    (intercept, slope, resid)
}

/// Random `(β, χ₁, χ₂)` points for the normalized-probability check.
pub fn angular_points(seed: u64, n: usize) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            [
                rng.gen_range(0.05..0.95),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
            ]
        })
        .collect()
}

fn process2_angular_suite(tol: &OracleTolerances) -> Result<Vec<OracleCheck>> {
    let fit_betas = [0.1, 0.3, 0.5, 0.7, 0.9];
    let chi1 = 0.37;
    let diffs: Vec<f64> = (0..12).map(|j| PI * j as f64 / 12.0).collect();

    let fits: Vec<(f64, f64, f64)> = fit_betas
        .par_iter()
        .map(|&b| {
            let ys: Vec<f64> = diffs
                .iter()
                .map(|&d| process2_sphere_integral(beta(b), chi1, chi1 - d))
                .collect::<Result<_>>()?;
            let xs: Vec<f64> = diffs.iter().map(|d| d.cos().powi(2)).collect();
            let (a, slope, resid) = linear_fit(&xs, &ys);
            let scale = ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
            // The sphere integral is 2π[A + B cos²(χ₁ − χ₂)].
            let two_pi = 2.0 * PI;
            let coef_dev = rel(a / two_pi, a_of_beta(beta(b)))
                .max((slope / two_pi - b_of_beta(beta(b))).abs() / a_of_beta(beta(b)));
            Ok((resid / scale, coef_dev, b))
        })
        .collect::<Result<_>>()?;
    let resid: Vec<f64> = fits.iter().map(|f| f.0).collect();
    let coef: Vec<f64> = fits.iter().map(|f| f.1).collect();

    let probs: Vec<f64> = angular_points(33, 25)
        .par_iter()
        .map(|&[b, c1, c2]| {
            let outcomes: Vec<f64> = quadruple_angles(c1, c2)
                .iter()
                .map(|&(x, y)| process2_sphere_integral(beta(b), x, y))
                .collect::<Result<_>>()?;
            let p = outcomes[0] / outcomes.iter().sum::<f64>();
            Ok((p - joint_p2(beta(b), c1, c2).value).abs())
        })
        .collect::<Result<_>>()?;

    Ok(vec![
        OracleCheck::new(
            "sphere integral linear in cos^2(chi1 - chi2)",
            &resid,
            tol.angular_fit_rel,
        ),
        OracleCheck::new(
            "fitted coefficients vs A(beta), B(beta)",
            &coef,
            tol.angular_fit_rel,
        ),
        OracleCheck::new(
            "quadrature-normalized joint probability vs closed form",
            &probs,
            tol.angular_prob_abs,
        ),
    ])
}
