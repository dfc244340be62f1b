//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Used as the independent numerical oracle for every analytic angular
//! integral in the crate. The engine is stateless and deterministic: the
//! same integrand, interval and [`QuadratureSpec`] always produce the same
//! bits, regardless of how many evaluations run in parallel elsewhere.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance and budget for [`quad_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of interval bisections.
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_refinements: 500,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_refinements: usize) -> Result<Self> {
        let spec = QuadratureSpec {
            abs_tol,
            rel_tol,
            max_refinements,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        Ok(())
    }
}

// Kronrod abscissae (positive half, descending); odd indices are the
// 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]`.
///
/// Panels are bisected largest-error first until the summed error estimate
/// is below `max(abs_tol, rel_tol·|I|)`. The error estimate is the raw
/// Kronrod–Gauss difference, which overstates the Kronrod error for smooth
/// integrands.
pub fn quad_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return quad_adaptive(f, b, a, spec).map(|v| -v);
    }

    let mut panels = vec![gauss_kronrod(&f, a, b)];
    for _ in 0..=spec.max_refinements {
        let (value, error) = totals(&panels);
        if !value.is_finite() {
            return Err(Error::InvalidInput(format!(
                "integrand is not finite on [{a}, {b}]"
            )));
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(value);
        }
        if panels.len() > spec.max_refinements {
            break;
        }
        // First index of maximal error, so ties resolve the same way every run.
        let worst = panels.iter().enumerate().fold(0, |best, (i, p)| {
            if p.error > panels[best].error {
                i
            } else {
                best
            }
        });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gauss_kronrod(&f, p.a, mid));
        panels.push(gauss_kronrod(&f, mid, p.b));
    }
    let (estimate, error_bound) = totals(&panels);
    Err(Error::Convergence {
        message: format!(
            "adaptive quadrature on [{a}, {b}] exhausted {} refinements",
            spec.max_refinements
        ),
        estimate,
        error_bound,
    })
}

fn totals(panels: &[Panel]) -> (f64, f64) {
    // Sorted summation keeps the result independent of panel storage order.
    let mut sorted: Vec<&Panel> = panels.iter().collect();
    sorted.sort_by(|x, y| x.a.total_cmp(&y.a));
    sorted
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn weights_integrate_constants() {
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sine_over_half_period() {
        let v = quad_adaptive(f64::sin, 0.0, PI, &QuadratureSpec::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_on_unit_interval() {
        let v = quad_adaptive(|_| 1.0, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_exact_to_degree_22() {
        // K15 integrates degree ≤ 22 exactly on a single panel.
        let v = quad_adaptive(|x: f64| x.powi(22), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 1.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn reversed_and_empty_limits() {
        let spec = QuadratureSpec::default();
        let fwd = quad_adaptive(f64::exp, 0.0, 1.0, &spec).unwrap();
        let rev = quad_adaptive(f64::exp, 1.0, 0.0, &spec).unwrap();
        assert_eq!(fwd, -rev);
        assert_eq!(quad_adaptive(f64::exp, 0.3, 0.3, &spec).unwrap(), 0.0);
    }

    #[test]
    fn peaked_integrand_converges() {
        // ∫_0^π sinθ /(1 − β²cos²θ) dθ = ln((1+β)/(1−β))/β.
        let beta: f64 = 0.999;
        let spec = QuadratureSpec::new(1e-13, 1e-12, 2000).unwrap();
        let v = quad_adaptive(
            |t: f64| t.sin() / (1.0 - beta * beta * t.cos().powi(2)),
            0.0,
            PI,
            &spec,
        )
        .unwrap();
        let want = ((1.0 + beta) / (1.0 - beta)).ln() / beta;
        assert!((v - want).abs() < 1e-11 * want);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let spec = QuadratureSpec::new(1e-15, 1e-15, 3).unwrap();
        match quad_adaptive(|x: f64| x.abs().sqrt(), -1.0, 1.0, &spec) {
            Err(Error::Convergence {
                estimate,
                error_bound,
                ..
            }) => {
                assert!((estimate - 4.0 / 3.0).abs() < 1e-2);
                assert!(error_bound > 0.0);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = QuadratureSpec::default();
        assert!(quad_adaptive(|x| 1.0 / x, 0.0, 1.0, &spec).is_err());
        assert!(quad_adaptive(|x| x, 0.0, f64::INFINITY, &spec).is_err());
        assert!(QuadratureSpec::new(0.0, 1e-10, 10).is_err());
    }

    #[test]
    fn deterministic() {
        let spec = QuadratureSpec::new(1e-14, 1e-13, 200).unwrap();
        let f = |x: f64| (3.0 * x).cos() * (-x * x).exp();
        let a = quad_adaptive(f, -2.0, 5.0, &spec).unwrap();
        let b = quad_adaptive(f, -2.0, 5.0, &spec).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
