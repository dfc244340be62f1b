//! Clauser–Horne statistic
//! `S = P(χ₁,χ₂) − P(χ₁,χ₂′) + P(χ₁′,χ₂) + P(χ₁′,χ₂′) − P(χ₁′,−) − P(−,χ₂)`,
//! which local hidden-variable theories confine to `−1 ≤ S ≤ 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::ProcessKind;
use crate::closed_form::{joint, marginal, Which};
use crate::Beta;

/// Four analyzer angles in radians.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AngleQuad {
    pub chi1: f64,
    pub chi2: f64,
    pub chi1p: f64,
    pub chi2p: f64,
}

impl AngleQuad {
    pub const fn new(chi1: f64, chi2: f64, chi1p: f64, chi2p: f64) -> Self {
        AngleQuad {
            chi1,
            chi2,
            chi1p,
            chi2p,
        }
    }

    pub fn from_degrees(deg: [f64; 4]) -> Self {
        let [a, b, c, d] = deg.map(f64::to_radians);
        AngleQuad::new(a, b, c, d)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.chi1, self.chi2, self.chi1p, self.chi2p]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        AngleQuad::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_degrees(self) -> [f64; 4] {
        self.to_array().map(f64::to_degrees)
    }

    pub fn shifted(self, s: f64) -> Self {
        AngleQuad::from_array(self.to_array().map(|a| a + s))
    }

    /// `(0°, 67°, 135°, 23°)`: pushes `S` above zero.
    pub fn upper_violation() -> Self {
        AngleQuad::from_degrees([0.0, 67.0, 135.0, 23.0])
    }

    /// `(0°, 23°, 45°, 67°)`: pushes `S` below minus one.
    pub fn lower_violation() -> Self {
        AngleQuad::from_degrees([0.0, 23.0, 45.0, 67.0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "WithinLHV")]
    WithinLhv,
    ViolatesAbove,
    ViolatesBelow,
}

impl Verdict {
    pub fn is_violation(self) -> bool {
        self != Verdict::WithinLhv
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::WithinLhv => "WithinLHV",
            Verdict::ViolatesAbove => "ViolatesAbove",
            Verdict::ViolatesBelow => "ViolatesBelow",
        })
    }
}

/// Margin applied at both bounds; values exactly on a bound are inside.
pub const VERDICT_TOL: f64 = 1e-12;

pub fn classify(s: f64) -> Verdict {
    if s > VERDICT_TOL {
        Verdict::ViolatesAbove
    } else if s < -1.0 - VERDICT_TOL {
        Verdict::ViolatesBelow
    } else {
        Verdict::WithinLhv
    }
}

/// Labels of the six signed contributions, in summation order.
pub const TERM_LABELS: [&str; 6] = [
    "+P(chi1,chi2)",
    "-P(chi1,chi2')",
    "+P(chi1',chi2)",
    "+P(chi1',chi2')",
    "-P(chi1',-)",
    "-P(-,chi2)",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SReport {
    pub s: f64,
    /// Signed contributions, ordered as [`TERM_LABELS`].
    pub terms: [f64; 6],
    pub process: ProcessKind,
    pub beta: Beta,
    pub quad: AngleQuad,
    pub verdict: Verdict,
}

pub fn s_statistic(process: ProcessKind, beta: Beta, q: AngleQuad) -> SReport {
    let p = |a, b| joint(process, beta, a, b).value;
    let terms = [
        p(q.chi1, q.chi2),
        -p(q.chi1, q.chi2p),
        p(q.chi1p, q.chi2),
        p(q.chi1p, q.chi2p),
        -marginal(process, beta, q.chi1p, Which::First).value,
        -marginal(process, beta, q.chi2, Which::Second).value,
    ];
    let s = terms.iter().sum();
    SReport {
        s,
        terms,
        process,
        beta,
        quad: q,
        verdict: classify(s),
    }
}

/// One report per `β`, in input order.
pub fn s_beta_scan(process: ProcessKind, q: AngleQuad, betas: &[Beta]) -> Vec<SReport> {
    betas
        .par_iter()
        .map(|&b| s_statistic(process, b, q))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P1: ProcessKind = ProcessKind::Process1;
    const P2: ProcessKind = ProcessKind::Process2;

    fn beta(b: f64) -> Beta {
        Beta::new(b).unwrap()
    }

    #[test]
    fn process1_threshold_values() {
        let up = s_statistic(P1, Beta::ZERO, AngleQuad::upper_violation());
        assert!((up.s - 0.207).abs() < 5e-4, "{}", up.s);
        assert_eq!(up.verdict, Verdict::ViolatesAbove);
        let down = s_statistic(P1, Beta::ZERO, AngleQuad::lower_violation());
        assert!((down.s + 1.207).abs() < 5e-4, "{}", down.s);
        assert_eq!(down.verdict, Verdict::ViolatesBelow);
    }

    #[test]
    fn process2_table() {
        let q = AngleQuad::lower_violation();
        let betas: Vec<Beta> = [0.2, 0.1, 0.05, 0.01].map(beta).to_vec();
        let want = [-1.12, -1.184, -1.201, -1.207];
        let scan = s_beta_scan(P2, q, &betas);
        for (r, w) in scan.iter().zip(want) {
            assert!((r.s - w).abs() < 5e-3, "β={} S={}", r.beta, r.s);
            assert_eq!(r.verdict, Verdict::ViolatesBelow);
        }
        assert_eq!(scan.iter().map(|r| r.beta).collect::<Vec<_>>(), betas);
    }

    #[test]
    fn process2_light_speed_limit() {
        let r = s_statistic(P2, beta(0.9999), AngleQuad::lower_violation());
        assert!((r.s + 0.5).abs() < 1e-3);
        assert_eq!(r.verdict, Verdict::WithinLhv);
    }

    #[test]
    fn processes_coincide_at_threshold() {
        for q in [AngleQuad::upper_violation(), AngleQuad::lower_violation()] {
            let a = s_statistic(P1, Beta::ZERO, q).s;
            let b = s_statistic(P2, beta(1e-6), q).s;
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.207), Verdict::ViolatesAbove);
        assert_eq!(classify(-0.5), Verdict::WithinLhv);
        assert_eq!(classify(-1.0), Verdict::WithinLhv);
        assert_eq!(classify(0.0), Verdict::WithinLhv);
        assert_eq!(classify(5e-13), Verdict::WithinLhv);
        assert_eq!(classify(-1.0 - 2e-12), Verdict::ViolatesBelow);
    }

    #[test]
    fn degrees_convert_exactly() {
        for d in [0.0, 23.0, 45.0, 67.0, 90.0, 135.0] {
            let r = AngleQuad::from_degrees([d; 4]).chi1;
            let want = d * std::f64::consts::PI / 180.0;
            assert!((r - want).abs() <= f64::EPSILON * want.abs());
        }
    }

    proptest! {
        #[test]
        fn report_sums_its_terms(
            b in 0.0..=1.0f64, a in -3.0..3.0f64, c in -3.0..3.0f64,
            d in -3.0..3.0f64, e in -3.0..3.0f64, p2 in any::<bool>(),
        ) {
            let process = if p2 { P2 } else { P1 };
            let r = s_statistic(process, beta(b), AngleQuad::new(a, c, d, e));
            let sum: f64 = r.terms.iter().sum();
            prop_assert!((r.s - sum).abs() <= 1e-14);
            prop_assert_eq!(r.verdict, classify(r.s));
        }

        #[test]
        fn process2_common_shift_invariance(
            b in 0.0..=1.0f64, a in -3.0..3.0f64, c in -3.0..3.0f64,
            d in -3.0..3.0f64, e in -3.0..3.0f64, s in -3.0..3.0f64,
        ) {
            let q = AngleQuad::new(a, c, d, e);
            let x = s_statistic(P2, beta(b), q).s;
            let y = s_statistic(P2, beta(b), q.shifted(s)).s;
            prop_assert!((x - y).abs() < 1e-13);
        }
    }
}
