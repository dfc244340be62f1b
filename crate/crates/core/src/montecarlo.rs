//! Ideal-detector simulation of polarization coincidence records.
//!
//! Each draw selects one of the four outcomes of a measurement setting from
//! its exact closed-form distribution.
//!
//! Streams: ChaCha8 from `rand_chacha` 0.3, keyed with
//! `ChaCha8Rng::seed_from_u64(seed)` and separated with `set_stream(id)`.
//! A uniform variate is `(next_u64() >> 11) · 2⁻⁵³`, and the outcome is the
//! first index whose cumulative probability (in the fixed outcome order
//! below) exceeds it. The stream id of setting `k`, shard `j` is
//! `k · shards + j`, so results depend on the shard count, which is recorded
//! in every [`McEstimate`].

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::ProcessKind;
use crate::bell::{s_statistic, AngleQuad};
use crate::closed_form::quadruple;
use crate::{Beta, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    fn stream(self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(id);
        rng
    }
}

/// Analyzer outcome for one photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// Found along the analyzer angle `χ`.
    Aligned,
    /// Found along `χ + π/2`.
    Orthogonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutcomePair {
    pub first: Polarization,
    pub second: Polarization,
}

use Polarization::{Aligned, Orthogonal};

/// Outcome order shared with [`crate::closed_form::quadruple`].
pub const OUTCOMES: [OutcomePair; 4] = [
    OutcomePair {
        first: Aligned,
        second: Aligned,
    },
    OutcomePair {
        first: Orthogonal,
        second: Aligned,
    },
    OutcomePair {
        first: Aligned,
        second: Orthogonal,
    },
    OutcomePair {
        first: Orthogonal,
        second: Orthogonal,
    },
];

impl OutcomePair {
    pub fn index(self) -> usize {
        match (self.first, self.second) {
            (Aligned, Aligned) => 0,
            (Orthogonal, Aligned) => 1,
            (Aligned, Orthogonal) => 2,
            (Orthogonal, Orthogonal) => 3,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn pick(probs: &[f64; 4], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Round-off left u above the final partial sum.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(3)
}

fn count_stream(probs: &[f64; 4], n: u64, rng: &mut ChaCha8Rng) -> [u64; 4] {
    let mut counts = [0u64; 4];
    for _ in 0..n {
        counts[pick(probs, uniform(rng))] += 1;
    }
    counts
}

/// `n` independent outcomes of setting `(χ₁, χ₂)`, drawn from stream 0.
pub fn sample_outcomes(
    process: ProcessKind,
    beta: Beta,
    chi1: f64,
    chi2: f64,
    n: usize,
    seed: RngSeed,
) -> Result<Vec<OutcomePair>> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "sample count must be at least 1".into(),
        ));
    }
    let probs = quadruple(process, beta, chi1, chi2);
    let mut rng = seed.stream(0);
    Ok((0..n)
        .map(|_| OUTCOMES[pick(&probs, uniform(&mut rng))])
        .collect())
}

/// Empirical outcome frequencies with binomial standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OutcomeFrequencies {
    pub n: u64,
    pub counts: [u64; 4],
    pub p_hat: [f64; 4],
    pub se: [f64; 4],
}

impl OutcomeFrequencies {
    pub fn from_counts(counts: [u64; 4]) -> Self {
        let n: u64 = counts.iter().sum();
        let p_hat = counts.map(|c| c as f64 / n as f64);
        let se = p_hat.map(|p| binomial_se(p, n));
        OutcomeFrequencies {
            n,
            counts,
            p_hat,
            se,
        }
    }

    pub fn from_samples(samples: &[OutcomePair]) -> Self {
        let mut counts = [0u64; 4];
        for s in samples {
            counts[s.index()] += 1;
        }
        Self::from_counts(counts)
    }

    /// Frequency of the first photon being found along its analyzer.
    pub fn first_aligned(&self) -> f64 {
        (self.counts[0] + self.counts[2]) as f64 / self.n as f64
    }

    pub fn second_aligned(&self) -> f64 {
        (self.counts[0] + self.counts[1]) as f64 / self.n as f64
    }
}

fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// One of the six settings entering the statistic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SettingEstimate {
    pub label: &'static str,
    pub sign: f64,
    pub chi1: Option<f64>,
    pub chi2: Option<f64>,
    pub p_hat: f64,
    pub se: f64,
    pub exact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub process: ProcessKind,
    pub beta: Beta,
    pub quad: AngleQuad,
    pub seed: RngSeed,
    pub shards: usize,
    pub n_per_setting: u64,
    /// Estimated `(+,+)` probabilities of the four joint settings, in the
    /// order they enter the statistic.
    pub p_hat: [f64; 4],
    pub settings: Vec<SettingEstimate>,
    pub s_hat: f64,
    /// Propagated standard error; settings are independent.
    pub se: f64,
    pub s_exact: f64,
}

/// Estimates the statistic with `n_per_setting` draws for each of four joint
/// settings and two single-photon settings, one stream shard.
pub fn estimate_s(
    process: ProcessKind,
    beta: Beta,
    q: AngleQuad,
    n_per_setting: u64,
    seed: RngSeed,
) -> Result<McEstimate> {
    estimate_s_sharded(process, beta, q, n_per_setting, seed, 1)
}

/// As [`estimate_s`], splitting each setting over `shards` streams.
pub fn estimate_s_sharded(
    process: ProcessKind,
    beta: Beta,
    q: AngleQuad,
    n_per_setting: u64,
    seed: RngSeed,
    shards: usize,
) -> Result<McEstimate> {
    if n_per_setting < 100 {
        return Err(Error::InvalidInput(format!(
            "n_per_setting must be at least 100, got {n_per_setting}"
        )));
    }
    if shards == 0 || shards as u64 > n_per_setting {
        return Err(Error::InvalidInput(format!(
            "shards must lie in [1, n_per_setting], got {shards}"
        )));
    }

    // Single-photon settings measure one photon only; the other analyzer is
    // parked at 0 and its outcome discarded.
    struct Setting {
        label: &'static str,
        sign: f64,
        angles: (f64, f64),
        shown: (Option<f64>, Option<f64>),
        kind: Kind,
    }
    #[derive(Clone, Copy)]
    enum Kind {
        Joint,
        First,
        Second,
    }
    let joint_setting = |label, sign, a: f64, b: f64| Setting {
        label,
        sign,
        angles: (a, b),
        shown: (Some(a), Some(b)),
        kind: Kind::Joint,
    };
    let settings = [
        joint_setting("P(chi1,chi2)", 1.0, q.chi1, q.chi2),
        joint_setting("P(chi1,chi2')", -1.0, q.chi1, q.chi2p),
        joint_setting("P(chi1',chi2)", 1.0, q.chi1p, q.chi2),
        joint_setting("P(chi1',chi2')", 1.0, q.chi1p, q.chi2p),
        Setting {
            label: "P(chi1',-)",
            sign: -1.0,
            angles: (q.chi1p, 0.0),
            shown: (Some(q.chi1p), None),
            kind: Kind::First,
        },
        Setting {
            label: "P(-,chi2)",
            sign: -1.0,
            angles: (0.0, q.chi2),
            shown: (None, Some(q.chi2)),
            kind: Kind::Second,
        },
    ];

    let n = n_per_setting;
    let shard_len = |j: usize| {
        let base = n / shards as u64;
        base + u64::from((j as u64) < n % shards as u64)
    };
    let jobs: Vec<(usize, usize)> = (0..settings.len())
        .flat_map(|k| (0..shards).map(move |j| (k, j)))
        .collect();
    let shard_counts: Vec<[u64; 4]> = jobs
        .par_iter()
        .map(|&(k, j)| {
            let (a, b) = settings[k].angles;
            let probs = quadruple(process, beta, a, b);
            let mut rng = seed.stream((k * shards + j) as u64);
            count_stream(&probs, shard_len(j), &mut rng)
        })
        .collect();

    let mut out = Vec::with_capacity(settings.len());
    for (k, setting) in settings.iter().enumerate() {
        let mut counts = [0u64; 4];
        for c in &shard_counts[k * shards..(k + 1) * shards] {
            for (t, v) in counts.iter_mut().zip(c) {
                *t += v;
            }
        }
        let freq = OutcomeFrequencies::from_counts(counts);
        let (a, b) = setting.angles;
        let exact_quad = quadruple(process, beta, a, b);
        let (p_hat, exact) = match setting.kind {
            Kind::Joint => (freq.p_hat[0], exact_quad[0]),
            Kind::First => (freq.first_aligned(), exact_quad[0] + exact_quad[2]),
            Kind::Second => (freq.second_aligned(), exact_quad[0] + exact_quad[1]),
        };
        out.push(SettingEstimate {
            label: setting.label,
            sign: setting.sign,
            chi1: setting.shown.0,
            chi2: setting.shown.1,
            p_hat,
            se: binomial_se(p_hat, n),
            exact,
        });
    }

    let s_hat = out.iter().map(|s| s.sign * s.p_hat).sum();
    let se = out.iter().map(|s| s.se * s.se).sum::<f64>().sqrt();
    Ok(McEstimate {
        process,
        beta,
        quad: q,
        seed,
        shards,
        n_per_setting: n,
        p_hat: [out[0].p_hat, out[1].p_hat, out[2].p_hat, out[3].p_hat],
        settings: out,
        s_hat,
        se,
        s_exact: s_statistic(process, beta, q).s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const P1: ProcessKind = ProcessKind::Process1;
    const P2: ProcessKind = ProcessKind::Process2;

    fn beta(b: f64) -> Beta {
        Beta::new(b).unwrap()
    }

    /// `χ²` critical value with survival probability 1e−4, by degrees of freedom.
    const CHI2_CRIT_1E4: [f64; 4] = [0.0, 15.136_705, 18.420_681, 21.107_513];

    fn chi_square(freq: &OutcomeFrequencies, exact: &[f64; 4]) -> (f64, usize) {
        let mut stat = 0.0;
        let mut cells = 0;
        for (&c, &p) in freq.counts.iter().zip(exact) {
            if p == 0.0 {
                assert_eq!(c, 0, "impossible outcome drawn");
                continue;
            }
            let e = p * freq.n as f64;
            stat += (c as f64 - e).powi(2) / e;
            cells += 1;
        }
        (stat, cells - 1)
    }

    #[test]
    fn outcome_order_matches_index() {
        for (i, o) in OUTCOMES.iter().enumerate() {
            assert_eq!(o.index(), i);
        }
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(sample_outcomes(P1, Beta::ZERO, 0.0, 0.0, 0, RngSeed(1)).is_err());
        assert!(estimate_s(P1, Beta::ZERO, AngleQuad::default(), 99, RngSeed(1)).is_err());
        assert!(
            estimate_s_sharded(P1, Beta::ZERO, AngleQuad::default(), 100, RngSeed(1), 0).is_err()
        );
    }

    #[test]
    fn forbidden_outcome_never_drawn() {
        let s = sample_outcomes(P1, Beta::ZERO, 0.0, 0.0, 100_000, RngSeed(7)).unwrap();
        let f = OutcomeFrequencies::from_samples(&s);
        assert_eq!(f.counts[0], 0);
        assert_eq!(f.counts[3], 0);
    }

    #[test]
    fn crossed_analyzers() {
        let s = sample_outcomes(P1, Beta::ZERO, 0.0, FRAC_PI_2, 100_000, RngSeed(11)).unwrap();
        let f = OutcomeFrequencies::from_samples(&s);
        assert!((f.p_hat[0] - 0.5).abs() < 0.01);
        assert!((f.p_hat[3] - 0.5).abs() < 0.01);
        assert_eq!(f.counts[1] + f.counts[2], 0);
        assert_eq!(f.p_hat.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn sampler_goodness_of_fit() {
        let points = [
            (P1, 0.0, 0.0, 1.2),
            (P1, 0.3, 0.4, 2.0),
            (P1, 0.7, 1.0, 1.0),
            (P1, 0.95, -0.5, 0.9),
            (P1, 1.0, 0.2, 2.9),
            (P2, 0.05, 0.0, 0.4),
            (P2, 0.2, 1.1, 0.3),
            (P2, 0.6, 2.0, 0.0),
            (P2, 0.9, 0.5, 0.5),
            (P2, 1.0, 0.1, 1.7),
        ];
        for (i, &(process, b, c1, c2)) in points.iter().enumerate() {
            let s = sample_outcomes(
                process,
                beta(b),
                c1,
                c2,
                1_000_000,
                RngSeed(1000 + i as u64),
            )
            .unwrap();
            let f = OutcomeFrequencies::from_samples(&s);
            let exact = quadruple(process, beta(b), c1, c2);
            let (stat, dof) = chi_square(&f, &exact);
            assert!(
                stat < CHI2_CRIT_1E4[dof],
                "point {i}: χ² = {stat} with {dof} dof"
            );
            for ((p, se), e) in f.p_hat.iter().zip(f.se).zip(exact) {
                assert!((p - e).abs() <= 4.0 * se + 1e-12);
            }
            let m1 = exact[0] + exact[2];
            let m2 = exact[0] + exact[1];
            let n = f.n as f64;
            assert!((f.first_aligned() - m1).abs() <= 4.0 * (m1 * (1.0 - m1) / n).sqrt() + 1e-12);
            assert!((f.second_aligned() - m2).abs() <= 4.0 * (m2 * (1.0 - m2) / n).sqrt() + 1e-12);
        }
    }

    #[test]
    fn fixed_seed_is_bit_reproducible() {
        let q = AngleQuad::lower_violation();
        let a = estimate_s(P2, beta(0.2), q, 10_000, RngSeed(42)).unwrap();
        let b = estimate_s(P2, beta(0.2), q, 10_000, RngSeed(42)).unwrap();
        assert_eq!(a.s_hat.to_bits(), b.s_hat.to_bits());
        assert_eq!(a, b);
        let c = estimate_s(P2, beta(0.2), q, 10_000, RngSeed(43)).unwrap();
        assert_ne!(a.s_hat, c.s_hat);
    }

    #[test]
    fn sharding_is_part_of_the_key() {
        let q = AngleQuad::upper_violation();
        let a = estimate_s_sharded(P1, beta(0.3), q, 10_001, RngSeed(5), 4).unwrap();
        let b = estimate_s_sharded(P1, beta(0.3), q, 10_001, RngSeed(5), 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shards, 4);
        assert_eq!(a.n_per_setting, 10_001);
    }

    #[test]
    fn standard_error_scales_with_sample_size() {
        let q = AngleQuad::lower_violation();
        let small = estimate_s(P1, beta(0.4), q, 50_000, RngSeed(9)).unwrap();
        let large = estimate_s(P1, beta(0.4), q, 200_000, RngSeed(9)).unwrap();
        let ratio = small.se / large.se;
        assert!((ratio / 2.0 - 1.0).abs() < 0.15, "{ratio}");
        assert!(small.se > 0.0);
    }

    #[test]
    fn estimate_tracks_reference_values() {
        let q = AngleQuad::lower_violation();
        let r = estimate_s(P1, Beta::ZERO, q, 1_000_000, RngSeed(2003)).unwrap();
        assert!(
            (r.s_hat + 1.207).abs() <= 3.0 * r.se,
            "{} ± {}",
            r.s_hat,
            r.se
        );
        let r = estimate_s(P2, beta(0.01), q, 1_000_000, RngSeed(2003)).unwrap();
        assert!(
            (r.s_hat + 1.207).abs() <= 3.0 * r.se,
            "{} ± {}",
            r.s_hat,
            r.se
        );
        for s in &r.settings {
            assert!((s.p_hat - s.exact).abs() <= 4.0 * s.se + 1e-12);
        }
        assert!(r.settings.iter().all(|s| s.p_hat >= 0.0));
    }
}
