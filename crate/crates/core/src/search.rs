//! Extremal Bell–CH violations over analyzer angles.
//!
//! Every probability is invariant under `χ → χ + π`, so the angle space is
//! `[0, π)⁴`. The search is an exhaustive grid followed by a compass
//! (pattern) search; both are deterministic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::ProcessKind;
use crate::bell::{classify, s_statistic, AngleQuad, Verdict};
use crate::closed_form::{joint, marginal, Which};
use crate::{Beta, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[serde(rename = "max")]
    MaximizeS,
    #[serde(rename = "min")]
    MinimizeS,
}

impl Objective {
    /// Strict improvement of `candidate` over `incumbent`.
    pub fn improves(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Objective::MaximizeS => candidate > incumbent,
            Objective::MinimizeS => candidate < incumbent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub grid_points_per_angle: usize,
    pub refine_iterations: usize,
    /// Initial compass step in radians.
    pub refine_initial_step: f64,
    pub objective: Objective,
    /// Rotation of the angle grid: points are `offset + kπ/n`.
    pub grid_offset: f64,
}

/// Compass search stops once its step falls below this many radians.
pub const MIN_STEP: f64 = 1e-7;

impl SearchConfig {
    pub fn new(objective: Objective) -> Self {
        SearchConfig {
            grid_points_per_angle: 24,
            refine_iterations: 200,
            refine_initial_step: 5f64.to_radians(),
            objective,
            grid_offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_angle < 4 {
            return Err(Error::InvalidInput(format!(
                "grid_points_per_angle must be at least 4, got {}",
                self.grid_points_per_angle
            )));
        }
        if !(self.refine_initial_step > 0.0 && self.refine_initial_step.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "refine_initial_step must be positive, got {}",
                self.refine_initial_step
            )));
        }
        if !self.grid_offset.is_finite() {
            return Err(Error::InvalidInput("grid_offset must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub process: ProcessKind,
    pub beta: Beta,
    pub objective: Objective,
    pub best_quad: AngleQuad,
    pub best_s: f64,
    pub verdict: Verdict,
    /// Running best value; monotone in the objective direction.
    pub trace: Vec<(usize, f64)>,
}

/// Exhaustive search over the grid. Exact ties go to the lexicographically
/// smallest grid index.
pub fn grid_search(process: ProcessKind, beta: Beta, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let n = cfg.grid_points_per_angle;
    let angles: Vec<f64> = (0..n)
        .map(|k| cfg.grid_offset + std::f64::consts::PI * k as f64 / n as f64)
        .collect();
    // Joint probabilities on the grid and both marginals; S is assembled from
    // these in the same order as `s_statistic`.
    let table: Vec<f64> = angles
        .iter()
        .flat_map(|&a| {
            angles
                .iter()
                .map(move |&b| joint(process, beta, a, b).value)
        })
        .collect();
    let m1: Vec<f64> = angles
        .iter()
        .map(|&a| marginal(process, beta, a, Which::First).value)
        .collect();
    let m2: Vec<f64> = angles
        .iter()
        .map(|&a| marginal(process, beta, a, Which::Second).value)
        .collect();
    let p = |i: usize, j: usize| table[i * n + j];
    let s_at = |i1: usize, i2: usize, i3: usize, i4: usize| {
        let terms = [
            p(i1, i2),
            -p(i1, i4),
            p(i3, i2),
            p(i3, i4),
            -m1[i3],
            -m2[i2],
        ];
        terms.iter().sum::<f64>()
    };

    let objective = cfg.objective;
    let slices: Vec<(f64, [usize; 4])> = (0..n)
        .into_par_iter()
        .map(|i1| {
            let mut best = (s_at(i1, 0, 0, 0), [i1, 0, 0, 0]);
            for i2 in 0..n {
                for i3 in 0..n {
                    for i4 in 0..n {
                        let s = s_at(i1, i2, i3, i4);
                        if objective.improves(s, best.0) {
                            best = (s, [i1, i2, i3, i4]);
                        }
                    }
                }
            }
            best
        })
        .collect();

    let mut trace = Vec::with_capacity(n);
    let mut best = slices[0];
    for (i, &slice) in slices.iter().enumerate() {
        if objective.improves(slice.0, best.0) {
            best = slice;
        }
        trace.push((i, best.0));
    }

    let quad = AngleQuad::from_array(best.1.map(|i| angles[i]));
    let report = s_statistic(process, beta, quad);
    Ok(SearchResult {
        process,
        beta,
        objective,
        best_quad: quad,
        best_s: report.s,
        verdict: report.verdict,
        trace,
    })
}

/// Compass search from `start`: polls `±step` along each angle, moves to
/// the best strictly improving poll, otherwise halves the step. Stops after
/// `refine_iterations` polls or once the step is below [`MIN_STEP`].
pub fn refine(
    process: ProcessKind,
    beta: Beta,
    start: AngleQuad,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    cfg.validate()?;
    if start.to_array().iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidInput("start angles must be finite".into()));
    }
    let objective = cfg.objective;
    let eval = |x: [f64; 4]| s_statistic(process, beta, AngleQuad::from_array(x)).s;

    let mut x = start.to_array();
    let mut fx = eval(x);
    let mut step = cfg.refine_initial_step;
    let mut trace = vec![(0, fx)];

    for iter in 1..=cfg.refine_iterations {
        if step < MIN_STEP {
            break;
        }
        let mut best: Option<([f64; 4], f64)> = None;
        for axis in 0..4 {
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[axis] += sign * step;
                let fy = eval(y);
                let incumbent = best.map_or(fx, |(_, f)| f);
                if objective.improves(fy, incumbent) {
                    best = Some((y, fy));
                }
            }
        }
        match best {
            Some((y, fy)) => {
                x = y;
                fx = fy;
            }
            None => step *= 0.5,
        }
        trace.push((iter, fx));
    }

    let quad = AngleQuad::from_array(x);
    Ok(SearchResult {
        process,
        beta,
        objective,
        best_quad: quad,
        best_s: fx,
        verdict: classify(fx),
        trace,
    })
}

/// Grid search followed by refinement of the grid optimum.
pub fn search(process: ProcessKind, beta: Beta, cfg: &SearchConfig) -> Result<SearchResult> {
    let coarse = grid_search(process, beta, cfg)?;
    let fine = refine(process, beta, coarse.best_quad, cfg)?;
    let offset = coarse.trace.len();
    let mut trace = coarse.trace;
    trace.extend(fine.trace.iter().map(|&(i, s)| (offset + i, s)));
    Ok(SearchResult { trace, ..fine })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Above,
    Below,
}

impl Direction {
    fn violated_by(self, verdict: Verdict) -> bool {
        matches!(
            (self, verdict),
            (Direction::Above, Verdict::ViolatesAbove) | (Direction::Below, Verdict::ViolatesBelow)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "beta", rename_all = "snake_case")]
pub enum Frontier {
    /// Not violated even at `β = 0`.
    NoViolation,
    /// Violated for `β` below this value and not above it.
    Interior(f64),
    /// Still violated at `β = 1`.
    AllBeta,
}

/// Bisection tolerance in `β`.
pub const FRONTIER_TOL: f64 = 1e-6;

/// Largest `β` at which `q` still violates the bound in `direction`, assuming
/// a single crossing on `[0, 1]`.
pub fn violation_frontier(process: ProcessKind, q: AngleQuad, direction: Direction) -> Frontier {
    let violates = |b: f64| {
        let beta = Beta::new(b).expect("bisection stays inside [0, 1]");
        direction.violated_by(s_statistic(process, beta, q).verdict)
    };
    if !violates(0.0) {
        return Frontier::NoViolation;
    }
    if violates(1.0) {
        return Frontier::AllBeta;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > FRONTIER_TOL {
        let mid = 0.5 * (lo + hi);
        if violates(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Frontier::Interior(0.5 * (lo + hi))
}
