//! Shared fixtures for the benchmarks.

use polcorr_core::{AngleQuad, Beta, ProcessKind};

/// Speeds spanning the nonrelativistic to extreme range.
pub const SPEEDS: [f64; 5] = [0.0, 0.2, 0.5, 0.9, 0.9999];

pub const PROCESSES: [ProcessKind; 2] = [ProcessKind::Process1, ProcessKind::Process2];

pub fn speeds() -> Vec<Beta> {
    SPEEDS.iter().map(|b| Beta::new(*b).unwrap()).collect()
}

/// Deterministic analyzer angle pairs spread over `[0, π)²`.
pub fn angle_pairs(n: usize) -> Vec<(f64, f64)> {
    // Golden-ratio stepping keeps the pairs well spread without an RNG.
    let g = 0.618_033_988_749_894_9;
    (0..n)
        .map(|i| {
            let u = (i as f64 * g).fract();
            let v = (i as f64 * g * g).fract();
            (u * std::f64::consts::PI, v * std::f64::consts::PI)
        })
        .collect()
}

pub fn violating_quads() -> [AngleQuad; 2] {
    [AngleQuad::upper_violation(), AngleQuad::lower_violation()]
}
