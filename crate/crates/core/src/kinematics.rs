//! Center-of-momentum kinematics for e⁺e⁻ → γγ.
//!
//! The overall momentum scale is fixed by `p⁰ = 1`; the transition
//! probability is homogeneous of degree zero in it, so every observable
//! depends only on `β` and on angles. The Minkowski metric is
//! `diag(−1, 1, 1, 1)`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::{Beta, Error, Result};

const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ThreeVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ThreeVector {
    pub const ZERO: ThreeVector = ThreeVector::new(0.0, 0.0, 0.0);
    pub const X: ThreeVector = ThreeVector::new(1.0, 0.0, 0.0);
    pub const Y: ThreeVector = ThreeVector::new(0.0, 1.0, 0.0);
    pub const Z: ThreeVector = ThreeVector::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        ThreeVector { x, y, z }
    }

    pub fn dot(self, other: ThreeVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: ThreeVector) -> ThreeVector {
        ThreeVector::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn components(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_components(c: [f64; 3]) -> Self {
        ThreeVector::new(c[0], c[1], c[2])
    }

    pub fn is_unit(self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    /// Polar and azimuthal angles `(θ, φ)` of the direction of `self`.
    pub fn polar_angles(self) -> (f64, f64) {
        let r = self.norm();
        let theta = (self.z / r).clamp(-1.0, 1.0).acos();
        let phi = self.y.atan2(self.x);
        (theta, phi)
    }
}

impl Add for ThreeVector {
    type Output = ThreeVector;
    fn add(self, o: ThreeVector) -> ThreeVector {
        ThreeVector::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for ThreeVector {
    type Output = ThreeVector;
    fn sub(self, o: ThreeVector) -> ThreeVector {
        ThreeVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for ThreeVector {
    type Output = ThreeVector;
    fn neg(self) -> ThreeVector {
        ThreeVector::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for ThreeVector {
    type Output = ThreeVector;
    fn mul(self, s: f64) -> ThreeVector {
        ThreeVector::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Contravariant four-vector `(t, x, y, z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourVector {
    pub t: f64,
    pub spatial: ThreeVector,
}

impl FourVector {
    pub const fn new(t: f64, spatial: ThreeVector) -> Self {
        FourVector { t, spatial }
    }

    /// Purely spatial four-vector `(0, v)`.
    pub const fn spatial(v: ThreeVector) -> Self {
        FourVector { t: 0.0, spatial: v }
    }

    /// Minkowski product `a·b = a⃗·b⃗ − a⁰b⁰`.
    pub fn dot(self, other: FourVector) -> f64 {
        self.spatial.dot(other.spatial) - self.t * other.t
    }

    /// Time-reversed partner `k̄ = (k⁰, −k⃗)`.
    pub fn bar(self) -> FourVector {
        FourVector::new(self.t, -self.spatial)
    }

    pub fn components(self) -> [f64; 4] {
        [self.t, self.spatial.x, self.spatial.y, self.spatial.z]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.t + o.t, self.spatial + o.spatial)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.t - o.t, self.spatial - o.spatial)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector::new(self.t * s, self.spatial * s)
    }
}

/// Kinematic configuration in the center-of-momentum frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CmEvent {
    pub beta: Beta,
    /// Positron.
    pub p1: FourVector,
    /// Electron.
    pub p2: FourVector,
    pub k1: FourVector,
    pub k2: FourVector,
}

impl CmEvent {
    pub fn mass(&self) -> f64 {
        self.beta.mass()
    }
}

/// Two orthonormal linear polarization directions transverse to a photon
/// momentum, indexed by `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolarizationBasis {
    pub e1: ThreeVector,
    pub e2: ThreeVector,
}

impl PolarizationBasis {
    /// Basis built from [`polarization_p1`] at analyzer angles `0` and `π/2`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        PolarizationBasis {
            e1: polarization_p1(theta, phi, 0.0),
            e2: polarization_p1(theta, phi, std::f64::consts::FRAC_PI_2),
        }
    }

    pub fn for_direction(k: ThreeVector) -> Self {
        let (theta, phi) = k.polar_angles();
        Self::from_angles(theta, phi)
    }

    /// `Σ_λ e^μ(λ) e^ν(λ)` with `e^μ = (0, e⃗)`.
    pub fn outer_sum(&self) -> [[f64; 4]; 4] {
        let a = FourVector::spatial(self.e1).components();
        let b = FourVector::spatial(self.e2).components();
        let mut m = [[0.0; 4]; 4];
        for (mu, row) in m.iter_mut().enumerate() {
            for (nu, cell) in row.iter_mut().enumerate() {
                *cell = a[mu] * a[nu] + b[mu] * b[nu];
            }
        }
        m
    }
}

/// Right-hand side of the photon completeness relation,
/// `g^{μν} − (k^μ k̄^ν + k̄^μ k^ν) / (k·k̄)`.
pub fn completeness_tensor(k: FourVector) -> [[f64; 4]; 4] {
    let kb = k.bar();
    let kc = k.components();
    let kbc = kb.components();
    let norm = k.dot(kb);
    let mut m = [[0.0; 4]; 4];
    for (mu, row) in m.iter_mut().enumerate() {
        for (nu, cell) in row.iter_mut().enumerate() {
            let g = match (mu, nu) {
                (0, 0) => -1.0,
                (a, b) if a == b => 1.0,
                _ => 0.0,
            };
            *cell = g - (kc[mu] * kbc[nu] + kbc[mu] * kc[nu]) / norm;
        }
    }
    m
}

pub type Matrix3 = [[f64; 3]; 3];

pub fn apply(m: &Matrix3, v: ThreeVector) -> ThreeVector {
    let c = v.components();
    let row = |r: &[f64; 3]| r[0] * c[0] + r[1] * c[1] + r[2] * c[2];
    ThreeVector::new(row(&m[0]), row(&m[1]), row(&m[2]))
}

fn levi_civita(i: usize, j: usize, l: usize) -> f64 {
    match (i, j, l) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `R^{il} = δ^{il} + ε^{ijl} n^j sin φ + (δ^{il} − n^i n^l)(cos φ − 1)`.
///
/// With `n = ẑ` this maps `(sin θ, 0, cos θ)` to
/// `(cos φ sin θ, sin φ sin θ, cos θ)`.
pub fn rotation_matrix(phi: f64, axis: ThreeVector) -> Result<Matrix3> {
    if !axis.is_unit() {
        return Err(Error::InvalidInput(format!(
            "rotation axis must be a unit vector, |n| = {}",
            axis.norm()
        )));
    }
    let n = axis.components();
    let (s, c) = phi.sin_cos();
    let mut r = [[0.0; 3]; 3];
    for (i, row) in r.iter_mut().enumerate() {
        for (l, cell) in row.iter_mut().enumerate() {
            let delta = if i == l { 1.0 } else { 0.0 };
            let eps: f64 = (0..3).map(|j| levi_civita(i, j, l) * n[j]).sum();
            *cell = delta + eps * s + (delta - n[i] * n[l]) * (c - 1.0);
        }
    }
    Ok(r)
}

/// Unit photon direction `(cos φ sin θ, sin φ sin θ, cos θ)`.
pub fn photon_direction(theta: f64, phi: f64) -> ThreeVector {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    ThreeVector::new(cp * st, sp * st, ct)
}

/// Linear polarization at analyzer angle `chi` for a photon moving along
/// [`photon_direction`]`(theta, phi)`, with the pair axis along `z`.
pub fn polarization_p1(theta: f64, phi: f64, chi: f64) -> ThreeVector {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (sx, cx) = chi.sin_cos();
    ThreeVector::new(-ct * cx * cp - sx * sp, sx * cp - ct * cx * sp, st * cx)
}

/// Linear polarization `(−cos χ, sin χ, 0)` for a photon moving along `z`.
pub fn polarization_p2(chi: f64) -> ThreeVector {
    let (s, c) = chi.sin_cos();
    ThreeVector::new(-c, s, 0.0)
}

/// Builds `p₁ = (1, β p̂)`, `p₂ = (1, −β p̂)`, `k₁ = (1, k̂)`, `k₂ = (1, −k̂)`.
pub fn build_cm_event(beta: Beta, p_dir: ThreeVector, k_dir: ThreeVector) -> Result<CmEvent> {
    if !p_dir.is_unit() || !k_dir.is_unit() {
        return Err(Error::InvalidInput(format!(
            "directions must be unit vectors (|p̂| = {}, |k̂| = {})",
            p_dir.norm(),
            k_dir.norm()
        )));
    }
    let b = beta.get();
    Ok(CmEvent {
        beta,
        p1: FourVector::new(1.0, p_dir * b),
        p2: FourVector::new(1.0, p_dir * -b),
        k1: FourVector::new(1.0, k_dir),
        k2: FourVector::new(1.0, -k_dir),
    })
}

/// Gauge-projected polarization `ε^μ = e^μ − k^μ (p₁·e)/(p₁·k)`.
///
/// The result is unchanged by `e → e + b k` and stays transverse to `k`.
pub fn gauge_projected_polarization(
    e: FourVector,
    p1: FourVector,
    k: FourVector,
) -> Result<FourVector> {
    let scale = e.components().iter().fold(1.0_f64, |m, c| m.max(c.abs()));
    let ke = k.dot(e);
    if ke.abs() > 1e-10 * scale {
        return Err(Error::InvalidInput(format!(
            "polarization is not transverse to the photon momentum (k·e = {ke:e})"
        )));
    }
    let pk = p1.dot(k);
    if pk == 0.0 {
        return Err(Error::DegenerateKinematics(
            "p₁·k = 0: photon collinear with a massless fermion".into(),
        ));
    }
    Ok(e - k * (p1.dot(e) / pk))
}
