//! Spherical flux distributions of a uniformly moving charge.
//!
//! Flux functions are per unit solid angle on the unit sphere, with
//! 4πε₀ = 1 and c = 1. Their real spherical-harmonic coefficients `f_lm`
//! are the boundary multipoles; `f₀₀ = Q/√(4π)` fixes the total charge
//! while `l ≥ 1` carries the momentum dependence.
//!
//! Real orthonormal harmonics without the Condon–Shortley phase. With
//! `n = (x, y, z)`, `c₁ = √(3/4π)` and `c₂ = √(15/4π)`:
//!
//! ```text
//! Y00  = 1/√(4π)
//! Y1-1 = c₁ y     Y10 = c₁ z     Y11 = c₁ x
//! Y2-2 = c₂ xy    Y2-1 = c₂ yz   Y20 = √(5/16π)(3z² − 1)
//! Y21  = c₂ xz    Y22 = (c₂/2)(x² − y²)
//! ```
//!
//! The distance between two flux distributions is the Euclidean norm of
//! the difference of their coefficients up to `lmax`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub const MAX_LMAX: usize = 16;

/// Charge `e`, mass `m > 0`, momentum `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChargeKinematics {
    pub e: f64,
    pub m: f64,
    pub p: Vector3<f64>,
}

impl ChargeKinematics {
    pub fn new(e: f64, m: f64, p: Vector3<f64>) -> Result<Self> {
        if !(m > 0.0) || !e.is_finite() || !m.is_finite() || p.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need finite e, p and m > 0 (m = {m})"
            )));
        }
        Ok(Self { e, m, p })
    }

    pub fn at_rest(e: f64, m: f64) -> Result<Self> {
        Self::new(e, m, Vector3::zeros())
    }

    pub fn energy(&self) -> f64 {
        (self.p.norm_squared() + self.m * self.m).sqrt()
    }
}

fn check_unit(n: &Vector3<f64>) -> Result<()> {
    if (n.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "direction has norm {}",
            n.norm()
        )));
    }
    Ok(())
}

/// `(em²/4π)·√(p² + m²)/((p·n)² + m²)^{3/2}`.
pub fn flux_instantaneous(k: &ChargeKinematics, n: &Vector3<f64>) -> Result<f64> {
    check_unit(n)?;
    let pn = k.p.dot(n);
    let m2 = k.m * k.m;
    Ok(k.e * m2 / (4.0 * PI) * k.energy() / (pn * pn + m2).powf(1.5))
}

/// `(em²/4π)/(E − p·n)²` with `E = √(p² + m²)`.
pub fn flux_retarded(k: &ChargeKinematics, n: &Vector3<f64>) -> Result<f64> {
    check_unit(n)?;
    let d = k.energy() - k.p.dot(n);
    Ok(k.e * k.m * k.m / (4.0 * PI) / (d * d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxFormula {
    Instantaneous,
    Retarded,
}

impl FluxFormula {
    pub fn eval(&self, k: &ChargeKinematics, n: &Vector3<f64>) -> Result<f64> {
        match self {
            FluxFormula::Instantaneous => flux_instantaneous(k, n),
            FluxFormula::Retarded => flux_retarded(k, n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereNode {
    pub direction: Vector3<f64>,
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Gauss–Legendre in `cos θ` times a uniform grid in `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereQuadrature {
    n_theta: usize,
    n_phi: usize,
    nodes: Vec<SphereNode>,
}

impl SphereQuadrature {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least one node per direction".into(),
            ));
        }
        let (xs, ws) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for (&x, &w) in xs.iter().zip(&ws) {
            let theta = x.acos();
            let s = (1.0 - x * x).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = dphi * j as f64;
                nodes.push(SphereNode {
                    direction: Vector3::new(s * phi.cos(), s * phi.sin(), x),
                    theta,
                    phi,
                    weight: w * dphi,
                });
            }
        }
        Ok(Self {
            n_theta,
            n_phi,
            nodes,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn nodes(&self) -> &[SphereNode] {
        &self.nodes
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// `Σ w f(n)` in node order.
    pub fn integrate(&self, f: impl Fn(&SphereNode) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }
}

/// Nodes and weights on [−1, 1], by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
    }
    (xs, ws)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Index of `(l, m)` in a flat coefficient list: `l² + l + m`.
pub fn lm_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// All real harmonics up to `lmax` at `(θ, φ)` in [`lm_index`] order.
pub fn real_harmonics(lmax: usize, theta: f64, phi: f64) -> Vec<f64> {
    let (x, s) = (theta.cos(), theta.sin());
    let size = (lmax + 1) * (lmax + 1);
    let mut out = vec![0.0; size];
    // normalized associated Legendre values p̄[l][m], m ≥ 0
    let mut pbar = vec![vec![0.0; lmax + 1]; lmax + 1];
    pbar[0][0] = (1.0 / (4.0 * PI)).sqrt();
    for m in 1..=lmax {
        pbar[m][m] = pbar[m - 1][m - 1] * ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
    }
    for m in 0..lmax {
        pbar[m + 1][m] = ((2 * m + 3) as f64).sqrt() * x * pbar[m][m];
    }
    for m in 0..=lmax {
        for l in m + 2..=lmax {
            let a = |l: usize| (((4 * l * l - 1) as f64) / ((l * l - m * m) as f64)).sqrt();
            pbar[l][m] = a(l) * (x * pbar[l - 1][m] - pbar[l - 2][m] / a(l - 1));
        }
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    for l in 0..=lmax {
        out[l * l + l] = pbar[l][0];
        for m in 1..=l {
            let mf = m as f64;
            out[l * l + l + m] = sqrt2 * pbar[l][m] * (mf * phi).cos();
            out[l * l + l - m] = sqrt2 * pbar[l][m] * (mf * phi).sin();
        }
    }
    out
}

/// Real coefficients `f_lm` for `0 ≤ l ≤ lmax`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxMultipoles {
    lmax: usize,
    coefficients: Vec<f64>,
}

impl FluxMultipoles {
    pub fn new(lmax: usize, coefficients: Vec<f64>) -> Result<Self> {
        let expected = (lmax + 1) * (lmax + 1);
        if coefficients.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { lmax, coefficients })
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Panics when `(l, m)` is out of range.
    pub fn get(&self, l: usize, m: i64) -> f64 {
        assert!(
            l <= self.lmax && m.unsigned_abs() as usize <= l,
            "({l}, {m}) out of range"
        );
        self.coefficients[lm_index(l, m)]
    }

    /// `(l, m, f_lm)` rows in index order.
    pub fn rows(&self) -> Vec<(usize, i64, f64)> {
        let mut out = Vec::with_capacity(self.coefficients.len());
        for l in 0..=self.lmax {
            for m in -(l as i64)..=(l as i64) {
                out.push((l, m, self.coefficients[lm_index(l, m)]));
            }
        }
        out
    }

    /// Largest `|f_lm|` over odd l.
    pub fn odd_residual(&self) -> f64 {
        self.rows()
            .iter()
            .filter(|r| r.0 % 2 == 1)
            .map(|r| r.2.abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|f_lm|` over m ≠ 0.
    pub fn nonaxial_residual(&self) -> f64 {
        self.rows()
            .iter()
            .filter(|r| r.1 != 0)
            .map(|r| r.2.abs())
            .fold(0.0, f64::max)
    }

    /// `Σ f_lm²`.
    pub fn power(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// Coefficients with `|f_lm| > tol`.
    pub fn nonzero(&self, tol: f64) -> Vec<(usize, i64, f64)> {
        self.rows()
            .into_iter()
            .filter(|r| r.2.abs() > tol)
            .collect()
    }
}

/// `f_lm = Σ_nodes w·Y_lm(n)·flux(n)`.
///
/// Needs `lmax ≤ 16` and at least `2·lmax + 2` nodes in each direction,
/// otherwise [`Error::QuadratureTooCoarse`].
pub fn multipole_moments(
    flux: impl Fn(&Vector3<f64>) -> Result<f64>,
    q: &SphereQuadrature,
    lmax: usize,
) -> Result<FluxMultipoles> {
    if lmax > MAX_LMAX {
        return Err(Error::QuadratureTooCoarse(format!(
            "lmax = {lmax} exceeds {MAX_LMAX}"
        )));
    }
    let need = 2 * lmax + 2;
    if q.n_theta() < need || q.n_phi() < need {
        return Err(Error::QuadratureTooCoarse(format!(
            "lmax = {lmax} needs {need} nodes per direction, have {}×{}",
            q.n_theta(),
            q.n_phi()
        )));
    }
    let size = (lmax + 1) * (lmax + 1);
    let mut coefficients = vec![0.0; size];
    for node in q.nodes() {
        let value = flux(&node.direction)?;
        let ys = real_harmonics(lmax, node.theta, node.phi);
        for (c, y) in coefficients.iter_mut().zip(&ys) {
            *c += node.weight * y * value;
        }
    }
    FluxMultipoles::new(lmax, coefficients)
}

/// Multipoles of one of the two flux formulas.
pub fn kinematic_moments(
    formula: FluxFormula,
    k: &ChargeKinematics,
    q: &SphereQuadrature,
    lmax: usize,
) -> Result<FluxMultipoles> {
    multipole_moments(|n| formula.eval(k, n), q, lmax)
}

/// `Q = √(4π)·f₀₀`.
pub fn total_charge(fm: &FluxMultipoles) -> f64 {
    (4.0 * PI).sqrt() * fm.coefficients[0]
}

/// `max |⟨Y_lm, Y_l′m′⟩ − δ|` under the quadrature.
pub fn orthonormality_residual(q: &SphereQuadrature, lmax: usize) -> f64 {
    let size = (lmax + 1) * (lmax + 1);
    let table: Vec<(f64, Vec<f64>)> = q
        .nodes()
        .iter()
        .map(|n| (n.weight, real_harmonics(lmax, n.theta, n.phi)))
        .collect();
    let mut worst = 0.0f64;
    for i in 0..size {
        for j in i..size {
            let g: f64 = table.iter().map(|(w, y)| w * y[i] * y[j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorSignature {
    pub first: FluxMultipoles,
    pub second: FluxMultipoles,
    /// `|f₀₀⁽¹⁾ − f₀₀⁽²⁾|`, which must equal `|e₁ − e₂|/√(4π)`.
    pub monopole_difference: f64,
    /// `|e₁ − e₂|/√(4π)`.
    pub expected_monopole: f64,
    /// Euclidean norm of the `l ≥ 1` difference.
    pub higher_difference: f64,
    pub total_difference: f64,
}

impl SectorSignature {
    /// The monopole part matches the charge difference within 1e-8.
    pub fn charge_consistent(&self) -> bool {
        (self.monopole_difference - self.expected_monopole).abs() <= 1e-8
    }
}

/// Compares the multipoles of two charges.
///
/// Only the monopole is tied to the charge; the `l ≥ 1` moments are not the
/// multipole moments of the charge distribution but depend on the momentum,
/// so equal charges with `p₁ ≠ ±p₂` yield a nonzero higher part.
pub fn sector_signature(
    k1: &ChargeKinematics,
    k2: &ChargeKinematics,
    lmax: usize,
    q: &SphereQuadrature,
    formula: FluxFormula,
) -> Result<SectorSignature> {
    let first = kinematic_moments(formula, k1, q, lmax)?;
    let second = kinematic_moments(formula, k2, q, lmax)?;
    let diff: Vec<f64> = first
        .coefficients
        .iter()
        .zip(&second.coefficients)
        .map(|(a, b)| a - b)
        .collect();
    let monopole_difference = diff[0].abs();
    let higher_difference = diff[1..].iter().map(|d| d * d).sum::<f64>().sqrt();
    let total_difference = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
    Ok(SectorSignature {
        expected_monopole: (k1.e - k2.e).abs() / (4.0 * PI).sqrt(),
        monopole_difference,
        higher_difference,
        total_difference,
        first,
        second,
    })
}

/// `Y_2m(n) = nᵀQ_m n` for `m = −2..=2`.
fn quadrupole_tensors() -> [Matrix3<f64>; 5] {
    let c2 = (15.0 / (4.0 * PI)).sqrt();
    let c20 = (5.0 / (16.0 * PI)).sqrt();
    let h = c2 / 2.0;
    [
        Matrix3::new(0.0, h, 0.0, h, 0.0, 0.0, 0.0, 0.0, 0.0),
        Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, h, 0.0, h, 0.0),
        // 3z² − 1 = 2z² − x² − y² on the sphere
        Matrix3::new(-c20, 0.0, 0.0, 0.0, -c20, 0.0, 0.0, 0.0, 2.0 * c20),
        Matrix3::new(0.0, 0.0, h, 0.0, 0.0, 0.0, h, 0.0, 0.0),
        Matrix3::new(h, 0.0, 0.0, 0.0, -h, 0.0, 0.0, 0.0, 0.0),
    ]
}

/// Coefficients up to l = 2 of `n ↦ F(Rᵀn)` from those of `F`.
///
/// The dipole transforms as the vector `(f₁₁, f₁₋₁, f₁₀) ↦ R·(…)` and the
/// quadrupole as the traceless tensor `T ↦ RTRᵀ`.
pub fn rotate_low_multipoles(fm: &FluxMultipoles, r: &Matrix3<f64>) -> Result<FluxMultipoles> {
    if fm.lmax < 2 {
        return Err(Error::InvalidArgument("need lmax ≥ 2".into()));
    }
    let c = &fm.coefficients;
    let mut out = vec![0.0; 9];
    out[0] = c[0];
    let dipole = r * Vector3::new(c[3], c[1], c[2]);
    out[3] = dipole.x;
    out[1] = dipole.y;
    out[2] = dipole.z;
    let qs = quadrupole_tensors();
    let t: Matrix3<f64> = qs.iter().zip(&c[4..9]).map(|(q, f)| q * *f).sum();
    let rotated = r * t * r.transpose();
    for (k, q) in qs.iter().enumerate() {
        out[4 + k] = rotated.dot(q) / q.dot(q);
    }
    FluxMultipoles::new(2, out)
}

/// `(l, m)` coefficients restricted to `l ≤ lmax`.
pub fn truncate_multipoles(fm: &FluxMultipoles, lmax: usize) -> Result<FluxMultipoles> {
    let lmax = lmax.min(fm.lmax);
    FluxMultipoles::new(lmax, fm.coefficients[..(lmax + 1) * (lmax + 1)].to_vec())
}
