//! The Galilei group, its Bargmann multiplier and the extended dynamics.
//!
//! Units have ħ = 1. Elements are `(R, v, a, b)` acting as
//! `(x, t) ↦ (Rx + vt + a, t + b)`. The multiplier
//! `ξ(g₁,g₂) = M(v₁·R₁a₂ + ½v₁²b₂)` is antisymmetric on the commuting
//! boost/translation pairs, so it cannot be a coboundary, and its mass
//! dependence makes different total masses inequivalent.
//!
//! The central ℝ-extension acts on configurations with one extra
//! coordinate `λ_i` per particle, conjugate to its mass.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cocycles::{antisym_obstruction, cocycle_defect, extension_product, Extended, GroupLaw};
use crate::error::{Error, Result};

const ORTHO_TOL: f64 = 1e-12;

/// `(R, v, a, b)`: rotation, boost velocity, spatial translation, time translation.
#[derive(Clone, Debug, PartialEq)]
pub struct GalileiElement {
    r: Matrix3<f64>,
    pub v: Vector3<f64>,
    pub a: Vector3<f64>,
    pub b: f64,
}

impl GalileiElement {
    pub fn new(r: Matrix3<f64>, v: Vector3<f64>, a: Vector3<f64>, b: f64) -> Result<Self> {
        if !(r.iter().all(|x| x.is_finite())
            && v.iter().chain(a.iter()).all(|x| x.is_finite())
            && b.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let dev = (r.transpose() * r - Matrix3::identity()).abs().max();
        if dev > ORTHO_TOL || r.determinant() <= 0.0 {
            return Err(Error::InvalidElement(format!(
                "R is not a rotation (‖RᵀR − 1‖ = {dev:e})"
            )));
        }
        Ok(Self { r, v, a, b })
    }

    pub fn identity() -> Self {
        Self {
            r: Matrix3::identity(),
            v: Vector3::zeros(),
            a: Vector3::zeros(),
            b: 0.0,
        }
    }

    pub fn boost(v: Vector3<f64>) -> Self {
        Self {
            v,
            ..Self::identity()
        }
    }

    pub fn translation(a: Vector3<f64>) -> Self {
        Self {
            a,
            ..Self::identity()
        }
    }

    pub fn time_shift(b: f64) -> Self {
        Self {
            b,
            ..Self::identity()
        }
    }

    /// Rotation by `angle` about `axis`, re-orthonormalized.
    pub fn rotation(axis: Vector3<f64>, angle: f64) -> Result<Self> {
        Ok(Self {
            r: axis_angle(axis, angle)?,
            ..Self::identity()
        })
    }

    /// Seeded element: axis-angle rotation, other components uniform in [−2, 2].
    pub fn random(rng: &mut impl Rng) -> Self {
        let axis = loop {
            let u = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
            if u.norm() > 1e-3 {
                break u;
            }
        };
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let mut comp = || Vector3::from_fn(|_, _| rng.random_range(-2.0..2.0));
        let v = comp();
        let a = comp();
        let b = rng.random_range(-2.0..2.0);
        Self {
            r: axis_angle(axis, angle).expect("axis is nonzero"),
            v,
            a,
            b,
        }
    }

    pub fn r(&self) -> &Matrix3<f64> {
        &self.r
    }

    pub fn is_pure_boost_translation(&self) -> bool {
        self.r == Matrix3::identity() && self.b == 0.0
    }

    /// `(x, t) ↦ (Rx + vt + a, t + b)`.
    pub fn act(&self, x: &Vector3<f64>, t: f64) -> (Vector3<f64>, f64) {
        (self.r * x + self.v * t + self.a, t + self.b)
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        let dr = (self.r - other.r).abs().max();
        let dv = (self.v - other.v).abs().max();
        let da = (self.a - other.a).abs().max();
        dr.max(dv).max(da).max((self.b - other.b).abs())
    }
}

/// Rodrigues' formula followed by a polar-factor cleanup.
fn axis_angle(axis: Vector3<f64>, angle: f64) -> Result<Matrix3<f64>> {
    let norm = axis.norm();
    if !(norm > 0.0) || !angle.is_finite() {
        return Err(Error::InvalidElement(
            "rotation axis must be nonzero".into(),
        ));
    }
    let k = axis / norm;
    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    let r = Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos());
    let svd = r.svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    Ok(u * vt)
}

/// `g₁g₂ = (R₁R₂, v₁ + R₁v₂, a₁ + R₁a₂ + v₁b₂, b₁ + b₂)`.
pub fn galilei_multiply(g1: &GalileiElement, g2: &GalileiElement) -> GalileiElement {
    GalileiElement {
        r: g1.r * g2.r,
        v: g1.v + g1.r * g2.v,
        a: g1.a + g1.r * g2.a + g1.v * g2.b,
        b: g1.b + g2.b,
    }
}

/// `g⁻¹ = (R⁻¹, −R⁻¹v, −R⁻¹(a − vb), −b)`.
pub fn galilei_inverse(g: &GalileiElement) -> GalileiElement {
    let rinv = g.r.transpose();
    GalileiElement {
        r: rinv,
        v: -(rinv * g.v),
        a: -(rinv * (g.a - g.v * g.b)),
        b: -g.b,
    }
}

/// The Galilei group law.
#[derive(Clone, Copy, Debug, Default)]
pub struct Galilei;

impl GroupLaw for Galilei {
    type Element = GalileiElement;

    fn identity(&self) -> GalileiElement {
        GalileiElement::identity()
    }

    fn multiply(&self, a: &GalileiElement, b: &GalileiElement) -> GalileiElement {
        galilei_multiply(a, b)
    }

    fn inverse(&self, a: &GalileiElement) -> GalileiElement {
        galilei_inverse(a)
    }

    fn approx_eq(&self, a: &GalileiElement, b: &GalileiElement, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }
}

/// `ξ(g₁,g₂) = M(v₁·R₁a₂ + ½v₁²b₂)`.
pub fn bargmann_exponent(mass: f64, g1: &GalileiElement, g2: &GalileiElement) -> f64 {
    mass * (g1.v.dot(&(g1.r * g2.a)) + 0.5 * g1.v.norm_squared() * g2.b)
}

fn check_mass(mass: f64) -> Result<()> {
    if mass > 0.0 && mass.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "mass must be positive, got {mass}"
        )))
    }
}

fn sampler(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Largest cocycle defect of the Bargmann exponent over seeded random triples.
pub fn bargmann_cocycle_check(mass: f64, samples: usize, seed: u64) -> Result<f64> {
    check_mass(mass)?;
    let mut rng = sampler(seed, 0x6261_7267);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let g1 = GalileiElement::random(&mut rng);
        let g2 = GalileiElement::random(&mut rng);
        let g3 = GalileiElement::random(&mut rng);
        let d = cocycle_defect(
            &Galilei,
            |x, y| bargmann_exponent(mass, x, y),
            &g1,
            &g2,
            &g3,
        );
        worst = worst.max(d.abs());
    }
    Ok(worst)
}

/// The boost along x̂ and the translation along x̂, each of unit size.
pub fn canonical_pair() -> (GalileiElement, GalileiElement) {
    (
        GalileiElement::boost(Vector3::x()),
        GalileiElement::translation(Vector3::x()),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassReport {
    pub masses: (f64, f64),
    /// Obstructions of `ξ_{M₁}`, `ξ_{M₂}` and `ξ_{M₁} − ξ_{M₂}` on the canonical pair.
    pub canonical: (f64, f64, f64),
    /// The same three quantities maximized over sampled commuting pairs.
    pub sampled: (f64, f64, f64),
    /// All sampled obstructions exceed 0.1, so neither multiplier is trivial and
    /// the two are inequivalent.
    pub inequivalent: bool,
    pub consequence: String,
}

/// Antisymmetry obstructions on commuting boost/translation pairs.
pub fn mass_superselection_report(
    m1: f64,
    m2: f64,
    samples: usize,
    seed: u64,
) -> Result<MassReport> {
    check_mass(m1)?;
    check_mass(m2)?;
    if m1 == m2 {
        return Err(Error::InvalidArgument("masses must differ".into()));
    }
    let mut rng = sampler(seed, 0x6d61_7373);
    let mut comp = || Vector3::from_fn(|_, _| rng.random_range(-2.0..2.0));
    let mut pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let g1 = GalileiElement {
            v: comp(),
            a: comp(),
            ..GalileiElement::identity()
        };
        let g2 = GalileiElement {
            v: comp(),
            a: comp(),
            ..GalileiElement::identity()
        };
        pairs.push((g1, g2));
    }
    if pairs
        .iter()
        .all(|(g1, g2)| (g1.v.dot(&g2.a) - g2.v.dot(&g1.a)).abs() < 1e-6)
    {
        return Err(Error::DegenerateSample);
    }
    let triple = |pairs: &[(GalileiElement, GalileiElement)]| -> Result<(f64, f64, f64)> {
        let tol = 1e-12;
        let o1 = antisym_obstruction(&Galilei, |x, y| bargmann_exponent(m1, x, y), pairs, tol)?;
        let o2 = antisym_obstruction(&Galilei, |x, y| bargmann_exponent(m2, x, y), pairs, tol)?;
        let od = antisym_obstruction(
            &Galilei,
            |x, y| bargmann_exponent(m1, x, y) - bargmann_exponent(m2, x, y),
            pairs,
            tol,
        )?;
        Ok((o1, o2, od))
    };
    let canonical = triple(&[canonical_pair()])?;
    let sampled = triple(&pairs)?;
    let inequivalent = sampled.0 > 0.1 && sampled.1 > 0.1 && sampled.2 > 0.1;
    let consequence = if inequivalent {
        format!("multipliers for masses {m1} and {m2} are inequivalent: no ray representation on the direct sum")
    } else {
        "sample too small to separate the multipliers".to_string()
    };
    Ok(MassReport {
        masses: (m1, m2),
        canonical,
        sampled,
        inequivalent,
        consequence,
    })
}

/// A uniform 1-D grid `x_k = x0 + k·h`, `k = 0..n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub x0: f64,
    pub h: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(x0: f64, h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0) || n == 0 || !x0.is_finite() {
            return Err(Error::InvalidArgument("grid needs h > 0 and n > 0".into()));
        }
        Ok(Self { x0, h, n })
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x0 + self.h * k as f64
    }

    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..self.n).map(|k| f(self.x(k))).collect()
    }

    fn steps(&self, a: f64) -> Result<i64> {
        let s = a / self.h;
        if (s - s.round()).abs() > 1e-9 {
            return Err(Error::ShiftNotOnGrid(a));
        }
        Ok(s.round() as i64)
    }
}

fn one_dimensional(g: &GalileiElement) -> Result<(f64, f64)> {
    if !g.is_pure_boost_translation()
        || g.v.y != 0.0
        || g.v.z != 0.0
        || g.a.y != 0.0
        || g.a.z != 0.0
    {
        return Err(Error::Unsupported(
            "ray composition needs R = 1, b = 0 and motion along x̂".into(),
        ));
    }
    Ok((g.v.x, g.a.x))
}

/// `(Tψ)(x) = e^{iMv(x−a)} ψ(x−a)` on the grid; the shift must be a multiple of h.
///
/// Samples above `1e-15·max|ψ|` that would leave the grid give [`Error::SupportClipped`].
pub fn ray_transform(
    mass: f64,
    grid: &Grid1D,
    g: &GalileiElement,
    psi: &[Complex64],
) -> Result<Vec<Complex64>> {
    if psi.len() != grid.n {
        return Err(Error::DimensionMismatch {
            expected: grid.n,
            found: psi.len(),
        });
    }
    let (v, a) = one_dimensional(g)?;
    let s = grid.steps(a)?;
    let peak = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let n = grid.n as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.n];
    for (k, z) in psi.iter().enumerate() {
        let target = k as i64 + s;
        if !(0..n).contains(&target) {
            if z.norm() > 1e-15 * peak {
                return Err(Error::SupportClipped);
            }
            continue;
        }
        let x = grid.x(target as usize);
        out[target as usize] = Complex64::from_polar(1.0, mass * v * (x - a)) * z;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayComposeReport {
    pub xi: f64,
    pub phase: Complex64,
    /// `max_k |(T₁T₂ψ)_k − e^{iξ}(T₁₂ψ)_k|`.
    pub deviation: f64,
    pub holds: bool,
}

/// Checks `T_{g₁}T_{g₂} = e^{iξ(g₁,g₂)} T_{g₁g₂}` pointwise on sampled ψ.
pub fn ray_compose_check(
    mass: f64,
    grid: &Grid1D,
    g1: &GalileiElement,
    g2: &GalileiElement,
    psi: &[Complex64],
) -> Result<RayComposeReport> {
    check_mass(mass)?;
    let left = ray_transform(mass, grid, g1, &ray_transform(mass, grid, g2, psi)?)?;
    let g12 = galilei_multiply(g1, g2);
    let xi = bargmann_exponent(mass, g1, g2);
    let phase = Complex64::from_polar(1.0, xi);
    let right = ray_transform(mass, grid, &g12, psi)?;
    let deviation = left
        .iter()
        .zip(&right)
        .map(|(l, r)| (l - phase * r).norm())
        .fold(0.0, f64::max);
    Ok(RayComposeReport {
        xi,
        phase,
        deviation,
        holds: deviation <= 1e-12,
    })
}

/// An element `(θ, g)` of the central extension.
pub type ExtendedElement = Extended<GalileiElement>;

/// The extension product with the Bargmann multiplier of the given mass.
pub fn extended_multiply(mass: f64, e1: &ExtendedElement, e2: &ExtendedElement) -> ExtendedElement {
    extension_product(&Galilei, |x, y| bargmann_exponent(mass, x, y), e1, e2)
}

/// Positions, mass-conjugate coordinates and time.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub x: Vec<Vector3<f64>>,
    pub lambda: Vec<f64>,
    pub t: f64,
}

impl Configuration {
    fn max_abs_diff(&self, other: &Self) -> f64 {
        let dx = self
            .x
            .iter()
            .zip(&other.x)
            .map(|(a, b)| (a - b).abs().max())
            .fold(0.0, f64::max);
        let dl = self
            .lambda
            .iter()
            .zip(&other.lambda)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        dx.max(dl).max((self.t - other.t).abs())
    }
}

/// `x_i ↦ Rx_i + vt + a`, `λ_i ↦ λ_i − (θ/M + v·Rx_i + ½v²t)`, `t ↦ t + b`,
/// with `M = Σ m_i`.
pub fn extended_action(
    e: &ExtendedElement,
    point: &Configuration,
    masses: &[f64],
) -> Result<Configuration> {
    if point.x.len() != masses.len() || point.lambda.len() != masses.len() {
        return Err(Error::DimensionMismatch {
            expected: masses.len(),
            found: point.x.len().min(point.lambda.len()),
        });
    }
    if masses.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument("masses must be positive".into()));
    }
    let total: f64 = masses.iter().sum();
    let g = &e.g;
    let v2 = g.v.norm_squared();
    let x = point
        .x
        .iter()
        .map(|xi| g.r * xi + g.v * point.t + g.a)
        .collect();
    let lambda = point
        .x
        .iter()
        .zip(&point.lambda)
        .map(|(xi, l)| l - (e.theta / total + g.v.dot(&(g.r * xi)) + 0.5 * v2 * point.t))
        .collect();
    Ok(Configuration {
        x,
        lambda,
        t: point.t + g.b,
    })
}

/// Largest deviation of `e₁·(e₂·q) − (e₁e₂)·q` over seeded samples.
pub fn extended_action_composition_check(masses: &[f64], samples: usize, seed: u64) -> Result<f64> {
    let total: f64 = masses.iter().sum();
    let mut rng = sampler(seed, 0x6163_7469);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let e1 = Extended::new(
            rng.random_range(-2.0..2.0),
            GalileiElement::random(&mut rng),
        );
        let e2 = Extended::new(
            rng.random_range(-2.0..2.0),
            GalileiElement::random(&mut rng),
        );
        let q = Configuration {
            x: masses
                .iter()
                .map(|_| Vector3::from_fn(|_, _| rng.random_range(-2.0..2.0)))
                .collect(),
            lambda: masses.iter().map(|_| rng.random_range(-2.0..2.0)).collect(),
            t: rng.random_range(-2.0..2.0),
        };
        let two_step = extended_action(&e1, &extended_action(&e2, &q, masses)?, masses)?;
        let one_step = extended_action(&extended_multiply(total, &e1, &e2), &q, masses)?;
        worst = worst.max(two_step.max_abs_diff(&one_step));
    }
    Ok(worst)
}

/// A point of the extended phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedPhasePoint {
    pub x: Vec<Vector3<f64>>,
    pub p: Vec<Vector3<f64>>,
    pub m: Vec<f64>,
    pub lambda: Vec<f64>,
    pub t: f64,
}

impl ExtendedPhasePoint {
    pub fn new(
        x: Vec<Vector3<f64>>,
        p: Vec<Vector3<f64>>,
        m: Vec<f64>,
        lambda: Vec<f64>,
        t: f64,
    ) -> Result<Self> {
        let n = m.len();
        for len in [x.len(), p.len(), lambda.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one particle".into()));
        }
        if m.iter().any(|&mi| !(mi > 0.0)) {
            return Err(Error::InvalidArgument("masses must be positive".into()));
        }
        let finite = x.iter().chain(&p).all(|v| v.iter().all(|c| c.is_finite()))
            && m.iter().chain(&lambda).all(|c| c.is_finite())
            && t.is_finite();
        if !finite {
            return Err(Error::NonFinite);
        }
        Ok(Self { x, p, m, lambda, t })
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn configuration(&self) -> Configuration {
        Configuration {
            x: self.x.clone(),
            lambda: self.lambda.clone(),
            t: self.t,
        }
    }

    /// Largest component-wise difference, masses included.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let dp = self
            .p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs().max())
            .fold(0.0, f64::max);
        let dm = self
            .m
            .iter()
            .zip(&other.m)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        self.configuration()
            .max_abs_diff(&other.configuration())
            .max(dp)
            .max(dm)
    }
}

/// Mass-independent pair potentials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Potential {
    Free,
    /// `V = Σ_{i<j} k (|x_i − x_j| − L)²`.
    HarmonicPair {
        k: f64,
        l: f64,
    },
}

impl Potential {
    pub fn energy(&self, x: &[Vector3<f64>]) -> f64 {
        match *self {
            Potential::Free => 0.0,
            Potential::HarmonicPair { k, l } => {
                let mut v = 0.0;
                for i in 0..x.len() {
                    for j in i + 1..x.len() {
                        let d = (x[i] - x[j]).norm() - l;
                        v += k * d * d;
                    }
                }
                v
            }
        }
    }

    /// `−∂V/∂x_i`.
    pub fn forces(&self, x: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
        let mut f = vec![Vector3::zeros(); x.len()];
        if let Potential::HarmonicPair { k, l } = *self {
            for i in 0..x.len() {
                for j in i + 1..x.len() {
                    let d = x[i] - x[j];
                    let r = d.norm();
                    if r == 0.0 {
                        continue;
                    }
                    let fij = d * (-2.0 * k * (r - l) / r);
                    f[i] += fij;
                    f[j] -= fij;
                }
            }
        }
        f
    }

    /// `∂V/∂m_i`, zero for the built-in family.
    pub fn mass_derivative(&self, _i: usize) -> f64 {
        0.0
    }
}

fn hamiltonian(point: &ExtendedPhasePoint, potential: &Potential) -> f64 {
    let kinetic: f64 = point
        .p
        .iter()
        .zip(&point.m)
        .map(|(p, m)| p.norm_squared() / (2.0 * m))
        .sum();
    kinetic + potential.energy(&point.x)
}

/// `λ̇_i = ∂V/∂m_i − p_i²/(2m_i²)`.
fn lambda_rate(point: &ExtendedPhasePoint, potential: &Potential) -> Vec<f64> {
    point
        .p
        .iter()
        .zip(&point.m)
        .enumerate()
        .map(|(i, (p, m))| potential.mass_derivative(i) - p.norm_squared() / (2.0 * m * m))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// `steps + 1` states, starting with the initial one.
    pub states: Vec<ExtendedPhasePoint>,
    /// `max_t |H(t) − H(0)| / max(|H(0)|, 1e-300)`, or absolute when `H(0) = 0`.
    pub energy_drift: f64,
}

/// Velocity Verlet for `(x, p)`, trapezoidal quadrature for `λ`; masses are untouched.
pub fn extended_dynamics(
    initial: &ExtendedPhasePoint,
    potential: &Potential,
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let e0 = hamiltonian(initial, potential);
    let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
    let mut states = Vec::with_capacity(steps + 1);
    let mut current = initial.clone();
    let mut forces = potential.forces(&current.x);
    let mut rate = lambda_rate(&current, potential);
    let mut drift = 0.0f64;
    states.push(current.clone());
    for _ in 0..steps {
        let mut next = current.clone();
        for i in 0..next.len() {
            let p_half = current.p[i] + forces[i] * (0.5 * dt);
            next.x[i] = current.x[i] + p_half * (dt / current.m[i]);
            next.p[i] = p_half;
        }
        let new_forces = potential.forces(&next.x);
        for (p, f) in next.p.iter_mut().zip(&new_forces) {
            *p += f * (0.5 * dt);
        }
        next.t = current.t + dt;
        let new_rate = lambda_rate(&next, potential);
        for i in 0..next.len() {
            next.lambda[i] = current.lambda[i] + 0.5 * dt * (rate[i] + new_rate[i]);
        }
        drift = drift.max((hamiltonian(&next, potential) - e0).abs() / scale);
        if drift > 1e-2 || !drift.is_finite() {
            return Err(Error::UnstableStep(drift));
        }
        forces = new_forces;
        rate = new_rate;
        current = next;
        states.push(current.clone());
    }
    Ok(Trajectory {
        states,
        energy_drift: drift,
    })
}

/// `λ(t) = λ₀ − (p²/2m²)(t − t₀)` for a free particle.
pub fn free_lambda(lambda0: f64, p: &Vector3<f64>, m: f64, elapsed: f64) -> f64 {
    lambda0 - p.norm_squared() / (2.0 * m * m) * elapsed
}

/// Transforms a phase point: configuration by [`extended_action`], `p_i ↦ Rp_i + m_i v`.
pub fn transform_phase_point(
    e: &ExtendedElement,
    point: &ExtendedPhasePoint,
) -> Result<ExtendedPhasePoint> {
    let q = extended_action(e, &point.configuration(), &point.m)?;
    let p = point
        .p
        .iter()
        .zip(&point.m)
        .map(|(p, m)| e.g.r * p + e.g.v * *m)
        .collect();
    Ok(ExtendedPhasePoint {
        x: q.x,
        p,
        m: point.m.clone(),
        lambda: q.lambda,
        t: q.t,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    /// Largest deviation between evolving the transformed initial state and
    /// transforming the evolved state, over all steps.
    pub max_deviation: f64,
    pub final_time: f64,
}

/// Compares the two routes from an initial state to a transformed solution.
///
/// The transformed state at step k lives at time `t₀ + b + k·dt`, which is
/// where `g` sends the untransformed state at step k; no extra evolution over
/// `b` is needed since the equations are autonomous.
pub fn dynamics_symmetry_check(
    initial: &ExtendedPhasePoint,
    potential: &Potential,
    element: &ExtendedElement,
    dt: f64,
    steps: usize,
) -> Result<SymmetryReport> {
    let original = extended_dynamics(initial, potential, dt, steps)?;
    let moved = extended_dynamics(
        &transform_phase_point(element, initial)?,
        potential,
        dt,
        steps,
    )?;
    let mut worst = 0.0f64;
    for (a, b) in original.states.iter().zip(&moved.states) {
        worst = worst.max(transform_phase_point(element, a)?.max_abs_diff(b));
    }
    let final_time = moved.states.last().map(|s| s.t).unwrap_or(initial.t);
    Ok(SymmetryReport {
        max_deviation: worst,
        final_time,
    })
}
