//! Multiplier exponents, coboundaries and central extensions.
//!
//! A ray representation satisfies `U(g₁)U(g₂) = e^{iξ(g₁,g₂)} U(g₁g₂)`.
//! Exponents are real-valued and the cocycle identity is demanded strictly by
//! default; a mod-2π mode exists for checking circle-valued identities only.
//!
//! Strict real-valued cocycles on finite groups are always coboundaries
//! (the coefficients are divisible), so [`coboundary_solve`] never certifies
//! nontriviality there. That job falls to [`antisym_obstruction`] evaluated
//! on commuting pairs of a Lie group, see the `bargmann` module.

use std::f64::consts::TAU;
use std::fmt::Debug;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::numkernel::{ComplexMatrix, C64};

/// Residual gate for strict and mod-2π cocycle identities.
pub const COCYCLE_TOL: f64 = 1e-10;
/// Gate for ray-representation and lifted-representation residuals.
pub const RAY_TOL: f64 = 1e-10;

/// The operations a group needs to host multiplier exponents.
pub trait GroupLaw {
    type Element: Clone + Debug;

    fn identity(&self) -> Self::Element;
    fn multiply(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inverse(&self, a: &Self::Element) -> Self::Element;
    /// Equality up to `tol` in a component-wise sense; exact for finite groups.
    fn approx_eq(&self, a: &Self::Element, b: &Self::Element, tol: f64) -> bool;
}

/// A finite group given by its multiplication table on indices `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(name: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let k = table.len();
        if k == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if table
            .iter()
            .any(|row| row.len() != k || row.iter().any(|&x| x >= k))
        {
            return Err(Error::InvalidGroup(format!(
                "table must be {k}×{k} with entries below {k}"
            )));
        }
        let identity = (0..k)
            .find(|&e| (0..k).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverse = Vec::with_capacity(k);
        for g in 0..k {
            let inv = (0..k)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))?;
            inverse.push(inv);
        }
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            name: name.into(),
            table,
            identity,
            inverse,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::from_table(format!("Z{n}"), table).expect("cyclic table is a group")
    }

    /// Z₂×Z₂ with element `(a, b)` stored at index `a + 2b`.
    pub fn klein() -> Self {
        let table = (0..4).map(|x| (0..4).map(|y| x ^ y).collect()).collect();
        Self::from_table("Z2xZ2", table).expect("Klein table is a group")
    }

    /// S₃ with elements the permutations of {0,1,2} in lexicographic order.
    pub fn s3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed");
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| index([a[b[0]], a[b[1]], a[b[2]]]))
                    .collect()
            })
            .collect();
        Self::from_table("S3", table).expect("S3 table is a group")
    }

    /// Z₂, Z₃, Z₄, Z₂×Z₂ and S₃.
    pub fn builtins() -> Vec<Self> {
        vec![
            Self::cyclic(2),
            Self::cyclic(3),
            Self::cyclic(4),
            Self::klein(),
            Self::s3(),
        ]
    }

    pub fn by_name(name: &str) -> Option<Self> {
        Self::builtins()
            .into_iter()
            .find(|g| g.name.eq_ignore_ascii_case(name))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn inverse_of(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }
}

impl GroupLaw for FiniteGroup {
    type Element = usize;

    fn identity(&self) -> usize {
        self.identity
    }

    fn multiply(&self, a: &usize, b: &usize) -> usize {
        self.table[*a][*b]
    }

    fn inverse(&self, a: &usize) -> usize {
        self.inverse[*a]
    }

    fn approx_eq(&self, a: &usize, b: &usize, _tol: f64) -> bool {
        a == b
    }
}

/// A normalized multiplier exponent on a finite group, in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierTable {
    group: FiniteGroup,
    xi: Vec<Vec<f64>>,
}

impl MultiplierTable {
    /// Requires `ξ(1,g) = ξ(g,1) = 0` exactly.
    pub fn new(group: FiniteGroup, xi: Vec<Vec<f64>>) -> Result<Self> {
        let k = group.order();
        if xi.len() != k || xi.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidMultiplier(format!("table must be {k}×{k}")));
        }
        if xi.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let e = group.identity_index();
        if (0..k).any(|g| xi[e][g] != 0.0 || xi[g][e] != 0.0) {
            return Err(Error::InvalidMultiplier(
                "ξ(1,g) and ξ(g,1) must vanish".into(),
            ));
        }
        Ok(Self { group, xi })
    }

    pub fn zero(group: FiniteGroup) -> Self {
        let k = group.order();
        Self {
            group,
            xi: vec![vec![0.0; k]; k],
        }
    }

    /// `δγ(g₁,g₂) = γ(g₁) + γ(g₂) − γ(g₁g₂)`; requires `γ(1) = 0`.
    pub fn coboundary(group: FiniteGroup, gamma: &[f64]) -> Result<Self> {
        let k = group.order();
        if gamma.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: gamma.len(),
            });
        }
        if gamma[group.identity_index()] != 0.0 {
            return Err(Error::InvalidMultiplier("γ(1) must vanish".into()));
        }
        let xi = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| gamma[a] + gamma[b] - gamma[group.mul(a, b)])
                    .collect()
            })
            .collect();
        Self::new(group, xi)
    }

    /// `ξ(g₁,g₂) = π b₁a₂` on Z₂×Z₂, the multiplier of `U(a,b) = XᵃZᵇ`.
    /// A cocycle only modulo 2π.
    pub fn pauli() -> Self {
        let group = FiniteGroup::klein();
        let xi = (0..4)
            .map(|x| {
                (0..4)
                    .map(|y| std::f64::consts::PI * ((x >> 1) * (y & 1)) as f64)
                    .collect()
            })
            .collect();
        Self::new(group, xi).expect("normalized")
    }

    /// A normalized table with seeded entries in `[-π, π]`, generally no cocycle.
    pub fn random(group: FiniteGroup, rng: &mut impl Rng) -> Self {
        let k = group.order();
        let e = group.identity_index();
        let xi = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| {
                        if a == e || b == e {
                            0.0
                        } else {
                            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
                        }
                    })
                    .collect()
            })
            .collect();
        Self { group, xi }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.xi
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.xi[a][b]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::InvalidMultiplier(
                "tables live on different groups".into(),
            ));
        }
        let xi = self
            .xi
            .iter()
            .zip(&other.xi)
            .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
            .collect();
        Self::new(self.group.clone(), xi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CocycleMode {
    Strict,
    Mod2Pi,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CocycleReport {
    pub holds: bool,
    pub max_residual: f64,
}

/// `δξ(g₁,g₂,g₃) = ξ(g₁,g₂) − ξ(g₁,g₂g₃) + ξ(g₁g₂,g₃) − ξ(g₂,g₃)` for any group law.
pub fn cocycle_defect<G: GroupLaw>(
    group: &G,
    xi: impl Fn(&G::Element, &G::Element) -> f64,
    g1: &G::Element,
    g2: &G::Element,
    g3: &G::Element,
) -> f64 {
    let g12 = group.multiply(g1, g2);
    let g23 = group.multiply(g2, g3);
    xi(g1, g2) - xi(g1, &g23) + xi(&g12, g3) - xi(g2, g3)
}

fn distance_to_2pi_z(x: f64) -> f64 {
    (x - TAU * (x / TAU).round()).abs()
}

/// Evaluates the cocycle identity over all `|G|³` triples.
pub fn check_cocycle(xi: &MultiplierTable, mode: CocycleMode) -> CocycleReport {
    let g = xi.group();
    let k = g.order();
    let mut worst = 0.0f64;
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let d = cocycle_defect(g, |x, y| xi.get(*x, *y), &a, &b, &c);
                let r = match mode {
                    CocycleMode::Strict => d.abs(),
                    CocycleMode::Mod2Pi => distance_to_2pi_z(d),
                };
                worst = worst.max(r);
            }
        }
    }
    CocycleReport {
        holds: worst <= COCYCLE_TOL,
        max_residual: worst,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoboundarySolution {
    /// `γ` with `γ(1) = 0` when the multipliers are equivalent.
    pub gamma: Option<Vec<f64>>,
    pub max_residual: f64,
}

/// Finds `γ` with `ξ′ = ξ + γ(g₁) − γ(g₁g₂) + γ(g₂)` and `γ(1) = 0` by least squares.
///
/// The 1e-10 gate is absolute since tables are O(1) radians.
pub fn coboundary_solve(
    xi: &MultiplierTable,
    xi_prime: &MultiplierTable,
) -> Result<CoboundarySolution> {
    for t in [xi, xi_prime] {
        let report = check_cocycle(t, CocycleMode::Strict);
        if !report.holds {
            return Err(Error::NotACocycle(report.max_residual));
        }
    }
    let g = xi.group();
    if g != xi_prime.group() {
        return Err(Error::InvalidMultiplier(
            "tables live on different groups".into(),
        ));
    }
    let k = g.order();
    let e = g.identity_index();
    // unknowns: γ(g) for g ≠ 1
    let unknown: Vec<usize> = (0..k).filter(|&x| x != e).collect();
    let column = |x: usize| unknown.iter().position(|&u| u == x);
    let mut a = DMatrix::<f64>::zeros(k * k, unknown.len());
    let mut rhs = DVector::<f64>::zeros(k * k);
    for g1 in 0..k {
        for g2 in 0..k {
            let row = g1 * k + g2;
            for (x, sign) in [(g1, 1.0), (g2, 1.0), (g.mul(g1, g2), -1.0)] {
                if let Some(c) = column(x) {
                    a[(row, c)] += sign;
                }
            }
            rhs[row] = xi_prime.get(g1, g2) - xi.get(g1, g2);
        }
    }
    let mut gamma = vec![0.0; k];
    if !unknown.is_empty() {
        let sol = a
            .clone()
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|m| Error::InvalidArgument(m.to_string()))?;
        for (i, &x) in unknown.iter().enumerate() {
            gamma[x] = sol[i];
        }
    }
    let mut worst = 0.0f64;
    for g1 in 0..k {
        for g2 in 0..k {
            let fit = gamma[g1] + gamma[g2] - gamma[g.mul(g1, g2)];
            worst = worst.max((rhs[g1 * k + g2] - fit).abs());
        }
    }
    Ok(CoboundarySolution {
        gamma: (worst <= COCYCLE_TOL).then_some(gamma),
        max_residual: worst,
    })
}

/// Equivalence of circle-valued multipliers is not attempted.
pub fn coboundary_solve_mod2pi(
    _xi: &MultiplierTable,
    _xi_prime: &MultiplierTable,
) -> Result<CoboundarySolution> {
    Err(Error::Unsupported(
        "equivalence of circle-valued multipliers".into(),
    ))
}

/// `max |ξ(g₁,g₂) − ξ(g₂,g₁)|` over commuting pairs.
///
/// A coboundary is symmetric on commuting pairs, so a value above tolerance
/// certifies that `ξ` is not one. Pairs failing `g₁g₂ ≈ g₂g₁` within
/// `commute_tol` give [`Error::NonCommutingPair`] with their index.
pub fn antisym_obstruction<G: GroupLaw>(
    group: &G,
    xi: impl Fn(&G::Element, &G::Element) -> f64,
    pairs: &[(G::Element, G::Element)],
    commute_tol: f64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, (g1, g2)) in pairs.iter().enumerate() {
        if !group.approx_eq(
            &group.multiply(g1, g2),
            &group.multiply(g2, g1),
            commute_tol,
        ) {
            return Err(Error::NonCommutingPair(i));
        }
        worst = worst.max((xi(g1, g2) - xi(g2, g1)).abs());
    }
    Ok(worst)
}

/// An element `(θ, g)` of the central extension.
#[derive(Clone, Debug, PartialEq)]
pub struct Extended<E> {
    pub theta: f64,
    pub g: E,
}

impl<E> Extended<E> {
    pub fn new(theta: f64, g: E) -> Self {
        Self { theta, g }
    }
}

/// `(θ₁,g₁)(θ₂,g₂) = (θ₁+θ₂+ξ(g₁,g₂), g₁g₂)`.
pub fn extension_product<G: GroupLaw>(
    group: &G,
    xi: impl Fn(&G::Element, &G::Element) -> f64,
    e1: &Extended<G::Element>,
    e2: &Extended<G::Element>,
) -> Extended<G::Element> {
    Extended {
        theta: e1.theta + e2.theta + xi(&e1.g, &e2.g),
        g: group.multiply(&e1.g, &e2.g),
    }
}

/// `(θ,g)⁻¹ = (−θ−ξ(g,g⁻¹), g⁻¹)`.
pub fn extension_inverse<G: GroupLaw>(
    group: &G,
    xi: impl Fn(&G::Element, &G::Element) -> f64,
    e: &Extended<G::Element>,
) -> Extended<G::Element> {
    let inv = group.inverse(&e.g);
    Extended {
        theta: -e.theta - xi(&e.g, &inv),
        g: inv,
    }
}

/// `|θ_{(e₁e₂)e₃} − θ_{e₁(e₂e₃)}|`; the group parts agree by associativity of `G`.
pub fn associativity_defect<G: GroupLaw>(
    group: &G,
    xi: impl Fn(&G::Element, &G::Element) -> f64 + Copy,
    e1: &Extended<G::Element>,
    e2: &Extended<G::Element>,
    e3: &Extended<G::Element>,
) -> f64 {
    let left = extension_product(group, xi, &extension_product(group, xi, e1, e2), e3);
    let right = extension_product(group, xi, e1, &extension_product(group, xi, e2, e3));
    (left.theta - right.theta).abs()
}

/// `max ‖U(g₁)U(g₂) − e^{iξ(g₁,g₂)}U(g₁g₂)‖_F` over all pairs, with the phase
/// difference taken modulo 2π in either mode.
pub fn ray_residual(rep: &[ComplexMatrix], xi: &MultiplierTable) -> Result<f64> {
    let g = xi.group();
    let k = g.order();
    if rep.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: rep.len(),
        });
    }
    let n = rep[0].dim();
    if let Some(u) = rep.iter().find(|u| u.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.dim(),
        });
    }
    let mut worst = 0.0f64;
    for a in 0..k {
        for b in 0..k {
            let phase = C64::from_polar(1.0, xi.get(a, b));
            let diff = &(&rep[a] * &rep[b]) - &rep[g.mul(a, b)].scale(phase);
            worst = worst.max(diff.frobenius_norm());
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftReport {
    pub ray_residual: f64,
    /// `max ‖W(e₁)W(e₂) − W(e₁e₂)‖_F` for `W(θ,g) = e^{iθ}U(g)`.
    pub lift_residual: f64,
    pub holds: bool,
}

/// Checks that `W(θ,g) = e^{iθ}U(g)` is a proper representation of the extension.
///
/// Every pair of group elements is combined with each of the given θ values.
/// In mod-2π mode the extension phases are reduced to `[0, 2π)` before use.
pub fn lift_check(
    rep: &[ComplexMatrix],
    xi: &MultiplierTable,
    mode: CocycleMode,
    thetas: &[f64],
) -> Result<LiftReport> {
    let ray = ray_residual(rep, xi)?;
    if ray > RAY_TOL {
        return Err(Error::NotARayRep(ray));
    }
    let g = xi.group();
    let k = g.order();
    let reduce = |t: f64| match mode {
        CocycleMode::Strict => t,
        CocycleMode::Mod2Pi => t.rem_euclid(TAU),
    };
    let w = |e: &Extended<usize>| rep[e.g].scale(C64::from_polar(1.0, e.theta));
    let thetas: Vec<f64> = if thetas.is_empty() {
        vec![0.0]
    } else {
        thetas.to_vec()
    };
    let mut worst = 0.0f64;
    for a in 0..k {
        for b in 0..k {
            for &t1 in &thetas {
                for &t2 in &thetas {
                    let e1 = Extended::new(t1, a);
                    let e2 = Extended::new(t2, b);
                    let mut e12 = extension_product(g, |x, y| xi.get(*x, *y), &e1, &e2);
                    e12.theta = reduce(e12.theta);
                    let diff = &(&w(&e1) * &w(&e2)) - &w(&e12);
                    worst = worst.max(diff.frobenius_norm());
                }
            }
        }
    }
    Ok(LiftReport {
        ray_residual: ray,
        lift_residual: worst,
        holds: worst <= RAY_TOL,
    })
}

/// `U(a,b) = XᵃZᵇ` on Z₂×Z₂, a ray representation for [`MultiplierTable::pauli`].
pub fn pauli_rep() -> Vec<ComplexMatrix> {
    let [x, _, z] = crate::numkernel::pauli();
    let one = ComplexMatrix::identity(2);
    (0..4)
        .map(|idx| {
            let xa = if idx & 1 == 1 { x.clone() } else { one.clone() };
            let zb = if idx & 2 == 2 { z.clone() } else { one.clone() };
            &xa * &zb
        })
        .collect()
}

/// The block sum `U₁(g) ⊕ U₂(g)`.
pub fn direct_sum(rep1: &[ComplexMatrix], rep2: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    if rep1.len() != rep2.len() {
        return Err(Error::DimensionMismatch {
            expected: rep1.len(),
            found: rep2.len(),
        });
    }
    Ok(rep1
        .iter()
        .zip(rep2)
        .map(|(a, b)| {
            let (n1, n2) = (a.dim(), b.dim());
            ComplexMatrix::from_fn(n1 + n2, |r, c| match (r < n1, c < n1) {
                (true, true) => a.matrix()[(r, c)],
                (false, false) => b.matrix()[(r - n1, c - n1)],
                _ => C64::new(0.0, 0.0),
            })
        })
        .collect())
}

/// `e^{iφ(g)} U(g)`.
pub fn rephase(rep: &[ComplexMatrix], phases: &[f64]) -> Vec<ComplexMatrix> {
    rep.iter()
        .zip(phases)
        .map(|(u, &p)| u.scale(C64::from_polar(1.0, p)))
        .collect()
}
