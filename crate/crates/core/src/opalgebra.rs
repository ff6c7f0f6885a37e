//! Commutants, generated algebras, centers and the two forms of Dirac's
//! requirement for finite-dimensional *-algebras of matrices.
//!
//! Algebras are carried as Hilbert–Schmidt orthonormal bases. Membership is a
//! projection residual, so equalities such as `A = A′` become a dimension
//! count plus a span comparison.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::numkernel::{
    cluster_sorted, gram_schmidt_hs, hermitian_eig_unchecked, orthogonalize_against, span_residual,
    spectral_scale, ComplexMatrix, HermitianEig, NullspaceAccumulator, ToleranceConfig, C64,
    HERMITIAN_TOL, ONE, SEPARATED_GAP, ZERO,
};
use crate::sectors::{decompose_with_commutant, SectorDecomposition};

/// Relative residual accepted for "the product lies in the span".
pub const CLOSURE_TOL: f64 = 1e-8;
/// Relative commutator norm below which two elements count as commuting.
pub const COMMUTE_TOL: f64 = 1e-8;
/// Residual accepted when testing membership of a normalized element in a span.
pub const SPAN_TOL: f64 = 1e-8;

/// Reseeds allowed for generic-element draws.
pub const MAX_RESEEDS: usize = 16;
/// Seeded pivot combinations tried per commutant solve.
const PIVOT_DRAWS: usize = 3;

/// A named collection of square matrices of a common dimension.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    dim: usize,
    members: Vec<(String, ComplexMatrix)>,
    self_adjoint_closed: bool,
}

impl OperatorSet {
    /// Validates shapes and, when `self_adjoint_closed` is claimed, that every
    /// adjoint lies in the span of the members.
    pub fn new(
        dim: usize,
        members: Vec<(String, ComplexMatrix)>,
        self_adjoint_closed: bool,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        for (_, m) in &members {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        let set = Self {
            dim,
            members,
            self_adjoint_closed,
        };
        if self_adjoint_closed && !set.members.is_empty() {
            let basis = gram_schmidt_hs(&set.matrices(), tol);
            for (name, m) in &set.members {
                let norm = m.frobenius_norm();
                if norm > 0.0 && span_residual(&basis, &m.adjoint()) > SPAN_TOL * norm {
                    return Err(Error::NotSelfAdjointClosed(name.clone()));
                }
            }
        }
        Ok(set)
    }

    /// Unnamed members, not assumed to be *-closed.
    pub fn from_matrices(mats: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = mats
            .first()
            .map(ComplexMatrix::dim)
            .ok_or(Error::EmptySet)?;
        let members = mats
            .into_iter()
            .enumerate()
            .map(|(k, m)| (format!("op{k}"), m))
            .collect();
        Self::new(dim, members, false, &ToleranceConfig::default())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[(String, ComplexMatrix)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn self_adjoint_closed(&self) -> bool {
        self.self_adjoint_closed
    }

    pub fn matrices(&self) -> Vec<ComplexMatrix> {
        self.members.iter().map(|(_, m)| m.clone()).collect()
    }

    /// Hermitian and anti-Hermitian parts of every member, zero parts dropped.
    ///
    /// Their real span equals the complex span of the members together with
    /// their adjoints, so this is the *-completion.
    pub fn hermitian_generators(&self) -> Vec<ComplexMatrix> {
        let mut out = Vec::with_capacity(2 * self.members.len());
        for (_, m) in &self.members {
            let scale = m.frobenius_norm();
            for part in [m.hermitian_part(), m.antihermitian_part()] {
                if part.frobenius_norm() > HERMITIAN_TOL * scale {
                    out.push(part);
                }
            }
        }
        out
    }
}

/// Column-pivoted Gram–Schmidt over the reals for Hermitian matrices, whose
/// HS inner products are real, so every output stays Hermitian.
///
/// Outputs are the unnormalized residuals: a dependent input leaves only
/// round-off behind, which stays round-off sized instead of being promoted to
/// a unit generator.
fn real_residual_basis(mut residuals: Vec<ComplexMatrix>, rel_tol: f64) -> Vec<ComplexMatrix> {
    let mut norms: Vec<f64> = residuals
        .iter()
        .map(ComplexMatrix::frobenius_norm)
        .collect();
    let cutoff = rel_tol * norms.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    while let Some((k, &best)) = norms.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) {
        if best <= cutoff || best == 0.0 {
            break;
        }
        let r = residuals.swap_remove(k);
        norms.swap_remove(k);
        let u = r.scale_real(1.0 / best);
        for (x, n) in residuals.iter_mut().zip(norms.iter_mut()) {
            *x = &*x - &u.scale_real(u.hs_inner(x).re);
            *n = x.frobenius_norm();
        }
        out.push(r);
    }
    out
}

/// A *-subalgebra of the n×n matrices, stored as an HS-orthonormal basis.
#[derive(Clone, Debug)]
pub struct OperatorAlgebra {
    dim: usize,
    basis: Vec<ComplexMatrix>,
    contains_identity: bool,
}

impl OperatorAlgebra {
    /// Orthonormalizes `spanning` and records whether the identity lies in the span.
    ///
    /// No closure check is made here; see [`OperatorAlgebra::closure_residuals`].
    pub fn from_spanning(dim: usize, spanning: &[ComplexMatrix], tol: &ToleranceConfig) -> Self {
        let basis = gram_schmidt_hs(spanning, tol);
        Self::from_orthonormal(dim, basis)
    }

    pub(crate) fn from_orthonormal(dim: usize, basis: Vec<ComplexMatrix>) -> Self {
        let id = ComplexMatrix::identity(dim);
        let contains_identity = span_residual(&basis, &id) <= SPAN_TOL * (dim as f64).sqrt();
        Self {
            dim,
            basis,
            contains_identity,
        }
    }

    /// The full matrix algebra M_n.
    pub fn full(dim: usize) -> Self {
        let basis = (0..dim * dim)
            .map(|k| ComplexMatrix::from_fn(dim, |i, j| if i + j * dim == k { ONE } else { ZERO }))
            .collect();
        Self::from_orthonormal(dim, basis)
    }

    /// Diagonal matrices in M_n.
    pub fn diagonal(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|k| ComplexMatrix::from_fn(dim, |i, j| if i == k && j == k { ONE } else { ZERO }))
            .collect();
        Self::from_orthonormal(dim, basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the algebra as a complex vector space.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    /// Residual of the projection of `m` onto the algebra, relative to `‖m‖_F`.
    pub fn membership_residual(&self, m: &ComplexMatrix) -> f64 {
        let norm = m.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        span_residual(&self.basis, m) / norm
    }

    pub fn contains(&self, m: &ComplexMatrix) -> bool {
        self.membership_residual(m) <= SPAN_TOL
    }

    /// Both spans contain each other.
    pub fn span_equals(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.dimension() == other.dimension()
            && other.basis.iter().all(|b| self.contains(b))
            && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn is_subalgebra_of(&self, other: &Self) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// The basis as a *-closed operator set.
    pub fn as_operator_set(&self) -> OperatorSet {
        let members = self
            .basis
            .iter()
            .enumerate()
            .map(|(k, b)| (format!("b{k}"), b.clone()))
            .collect();
        OperatorSet {
            dim: self.dim,
            members,
            self_adjoint_closed: true,
        }
    }

    /// A Hermitian spanning set of the algebra.
    pub fn hermitian_spanning(&self) -> Vec<ComplexMatrix> {
        self.as_operator_set().hermitian_generators()
    }

    /// A seeded random Hermitian element of the algebra.
    pub fn random_hermitian_element(&self, rng: &mut impl Rng) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for h in self.hermitian_spanning() {
            acc = &acc + &h.scale_real(rng.random_range(-1.0..1.0));
        }
        acc
    }

    /// Worst deviations from the algebra invariants.
    pub fn closure_residuals(&self) -> ClosureResiduals {
        let mut orthonormality: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let delta = if i == j { ONE } else { ZERO };
                orthonormality = orthonormality.max((a.hs_inner(b) - delta).norm());
            }
        }
        let adjoint = self
            .basis
            .iter()
            .map(|b| self.membership_residual(&b.adjoint()))
            .fold(0.0, f64::max);
        let mut product: f64 = 0.0;
        for a in &self.basis {
            for b in &self.basis {
                product = product.max(self.membership_residual(&(a * b)));
            }
        }
        ClosureResiduals {
            orthonormality,
            adjoint,
            product,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClosureResiduals {
    pub orthonormality: f64,
    pub adjoint: f64,
    pub product: f64,
}

impl ClosureResiduals {
    pub fn within(&self, tol: &ToleranceConfig) -> bool {
        self.orthonormality <= 1e-10
            && self.adjoint <= SPAN_TOL.max(tol.rank_tol)
            && self.product <= CLOSURE_TOL
    }
}

#[derive(Clone, Debug)]
pub struct CommutantReport {
    pub algebra: OperatorAlgebra,
    /// The input was not flagged self-adjoint closed and adjoints were appended.
    pub star_completed: bool,
    /// Largest relative commutator between a result basis element and an input member.
    pub max_residual: f64,
}

/// `{B : BA = AB for all A ∈ S}`, after *-completing `S`.
pub fn commutant(set: &OperatorSet, tol: &ToleranceConfig) -> Result<OperatorAlgebra> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = set.dim();
    let gens = real_residual_basis(set.hermitian_generators(), HERMITIAN_TOL);
    Ok(OperatorAlgebra::from_orthonormal(
        n,
        joint_commutant(n, &gens, tol),
    ))
}

/// [`commutant`] together with the completion flag and the verification residual.
///
/// The joint nullspace of `B ↦ H_k B − B H_k` over the Hermitian generators is
/// computed in two stages. A seeded generic combination `H₀ = Σ r_k H_k` is
/// diagonalized first; its commutant is block diagonal in the eigenbasis and
/// contains the joint nullspace, so the remaining constraints are stacked only
/// on that candidate subspace and solved by one rank-revealing factorization.
pub fn commutant_report(set: &OperatorSet, tol: &ToleranceConfig) -> Result<CommutantReport> {
    let algebra = commutant(set, tol)?;
    let mut max_residual: f64 = 0.0;
    for b in algebra.basis() {
        for (_, a) in set.members() {
            let scale = a.frobenius_norm() * b.frobenius_norm();
            if scale > 0.0 {
                max_residual = max_residual.max(a.commutator(b).frobenius_norm() / scale);
            }
        }
    }
    Ok(CommutantReport {
        algebra,
        star_completed: !set.self_adjoint_closed(),
        max_residual,
    })
}

fn joint_commutant(n: usize, gens: &[ComplexMatrix], tol: &ToleranceConfig) -> Vec<ComplexMatrix> {
    // candidate accuracy degrades like round-off over the smallest gap between
    // pivot clusters, so the best-separated of a few seeded draws is used
    let mut rng = tol.rng(0x636f_6d6d);
    let mut best: Option<(f64, HermitianEig, Vec<std::ops::Range<usize>>)> = None;
    for _ in 0..PIVOT_DRAWS {
        let mut pivot = ComplexMatrix::zeros(n);
        for h in gens {
            pivot = &pivot + &h.scale_real(rng.random_range(0.5..1.5) * rng_sign(&mut rng));
        }
        let eig = hermitian_eig_unchecked(pivot.matrix());
        let clusters = cluster_sorted(&eig.values, tol.cluster_tol);
        let gap = clusters
            .windows(2)
            .map(|w| eig.values[w[1].start] - eig.values[w[0].end - 1])
            .fold(f64::INFINITY, f64::min)
            / spectral_scale(&eig.values).max(f64::MIN_POSITIVE);
        if best.as_ref().is_none_or(|(g, _, _)| gap > *g) {
            best = Some((gap, eig, clusters));
        }
        if gap >= SEPARATED_GAP {
            break;
        }
    }
    let (_, eig, clusters) = best.expect("at least one draw");

    // candidate basis w_a w_b† with a, b in one eigenvalue cluster
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for c in &clusters {
        for a in c.clone() {
            for b in c.clone() {
                pairs.push((a, b));
            }
        }
    }
    let w = &eig.vectors;
    // Constraints are imposed one generator at a time on the surviving
    // candidate space, so once it has settled each further generator costs a
    // product and a thin SVD instead of growing a stacked factorization.
    let scale = gens
        .iter()
        .map(|h| h.frobenius_norm())
        .fold(0.0, f64::max)
        .max(
            gens.iter()
                .map(|h| h.frobenius_norm() / (n as f64).sqrt())
                .fold(0.0, f64::max),
        );
    let cutoff = tol.rank_tol * scale;
    let mut null = DMatrix::<C64>::identity(pairs.len(), pairs.len());
    for h in gens {
        if null.ncols() == 0 {
            break;
        }
        let hw = h.matrix() * w;
        // column j holds vec([H, w_a w_b†]) = vec(Hw_a w_b† − w_a (Hw_b)†)
        let block = DMatrix::from_fn(n * n, pairs.len(), |r, j| {
            let (a, b) = pairs[j];
            let (row, col) = (r % n, r / n);
            hw[(row, a)] * w[(col, b)].conj() - w[(row, a)] * hw[(col, b)].conj()
        });
        let restricted = if null.ncols() == pairs.len() {
            block
        } else {
            block * &null
        };
        let k = restricted.ncols();
        let square = if restricted.nrows() > k {
            restricted.qr().r()
        } else {
            restricted.resize_vertically(k, ZERO)
        };
        let svd = square.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] <= cutoff)
            .collect();
        if keep.len() == k {
            continue;
        }
        let v = DMatrix::from_fn(k, keep.len(), |r, c| v_t[(keep[c], r)].conj());
        null = &null * v;
    }
    (0..null.ncols())
        .map(|k| {
            let mut m = DMatrix::<C64>::zeros(n, n);
            for (j, &(a, b)) in pairs.iter().enumerate() {
                let c = null[(j, k)];
                if c == ZERO {
                    continue;
                }
                for col in 0..n {
                    let wb = w[(col, b)].conj() * c;
                    for row in 0..n {
                        m[(row, col)] += w[(row, a)] * wb;
                    }
                }
            }
            ComplexMatrix::from_raw(m)
        })
        .collect()
}

fn rng_sign(rng: &mut impl Rng) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// The algebra generated by `S`, defined as its double commutant.
///
/// The result is validated against the word closure of `S ∪ S† ∪ {1}`; a
/// dimension disagreement is reported as [`Error::ClosureMismatch`].
pub fn generated_algebra(set: &OperatorSet, tol: &ToleranceConfig) -> Result<OperatorAlgebra> {
    let first = commutant(set, tol)?;
    let double = commutant(&first.as_operator_set(), tol)?;
    let words = word_closure(set, tol)?;
    if words.dimension() != double.dimension() {
        return Err(Error::ClosureMismatch {
            double_commutant: double.dimension(),
            word_closure: words.dimension(),
        });
    }
    Ok(double)
}

/// Span of all words in `S ∪ S†` including the empty word, grown by
/// left-multiplication with generators until the dimension stabilizes.
pub fn word_closure(set: &OperatorSet, tol: &ToleranceConfig) -> Result<OperatorAlgebra> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = set.dim();
    // residuals far below the largest are round-off from dependent parts and
    // would turn into junk directions once normalized
    let parts = real_residual_basis(set.hermitian_generators(), HERMITIAN_TOL);
    let largest = parts
        .iter()
        .map(ComplexMatrix::frobenius_norm)
        .fold(0.0, f64::max);
    let gens: Vec<ComplexMatrix> = parts
        .iter()
        .filter(|g| g.frobenius_norm() > tol.cluster_tol * largest)
        .map(|g| g.scale_real(1.0 / g.frobenius_norm()))
        .collect();
    let mut basis = vec![ComplexMatrix::identity(n).scale_real(1.0 / (n as f64).sqrt())];
    let mut frontier = basis.clone();
    while !frontier.is_empty() && basis.len() < n * n {
        let mut next = Vec::new();
        for g in &gens {
            for f in &frontier {
                let p = g * f;
                // generators and frontier are unit-norm, so ‖p‖ is at most 1
                let cutoff = tol.cluster_tol * p.frobenius_norm().max(1.0 / n as f64);
                if let Some(u) = orthogonalize_against(&basis, &p, cutoff) {
                    basis.push(u.clone());
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    Ok(OperatorAlgebra::from_orthonormal(n, basis))
}

/// `O ∩ O′`.
pub fn center(algebra: &OperatorAlgebra, tol: &ToleranceConfig) -> Result<OperatorAlgebra> {
    let prime = commutant(&algebra.as_operator_set(), tol)?;
    Ok(intersect(algebra, &prime, tol))
}

/// Intersection of two spans; `b` is searched for elements lying in `a`.
pub(crate) fn intersect(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    tol: &ToleranceConfig,
) -> OperatorAlgebra {
    let n = a.dim();
    let k = b.dimension();
    let residuals: Vec<DMatrix<C64>> = b
        .basis()
        .iter()
        .map(|w| {
            let mut r = w.matrix().clone();
            for _ in 0..2 {
                for u in a.basis() {
                    let c = u.hs_inner(&ComplexMatrix::from_raw(r.clone()));
                    r -= u.matrix() * c;
                }
            }
            r
        })
        .collect();
    let stacked = DMatrix::from_fn(n * n, k, |r, j| residuals[j].as_slice()[r]);
    let mut acc = NullspaceAccumulator::new(k);
    acc.push_rows(stacked);
    let (null, _) = acc.finish(tol.rank_tol.max(SPAN_TOL), 1.0);
    let basis: Vec<ComplexMatrix> = (0..null.ncols())
        .map(|c| {
            let mut m = DMatrix::<C64>::zeros(n, n);
            for (j, w) in b.basis().iter().enumerate() {
                m += w.matrix() * null[(j, c)];
            }
            ComplexMatrix::from_raw(m)
        })
        .collect();
    OperatorAlgebra::from_spanning(n, &basis, tol)
}

/// Whether all basis elements commute, with the largest relative commutator.
pub fn is_abelian(algebra: &OperatorAlgebra, _tol: &ToleranceConfig) -> (bool, f64) {
    let b = algebra.basis();
    let mut worst: f64 = 0.0;
    for i in 0..b.len() {
        for j in (i + 1)..b.len() {
            let scale = b[i].frobenius_norm() * b[j].frobenius_norm();
            if scale > 0.0 {
                worst = worst.max(b[i].commutator(&b[j]).frobenius_norm() / scale);
            }
        }
    }
    (worst <= COMMUTE_TOL, worst)
}

#[derive(Clone, Debug)]
pub struct DiracReport {
    /// The commutant of the observables is abelian.
    pub v2_holds: bool,
    pub commutant_dim: usize,
    pub commutant_max_commutator: f64,
    /// A maximal abelian *-subalgebra of the observables, present iff `v2_holds`.
    pub witness: Option<OperatorAlgebra>,
    pub sectors: SectorDecomposition,
}

/// Checks that `O′` is abelian and, when it is, exhibits `A ⊆ O` with `A = A′`.
///
/// The witness is generated by the central projectors together with the
/// sector compressions of one seeded Hermitian element of `O`. Each
/// compression must have simple spectrum inside its sector; failed draws are
/// retried with fresh seeds.
pub fn check_dirac(algebra: &OperatorAlgebra, tol: &ToleranceConfig) -> Result<DiracReport> {
    let n = algebra.dim();
    let prime = commutant(&algebra.as_operator_set(), tol)?;
    let (v2_holds, worst) = is_abelian(&prime, tol);
    let sectors = decompose_with_commutant(algebra, &prime, tol)?;
    let mut report = DiracReport {
        v2_holds,
        commutant_dim: prime.dimension(),
        commutant_max_commutator: worst,
        witness: None,
        sectors,
    };
    if !v2_holds {
        return Ok(report);
    }
    for attempt in 0..MAX_RESEEDS {
        let mut rng = tol.rng(0x6469_7261 + attempt as u64);
        let h = algebra.random_hermitian_element(&mut rng);
        let mut gens = Vec::new();
        let mut simple = true;
        for s in report.sectors.sectors() {
            let v = s.isometry();
            let block = h.compress(v);
            let eig = hermitian_eig_unchecked(block.matrix());
            if cluster_sorted(&eig.values, tol.cluster_tol).len() != eig.values.len() {
                simple = false;
                break;
            }
            let lifted = ComplexMatrix::from_raw(v * block.matrix() * v.adjoint());
            gens.push(s.projector.clone());
            gens.push(lifted);
        }
        if !simple {
            continue;
        }
        let set = OperatorSet::from_matrices(gens)?;
        let witness = match generated_algebra(&set, tol) {
            Ok(w) => w,
            Err(Error::ClosureMismatch { .. }) => continue,
            Err(e) => return Err(e),
        };
        let witness_prime = commutant(&witness.as_operator_set(), tol)?;
        if witness.dimension() == n
            && witness_prime.span_equals(&witness)
            && witness.is_subalgebra_of(algebra)
        {
            report.witness = Some(witness);
            return Ok(report);
        }
    }
    Err(Error::WitnessConstructionFailed(MAX_RESEEDS))
}
