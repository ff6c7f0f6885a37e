//! Coherent-sector decomposition from the center of an observable algebra.
//!
//! A finite-dimensional observable algebra with identity is a direct sum of
//! blocks `M_ñ ⊗ 1_d`. The minimal central projectors cut the state space into
//! sectors; inside sector `i` the observables act as `M_ñᵢ` on one tensor
//! factor and the commutant as `M_dᵢ` on the other. Only finite sums are
//! modelled, there is no continuous direct integral here.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numkernel::{
    cluster_sorted, gram_schmidt_hs, hermitian_eig_unchecked, spectral_scale, vector_norm,
    ComplexMatrix, HermitianEig, ToleranceConfig, C64, SEPARATED_GAP,
};
use crate::opalgebra::{
    check_dirac, commutant, intersect, DiracReport, OperatorAlgebra, MAX_RESEEDS,
};

/// Relative matrix-element size below which two vectors count as disjoint.
pub const DISJOINT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Sector {
    pub projector: ComplexMatrix,
    pub block_dim: usize,
    /// Dimension of the commutant factor.
    pub d: usize,
    /// Dimension of the factor the observables act on irreducibly.
    pub ntilde: usize,
    /// Eigenvalue of the generic central element that labelled this sector.
    pub central_value: f64,
    isometry: DMatrix<C64>,
}

impl Sector {
    /// Orthonormal basis of the sector as columns (n × block_dim).
    pub fn isometry(&self) -> &DMatrix<C64> {
        &self.isometry
    }
}

#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    dim: usize,
    sectors: Vec<Sector>,
}

impl SectorDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    /// `(d_i, ñ_i)` in sector order.
    pub fn structure(&self) -> Vec<(usize, usize)> {
        self.sectors.iter().map(|s| (s.d, s.ntilde)).collect()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.sectors.iter().map(|s| s.block_dim).collect()
    }

    /// Worst deviation of `P_i P_j = δ_ij P_i` and `Σ P_i = 1`.
    pub fn projector_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        let mut sum = ComplexMatrix::zeros(n);
        for (i, a) in self.sectors.iter().enumerate() {
            sum = &sum + &a.projector;
            for (j, b) in self.sectors.iter().enumerate() {
                let prod = &a.projector * &b.projector;
                let target = if i == j {
                    a.projector.clone()
                } else {
                    ComplexMatrix::zeros(n)
                };
                worst = worst.max((&prod - &target).frobenius_norm());
            }
        }
        worst.max((&sum - &ComplexMatrix::identity(n)).frobenius_norm())
    }
}

/// Seeded central elements tried per decomposition.
const CENTRAL_DRAWS: usize = 4;

/// Minimal central projectors of `O` and the multiplicity data of each block.
///
/// Seeded generic Hermitian elements of the center are diagonalized, the best
/// separated one is kept, and its eigenvalue clusters give the projectors.
/// Within a block, `ñ² = dim O|_block` and `d² = dim O′|_block`; both square
/// roots must sit within 0.1 of an integer and satisfy `d·ñ = block_dim`.
pub fn central_decomposition(
    algebra: &OperatorAlgebra,
    tol: &ToleranceConfig,
) -> Result<SectorDecomposition> {
    let prime = commutant(&algebra.as_operator_set(), tol)?;
    decompose_with_commutant(algebra, &prime, tol)
}

/// [`central_decomposition`] with the commutant of `algebra` already known.
pub(crate) fn decompose_with_commutant(
    algebra: &OperatorAlgebra,
    prime: &OperatorAlgebra,
    tol: &ToleranceConfig,
) -> Result<SectorDecomposition> {
    if !algebra.contains_identity() {
        return Err(Error::InvalidArgument(
            "observable algebra must contain the identity".into(),
        ));
    }
    let n = algebra.dim();
    let z = intersect(algebra, prime, tol);
    // eigenvector mixing between sectors scales like round-off over the
    // smallest inter-cluster gap, so the best-separated of a few draws is kept
    let mut rng = tol.rng(0x6365_6e74);
    let mut best: Option<(f64, HermitianEig)> = None;
    for _ in 0..CENTRAL_DRAWS {
        let c = z.random_hermitian_element(&mut rng);
        let eig = hermitian_eig_unchecked(c.matrix());
        let clusters = cluster_sorted(&eig.values, tol.cluster_tol);
        let spread = spectral_scale(&eig.values).max(f64::MIN_POSITIVE);
        let gap = clusters
            .windows(2)
            .map(|w| eig.values[w[1].start] - eig.values[w[0].end - 1])
            .fold(f64::INFINITY, f64::min)
            / spread;
        if best.as_ref().is_none_or(|(g, _)| gap > *g) {
            best = Some((gap, eig));
        }
        if gap >= SEPARATED_GAP {
            break;
        }
    }
    let (_, eig) = best.expect("at least one draw");
    let mut sectors = Vec::new();
    for range in cluster_sorted(&eig.values, tol.cluster_tol) {
        let v = eig.eigenspace(range.clone());
        let block_dim = v.ncols();
        let ntilde = block_sqrt_dim(algebra, &v, tol, "observable")?;
        let d = block_sqrt_dim(prime, &v, tol, "commutant")?;
        if d * ntilde != block_dim {
            return Err(Error::NonIntegerStructure(format!(
                "block of dimension {block_dim} has d = {d}, ñ = {ntilde}"
            )));
        }
        let central_value = eig.values[range].iter().sum::<f64>() / block_dim as f64;
        sectors.push(Sector {
            projector: ComplexMatrix::from_raw(&v * v.adjoint()),
            block_dim,
            d,
            ntilde,
            central_value,
            isometry: v,
        });
    }
    Ok(SectorDecomposition { dim: n, sectors })
}

fn block_sqrt_dim(
    algebra: &OperatorAlgebra,
    v: &DMatrix<C64>,
    tol: &ToleranceConfig,
    what: &str,
) -> Result<usize> {
    let compressed: Vec<ComplexMatrix> = algebra.basis().iter().map(|b| b.compress(v)).collect();
    let dim = gram_schmidt_hs(&compressed, tol).len();
    let root = (dim as f64).sqrt();
    let rounded = root.round();
    if (root - rounded).abs() > 0.1 || rounded < 1.0 {
        return Err(Error::NonIntegerStructure(format!(
            "{what} restricted to a block has dimension {dim}, not a square"
        )));
    }
    Ok(rounded as usize)
}

fn check_vector(phi: &DVector<C64>, n: usize) -> Result<f64> {
    if phi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: phi.len(),
        });
    }
    let norm = vector_norm(phi);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(norm)
}

/// Indices of sectors in which `phi` has a component above `DISJOINT_TOL·‖phi‖`.
pub fn support(phi: &DVector<C64>, dec: &SectorDecomposition) -> Result<Vec<usize>> {
    let norm = check_vector(phi, dec.dim())?;
    Ok(dec
        .sectors()
        .iter()
        .enumerate()
        .filter(|(_, s)| vector_norm(&(s.projector.matrix() * phi)) > DISJOINT_TOL * norm)
        .map(|(i, _)| i)
        .collect())
}

/// Disjointness of two vector states, decided by two criteria that must agree.
///
/// The first asks that `⟨φ₁|B φ₂⟩` vanish for every basis element of `O`; the
/// second that the sector supports of the two vectors be disjoint.
pub fn are_disjoint(
    phi1: &DVector<C64>,
    phi2: &DVector<C64>,
    algebra: &OperatorAlgebra,
    dec: &SectorDecomposition,
    _tol: &ToleranceConfig,
) -> Result<bool> {
    let n1 = check_vector(phi1, algebra.dim())?;
    let n2 = check_vector(phi2, algebra.dim())?;
    let bound = DISJOINT_TOL * n1 * n2;
    let by_elements = algebra
        .basis()
        .iter()
        .all(|b| phi1.dotc(&(b.matrix() * phi2)).norm() <= bound);
    let s1 = support(phi1, dec)?;
    let s2 = support(phi2, dec)?;
    let by_support = s1.iter().all(|i| !s2.contains(i));
    if by_elements != by_support {
        return Err(Error::CriteriaDisagree);
    }
    Ok(by_elements)
}

#[derive(Clone, Debug)]
pub struct ExtremalTerm {
    pub sector: usize,
    /// `‖P_i φ‖² / ‖φ‖²`.
    pub weight: f64,
    /// `P_i φ / ‖P_i φ‖`.
    pub state: DVector<C64>,
}

/// The unique decomposition of a vector state into pure states of single sectors.
pub fn extremal_decomposition(
    phi: &DVector<C64>,
    dec: &SectorDecomposition,
) -> Result<Vec<ExtremalTerm>> {
    let norm = check_vector(phi, dec.dim())?;
    let mut out = Vec::new();
    for (i, s) in dec.sectors().iter().enumerate() {
        let part = s.projector.matrix() * phi;
        let pn = vector_norm(&part);
        if pn > 1e-12 * norm {
            out.push(ExtremalTerm {
                sector: i,
                weight: (pn / norm).powi(2),
                state: part / C64::new(pn, 0.0),
            });
        }
    }
    Ok(out)
}

/// A density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug)]
pub struct DensityState {
    rho: ComplexMatrix,
}

impl DensityState {
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        let dev = rho.hermitian_deviation();
        if dev > 1e-12 {
            return Err(Error::NotHermitian(dev));
        }
        let eig = hermitian_eig_unchecked(rho.matrix());
        if eig.values.iter().any(|&v| v < -1e-10) {
            return Err(Error::InvalidArgument(
                "density matrix has a negative eigenvalue".into(),
            ));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace {tr} is not 1"
            )));
        }
        Ok(Self { rho })
    }

    /// `|φ⟩⟨φ| / ‖φ‖²`.
    pub fn pure(phi: &DVector<C64>) -> Result<Self> {
        let norm = vector_norm(phi);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let u = phi / C64::new(norm, 0.0);
        Self::new(ComplexMatrix::from_raw(&u * u.adjoint()))
    }

    /// `Σ w_k ρ_k` for weights summing to one.
    pub fn mixture(parts: &[(f64, &DensityState)]) -> Result<Self> {
        let n = parts
            .first()
            .map(|(_, s)| s.rho.dim())
            .ok_or(Error::EmptySet)?;
        let mut acc = ComplexMatrix::zeros(n);
        for (w, s) in parts {
            acc = &acc + &s.rho.scale_real(*w);
        }
        Self::new(acc)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }
}

/// `tr(ρB)` for each basis element `B` of `O`.
pub fn expectation_functional(rho: &DensityState, algebra: &OperatorAlgebra) -> Result<Vec<C64>> {
    if rho.rho.dim() != algebra.dim() {
        return Err(Error::DimensionMismatch {
            expected: algebra.dim(),
            found: rho.rho.dim(),
        });
    }
    Ok(algebra
        .basis()
        .iter()
        .map(|b| (rho.rho.matrix() * b.matrix()).trace())
        .collect())
}

#[derive(Clone, Debug)]
pub struct Truncation {
    /// Isometry from the truncated space into the full one (n × Σñ).
    pub isometry: DMatrix<C64>,
    /// `V† O V`, re-orthonormalized.
    pub algebra: OperatorAlgebra,
    /// Start column of each sector inside the isometry.
    pub offsets: Vec<usize>,
    pub dirac: DiracReport,
}

impl Truncation {
    pub fn truncated_dim(&self) -> usize {
        self.isometry.ncols()
    }
}

/// Keeps one multiplicity copy of every sector.
///
/// In a sector with `d > 1`, a seeded generic Hermitian element of `O′` is
/// compressed to the block; its spectrum must split into `d` clusters of size
/// `ñ`, and the eigenspace of the lowest cluster is kept.
pub fn truncate(
    algebra: &OperatorAlgebra,
    dec: &SectorDecomposition,
    tol: &ToleranceConfig,
) -> Result<Truncation> {
    let n = algebra.dim();
    let prime = commutant(&algebra.as_operator_set(), tol)?;
    let mut pieces: Vec<DMatrix<C64>> = Vec::new();
    let mut offsets = Vec::new();
    let mut col = 0;
    for (i, s) in dec.sectors().iter().enumerate() {
        offsets.push(col);
        let v = s.isometry();
        let piece = if s.d == 1 {
            v.clone()
        } else {
            select_copy(&prime, s, i, tol)?
        };
        col += piece.ncols();
        pieces.push(piece);
    }
    let mut isometry = DMatrix::<C64>::zeros(n, col);
    let mut at = 0;
    for p in &pieces {
        isometry.columns_mut(at, p.ncols()).copy_from(p);
        at += p.ncols();
    }
    let compressed: Vec<ComplexMatrix> = algebra
        .basis()
        .iter()
        .map(|b| b.compress(&isometry))
        .collect();
    let reduced = OperatorAlgebra::from_spanning(col, &compressed, tol);
    let dirac = check_dirac(&reduced, tol)?;
    Ok(Truncation {
        isometry,
        algebra: reduced,
        offsets,
        dirac,
    })
}

fn select_copy(
    prime: &OperatorAlgebra,
    s: &Sector,
    index: usize,
    tol: &ToleranceConfig,
) -> Result<DMatrix<C64>> {
    let v = s.isometry();
    for attempt in 0..MAX_RESEEDS {
        let mut rng = tol.rng(0x7472_756e + (index * MAX_RESEEDS + attempt) as u64);
        let h = prime.random_hermitian_element(&mut rng).compress(v);
        let eig = hermitian_eig_unchecked(h.matrix());
        let clusters = cluster_sorted(&eig.values, tol.cluster_tol);
        if clusters.len() == s.d && clusters.iter().all(|c| c.len() == s.ntilde) {
            return Ok(v * eig.eigenspace(clusters[0].clone()));
        }
    }
    Err(Error::DegenerateGenericElement {
        sector: index,
        attempts: MAX_RESEEDS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ONE;
    use crate::opalgebra::{generated_algebra, OperatorSet};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn diag112() -> OperatorAlgebra {
        let s = OperatorSet::from_matrices(vec![ComplexMatrix::diag(&[1.0, 1.0, 2.0])]).unwrap();
        generated_algebra(&s, &tol()).unwrap()
    }

    #[test]
    fn full_algebra_is_one_sector() {
        let dec = central_decomposition(&OperatorAlgebra::full(4), &tol()).unwrap();
        assert_eq!(dec.structure(), vec![(1, 4)]);
    }

    #[test]
    fn diag_two_blocks() {
        let o = diag112();
        assert_eq!(o.dimension(), 2);
        let dec = central_decomposition(&o, &tol()).unwrap();
        let mut dims = dec.block_dims();
        dims.sort();
        assert_eq!(dims, vec![1, 2]);
        assert!(dec.projector_residual() < 1e-10);
        for s in dec.sectors() {
            for b in o.basis() {
                assert!(b.commutator(&s.projector).frobenius_norm() < 1e-9);
            }
        }
    }

    #[test]
    fn commutant_of_diag_has_two_irreducible_sectors() {
        let s = OperatorSet::from_matrices(vec![ComplexMatrix::diag(&[1.0, 1.0, 2.0])]).unwrap();
        let o = commutant(&s, &tol()).unwrap();
        let dec = central_decomposition(&o, &tol()).unwrap();
        let mut st = dec.structure();
        st.sort();
        assert_eq!(st, vec![(1, 1), (1, 2)]);
    }

    fn e(n: usize, k: usize) -> DVector<C64> {
        DVector::from_fn(n, |i, _| if i == k { ONE } else { C64::new(0.0, 0.0) })
    }

    #[test]
    fn disjointness_examples() {
        // commutant of diag(1,1,2): M₂ ⊕ M₁, e₀ and e₂ lie in different blocks
        let s = OperatorSet::from_matrices(vec![ComplexMatrix::diag(&[1.0, 1.0, 2.0])]).unwrap();
        let o = commutant(&s, &tol()).unwrap();
        let dec = central_decomposition(&o, &tol()).unwrap();
        assert!(are_disjoint(&e(3, 0), &e(3, 2), &o, &dec, &tol()).unwrap());
        assert!(!are_disjoint(&e(3, 0), &e(3, 1), &o, &dec, &tol()).unwrap());
        assert!(!are_disjoint(&e(3, 0), &e(3, 0), &o, &dec, &tol()).unwrap());
        let zero = DVector::zeros(3);
        assert_eq!(
            are_disjoint(&zero, &e(3, 0), &o, &dec, &tol()),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn disjointness_on_generated_diag_blocks() {
        let o = diag112();
        let dec = central_decomposition(&o, &tol()).unwrap();
        assert!(are_disjoint(&e(3, 1), &e(3, 2), &o, &dec, &tol()).unwrap());
    }

    #[test]
    fn extremal_weights() {
        let o = OperatorAlgebra::diagonal(3);
        let dec = central_decomposition(&o, &tol()).unwrap();
        assert_eq!(dec.len(), 3);

        let terms = extremal_decomposition(&e(3, 1), &dec).unwrap();
        assert_eq!(terms.len(), 1);
        assert!((terms[0].weight - 1.0).abs() < 1e-14);

        let phi = &e(3, 0) + &e(3, 2);
        let w: Vec<f64> = extremal_decomposition(&phi, &dec)
            .unwrap()
            .iter()
            .map(|t| t.weight)
            .collect();
        assert_eq!(w.len(), 2);
        assert!(w.iter().all(|x| (x - 0.5).abs() < 1e-14));

        let phi = DVector::from_vec(vec![ONE, C64::new(2.0, 0.0), C64::new(0.0, 2.0)]);
        let mut weights: Vec<f64> = extremal_decomposition(&phi, &dec)
            .unwrap()
            .iter()
            .map(|t| t.weight)
            .collect();
        weights.sort_by(f64::total_cmp);
        for (got, want) in weights.iter().zip([1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert_eq!(
            extremal_decomposition(&DVector::zeros(3), &dec).unwrap_err(),
            Error::ZeroVector
        );
    }

    #[test]
    fn expectation_of_maximally_mixed() {
        let n = 3;
        let rho = DensityState::new(ComplexMatrix::identity(n).scale_real(1.0 / n as f64)).unwrap();
        let alg = OperatorAlgebra::from_spanning(n, &[ComplexMatrix::identity(n)], &tol());
        let v = expectation_functional(&rho, &alg).unwrap();
        assert!((v[0].re - (n as f64).sqrt() / n as f64).abs() < 1e-15);
    }

    #[test]
    fn cross_sector_superposition_is_a_mixture() {
        let s = OperatorSet::from_matrices(vec![ComplexMatrix::diag(&[1.0, 1.0, 2.0])]).unwrap();
        let o = commutant(&s, &tol()).unwrap();
        let dec = central_decomposition(&o, &tol()).unwrap();
        let phi = DVector::from_vec(vec![
            C64::new(0.3, 0.1),
            C64::new(-0.2, 0.5),
            C64::new(0.7, -0.4),
        ]);
        let terms = extremal_decomposition(&phi, &dec).unwrap();
        assert_eq!(terms.len(), 2);
        let pure = DensityState::pure(&phi).unwrap();
        let parts: Vec<DensityState> = terms
            .iter()
            .map(|t| DensityState::pure(&t.state).unwrap())
            .collect();
        let mix =
            DensityState::mixture(&[(terms[0].weight, &parts[0]), (terms[1].weight, &parts[1])])
                .unwrap();
        let a = expectation_functional(&pure, &o).unwrap();
        let b = expectation_functional(&mix, &o).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn pure_state_in_irreducible_sector_is_not_a_mixture() {
        let o = OperatorAlgebra::full(2);
        let phi = DVector::from_vec(vec![ONE, C64::new(0.0, 0.0)]);
        let pure = DensityState::pure(&phi).unwrap();
        let a = DensityState::pure(&DVector::from_vec(vec![ONE, ONE])).unwrap();
        let b = DensityState::pure(&DVector::from_vec(vec![ONE, -ONE])).unwrap();
        let mix = DensityState::mixture(&[(0.5, &a), (0.5, &b)]).unwrap();
        let x = expectation_functional(&pure, &o).unwrap();
        let y = expectation_functional(&mix, &o).unwrap();
        assert!(x.iter().zip(&y).any(|(p, q)| (p - q).norm() > 1e-3));
    }

    #[test]
    fn density_state_validation() {
        assert!(DensityState::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityState::new(ComplexMatrix::diag(&[1.5, -0.5])).is_err());
    }

    #[test]
    fn truncating_irreducible_algebra_is_identity() {
        let o = OperatorAlgebra::full(3);
        let dec = central_decomposition(&o, &tol()).unwrap();
        let t = truncate(&o, &dec, &tol()).unwrap();
        assert_eq!(t.truncated_dim(), 3);
        assert_eq!(t.algebra.dimension(), 9);
        assert!(t.dirac.v2_holds);
    }

    #[test]
    fn truncating_m2_tensor_identity() {
        // M₂ ⊗ 1₂: one sector with d = 2, ñ = 2
        let p = crate::numkernel::pauli();
        let mats: Vec<_> = p
            .iter()
            .map(|m| {
                ComplexMatrix::from_fn(4, |r, c| {
                    if r % 2 == c % 2 {
                        m.matrix()[(r / 2, c / 2)]
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        let o = generated_algebra(&OperatorSet::from_matrices(mats).unwrap(), &tol()).unwrap();
        let dec = central_decomposition(&o, &tol()).unwrap();
        assert_eq!(dec.structure(), vec![(2, 2)]);
        let t = truncate(&o, &dec, &tol()).unwrap();
        assert_eq!(t.truncated_dim(), 2);
        assert!(t.dirac.v2_holds);
        assert_eq!(t.dirac.commutant_dim, 1);
        let gram = t.isometry.adjoint() * &t.isometry;
        assert!((gram - DMatrix::<C64>::identity(2, 2)).norm() < 1e-10);
    }
}
