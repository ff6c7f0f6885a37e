//! Dense complex linear-algebra primitives.
//!
//! Everything here is a pure function of its inputs. Hermitian eigenproblems
//! and singular value decompositions are delegated to `nalgebra`; the module
//! adds the tolerance conventions used throughout the crate (relative rank
//! cutoffs, eigenvalue clustering) and the Hilbert–Schmidt geometry on the
//! matrix space, `<A, B> = tr(A† B)`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative Frobenius deviation from hermiticity accepted by eigen routines.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative cluster gap at which a seeded generic draw is accepted without
/// trying further draws.
pub const SEPARATED_GAP: f64 = 1e-3;

/// A square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Wraps a matrix already known to be square and finite.
    pub(crate) fn from_raw(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(n, n, f))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Builds a matrix from real rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == n),
            "rows must form a square matrix"
        );
        Self::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// Builds a matrix from row-major real and imaginary parts.
    pub fn from_parts(n: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != n * n || im.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: re.len().min(im.len()),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            C64::new(re[i * n + j], im[i * n + j])
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `tr(A† B)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// `‖A − A†‖_F / ‖A‖_F`, zero for the zero matrix.
    pub fn hermitian_deviation(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut dev = 0.0;
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                dev += (self.0[(i, j)] - self.0[(j, i)].conj()).norm_sqr();
            }
        }
        dev.sqrt() / norm
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// `(A − A†)/(2i)`, so that `A = re + i·im` with both parts Hermitian.
    pub fn antihermitian_part(&self) -> Self {
        Self((&self.0 - self.0.adjoint()) * C64::new(0.0, -0.5))
    }

    /// Column-stacked vectorization.
    pub fn vectorize(&self) -> DVector<C64> {
        DVector::from_column_slice(self.0.as_slice())
    }

    pub fn from_vectorized(n: usize, v: &[C64]) -> Self {
        Self(DMatrix::from_column_slice(n, n, v))
    }

    /// `V† A V` for an isometry `V` (n×k); the result is k×k.
    pub fn compress(&self, isometry: &DMatrix<C64>) -> Self {
        Self(isometry.adjoint() * &self.0 * isometry)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Numerical tolerances and the seed for every generic-element draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceConfig {
    pub rank_tol: f64,
    pub cluster_tol: f64,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_tol: 1e-10,
            cluster_tol: 1e-8,
            seed: 0,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_tol: f64, cluster_tol: f64, seed: u64) -> Result<Self> {
        if !(rank_tol > 0.0 && rank_tol < 1.0) {
            return Err(Error::InvalidTolerance(format!(
                "rank_tol {rank_tol} outside (0, 1)"
            )));
        }
        if !(cluster_tol > 0.0 && cluster_tol < 1.0) {
            return Err(Error::InvalidTolerance(format!(
                "cluster_tol {cluster_tol} outside (0, 1)"
            )));
        }
        Ok(Self {
            rank_tol,
            cluster_tol,
            seed,
        })
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// A reproducible generator for the `stream`-th independent draw of a call.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<C64>,
}

impl HermitianEig {
    /// Groups eigenvalue indices into clusters; see [`cluster_sorted`].
    pub fn clusters(&self, cluster_tol: f64) -> Vec<std::ops::Range<usize>> {
        cluster_sorted(&self.values, cluster_tol)
    }

    /// Columns `range` of the eigenvector matrix.
    pub fn eigenspace(&self, range: std::ops::Range<usize>) -> DMatrix<C64> {
        self.vectors.columns(range.start, range.len()).into_owned()
    }
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    let dev = a.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(hermitian_eig_unchecked(a.matrix()))
}

/// Eigen-decomposition of `(A + A†)/2` without the hermiticity gate.
pub(crate) fn hermitian_eig_unchecked(a: &DMatrix<C64>) -> HermitianEig {
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    HermitianEig { values, vectors }
}

/// Splits ascending `values` into maximal runs whose consecutive gaps are at
/// most `cluster_tol` times the spectral scale.
///
/// The scale is the spectral diameter, floored at `1e-4·max|λ|` so that a
/// numerically scalar spectrum stays a single cluster.
pub fn cluster_sorted(values: &[f64], cluster_tol: f64) -> Vec<std::ops::Range<usize>> {
    if values.is_empty() {
        return Vec::new();
    }
    let threshold = cluster_tol * spectral_scale(values);
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..values.len() {
        if values[k] - values[k - 1] > threshold {
            out.push(start..k);
            start = k;
        }
    }
    out.push(start..values.len());
    out
}

pub(crate) fn spectral_scale(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let max_abs = lo.abs().max(hi.abs());
    (hi - lo).max(1e-4 * max_abs)
}

/// Orthonormal basis (as columns) of `{v : M v ≈ 0}`.
///
/// A right singular vector belongs to the nullspace when its singular value
/// is at most `rank_tol · σ_max(M)`; the zero matrix has the full space.
pub fn orthonormal_nullspace(m: &DMatrix<C64>, tol: &ToleranceConfig) -> DMatrix<C64> {
    let mut acc = NullspaceAccumulator::new(m.ncols());
    acc.push_rows(m.clone());
    acc.finish(tol.rank_tol, 0.0).0
}

/// Numerical rank: singular values above `rank_tol · σ_max`.
pub fn numerical_rank(m: &DMatrix<C64>, tol: &ToleranceConfig) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.rank_tol * smax).count()
}

/// Nullspace of a tall stacked matrix fed in row blocks.
///
/// Blocks are folded into an upper-triangular factor by repeated QR, so the
/// full stack is never held at once and singular values keep full precision.
pub(crate) struct NullspaceAccumulator {
    cols: usize,
    stack: DMatrix<C64>,
}

impl NullspaceAccumulator {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            stack: DMatrix::zeros(0, cols),
        }
    }

    pub fn push_rows(&mut self, block: DMatrix<C64>) {
        assert_eq!(block.ncols(), self.cols);
        if block.nrows() == 0 {
            return;
        }
        let old = std::mem::replace(&mut self.stack, DMatrix::zeros(0, self.cols));
        let rows = old.nrows() + block.nrows();
        let mut joined = old.resize_vertically(rows, ZERO);
        joined
            .rows_mut(rows - block.nrows(), block.nrows())
            .copy_from(&block);
        self.stack = joined;
        if self.stack.nrows() > 2 * self.cols.max(8) {
            self.compress();
        }
    }

    fn compress(&mut self) {
        if self.stack.nrows() <= self.cols {
            return;
        }
        let stack = std::mem::replace(&mut self.stack, DMatrix::zeros(0, self.cols));
        self.stack = stack.qr().r();
    }

    /// Returns the nullspace basis and the singular values of the stack.
    ///
    /// The cutoff is `rank_tol · max(σ_max, floor_scale)`; a positive floor keeps
    /// round-off from being promoted to rank when every constraint is
    /// numerically zero.
    pub fn finish(mut self, rank_tol: f64, floor_scale: f64) -> (DMatrix<C64>, Vec<f64>) {
        let c = self.cols;
        if c == 0 {
            return (DMatrix::zeros(0, 0), Vec::new());
        }
        self.compress();
        let rows = c.max(self.stack.nrows());
        let mut square = self.stack.resize_vertically(rows, ZERO);
        if square.nrows() > c {
            square = square.qr().r();
        }
        let svd = square.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let cutoff = rank_tol * smax.max(floor_scale);
        let null: Vec<usize> = (0..sv.len())
            .filter(|&k| smax == 0.0 || sv[k] <= cutoff)
            .collect();
        let basis = DMatrix::from_fn(c, null.len(), |r, k| v_t[(null[k], r)].conj());
        (basis, sv)
    }
}

/// Orthonormalizes matrices under the Hilbert–Schmidt inner product.
///
/// Column-pivoted: each step takes the remaining input with the largest
/// residual, so a dependency carried mostly by a late input cannot leave a
/// spurious direction behind. Stops once every residual is at most
/// `rank_tol` times the largest input norm.
pub fn gram_schmidt_hs(vectors: &[ComplexMatrix], tol: &ToleranceConfig) -> Vec<ComplexMatrix> {
    let largest = vectors
        .iter()
        .map(ComplexMatrix::frobenius_norm)
        .fold(0.0, f64::max);
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    if largest == 0.0 {
        return basis;
    }
    let cutoff = tol.rank_tol * largest;
    let mut residuals: Vec<DMatrix<C64>> = vectors.iter().map(|v| v.0.clone()).collect();
    let mut norms: Vec<f64> = vectors.iter().map(ComplexMatrix::frobenius_norm).collect();
    loop {
        let Some((k, &best)) = norms.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
            break;
        };
        if best <= cutoff {
            break;
        }
        let r = residuals.swap_remove(k);
        norms.swap_remove(k);
        // Second pass against the accumulated basis before accepting.
        let Some(u) = orthogonalize_against(&basis, &ComplexMatrix(r), cutoff) else {
            continue;
        };
        for (r, n) in residuals.iter_mut().zip(norms.iter_mut()) {
            let c: C64 = u.0.iter().zip(r.iter()).map(|(x, y)| x.conj() * y).sum();
            r.zip_apply(&u.0, |ri, bi| *ri -= c * bi);
            *n = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        }
        basis.push(u);
    }
    basis
}

/// Normalized residual of `v` against an orthonormal `basis`, or `None` when
/// the residual norm is at most `cutoff`.
pub(crate) fn orthogonalize_against(
    basis: &[ComplexMatrix],
    v: &ComplexMatrix,
    cutoff: f64,
) -> Option<ComplexMatrix> {
    let mut r = v.0.clone();
    for _ in 0..2 {
        for b in basis {
            let c: C64 = b.0.iter().zip(r.iter()).map(|(x, y)| x.conj() * y).sum();
            r.zip_apply(&b.0, |ri, bi| *ri -= c * bi);
        }
    }
    let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= cutoff || norm == 0.0 {
        None
    } else {
        Some(ComplexMatrix(r / C64::new(norm, 0.0)))
    }
}

/// Frobenius norm of the residual of `v` after projecting onto an orthonormal basis.
pub fn span_residual(basis: &[ComplexMatrix], v: &ComplexMatrix) -> f64 {
    let mut r = v.0.clone();
    for _ in 0..2 {
        for b in basis {
            let c: C64 = b.0.iter().zip(r.iter()).map(|(x, y)| x.conj() * y).sum();
            r.zip_apply(&b.0, |ri, bi| *ri -= c * bi);
        }
    }
    r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_norm(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// The Pauli matrices X, Y, Z.
pub fn pauli() -> [ComplexMatrix; 3] {
    let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let y = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    });
    let z = ComplexMatrix::diag(&[1.0, -1.0]);
    [x, y, z]
}

pub fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Hermitian matrix with entries drawn uniformly from the unit square.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let m = DMatrix::from_fn(n, n, |_, _| random_complex(rng));
    ComplexMatrix::from_raw(m).hermitian_part()
}

/// A unitary obtained from the QR factor of a random complex matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let m = DMatrix::from_fn(n, n, |_, _| random_complex(rng));
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                ONE
            }
        } else {
            ZERO
        }
    });
    ComplexMatrix::from_raw(q * phases)
}

pub fn random_vector(n: usize, rng: &mut impl Rng) -> DVector<C64> {
    DVector::from_fn(n, |_, _| random_complex(rng))
}
