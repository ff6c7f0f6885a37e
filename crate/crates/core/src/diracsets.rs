//! Complete commuting sets: simple spectra, polynomial interpolation of
//! commuting observables, and cyclic vectors.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numkernel::{
    cluster_sorted, hermitian_eig, numerical_rank, ComplexMatrix, ToleranceConfig, C64, ZERO,
};
use crate::opalgebra::OperatorAlgebra;

/// Polynomial with complex coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coefficients: Vec<C64>,
}

impl Polynomial {
    /// Trailing coefficients below `1e-12` of the largest are dropped; the zero
    /// polynomial keeps a single zero coefficient.
    pub fn new(mut coefficients: Vec<C64>) -> Self {
        let largest = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while coefficients.len() > 1
            && coefficients
                .last()
                .is_some_and(|c| c.norm() <= 1e-12 * largest)
        {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(ZERO);
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coefficients
            .iter()
            .rev()
            .fold(ZERO, |acc, &c| acc * x + c)
    }

    /// `p(A)` by Horner's scheme.
    pub fn eval_matrix(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let n = a.dim();
        let mut acc = ComplexMatrix::zeros(n);
        for &c in self.coefficients.iter().rev() {
            acc = &(&acc * a) + &ComplexMatrix::identity(n).scale(c);
        }
        acc
    }
}

/// Minimum gap between consecutive eigenvalues (infinite for n = 1) and
/// whether eigenvalue clustering leaves every eigenvalue on its own.
pub fn has_simple_spectrum(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<(bool, f64)> {
    let eig = hermitian_eig(a)?;
    Ok(simple_from_values(&eig.values, tol))
}

fn simple_from_values(values: &[f64], tol: &ToleranceConfig) -> (bool, f64) {
    let gap = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    // same floored scale as eigenvalue clustering, so a scalar matrix whose
    // diameter is pure round-off is not mistaken for a simple one
    let simple = cluster_sorted(values, tol.cluster_tol).len() == values.len();
    (simple, gap)
}

#[derive(Clone, Debug)]
pub struct Interpolation {
    pub polynomial: Polynomial,
    /// `Π_{a<b} (α_b − α_a)` over the eigenvalues of `A`, a conditioning diagnostic.
    pub vandermonde_det: f64,
    pub eigenvalues: Vec<f64>,
    /// `β_a`, the values of `B` on the eigenvectors of `A`.
    pub values: Vec<f64>,
}

/// Finds `p` of degree below n with `p(A) = B`, for Hermitian `B` commuting
/// with a simple-spectrum Hermitian `A`.
///
/// `B` is rotated into the eigenbasis of `A` and must come out diagonal; the
/// diagonal is then interpolated through the nodes `(α_a, β_a)` in Newton's
/// divided-difference form and expanded to monomial coefficients.
pub fn interpolate_commuting(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<Interpolation> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let eig = hermitian_eig(a)?;
    let dev = b.hermitian_deviation();
    if dev > crate::numkernel::HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let scale = a.frobenius_norm() * b.frobenius_norm();
    let comm = if scale > 0.0 {
        a.commutator(b).frobenius_norm() / scale
    } else {
        0.0
    };
    if comm > 1e-10 {
        return Err(Error::NotCommuting(comm));
    }
    let (simple, gap) = simple_from_values(&eig.values, tol);
    if !simple {
        return Err(Error::DegenerateSpectrum(gap));
    }
    let rotated = eig.vectors.adjoint() * b.matrix() * &eig.vectors;
    let n = a.dim();
    let mut off: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off += rotated[(i, j)].norm_sqr();
            }
        }
    }
    let off = off.sqrt();
    if off > 1e-8 * b.frobenius_norm() {
        return Err(Error::NotJointlyDiagonal(off));
    }
    let nodes = eig.values.clone();
    let values: Vec<f64> = (0..n).map(|i| rotated[(i, i)].re).collect();
    let coefficients = newton_to_monomial(&nodes, &divided_differences(&nodes, &values));
    let mut vandermonde_det = 1.0;
    for i in 0..n {
        for j in (i + 1)..n {
            vandermonde_det *= nodes[j] - nodes[i];
        }
    }
    Ok(Interpolation {
        polynomial: Polynomial::new(coefficients.into_iter().map(|c| C64::new(c, 0.0)).collect()),
        vandermonde_det,
        eigenvalues: nodes,
        values,
    })
}

/// Newton coefficients `f[x₀], f[x₀,x₁], …`.
fn divided_differences(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut table = y.to_vec();
    let n = x.len();
    for level in 1..n {
        for i in (level..n).rev() {
            table[i] = (table[i] - table[i - 1]) / (x[i] - x[i - level]);
        }
    }
    table
}

fn newton_to_monomial(x: &[f64], newton: &[f64]) -> Vec<f64> {
    let n = newton.len();
    if n == 0 {
        return vec![0.0];
    }
    let mut coeffs = vec![newton[n - 1]];
    for k in (0..n - 1).rev() {
        // coeffs ← coeffs·(t − x_k) + newton[k]
        let mut next = vec![0.0; coeffs.len() + 1];
        for (d, &c) in coeffs.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= c * x[k];
        }
        next[0] += newton[k];
        coeffs = next;
    }
    coeffs
}

/// `g = Σ φ_i / ‖Σ φ_i‖` over the unit eigenvectors of a simple-spectrum `A`.
pub fn cyclic_vector_for(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<DVector<C64>> {
    let eig = hermitian_eig(a)?;
    let (simple, gap) = simple_from_values(&eig.values, tol);
    if !simple {
        return Err(Error::DegenerateSpectrum(gap));
    }
    let n = a.dim();
    let sum: DVector<C64> = DVector::from_fn(n, |r, _| (0..n).map(|c| eig.vectors[(r, c)]).sum());
    let norm = crate::numkernel::vector_norm(&sum);
    Ok(sum / C64::new(norm, 0.0))
}

/// Whether `{B g : B ∈ A}` spans the whole space.
pub fn is_cyclic(
    g: &DVector<C64>,
    algebra: &OperatorAlgebra,
    tol: &ToleranceConfig,
) -> Result<bool> {
    let n = algebra.dim();
    if g.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.len(),
        });
    }
    if crate::numkernel::vector_norm(g) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let images: Vec<DVector<C64>> = algebra.basis().iter().map(|b| b.matrix() * g).collect();
    let m = DMatrix::from_fn(n, images.len(), |r, c| images[c][r]);
    Ok(numerical_rank(&m, tol) == n)
}
