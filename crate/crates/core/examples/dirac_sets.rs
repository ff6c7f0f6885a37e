//! A single Hermitian operator with simple spectrum: every commuting
//! observable is a polynomial in it, and it has a cyclic vector.

use sectorkit::diracsets::{
    cyclic_vector_for, has_simple_spectrum, interpolate_commuting, is_cyclic,
};
use sectorkit::opalgebra::{check_dirac, generated_algebra};
use sectorkit::{ComplexMatrix, OperatorSet, ToleranceConfig};

fn main() -> sectorkit::Result<()> {
    let tol = ToleranceConfig::default();
    let a = ComplexMatrix::diag(&[-1.0, 0.0, 0.5, 2.0]);
    let b = ComplexMatrix::diag(&[3.0, 1.0, -2.0, 0.25]);

    let (simple, gap) = has_simple_spectrum(&a, &tol)?;
    println!("simple spectrum: {simple} (relative gap {gap:.3})");

    let interp = interpolate_commuting(&a, &b, &tol)?;
    let err = (&interp.polynomial.eval_matrix(&a) - &b).frobenius_norm();
    println!(
        "p has degree {}, ‖p(A) − B‖ = {err:.1e}",
        interp.polynomial.degree()
    );
    println!("Vandermonde determinant {:.4}", interp.vandermonde_det);

    let set = OperatorSet::from_matrices(vec![a.clone()])?;
    let algebra = generated_algebra(&set, &tol)?;
    let g = cyclic_vector_for(&a, &tol)?;
    println!(
        "cyclic vector found, verified: {}",
        is_cyclic(&g, &algebra, &tol)?
    );

    let dirac = check_dirac(&algebra, &tol)?;
    println!(
        "commutant abelian: {}, dim {}",
        dirac.v2_holds, dirac.commutant_dim
    );

    let degenerate = ComplexMatrix::diag(&[1.0, 1.0, 2.0]);
    match cyclic_vector_for(&degenerate, &tol) {
        Ok(_) => println!("unexpected cyclic vector"),
        Err(e) => println!("degenerate operator: {e}"),
    }
    Ok(())
}
