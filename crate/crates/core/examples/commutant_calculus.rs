//! Commutant, double commutant and the triple-commutant identity for a
//! small block algebra `M_2 ⊕ (M_1 ⊗ 1_2)`.

use rand::SeedableRng;
use sectorkit::numkernel::random_unitary;
use sectorkit::opalgebra::{commutant, generated_algebra};
use sectorkit::{ComplexMatrix, OperatorSet, ToleranceConfig};

fn main() -> sectorkit::Result<()> {
    let tol = ToleranceConfig::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);

    // one 2x2 block acting once, plus a scalar acting on a 2-dim copy space
    let a = ComplexMatrix::from_real_rows(&[
        &[1.0, 0.5, 0.0, 0.0],
        &[0.5, -1.0, 0.0, 0.0],
        &[0.0, 0.0, 3.0, 0.0],
        &[0.0, 0.0, 0.0, 3.0],
    ]);
    let b = ComplexMatrix::diag(&[1.0, 2.0, 0.0, 0.0]);
    let u = random_unitary(4, &mut rng);
    let conj = |m: &ComplexMatrix| (&(&u * m) * &u.adjoint()).hermitian_part();
    let set = OperatorSet::from_matrices(vec![conj(&a), conj(&b)])?;

    let prime = commutant(&set, &tol)?;
    let double = generated_algebra(&set, &tol)?;
    let triple = commutant(&double.as_operator_set(), &tol)?;

    println!("dim S' = {}", prime.dimension());
    println!("dim S'' = {}", double.dimension());
    println!("S''' = S': {}", triple.span_equals(&prime));
    println!(
        "generators in S'': {}",
        set.matrices().iter().all(|m| double.contains(m))
    );
    println!("S' closure residuals: {:?}", prime.closure_residuals());
    Ok(())
}
