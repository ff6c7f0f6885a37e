//! Splits the space of a small set of observables into coherent sectors
//! and decomposes a superposition across sectors into extremal pieces.

use nalgebra::DVector;
use sectorkit::opalgebra::generated_algebra;
use sectorkit::sectors::{are_disjoint, central_decomposition, extremal_decomposition, support};
use sectorkit::{ComplexMatrix, OperatorSet, ToleranceConfig, C64};

fn main() -> sectorkit::Result<()> {
    let tol = ToleranceConfig::default();
    let charge = ComplexMatrix::diag(&[0.0, 0.0, 1.0, 1.0, 2.0]);
    // mix and swap fill out the charge-0 pair, leaves the charge-1 pair as a two-fold copy space
    let mix = ComplexMatrix::from_real_rows(&[
        &[1.0, 0.5, 0.0, 0.0, 0.0],
        &[0.5, -1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0, 0.0],
    ]);
    let swap = ComplexMatrix::from_real_rows(&[
        &[0.0, 1.0, 0.0, 0.0, 0.0],
        &[1.0, 0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0, 0.0],
    ]);
    let observables =
        generated_algebra(&OperatorSet::from_matrices(vec![charge, mix, swap])?, &tol)?;
    let dec = central_decomposition(&observables, &tol)?;
    for (i, s) in dec.sectors().iter().enumerate() {
        println!(
            "sector {i}: dim {} (d = {}, ñ = {}), central value {:.3}",
            s.block_dim, s.d, s.ntilde, s.central_value
        );
    }
    println!("projector residual {:.1e}", dec.projector_residual());

    let s = 1.0 / 3f64.sqrt();
    let phi = DVector::from_vec(vec![
        C64::new(s, 0.0),
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, s),
    ]);
    println!("support of φ: {:?}", support(&phi, &dec)?);
    for term in extremal_decomposition(&phi, &dec)? {
        println!("  sector {} weight {:.4}", term.sector, term.weight);
    }

    let e0 = DVector::from_fn(5, |i, _| {
        if i == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let e4 = DVector::from_fn(5, |i, _| {
        if i == 4 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    println!(
        "e0 and e4 disjoint: {}",
        are_disjoint(&e0, &e4, &observables, &dec, &tol)?
    );
    Ok(())
}
