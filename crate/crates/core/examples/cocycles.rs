//! Multiplier tables on finite groups: coboundaries, the coboundary solver,
//! associativity of the central extension, and the Pauli ray representation.

use sectorkit::cocycles::*;

fn main() -> sectorkit::Result<()> {
    let s3 = FiniteGroup::s3();
    let gamma = [0.0, 0.3, -1.2, 0.7, 2.0, -0.4];
    let xi = MultiplierTable::coboundary(s3.clone(), &gamma)?;
    println!(
        "δγ on S3 is a cocycle: {:?}",
        check_cocycle(&xi, CocycleMode::Strict)
    );
    let sol = coboundary_solve(&MultiplierTable::zero(s3.clone()), &xi)?;
    println!(
        "recovered γ = {:?} (residual {:.1e})",
        sol.gamma, sol.max_residual
    );

    let e = |t: f64, g: usize| Extended::new(t, g);
    let d = associativity_defect(
        &s3,
        |a, b| xi.get(*a, *b),
        &e(0.1, 1),
        &e(0.2, 3),
        &e(-0.5, 4),
    );
    println!("extension associativity defect {d:.1e}");

    let pauli = MultiplierTable::pauli();
    println!(
        "Pauli multiplier, strict: {:?}",
        check_cocycle(&pauli, CocycleMode::Strict)
    );
    println!(
        "Pauli multiplier, mod 2π: {:?}",
        check_cocycle(&pauli, CocycleMode::Mod2Pi)
    );
    let rep = pauli_rep();
    println!(
        "ray residual of the Pauli matrices {:.1e}",
        ray_residual(&rep, &pauli)?
    );
    let lift = lift_check(&rep, &pauli, CocycleMode::Mod2Pi, &[0.0, 0.4, 1.3])?;
    println!("lift to the extension: {lift:?}");
    Ok(())
}
