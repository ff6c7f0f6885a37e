//! Multipole moments of the asymptotic electric flux: the monopole records
//! the charge, the higher moments record the momentum.

use nalgebra::Vector3;
use sectorkit::fluxsectors::*;

fn main() -> sectorkit::Result<()> {
    let q = SphereQuadrature::new(48, 96)?;
    println!(
        "quadrature orthonormality residual (l ≤ 8): {:.1e}",
        orthonormality_residual(&q, 8)
    );

    for formula in [FluxFormula::Instantaneous, FluxFormula::Retarded] {
        let k = ChargeKinematics::new(1.0, 1.0, Vector3::new(0.0, 0.0, 1.5))?;
        let fm = kinematic_moments(formula, &k, &q, 6)?;
        println!("{formula:?}: total charge {:.10}", total_charge(&fm));
        for (l, m, c) in fm.nonzero(1e-8) {
            println!("  f[{l},{m}] = {c:+.6}");
        }
    }

    let rest = ChargeKinematics::at_rest(1.0, 1.0)?;
    let moving = ChargeKinematics::new(1.0, 1.0, Vector3::new(0.6, 0.0, 0.8))?;
    let sig = sector_signature(&rest, &moving, 6, &q, FluxFormula::Retarded)?;
    println!(
        "rest vs moving: monopole difference {:.1e}, higher-moment difference {:.4}, charge consistent {}",
        sig.monopole_difference,
        sig.higher_difference,
        sig.charge_consistent()
    );
    Ok(())
}
