//! The Galilei multiplier and why states of different total mass cannot be
//! superposed.

use num_complex::Complex64;
use sectorkit::bargmann::*;

fn main() -> sectorkit::Result<()> {
    println!(
        "cocycle defect over 500 samples: {:.1e}",
        bargmann_cocycle_check(1.0, 500, 0)?
    );

    let report = mass_superselection_report(2.0, 1.0, 200, 0)?;
    println!("canonical obstructions {:?}", report.canonical);
    println!("inequivalent: {}", report.inequivalent);
    println!("{}", report.consequence);

    let grid = Grid1D::new(-10.0, 0.05, 401)?;
    let psi = grid.sample(|x| Complex64::from_polar((-x * x).exp(), 0.3 * x));
    let (boost, shift) = canonical_pair();
    let ray = ray_compose_check(1.0, &grid, &boost, &shift, &psi)?;
    println!(
        "U(g1)U(g2) = e^(iξ) U(g1g2) with ξ = {:.4}, deviation {:.1e}",
        ray.xi, ray.deviation
    );
    Ok(())
}
