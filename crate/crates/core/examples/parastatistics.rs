//! Permutation-invariant observables on `(C^d)^⊗n`: the commutant is
//! non-abelian for n ≥ 3, and keeping one copy per isotypic block fixes it.

use sectorkit::parastat::{parastat_truncation, permutation_unitaries};
use sectorkit::ToleranceConfig;

fn main() -> sectorkit::Result<()> {
    let tol = ToleranceConfig::default();
    for (n, d) in [(2, 2), (3, 2), (3, 3)] {
        let rep = permutation_unitaries(n, d)?;
        let r = parastat_truncation(&rep, &tol)?;
        println!("n = {n}, d = {d}: dim H = {}", rep.dim());
        for c in &r.oracle {
            println!(
                "  irrep {:?}: dim {}, multiplicity {}",
                c.partition, c.irrep_dim, c.multiplicity
            );
        }
        println!(
            "  invariant algebra dim {}, commutant dim {} (abelian: {})",
            r.algebra_dim, r.commutant_dim, r.commutant_abelian_before
        );
        println!(
            "  truncated dim {}, commutant dim {} (abelian: {}), oracle agrees: {}",
            r.truncated_dim,
            r.truncated_commutant_dim,
            r.truncated_commutant_abelian,
            r.oracle_agrees
        );
    }
    Ok(())
}
