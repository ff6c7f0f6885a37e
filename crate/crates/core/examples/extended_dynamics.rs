//! Classical dynamics on the extended phase space: the free λ law and the
//! symmetry of a two-body harmonic system under an extended Galilei element.

use nalgebra::Vector3;
use rand::SeedableRng;
use sectorkit::bargmann::*;
use sectorkit::cocycles::Extended;

fn main() -> sectorkit::Result<()> {
    let p = Vector3::new(0.3, -0.4, 1.2);
    let free = ExtendedPhasePoint::new(vec![Vector3::zeros()], vec![p], vec![0.7], vec![1.0], 0.0)?;
    let traj = extended_dynamics(&free, &Potential::Free, 1e-3, 1000)?;
    let last = traj.states.last().unwrap();
    println!(
        "free λ at t = {:.3}: {:.6} (closed form {:.6})",
        last.t,
        last.lambda[0],
        free_lambda(1.0, &p, 0.7, last.t)
    );

    let point = ExtendedPhasePoint::new(
        vec![Vector3::zeros(), Vector3::new(1.3, 0.2, -0.1)],
        vec![Vector3::new(0.1, 0.3, 0.0), Vector3::new(-0.2, 0.0, 0.4)],
        vec![1.0, 2.0],
        vec![0.5, -0.25],
        0.0,
    )?;
    let pot = Potential::HarmonicPair { k: 1.5, l: 1.0 };
    let traj = extended_dynamics(&point, &pot, 1e-3, 2000)?;
    println!("harmonic pair energy drift {:.1e}", traj.energy_drift);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
    let e = Extended::new(0.4, GalileiElement::random(&mut rng));
    for dt in [2e-3, 1e-3, 5e-4] {
        let steps = (1.0 / dt) as usize;
        let r = dynamics_symmetry_check(&point, &pot, &e, dt, steps)?;
        println!(
            "dt = {dt:.0e}: transform-then-evolve vs evolve-then-transform {:.2e}",
            r.max_deviation
        );
    }
    Ok(())
}
