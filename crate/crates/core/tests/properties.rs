//! Property tests for the structural invariants of every module.

mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use sectorkit::bargmann::*;
use sectorkit::cocycles::*;
use sectorkit::diracsets::has_simple_spectrum;
use sectorkit::fluxsectors::*;
use sectorkit::numkernel::{
    gram_schmidt_hs, hermitian_eig, numerical_rank, orthonormal_nullspace, random_hermitian,
    random_unitary, random_vector,
};
use sectorkit::opalgebra::{commutant, generated_algebra};
use sectorkit::parastat::{character_oracle, invariant_algebra, permutation_unitaries};
use sectorkit::sectors::{
    central_decomposition, expectation_functional, extremal_decomposition, truncate, DensityState,
};
use sectorkit::{ComplexMatrix, OperatorSet, ToleranceConfig, C64};

use common::{planted_algebra, rng, with_spectrum};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn set(mats: Vec<ComplexMatrix>) -> OperatorSet {
    OperatorSet::from_matrices(mats).unwrap()
}

/// Random Hermitian elements of a planted algebra, so commutants are non-trivial.
fn planted_elements(seed: u64, count: usize) -> Vec<ComplexMatrix> {
    let p = planted_algebra(seed, 8);
    let mut r = rng(seed ^ 0xabcd);
    let o = generated_algebra(&set(p.generators.clone()), &tol()).unwrap();
    (0..count)
        .map(|_| o.random_hermitian_element(&mut r))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigen_reconstruction(seed in any::<u64>(), n in 1usize..=12) {
        let a = random_hermitian(n, &mut rng(seed));
        let e = hermitian_eig(&a).unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            e.values.iter().map(|&x| C64::new(x, 0.0)),
        ));
        let back = &e.vectors * d * e.vectors.adjoint();
        prop_assert!((back - a.matrix()).norm() <= 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn rank_nullity(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..8, rank in 0usize..8) {
        let mut r = rng(seed);
        let k = rank.min(rows).min(cols);
        let left = DMatrix::from_fn(rows, k.max(1), |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
        let right = DMatrix::from_fn(k.max(1), cols, |_, _| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
        let m = if k == 0 { DMatrix::zeros(rows, cols) } else { left * right };
        let null = orthonormal_nullspace(&m, &tol()).ncols();
        let rk = numerical_rank(&m, &tol());
        prop_assert_eq!(null + rk, cols);
        prop_assert_eq!(rk, k);
    }

    #[test]
    fn gram_schmidt_dimension_is_rank(seed in any::<u64>(), n in 1usize..5, count in 1usize..10, span in 1usize..6) {
        let mut r = rng(seed);
        let base: Vec<ComplexMatrix> = (0..span).map(|_| random_hermitian(n, &mut r)).collect();
        let mats: Vec<ComplexMatrix> = (0..count)
            .map(|_| {
                base.iter().fold(ComplexMatrix::zeros(n), |acc, b| &acc + &b.scale_real(r.random_range(-1.0..1.0)))
            })
            .collect();
        let stacked = DMatrix::from_fn(n * n, count, |row, c| mats[c].matrix().as_slice()[row]);
        prop_assert_eq!(gram_schmidt_hs(&mats, &tol()).len(), numerical_rank(&stacked, &tol()));
    }

    #[test]
    fn inclusion_reversal(seed in any::<u64>()) {
        let s = planted_elements(seed, 1);
        let mut t = s.clone();
        t.extend(planted_elements(seed, 2).into_iter().skip(1));
        let cs = commutant(&set(s), &tol()).unwrap();
        let ct = commutant(&set(t), &tol()).unwrap();
        prop_assert!(ct.is_subalgebra_of(&cs));
    }

    #[test]
    fn generators_lie_in_generated_algebra(seed in any::<u64>()) {
        let s = planted_elements(seed, 2);
        let o = generated_algebra(&set(s.clone()), &tol()).unwrap();
        prop_assert!(s.iter().all(|m| o.contains(m)));
    }

    #[test]
    fn triple_commutant(seed in any::<u64>()) {
        let s = set(planted_elements(seed, 1));
        let prime = commutant(&s, &tol()).unwrap();
        let o = generated_algebra(&s, &tol()).unwrap();
        prop_assert!(commutant(&o.as_operator_set(), &tol()).unwrap().span_equals(&prime));
    }

    #[test]
    fn generated_algebra_is_idempotent(seed in any::<u64>()) {
        let o = generated_algebra(&set(planted_elements(seed, 2)), &tol()).unwrap();
        prop_assert!(generated_algebra(&o.as_operator_set(), &tol()).unwrap().span_equals(&o));
    }

    #[test]
    fn planted_dimension_accounting(seed in any::<u64>()) {
        let p = planted_algebra(seed, 12);
        let o = generated_algebra(&set(p.generators.clone()), &tol()).unwrap();
        let prime = commutant(&o.as_operator_set(), &tol()).unwrap();
        let dec = central_decomposition(&o, &tol()).unwrap();
        let s = dec.structure();
        prop_assert_eq!(s.iter().map(|&(d, m)| d * m).sum::<usize>(), p.n);
        prop_assert_eq!(s.iter().map(|&(_, m)| m * m).sum::<usize>(), o.dimension());
        prop_assert_eq!(s.iter().map(|&(d, _)| d * d).sum::<usize>(), prime.dimension());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sector_projectors_and_invariance(seed in any::<u64>()) {
        let p = planted_algebra(seed, 12);
        let o = generated_algebra(&set(p.generators.clone()), &tol()).unwrap();
        let dec = central_decomposition(&o, &tol()).unwrap();
        prop_assert!(dec.projector_residual() <= 1e-10);
        for s in dec.sectors() {
            for b in o.basis() {
                prop_assert!(b.commutator(&s.projector).frobenius_norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn extremal_decomposition_of_a_sector_vector(seed in any::<u64>()) {
        let p = planted_algebra(seed, 12);
        let o = generated_algebra(&set(p.generators.clone()), &tol()).unwrap();
        let dec = central_decomposition(&o, &tol()).unwrap();
        let phi = random_vector(p.n, &mut rng(seed));
        for (j, s) in dec.sectors().iter().enumerate() {
            let terms = extremal_decomposition(&(s.projector.matrix() * &phi), &dec).unwrap();
            prop_assert_eq!(terms.len(), 1);
            prop_assert_eq!(terms[0].sector, j);
        }
    }

    #[test]
    fn cross_sector_superposition_is_a_mixture(seed in any::<u64>()) {
        let p = planted_algebra(seed, 12);
        let o = generated_algebra(&set(p.generators.clone()), &tol()).unwrap();
        let dec = central_decomposition(&o, &tol()).unwrap();
        let phi = random_vector(p.n, &mut rng(seed));
        let terms = extremal_decomposition(&phi, &dec).unwrap();
        let total = expectation_functional(&DensityState::pure(&phi).unwrap(), &o).unwrap();
        let mut mixed = vec![C64::new(0.0, 0.0); total.len()];
        for t in &terms {
            let part = expectation_functional(&DensityState::pure(&t.state).unwrap(), &o).unwrap();
            for (m, x) in mixed.iter_mut().zip(part) {
                *m += x * t.weight;
            }
        }
        for (a, b) in total.iter().zip(&mixed) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn extremal_weights_do_not_depend_on_seed(seed in any::<u64>()) {
        let p = planted_algebra(seed, 12);
        let phi = random_vector(p.n, &mut rng(seed));
        let weights = |s: u64| -> Vec<f64> {
            let t = tol().with_seed(s);
            let o = generated_algebra(&set(p.generators.clone()), &t).unwrap();
            let dec = central_decomposition(&o, &t).unwrap();
            let mut w: Vec<f64> = extremal_decomposition(&phi, &dec).unwrap().iter().map(|t| t.weight).collect();
            w.sort_by(f64::total_cmp);
            w
        };
        let reference = weights(0);
        for s in 1..10 {
            let w = weights(s);
            prop_assert_eq!(w.len(), reference.len());
            for (a, b) in w.iter().zip(&reference) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn truncation_keeps_one_copy(seed in any::<u64>()) {
        let p = planted_algebra(seed, 12);
        let o = generated_algebra(&set(p.generators.clone()), &tol()).unwrap();
        let dec = central_decomposition(&o, &tol()).unwrap();
        let tr = truncate(&o, &dec, &tol()).unwrap();
        for s in dec.sectors() {
            let c = tr.isometry.adjoint() * s.projector.matrix() * &tr.isometry;
            prop_assert_eq!(numerical_rank(&c, &tol()), s.ntilde);
        }
        prop_assert!(tr.dirac.v2_holds);
    }

    #[test]
    fn single_operator_algebra_counts_distinct_eigenvalues(seed in any::<u64>(), n in 2usize..8, repeats in 0usize..3) {
        let mut r = rng(seed);
        let mut values: Vec<f64> = (0..n).map(|k| k as f64 + r.random_range(0.0..0.5)).collect();
        for i in 0..repeats.min(n - 1) {
            values[i + 1] = values[i];
        }
        let mut distinct = values.clone();
        distinct.dedup();
        let a = with_spectrum(&values, &random_unitary(n, &mut r));
        let o = generated_algebra(&set(vec![a.clone()]), &tol()).unwrap();
        prop_assert_eq!(o.dimension(), distinct.len());
        let simple = has_simple_spectrum(&a, &tol()).unwrap().0;
        prop_assert_eq!(simple, distinct.len() == n);
        if simple {
            prop_assert!(commutant(&o.as_operator_set(), &tol()).unwrap().span_equals(&o));
        }
    }

    #[test]
    fn obstruction_is_coboundary_invariant(seed in any::<u64>(), which in 0usize..5) {
        let g = &FiniteGroup::builtins()[which];
        let mut r = rng(seed);
        let xi = MultiplierTable::random(g.clone(), &mut r);
        let mut gamma: Vec<f64> = (0..g.order()).map(|_| r.random_range(-3.0..3.0)).collect();
        gamma[g.identity_index()] = 0.0;
        let shifted = xi.add(&MultiplierTable::coboundary(g.clone(), &gamma).unwrap()).unwrap();
        let pairs: Vec<(usize, usize)> = (0..g.order())
            .flat_map(|a| (0..g.order()).map(move |b| (a, b)))
            .filter(|&(a, b)| g.mul(a, b) == g.mul(b, a))
            .collect();
        let before = antisym_obstruction(g, |a, b| xi.get(*a, *b), &pairs, 0.0).unwrap();
        let after = antisym_obstruction(g, |a, b| shifted.get(*a, *b), &pairs, 0.0).unwrap();
        prop_assert!((before - after).abs() <= 1e-12);
    }

    #[test]
    fn rephasing_by_the_solved_coboundary_restores_one_law(seed in any::<u64>(), which in 0usize..5) {
        // regular representation with ξ′ = 0 next to e^{iγ}U carrying ξ″ = δγ
        let g = &FiniteGroup::builtins()[which];
        let k = g.order();
        let mut r = rng(seed);
        let regular: Vec<ComplexMatrix> = (0..k)
            .map(|a| ComplexMatrix::from_fn(k, |i, j| if g.mul(a, j) == i { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }))
            .collect();
        let mut gamma: Vec<f64> = (0..k).map(|_| r.random_range(-3.0..3.0)).collect();
        gamma[g.identity_index()] = 0.0;
        let xi1 = MultiplierTable::zero(g.clone());
        let xi2 = MultiplierTable::coboundary(g.clone(), &gamma).unwrap();
        let second = rephase(&regular, &gamma);
        prop_assert!(ray_residual(&second, &xi2).unwrap() <= RAY_TOL);

        let solved = coboundary_solve(&xi1, &xi2).unwrap();
        let found = solved.gamma.expect("real-valued cocycles on a finite group are coboundaries");
        let undo: Vec<f64> = found.iter().map(|x| -x).collect();
        let restored = direct_sum(&regular, &rephase(&second, &undo)).unwrap();
        prop_assert!(ray_residual(&restored, &xi1).unwrap() <= RAY_TOL);

        // without the correction the sum obeys ξ′ only if δγ vanishes mod 2π
        let raw = direct_sum(&regular, &second).unwrap();
        let wrapped = xi2
            .values()
            .iter()
            .flatten()
            .map(|x| (x - (x / (2.0 * PI)).round() * 2.0 * PI).abs())
            .fold(0.0, f64::max);
        if wrapped > 1e-6 {
            prop_assert!(ray_residual(&raw, &xi1).unwrap() > RAY_TOL);
        }
    }
}

fn galilei_pair(seed: u64) -> (GalileiElement, GalileiElement, GalileiElement) {
    let mut r = rng(seed);
    (
        GalileiElement::random(&mut r),
        GalileiElement::random(&mut r),
        GalileiElement::random(&mut r),
    )
}

fn scaled_close(a: &GalileiElement, b: &GalileiElement) -> bool {
    Galilei.approx_eq(a, b, 1e-12 * (1.0 + a.a.norm() + a.v.norm() + a.b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn galilei_group_axioms(seed in any::<u64>()) {
        let (g1, g2, g3) = galilei_pair(seed);
        let e = GalileiElement::identity();
        let left = galilei_multiply(&galilei_multiply(&g1, &g2), &g3);
        let right = galilei_multiply(&g1, &galilei_multiply(&g2, &g3));
        prop_assert!(scaled_close(&left, &right));
        prop_assert!(scaled_close(&galilei_multiply(&g1, &e), &g1));
        prop_assert!(scaled_close(&galilei_multiply(&e, &g1), &g1));
        prop_assert!(scaled_close(&galilei_multiply(&g1, &galilei_inverse(&g1)), &e));
    }

    #[test]
    fn bargmann_normalization_and_subgroups(seed in any::<u64>(), mass in 0.1f64..5.0) {
        let (g1, g2, _) = galilei_pair(seed);
        let e = GalileiElement::identity();
        prop_assert_eq!(bargmann_exponent(mass, &e, &g1), 0.0);
        prop_assert_eq!(bargmann_exponent(mass, &g1, &e), 0.0);
        let t1 = GalileiElement::translation(g1.a);
        let t2 = GalileiElement::translation(g2.a);
        prop_assert_eq!(bargmann_exponent(mass, &t1, &t2), 0.0);
        let r1 = GalileiElement::rotation(g1.v + Vector3::x(), 0.7).unwrap();
        let r2 = GalileiElement::rotation(g2.v + Vector3::y(), -1.1).unwrap();
        prop_assert_eq!(bargmann_exponent(mass, &r1, &r2), 0.0);
    }

    #[test]
    fn obstruction_is_linear_in_mass(seed in any::<u64>(), m in 0.1f64..5.0, s in 0.5f64..4.0) {
        let mut r = rng(seed);
        let v = Vector3::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let a = Vector3::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let pairs = [(GalileiElement::boost(v), GalileiElement::translation(a))];
        let at = |mass: f64| antisym_obstruction(&Galilei, |x, y| bargmann_exponent(mass, x, y), &pairs, 1e-9).unwrap();
        prop_assert!((at(s * m) - s * at(m)).abs() <= 1e-12 * (1.0 + at(s * m)));
    }

    #[test]
    fn extended_action_reduces_to_configuration_action(seed in any::<u64>()) {
        let (g, _, _) = galilei_pair(seed);
        let mut r = rng(seed ^ 7);
        let x: Vec<Vector3<f64>> = (0..3)
            .map(|_| Vector3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect();
        let point = Configuration { x: x.clone(), lambda: vec![0.0; 3], t: r.random_range(-1.0..1.0) };
        let moved = extended_action(&Extended::new(0.0, g.clone()), &point, &[1.0, 2.0, 3.0]).unwrap();
        for (xi, yi) in x.iter().zip(&moved.x) {
            let (expect, t) = g.act(xi, point.t);
            prop_assert!((expect - yi).norm() <= 1e-12 * (1.0 + expect.norm()));
            prop_assert!((t - moved.t).abs() <= 1e-12 * (1.0 + t.abs()));
        }
    }
}

fn rotation_90(axis: usize) -> Matrix3<f64> {
    let u = [Vector3::x_axis(), Vector3::y_axis(), Vector3::z_axis()][axis];
    *nalgebra::Rotation3::from_axis_angle(&u, PI / 2.0).matrix()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn parseval_monotone_and_bounded(px in -2.0f64..2.0, py in -2.0f64..2.0, pz in -2.0f64..2.0) {
        let q = SphereQuadrature::new(64, 128).unwrap();
        let k = ChargeKinematics::new(1.0, 1.0, Vector3::new(px, py, pz)).unwrap();
        let full = kinematic_moments(FluxFormula::Retarded, &k, &q, 16).unwrap();
        let bound = q.integrate(|n| FluxFormula::Retarded.eval(&k, &n.direction).unwrap().powi(2));
        let mut last = 0.0;
        for l in 0..=16 {
            let p = truncate_multipoles(&full, l).unwrap().power();
            prop_assert!(p >= last);
            last = p;
        }
        prop_assert!(last <= bound + 1e-6);
    }

    #[test]
    fn low_multipoles_rotate_with_the_momentum(px in -1.0f64..1.0, py in -1.0f64..1.0, pz in -1.0f64..1.0, axis in 0usize..3) {
        let q = SphereQuadrature::new(64, 128).unwrap();
        let r = rotation_90(axis);
        let p = Vector3::new(px, py, pz);
        for formula in [FluxFormula::Instantaneous, FluxFormula::Retarded] {
            let k = ChargeKinematics::new(1.0, 1.0, p).unwrap();
            let kr = ChargeKinematics::new(1.0, 1.0, r * p).unwrap();
            let moved = rotate_low_multipoles(&kinematic_moments(formula, &k, &q, 2).unwrap(), &r).unwrap();
            let direct = kinematic_moments(formula, &kr, &q, 2).unwrap();
            for (a, b) in moved.coefficients().iter().zip(direct.coefficients()) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn tensor_power_dimensions_and_isotypic_projectors(case in 0usize..5) {
        let (n, d) = [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)][case];
        let rep = permutation_unitaries(n, d).unwrap();
        let oracle = character_oracle(&rep).unwrap();
        prop_assert_eq!(oracle.iter().map(|c| c.irrep_dim * c.multiplicity).sum::<usize>(), d.pow(n as u32));
        if d.pow(n as u32) <= 16 {
            let inv = invariant_algebra(&rep, &tol()).unwrap();
            for c in &oracle {
                for b in inv.algebra.basis() {
                    prop_assert!(b.commutator(&c.projector).frobenius_norm() <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn entangled_vector_in_a_multiplicity_sector_is_mixed() {
    // (3,2): the standard irrep has d = 2 copies, separated by the eigenspaces
    // of a generic commutant element; observables cannot couple the copies
    let rep = permutation_unitaries(3, 2).unwrap();
    let inv = invariant_algebra(&rep, &tol()).unwrap();
    let dec = central_decomposition(&inv.algebra, &tol()).unwrap();
    let s = dec.sectors().iter().find(|s| s.d == 2).unwrap();
    let v = s.isometry();
    let c = inv
        .commutant
        .random_hermitian_element(&mut rng(3))
        .compress(v);
    let eig = hermitian_eig(&c).unwrap();
    let copies = eig.clusters(tol().cluster_tol);
    assert_eq!(copies.len(), 2);
    let w1 = v * eig.vectors.column(copies[0].start);
    let w2 = v * eig.vectors.column(copies[1].start);
    let (a, b) = (0.8, 0.6);
    let phi = &w1 * Complex64::new(a, 0.0) + &w2 * Complex64::new(b, 0.0);
    let f = |x: &nalgebra::DVector<C64>| {
        expectation_functional(&DensityState::pure(x).unwrap(), &inv.algebra).unwrap()
    };
    let (total, f1, f2) = (f(&phi), f(&w1), f(&w2));
    let mut distinct: f64 = 0.0;
    for ((t, x), y) in total.iter().zip(&f1).zip(&f2) {
        assert!((t - (x * a * a + y * b * b)).norm() <= 1e-12);
        distinct = distinct.max((x - y).norm());
    }
    // the two components are different states, so the mixture is strict
    assert!(distinct > 1e-3);
}
