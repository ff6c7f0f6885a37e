//! Fixtures shared by the integration suites.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sectorkit::numkernel::{random_hermitian, random_unitary};
use sectorkit::{ComplexMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `⊕_i M_{ñ_i} ⊗ 1_{d_i}` conjugated by a random unitary.
#[derive(Clone, Debug)]
pub struct PlantedAlgebra {
    pub n: usize,
    /// `(d_i, ñ_i)` per block.
    pub blocks: Vec<(usize, usize)>,
    pub u: ComplexMatrix,
    /// Two generic Hermitian elements; together they generate the algebra.
    pub generators: Vec<ComplexMatrix>,
}

impl PlantedAlgebra {
    pub fn structure_sorted(&self) -> Vec<(usize, usize)> {
        let mut s = self.blocks.clone();
        s.sort_unstable();
        s
    }

    pub fn block_dims_sorted(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(|&(d, m)| d * m).collect();
        s.sort_unstable();
        s
    }

    pub fn all_multiplicity_free(&self) -> bool {
        self.blocks.iter().all(|&(d, _)| d == 1)
    }
}

/// Random block pattern with total dimension at most `max_dim`.
pub fn planted_pattern(rng: &mut impl Rng, max_dim: usize) -> Vec<(usize, usize)> {
    loop {
        let count = rng.random_range(1..=4);
        let blocks: Vec<(usize, usize)> = (0..count)
            .map(|_| (rng.random_range(1..=3), rng.random_range(1..=4)))
            .collect();
        let n: usize = blocks.iter().map(|&(d, m)| d * m).sum();
        if n <= max_dim {
            return blocks;
        }
    }
}

/// Embeds per-block `ñ_i × ñ_i` matrices as `⊕ X_i ⊗ 1_{d_i}`.
pub fn embed(blocks: &[(usize, usize)], parts: &[DMatrix<C64>]) -> DMatrix<C64> {
    let n: usize = blocks.iter().map(|&(d, m)| d * m).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut offset = 0;
    for (&(d, m), x) in blocks.iter().zip(parts) {
        for a in 0..m {
            for b in 0..m {
                for k in 0..d {
                    out[(offset + a * d + k, offset + b * d + k)] = x[(a, b)];
                }
            }
        }
        offset += d * m;
    }
    out
}

pub fn planted_algebra(seed: u64, max_dim: usize) -> PlantedAlgebra {
    let mut r = rng(seed);
    let blocks = planted_pattern(&mut r, max_dim);
    let n: usize = blocks.iter().map(|&(d, m)| d * m).sum();
    let u = random_unitary(n, &mut r);
    let generators = (0..2)
        .map(|_| {
            let parts: Vec<DMatrix<C64>> = blocks
                .iter()
                .map(|&(_, m)| random_hermitian(m, &mut r).into_inner())
                .collect();
            let h = embed(&blocks, &parts);
            ComplexMatrix::new(u.matrix() * h * u.matrix().adjoint())
                .unwrap()
                .hermitian_part()
        })
        .collect();
    PlantedAlgebra {
        n,
        blocks,
        u,
        generators,
    }
}

/// `V diag(values) V†` for a random unitary `V`.
pub fn with_spectrum(values: &[f64], v: &ComplexMatrix) -> ComplexMatrix {
    let d = ComplexMatrix::diag(values);
    (&(v * &d) * &v.adjoint()).hermitian_part()
}
