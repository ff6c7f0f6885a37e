//! Permutation symmetry on tensor powers `(C^d)^{⊗n}`.
//!
//! The observables are taken to be everything commuting with the permutation
//! unitaries. Their commutant is the image of the group algebra, which is
//! non-abelian as soon as an irreducible representation of dimension above
//! one occurs (n ≥ 3). Keeping a single copy of each isotypic block restores
//! an abelian commutant spanned by the block projectors.
//!
//! Character tables for S₂, S₃, S₄ are built in. Irreducible representations
//! are labelled by partitions of n in lexicographic order, e.g. for S₃:
//! `(1,1,1)` sign, `(2,1)` standard, `(3)` trivial.

use std::fmt;

use crate::error::{Error, Result};
use crate::numkernel::{ComplexMatrix, ToleranceConfig, ONE};
use crate::opalgebra::{commutant, is_abelian, OperatorAlgebra, OperatorSet};
use crate::sectors::{central_decomposition, truncate, SectorDecomposition, Truncation};

/// A bijection of `0..n`, acting as `j ↦ images[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidArgument(format!(
                    "{images:?} is not a permutation"
                )));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// The transposition of `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Self { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (j, &i) in self.images.iter().enumerate() {
            images[i] = j;
        }
        Self { images }
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    /// All permutations of `0..n` in lexicographic order of their images.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Self {
                images: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1))
                .rev()
                .find(|&i| current[i] < current[i + 1])
            else {
                break;
            };
            let j = (i + 1..n)
                .rev()
                .find(|&j| current[j] > current[i])
                .expect("successor exists");
            current.swap(i, j);
            current[i + 1..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

/// The permutation representation of S_n on `(C^d)^{⊗n}`.
#[derive(Clone, Debug)]
pub struct TensorRep {
    n_particles: usize,
    d_single: usize,
    elements: Vec<(Permutation, ComplexMatrix)>,
}

impl TensorRep {
    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn d_single(&self) -> usize {
        self.d_single
    }

    pub fn dim(&self) -> usize {
        self.d_single.pow(self.n_particles as u32)
    }

    pub fn elements(&self) -> &[(Permutation, ComplexMatrix)] {
        &self.elements
    }

    pub fn unitary(&self, g: &Permutation) -> Option<&ComplexMatrix> {
        self.elements.iter().find(|(p, _)| p == g).map(|(_, u)| u)
    }

    pub fn operator_set(&self) -> OperatorSet {
        let members = self
            .elements
            .iter()
            .map(|(p, u)| (format!("U{p}"), u.clone()))
            .collect();
        OperatorSet::new(self.dim(), members, false, &ToleranceConfig::default())
            .expect("representation matrices share one dimension")
    }
}

/// Unitaries moving the tensor factor in position `j` to position `g(j)`.
pub fn permutation_unitaries(n: usize, d: usize) -> Result<TensorRep> {
    if !(2..=4).contains(&n) || !(2..=3).contains(&d) || d.pow(n as u32) > 64 {
        return Err(Error::SizeLimit(format!(
            "n = {n}, d = {d} (need 2 ≤ n ≤ 4, 2 ≤ d ≤ 3, d^n ≤ 64)"
        )));
    }
    let dim = d.pow(n as u32);
    let digits = |mut idx: usize| {
        let mut out = vec![0; n];
        for k in (0..n).rev() {
            out[k] = idx % d;
            idx /= d;
        }
        out
    };
    let index = |digits: &[usize]| digits.iter().fold(0, |acc, &x| acc * d + x);
    let elements = Permutation::all(n)
        .into_iter()
        .map(|g| {
            let mut u = ComplexMatrix::zeros(dim).into_inner();
            for col in 0..dim {
                let input = digits(col);
                let mut output = vec![0; n];
                for (j, &i) in input.iter().enumerate() {
                    output[g.apply(j)] = i;
                }
                u[(index(&output), col)] = ONE;
            }
            (
                g,
                ComplexMatrix::new(u).expect("permutation matrix is square"),
            )
        })
        .collect();
    Ok(TensorRep {
        n_particles: n,
        d_single: d,
        elements,
    })
}

#[derive(Clone, Debug)]
pub struct InvariantAlgebra {
    /// `O = {U(g)}′`.
    pub algebra: OperatorAlgebra,
    /// `O′ = {U(g)}″`.
    pub commutant: OperatorAlgebra,
    pub commutant_abelian: bool,
    pub commutant_max_commutator: f64,
}

/// The permutation-invariant observables and whether their commutant is abelian.
pub fn invariant_algebra(rep: &TensorRep, tol: &ToleranceConfig) -> Result<InvariantAlgebra> {
    let algebra = commutant(&rep.operator_set(), tol)?;
    let prime = commutant(&algebra.as_operator_set(), tol)?;
    let (abelian, worst) = is_abelian(&prime, tol);
    Ok(InvariantAlgebra {
        algebra,
        commutant: prime,
        commutant_abelian: abelian,
        commutant_max_commutator: worst,
    })
}

/// Partitions of n in lexicographic order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    match n {
        2 => vec![vec![1, 1], vec![2]],
        3 => vec![vec![1, 1, 1], vec![2, 1], vec![3]],
        4 => vec![
            vec![1, 1, 1, 1],
            vec![2, 1, 1],
            vec![2, 2],
            vec![3, 1],
            vec![4],
        ],
        _ => Vec::new(),
    }
}

/// `χ_λ(g)` for the irrep `λ` at a permutation of the given cycle type.
/// Both arguments are partitions of n ∈ {2, 3, 4}.
pub fn character(irrep: &[usize], cycle_type: &[usize]) -> Option<i32> {
    let classes = partitions(irrep.iter().sum());
    let class = classes.iter().position(|c| c == cycle_type)?;
    // rows: irreps in lexicographic order; columns: classes in the same order
    let table: &[&[i32]] = match irrep.iter().sum::<usize>() {
        2 => &[&[1, -1], &[1, 1]],
        3 => &[&[1, -1, 1], &[2, 0, -1], &[1, 1, 1]],
        4 => &[
            &[1, -1, 1, 1, -1],
            &[3, -1, -1, 0, 1],
            &[2, 0, 2, -1, 0],
            &[3, 1, -1, 0, -1],
            &[1, 1, 1, 1, 1],
        ],
        _ => return None,
    };
    let row = classes.iter().position(|c| c == irrep)?;
    Some(table[row][class])
}

#[derive(Clone, Debug)]
pub struct IsotypicComponent {
    pub partition: Vec<usize>,
    pub irrep_dim: usize,
    /// Zero marks an irrep absent from this tensor power.
    pub multiplicity: usize,
    /// `Π = (d/|G|) Σ_g χ(g) U(g)`.
    pub projector: ComplexMatrix,
}

/// Isotypic projectors from the character table, with multiplicities `rank(Π)/d`.
pub fn character_oracle(rep: &TensorRep) -> Result<Vec<IsotypicComponent>> {
    let n = rep.n_particles();
    let order = rep.elements().len() as f64;
    let mut out = Vec::new();
    for partition in partitions(n) {
        let identity_class = vec![1; n];
        let irrep_dim =
            character(&partition, &identity_class).expect("partition in table") as usize;
        let mut proj = ComplexMatrix::zeros(rep.dim());
        for (g, u) in rep.elements() {
            let chi = character(&partition, &g.cycle_type()).expect("cycle type in table");
            proj = &proj + &u.scale_real(chi as f64);
        }
        let projector = proj.scale_real(irrep_dim as f64 / order);
        // the trace of a projector is its rank
        let rank = projector.trace().re;
        let ratio = rank / irrep_dim as f64;
        if (ratio - ratio.round()).abs() > 0.01 || projector.trace().im.abs() > 0.01 {
            return Err(Error::NonIntegerRank(format!(
                "partition {partition:?}: rank {rank}"
            )));
        }
        out.push(IsotypicComponent {
            partition,
            irrep_dim,
            multiplicity: ratio.round() as usize,
            projector,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ParastatReport {
    pub n_particles: usize,
    pub d_single: usize,
    pub oracle: Vec<IsotypicComponent>,
    pub decomposition: SectorDecomposition,
    /// Observable-algebra dimension before truncation.
    pub algebra_dim: usize,
    pub commutant_dim: usize,
    pub commutant_abelian_before: bool,
    pub truncation: Truncation,
    pub truncated_dim: usize,
    pub truncated_commutant_dim: usize,
    pub truncated_commutant_abelian: bool,
    /// Number of irreps with positive multiplicity.
    pub present_sectors: usize,
    /// `{(d_i, ñ_i)}` from the oracle and from the central decomposition agree.
    pub oracle_agrees: bool,
    /// `dim H̃ = Σ ñ_i` over present sectors.
    pub truncated_dim_matches: bool,
}

impl ParastatReport {
    /// All structural claims of the case study hold.
    pub fn holds(&self) -> bool {
        self.oracle_agrees
            && self.truncated_dim_matches
            && self.truncated_commutant_abelian
            && self.truncated_commutant_dim == self.present_sectors
            && self.truncation.dirac.v2_holds
    }
}

/// Decomposes the invariant algebra, truncates to one copy per sector and
/// checks the result against the character oracle.
pub fn parastat_truncation(rep: &TensorRep, tol: &ToleranceConfig) -> Result<ParastatReport> {
    let inv = invariant_algebra(rep, tol)?;
    let oracle = character_oracle(rep)?;
    let decomposition = central_decomposition(&inv.algebra, tol)?;
    let truncation = truncate(&inv.algebra, &decomposition, tol)?;

    let mut expected: Vec<(usize, usize)> = oracle
        .iter()
        .filter(|c| c.multiplicity > 0)
        .map(|c| (c.irrep_dim, c.multiplicity))
        .collect();
    let mut found = decomposition.structure();
    expected.sort_unstable();
    found.sort_unstable();
    let present_sectors = expected.len();
    let ntilde_sum: usize = expected.iter().map(|&(_, m)| m).sum();

    let truncated_prime = commutant(&truncation.algebra.as_operator_set(), tol)?;
    let (abelian_after, _) = is_abelian(&truncated_prime, tol);
    Ok(ParastatReport {
        n_particles: rep.n_particles(),
        d_single: rep.d_single(),
        algebra_dim: inv.algebra.dimension(),
        commutant_dim: inv.commutant.dimension(),
        commutant_abelian_before: inv.commutant_abelian,
        truncated_dim: truncation.truncated_dim(),
        truncated_commutant_dim: truncated_prime.dimension(),
        truncated_commutant_abelian: abelian_after,
        present_sectors,
        oracle_agrees: expected == found,
        truncated_dim_matches: truncation.truncated_dim() == ntilde_sum,
        oracle,
        decomposition,
        truncation,
    })
}
