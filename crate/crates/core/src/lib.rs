//! Finite-dimensional superselection structure.
//!
//! The crate decides whether a set of observables (matrices) admits
//! superselection sectors, splits the state space into coherent sectors,
//! checks Dirac's requirement that the commutant of the observables be
//! abelian, and carries three worked case studies:
//!
//! - [`parastat`]: permutation symmetry on tensor powers, where the invariant
//!   observables have a non-abelian commutant and truncation to one copy per
//!   isotypic block restores an abelian one;
//! - [`cocycles`] and [`bargmann`]: multiplier exponents, central extensions,
//!   and the Galilei multiplier whose mass dependence forbids superposing
//!   different total masses;
//! - [`fluxsectors`]: multipole moments of the asymptotic electric flux of a moving
//!   charge, whose monopole is fixed by the charge while the higher moments
//!   depend on the momentum.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod bargmann;
pub mod cli;
pub mod cocycles;
pub mod diracsets;
pub mod error;
pub mod fluxsectors;
pub mod numkernel;
pub mod opalgebra;
pub mod parastat;
pub mod sectors;

pub use error::{Error, Result};
pub use numkernel::{ComplexMatrix, ToleranceConfig, C64};
pub use opalgebra::{OperatorAlgebra, OperatorSet};
pub use sectors::SectorDecomposition;
