use thiserror::Error;

/// Every failure the toolkit can report.
///
/// Most variants signal a violated precondition. A few (`ClosureMismatch`,
/// `CriteriaDisagree`, `NonIntegerStructure`, `NotJointlyDiagonal`) mean two
/// independent numerical routes disagreed, which almost always points at a
/// tolerance setting rather than at the input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty operator set")]
    EmptySet,
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("operator set flagged self-adjoint closed but adjoint of `{0}` is not in its span")]
    NotSelfAdjointClosed(String),
    #[error("double commutant has dimension {double_commutant}, word closure has {word_closure}")]
    ClosureMismatch {
        double_commutant: usize,
        word_closure: usize,
    },
    #[error("generic element draw failed after {0} reseeds")]
    WitnessConstructionFailed(usize),
    #[error("non-integer sector structure ({0}); reseed or loosen cluster_tol")]
    NonIntegerStructure(String),
    #[error("matrix-element and support criteria disagree on disjointness")]
    CriteriaDisagree,
    #[error("zero vector")]
    ZeroVector,
    #[error("generic element in sector {sector} stayed degenerate after {attempts} reseeds")]
    DegenerateGenericElement { sector: usize, attempts: usize },
    #[error("spectrum is degenerate (minimum gap {0:.3e})")]
    DegenerateSpectrum(f64),
    #[error("operators do not commute (relative commutator {0:.3e})")]
    NotCommuting(f64),
    #[error("eigenbasis of A does not diagonalize B (off-diagonal residual {0:.3e})")]
    NotJointlyDiagonal(f64),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("projector rank not an integer multiple of the irrep dimension ({0})")]
    NonIntegerRank(String),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("invalid multiplier table: {0}")]
    InvalidMultiplier(String),
    #[error("multiplier fails the strict cocycle identity (residual {0:.3e})")]
    NotACocycle(f64),
    #[error("pair {0} does not commute")]
    NonCommutingPair(usize),
    #[error("representation is not a ray representation for the multiplier (residual {0:.3e})")]
    NotARayRep(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid Galilei element: {0}")]
    InvalidElement(String),
    #[error("all sampled pairs are degenerate; reseed")]
    DegenerateSample,
    #[error("shift {0} is not a multiple of the grid spacing")]
    ShiftNotOnGrid(f64),
    #[error("wavefunction support is clipped by the grid boundary")]
    SupportClipped,
    #[error("relative energy drift {0:.3e} exceeds the stability bound")]
    UnstableStep(f64),
    #[error("quadrature too coarse: {0}")]
    QuadratureTooCoarse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
