use thiserror::Error;

use crate::invariants::ValidationReport;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is degenerate (determinant 0)")]
    DegenerateMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("cannot combine a quadratic form with a bilinear form")]
    KindMismatch,
    #[error("finite group of order {order} exceeds the configured bound {bound}")]
    GroupTooLarge { order: u128, bound: usize },
    #[error("invalid finite form: {0}")]
    InvalidForm(String),
    #[error("lattice is odd: diagonal entry {0} is not even")]
    OddLattice(String),
    #[error("rescaled Gram matrix is not integral")]
    NotIntegral,
    #[error("rescaled lattice is odd")]
    OddResult,
    #[error("glue vector is not isotropic: {0}")]
    NotIsotropic(String),
    #[error("glue group is not the graph of an isomorphism")]
    NotAGraph,
    #[error("discriminant group is not 2-elementary")]
    NotTwoElementary,
    #[error("binary form is definite")]
    DefiniteForm,
    #[error("binary form has zero discriminant")]
    ZeroDisc,
    #[error("discriminant {0} is a perfect square")]
    SquareDisc(String),
    #[error("lattice has rank {0}, expected 2")]
    WrongRank(usize),
    #[error("lattice has signature ({0},{1}), expected (1,1)")]
    WrongSignature(usize, usize),
    #[error("subgroup is not contained in the ambient group")]
    NotSubgroup,
    #[error("(r,a,delta_phi) = ({0},{1},{2}) is not a valid triple")]
    InvalidTriple(u32, u32, u8),
    #[error("degree {0} is not a positive even integer")]
    OddDegree(u64),
    #[error("invalid genus invariants: {}", .0.summary())]
    InvalidInvariants(ValidationReport),
    #[error("no standard component exists for (r,a,delta_phi) = (20,2,1)")]
    NoStandard,
    #[error("operation does not apply to case {0}")]
    WrongCase(String),
    #[error("glue construction rejected: {0}")]
    GlueRejected(String),
    #[error("invariant mismatch: {0}")]
    InvariantMismatch(String),
    #[error("component flags are required for (r,a,delta_phi) = ({0},{1},1) with n >= 6")]
    MissingFlags(u32, u32),
    #[error("value does not fit in a machine word: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
