use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |A - A†| = {0:e})")]
    NonHermitian(f64),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("Ky Fan order {r} outside 1..={dim}")]
    RankOutOfRange { r: usize, dim: usize },

    #[error("invalid dimensions {0:?}: need at least one party, each of dimension >= 2")]
    InvalidDims(Vec<usize>),

    #[error("amplitude count {got} does not match dims product {expected}")]
    AmplitudeCount { expected: usize, got: usize },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("a bipartition needs at least two parties")]
    SinglePartySystem,

    #[error("invalid probabilities: {0}")]
    BadProbabilities(String),

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("dimension mismatch: {0:?} vs {1:?}")]
    DimensionMismatch(Vec<usize>, Vec<usize>),

    #[error("local basis for party {party} is not a complete orthonormal basis")]
    IncompleteBasis { party: usize },

    #[error("POVM weight {0} must be > 0")]
    BadWeight(f64),

    #[error("POVM is incomplete: ‖Σ M_a − I‖∞ = {0:e}")]
    IncompletePovm(f64),

    #[error("POVM element {0} is not positive semidefinite")]
    NotPositive(usize),

    #[error("decoding has {got} entries for {expected} outcomes")]
    DecodingArityMismatch { expected: usize, got: usize },

    #[error("decoding entry for outcome {0} is not an ensemble member reference")]
    GuessNotEnsembleMember(usize),

    #[error("decoding refers to member {index}, but the ensemble has {len} states")]
    MemberOutOfRange { index: usize, len: usize },

    #[error("ensemble is not orthogonal")]
    NotOrthogonal,

    #[error("ensemble is not equiprobable")]
    NotEquiprobable,

    #[error("state {index} is not maximally entangled across the cut (λ = {lambda}, expected {expected})")]
    NotMaximallyEntangled {
        index: usize,
        lambda: f64,
        expected: f64,
    },

    #[error("no distinguishable subsets supplied")]
    EmptySubsetList,

    #[error("subset {0:?} carries no verified certificate (strict mode)")]
    UncertifiedSubsetRejected(Vec<usize>),

    #[error("subset {0:?} is invalid: {1}")]
    InvalidSubset(Vec<usize>, String),

    #[error("invalid counts: m = {m}, N = {n} (need 1 <= m <= N)")]
    InvalidCounts { m: usize, n: usize },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("bad construction: {0}")]
    BadConstruction(String),

    #[error("no bipartition admitted the bound: {0}")]
    NoApplicableCut(String),

    #[error("invalid search configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
