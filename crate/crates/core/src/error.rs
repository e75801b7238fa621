use alloc::string::String;

/// Every failure the engine can report.
///
/// Symbol-carrying variants hold the symbol ids as written in the registry so
/// messages stay readable after the registry is gone.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GwtError {
    #[error("symbol `{0}` has no numeric assignment")]
    UnassignedSymbol(String),
    #[error("no bracket entry for ({0}, {1})")]
    MissingEntry(String, String),
    #[error("operands come from different registries or mode layouts")]
    RegistryMismatch,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid commutation table: {0}")]
    InvalidTable(String),
    #[error("ordering `{ordering}` cannot rank symbol `{symbol}`")]
    IncomparableKeys { ordering: String, symbol: String },
    #[error("symmetric (Weyl) ordering applied to fermionic symbol `{0}`")]
    SymmetricOnFermions(String),
    #[error("symbol `{0}` is not a source of the basis change")]
    SymbolNotInBasis(String),
    #[error("contraction of ({0}, {1}) is not a c-number")]
    NotCNumber(String, String),
    #[error("θ-form contraction needs permutation orderings")]
    NotPermutationOrdering,
    #[error("θ-form contraction not applicable: {0}")]
    NotApplicable(String),
    #[error("implicit linear relation does not hold: {0}")]
    RelationViolated(String),
    #[error("field family axiom violated: {{{0}, {1}}} ≠ 0")]
    FamilyAxiomViolated(String, String),
    #[error("derivative flavor does not match statistics of `{0}`")]
    FlavorMismatch(String),
    #[error("contraction was not generated from this ordering pair")]
    ContractionMismatch,
    #[error("functional is not univariate in X: {0}")]
    NotUnivariate(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("covariance matrix is neither positive nor negative definite")]
    NotDefinite,
    #[error("reordered quadratic form violates the definiteness condition")]
    ResultNotDefinite,
    #[error("matrix is singular")]
    Singular,
    #[error("truncation {got} is below the minimum {min}")]
    TruncationTooSmall { got: usize, min: usize },
    #[error("squeezing parameter must be non-negative, got {0}")]
    NegativeParameter(String),
    #[error("symbol `{0}` is not mapped to a mode generator")]
    UnmappedSymbol(String),
    #[error("dimension {0} exceeds the dense limit")]
    DimensionTooLarge(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = GwtError> = core::result::Result<T, E>;
