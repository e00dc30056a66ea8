use thiserror::Error;

/// Domain errors. Variant names are stable identifiers: the CLI prints them
/// verbatim and exits with status 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("CompositeP: {0} is not an odd prime")]
    CompositeP(u32),
    #[error("ReducibleModulus: {0}")]
    ReducibleModulus(String),
    #[error("ZeroArgument")]
    ZeroArgument,
    #[error("DivisionByZeroPoly")]
    DivisionByZeroPoly,
    #[error("ZeroPolynomial")]
    ZeroPolynomial,
    #[error("InvertZeroToPrecision")]
    InvertZeroToPrecision,
    #[error("RamificationMismatch")]
    RamificationMismatch,
    #[error("InsufficientPrecision: {0}")]
    InsufficientPrecision(String),
    #[error("NotSquarefree")]
    NotSquarefree,
    #[error("SplitAtInfinity")]
    SplitAtInfinity,
    #[error("DegreeZeroDiscriminant")]
    DegreeZeroDiscriminant,
    #[error("NotIrreducible")]
    NotIrreducible,
    #[error("NotDividing")]
    NotDividing,
    #[error("DegenerateLattice")]
    DegenerateLattice,
    #[error("ConsistencyFailure: {0}")]
    ConsistencyFailure(String),
    #[error("DeltaZeroToPrecision")]
    DeltaZeroToPrecision,
    #[error("PrecisionCapExceeded")]
    PrecisionCapExceeded,
    #[error("PreconditionViolated: {0}")]
    PreconditionViolated(String),
    #[error("RoundingFailure: {0}")]
    RoundingFailure(String),
    #[error("ParseError: {0}")]
    Parse(String),
}

impl Error {
    /// The bare error name, without the detail payload.
    pub fn name(&self) -> &'static str {
        match self {
            Error::CompositeP(_) => "CompositeP",
            Error::ReducibleModulus(_) => "ReducibleModulus",
            Error::ZeroArgument => "ZeroArgument",
            Error::DivisionByZeroPoly => "DivisionByZeroPoly",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::InvertZeroToPrecision => "InvertZeroToPrecision",
            Error::RamificationMismatch => "RamificationMismatch",
            Error::InsufficientPrecision(_) => "InsufficientPrecision",
            Error::NotSquarefree => "NotSquarefree",
            Error::SplitAtInfinity => "SplitAtInfinity",
            Error::DegreeZeroDiscriminant => "DegreeZeroDiscriminant",
            Error::NotIrreducible => "NotIrreducible",
            Error::NotDividing => "NotDividing",
            Error::DegenerateLattice => "DegenerateLattice",
            Error::ConsistencyFailure(_) => "ConsistencyFailure",
            Error::DeltaZeroToPrecision => "DeltaZeroToPrecision",
            Error::PrecisionCapExceeded => "PrecisionCapExceeded",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::RoundingFailure(_) => "RoundingFailure",
            Error::Parse(_) => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
