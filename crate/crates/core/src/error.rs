use thiserror::Error;

/// Machine-readable identifier of a violated index inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateCode {
    /// `min{r1 + min{0,r''}, r2 + min{0,r'}} > m/2` failed.
    MicrolocalOrderTooLow,
    /// `r' + r'' >= 0` failed.
    NegativeGlobalSum,
    /// `r1 + r2 >= 0` failed.
    NegativeMicrolocalSum,
    /// `s <= r' + min{0,r''}` or `s <= r'' + min{0,r'}` failed.
    TensorOrderTooHigh,
    /// `s_* <= min{r',r''}` failed.
    ProductOrderAboveFactors,
    /// `s_* <= r' + r'' - m/2` failed, or held with equality where it must be strict.
    ProductOrderAboveSum,
    /// An order is not finite or exceeds the supported magnitude.
    OrderOutOfRange,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("tensor product would have dimension {0} > 4")]
    DimensionOverflow(usize),
    #[error("unsupported distribution spec: {0}")]
    UnsupportedSpec(String),
    #[error("Sobolev weight exponent {0} outside [-8, 8]")]
    WeightOverflow(f64),
    #[error("index hypotheses inadmissible ({code:?}): {message}")]
    IndexInadmissible { code: GateCode, message: String },
    #[error("transversality violated: {0}")]
    TransversalityViolated(String),
    #[error("fattened cone covers the whole sphere; shrink eps")]
    FattenOverflow,
    #[error("cutoff core touches the boundary of the fattened cone")]
    NoTransitionRoom,
    #[error("degenerate order fit: {0}")]
    DegenerateFit(String),
    #[error("cutoff supports overlap the excluded cone: {0}")]
    MaskOverlap(String),
    #[error("claim construction failed: {0}")]
    ClaimFailed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    /// Short stable name of the variant, used in reports and expected-error matching.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::GridMismatch(_) => "GridMismatch",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::DimMismatch(_) => "DimMismatch",
            Error::DimensionOverflow(_) => "DimensionOverflow",
            Error::UnsupportedSpec(_) => "UnsupportedSpec",
            Error::WeightOverflow(_) => "WeightOverflow",
            Error::IndexInadmissible { .. } => "IndexInadmissible",
            Error::TransversalityViolated(_) => "TransversalityViolated",
            Error::FattenOverflow => "FattenOverflow",
            Error::NoTransitionRoom => "NoTransitionRoom",
            Error::DegenerateFit(_) => "DegenerateFit",
            Error::MaskOverlap(_) => "MaskOverlap",
            Error::ClaimFailed(_) => "ClaimFailed",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Serialization(_) => "Serialization",
        }
    }

    pub(crate) fn inadmissible(code: GateCode, message: impl Into<String>) -> Self {
        Error::IndexInadmissible {
            code,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
