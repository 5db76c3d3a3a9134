use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Every variant carries enough context to name the violated precondition;
/// [`Error::module`] names the module that raised it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // jet_algebra
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero constant term: {0}")]
    ZeroConstantTerm(String),
    #[error("non-positive constant term: {0}")]
    NonPositiveConstantTerm(String),
    #[error("order too low: {0}")]
    OrderTooLow(String),
    #[error("nonzero constant term in composition argument {0}")]
    NonzeroConstantTerm(usize),
    #[error("arity mismatch: expected {expected} components, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("irrational root: {0}")]
    IrrationalRoot(String),
    #[error("dimension {0} exceeds the supported maximum")]
    DimensionTooLarge(usize),

    // metric_io
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("division by zero at basepoint: {0}")]
    DivisionByZeroAtBasepoint(String),

    // tensor_calculus
    #[error("metric value matrix is not invertible")]
    NotInvertibleMetric,
    #[error("dimension too small: {0}")]
    DimensionTooSmall(String),
    #[error("wrong dimension: {0}")]
    WrongDimension(String),
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("singular Jacobian at the origin")]
    SingularJacobian,

    // conformal_invariants
    #[error("degenerate structure: {0}")]
    DegenerateStructure(String),
    #[error("non-simple spectrum: {0}")]
    NonSimpleSpectrum(String),
    #[error("null eigenform: {0}")]
    NullEigenform(String),
    #[error("no candidate word operator has simple real spectrum")]
    NoSimpleWordOperator,
    #[error("eigenspace intersections are not lines: {0}")]
    NonSplittable(String),
    #[error("wrong signature: {0}")]
    WrongSignature(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Name of the module that raises this kind of error.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            DimensionMismatch(_)
            | ZeroConstantTerm(_)
            | NonPositiveConstantTerm(_)
            | NonzeroConstantTerm(_)
            | ArityMismatch { .. }
            | IrrationalRoot(_)
            | DimensionTooLarge(_) => "jet_algebra",
            Parse { .. }
            | SignatureMismatch(_)
            | Arity(_)
            | DivisionByZeroAtBasepoint(_)
            | Io(_) => "metric_io",
            NotInvertibleMetric
            | WrongDimension(_)
            | RankMismatch(_)
            | SingularJacobian
            | OrderTooLow(_) => "tensor_calculus",
            DimensionTooSmall(_) => "tensor_calculus",
            DegenerateStructure(_)
            | NonSimpleSpectrum(_)
            | NullEigenform(_)
            | NoSimpleWordOperator
            | NonSplittable(_)
            | WrongSignature(_) => "conformal_invariants",
            DegenerateSample(_) => "orbit_counting",
        }
    }

    /// Short machine-readable reason, the variant name.
    pub fn reason(&self) -> &'static str {
        use Error::*;
        match self {
            DimensionMismatch(_) => "DimensionMismatch",
            ZeroConstantTerm(_) => "ZeroConstantTerm",
            NonPositiveConstantTerm(_) => "NonPositiveConstantTerm",
            OrderTooLow(_) => "OrderTooLow",
            NonzeroConstantTerm(_) => "NonzeroConstantTerm",
            ArityMismatch { .. } => "ArityMismatch",
            IrrationalRoot(_) => "IrrationalRoot",
            DimensionTooLarge(_) => "DimensionTooLarge",
            Parse { .. } => "ParseError",
            SignatureMismatch(_) => "SignatureMismatch",
            Arity(_) => "ArityError",
            DivisionByZeroAtBasepoint(_) => "DivisionByZeroAtBasepoint",
            NotInvertibleMetric => "NotInvertibleMetric",
            DimensionTooSmall(_) => "DimensionTooSmall",
            WrongDimension(_) => "WrongDimension",
            RankMismatch(_) => "RankMismatch",
            SingularJacobian => "SingularJacobian",
            DegenerateStructure(_) => "DegenerateStructure",
            NonSimpleSpectrum(_) => "NonSimpleSpectrum",
            NullEigenform(_) => "NullEigenform",
            NoSimpleWordOperator => "NoSimpleWordOperator",
            NonSplittable(_) => "NonSplittable",
            WrongSignature(_) => "WrongSignature",
            DegenerateSample(_) => "DegenerateSample",
            Io(_) => "Io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
