use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("corpus line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("corpus has fewer than 2 distinct classes")]
    TooFewClasses,

    #[error("corpus has fewer than 2 documents")]
    TooFewDocuments,

    #[error("class {class:?} has fewer than {k} members")]
    ClassTooSmallForFolds { class: String, k: usize },

    #[error("invalid synthetic spec: {0}")]
    InvalidSyntheticSpec(String),

    #[error("no term survives feature filtering")]
    EmptyFeatureSpace,

    #[error("invalid training input: {0}")]
    InvalidTrainingInput(String),

    #[error("vector dimension {got} does not match model dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("label {0:?} not in class list")]
    UnknownLabel(String),

    #[error("gold and predicted label sequences differ in length ({gold} vs {pred})")]
    LabelLengthMismatch { gold: usize, pred: usize },

    #[error("frontier points have mixed sizes ({a} vs {b})")]
    MixedFrontierSizes { a: f64, b: f64 },

    #[error("frontier requires at least one point")]
    EmptyFrontier,

    #[error("duplicate size {0} in performance curve input")]
    DuplicateCurveSize(f64),

    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
