use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid substitution rule: {0}")]
    InvalidRule(String),

    #[error("invalid sign sequence: {0}")]
    InvalidSigns(String),

    #[error("non-prolongable seed {0:?}: its image does not start with it")]
    NonProlongableSeed(char),

    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(char),

    #[error("substitution is not primitive")]
    NotPrimitive,

    #[error("aperiodicity test inconclusive: no letter has two distinct left neighbours")]
    AperiodicityInconclusive,

    #[error("non-simple PF eigenvalue: kernel of M - L*I has dimension {0}")]
    NonSimplePerronEigenvalue(usize),

    #[error("expected {expected} class parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("unsupported class count: {0} ergodic classes (at most 2 are handled)")]
    UnsupportedClassCount(usize),

    #[error("weight matrix is not symmetric; semidefiniteness is undefined")]
    AsymmetricWeights,

    #[error("FFT size {requested} exceeds the budget of {budget}")]
    FftBudget { requested: usize, budget: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rule file: {0}")]
    RuleFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
