use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice mismatch: expected `{expected}`, found `{found}`")]
    LatticeMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("gram matrix is not symmetric at ({0}, {1})")]
    AsymmetricGram(usize, usize),

    #[error("adjunction parity violated: C.(C+K) = {0} is odd")]
    AdjunctionParity(String),

    #[error("effectivity rule not declared for lattice `{0}`")]
    RuleNotDeclared(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("basis change matrix is not unimodular (det = {0})")]
    NotUnimodular(String),

    #[error("gram matrix after basis change does not match the expected one")]
    GramMismatch,

    #[error("image of the curve is not planar (C.H = {0})")]
    NotPlanar(String),

    #[error("not a generic projection: {0}")]
    Model(String),

    #[error("inconsistent linear data: {0}")]
    Contradiction(String),

    #[error("underdetermined linear data: rank {rank} < {needed}")]
    Rank { rank: usize, needed: usize },

    #[error("pullback predicate violated: {0}")]
    Predicate(String),

    #[error("empty generator list")]
    EmptyGenerators,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("malformed config at `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
