use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("expected a {expected} grid function")]
    SpectralFlag { expected: &'static str },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("frequency {0:?} is not a node of the frequency lattice")]
    OffLattice(Vec<f64>),
    #[error("point {0:?} is not a grid node")]
    OffGrid(Vec<f64>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("derivative budget exceeded: requested {requested}, available {available}")]
    BudgetExceeded { requested: u32, available: u32 },
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("parse error in `{input}`: {message}")]
    Parse { input: String, message: String },
    #[error("window must satisfy g(0) = 1 and g(-x) = g(x): {0}")]
    InvalidWindow(String),
    #[error("power iteration did not converge after {0} steps")]
    NonConvergence(usize),
    #[error("exponent conditions violated: {0}")]
    Conditions(String),
    #[error("empty frequency list")]
    EmptyFrequencyList,
    #[error("no admissible regularity index for tau = {tau}, n = {n}")]
    NoRegularityIndex { tau: f64, n: usize },
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
