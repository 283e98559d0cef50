use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} lies outside the domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("log10 axis requires strictly positive coordinates, got {0}")]
    LogOfNonPositive(f64),

    #[error("invalid domain box: {0}")]
    InvalidBox(String),

    #[error("qubit count {got} outside the supported range {min}..={max}")]
    Size { got: usize, min: usize, max: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("gate {gate} expects {expected} distinct qubits, got {got:?}")]
    Arity {
        gate: &'static str,
        expected: usize,
        got: Vec<usize>,
    },

    #[error("qubit lists overlap or differ in length: {0}")]
    RegisterLayout(String),

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("target variance is zero; R^2 is undefined")]
    DegenerateVariance,

    #[error("distribution sums to {0}, not 1")]
    Unnormalized(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("register size {0} requires an even qubit count")]
    OddRegister(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("every learning-rate branch diverged")]
    AllBranchesDiverged,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("negative target value {value} at (z={z}, Q={q})")]
    NegativeValue { z: f64, q: f64, value: f64 },

    #[error("grid does not match the training lattice: {0}")]
    LatticeMismatch(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
