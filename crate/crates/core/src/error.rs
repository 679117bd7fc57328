use thiserror::Error;

/// Errors raised by model construction, evaluation and decoding.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Matrices or vectors whose shapes do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A model that failed numeric validation.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A symbol whose probability is below the filtering floor.
    #[error("symbol {symbol} is impossible in the current state (probability {prob:e})")]
    ImpossibleSymbol { symbol: u8, prob: f64 },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    /// Exhaustive oracles refuse inputs above their size cap.
    #[error("size cap exceeded: {what} = {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("parameter vector has length {got}, expected {expected}")]
    ParamLength { got: usize, expected: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported argument: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
