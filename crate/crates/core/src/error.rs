use thiserror::Error;

/// Errors raised by the simulator core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a square matrix of even positive dimension, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },

    #[error("mode pair ({i}, {j}) must satisfy i < j")]
    UnorderedPair { i: usize, j: usize },

    #[error("mode pair ({i}, {j}) appears more than once in a dense layer")]
    DuplicatePair { i: usize, j: usize },

    #[error("gate parameters must be finite")]
    NonFiniteParameter,

    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mask selects {mask_ones} qubits but outcome has {outcome_len} bits")]
    OutcomeLength { mask_ones: usize, outcome_len: usize },

    #[error("pfaffian has imaginary residual {imag:e} (real part {real:e})")]
    ImaginaryResidual { real: f64, imag: f64 },

    #[error("{what} supports at most {max}, got {got}")]
    TooLarge {
        what: &'static str,
        max: usize,
        got: usize,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(&'static str),

    #[error("invalid objective: {0}")]
    InvalidObjective(&'static str),

    #[error("finite-difference step must be positive and finite")]
    InvalidStep,

    #[error("non-finite loss encountered")]
    NonFiniteLoss,
}

pub type Result<T> = core::result::Result<T, Error>;
