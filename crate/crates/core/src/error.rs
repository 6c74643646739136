use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision of {digits} decimal digits is below the minimum of {min}")]
    PrecisionTooLow { digits: u32, min: u32 },

    #[error("{what}: argument must be positive")]
    NonPositive { what: &'static str },

    #[error("nome {q} lies outside (0, {max_q}]")]
    NomeOutOfRange { q: String, max_q: String },

    #[error("{what}: argument {value} outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: String,
        domain: &'static str,
    },

    #[error("q-product has a vanishing factor at index {index}")]
    ZeroFactor { index: usize },

    #[error("{what} did not converge within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("internal inconsistency in {what}: independent routes differ by {residual}")]
    InternalInconsistency { what: &'static str, residual: String },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("unknown closed-form label `{0}`")]
    UnknownLabel(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("negative radicand in `{subtree}`")]
    NegativeRadicand { subtree: String },

    #[error("division by zero in `{subtree}`")]
    DivisionByZero { subtree: String },

    #[error("empty verification input: {0}")]
    EmptySuite(&'static str),

    #[error("fixture line {line}: {message}")]
    Fixture { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
