use thiserror::Error;

/// Errors produced by the jet calculus and the foliation pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("variable mismatch: {left} vs {right}")]
    VariableMismatch { left: char, right: char },

    #[error("inner series has a nonzero constant term")]
    NonzeroConstantTerm,

    #[error("{0} is not invertible in the coefficient ring")]
    NotInvertible(String),

    #[error("unsupported coefficient ring: {0}")]
    UnsupportedRing(String),

    #[error("sign of {0} cannot be decided")]
    UndecidableSign(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid {what}: {message}")]
    Validation { what: String, message: String },

    #[error("inconsistent holonomy data: relator {relator} evaluates to {residual}")]
    InconsistentHolonomy { relator: String, residual: String },

    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn validation(what: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            what: what.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Whether the error originates from reading text rather than from the mathematics.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
