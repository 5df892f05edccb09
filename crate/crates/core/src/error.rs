use thiserror::Error;

use crate::gca::GenId;

/// Errors raised by the algebra kernel and the constructions built on it.
///
/// Residuals are carried as rendered strings so that an error can be shown
/// without access to the generator registry that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator id {0}")]
    UnknownGenerator(GenId),

    #[error("generator registry is frozen; cannot register `{0}`")]
    RegistryFrozen(String),

    #[error("degree mismatch for {context}: expected {expected}, found {found}")]
    DegreeMismatch { context: String, expected: i64, found: i64 },

    #[error("element is not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("differential image of `{generator}` is not a cycle: d(image) = {residual}")]
    NotACycle { generator: String, residual: String },

    #[error("chain condition fails on `{generator}`: residual {residual}")]
    ChainCondition { generator: String, residual: String },

    #[error("square does not commute on `{generator}`: v(phi(g)) - phi'(u(g)) = {residual}")]
    SquareNotCommuting { generator: String, residual: String },

    #[error("generator `{0}` is not part of the algebra")]
    ForeignGenerator(String),

    #[error("jet cap {cap} exceeded by {what}")]
    CapOverflow { what: String, cap: u32 },

    #[error("window is not closed under the differential: d({witness}) leaves the window")]
    WindowNotClosed { witness: String },

    #[error("element lies outside the truncation window: {0}")]
    OutsideWindow(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
