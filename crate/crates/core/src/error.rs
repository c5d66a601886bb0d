use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid numerology, reference-signal layout, target or problem definition.
    #[error("configuration error: {0}")]
    Config(String),

    /// A reference signal tried to occupy a resource element that is already taken.
    #[error("mapping collision at subcarrier {subcarrier}, symbol {symbol}: RE already holds {existing}")]
    Collision {
        subcarrier: usize,
        symbol: usize,
        existing: &'static str,
    },

    /// The caller passed arguments that violate an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),
}
