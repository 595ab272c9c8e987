use std::fmt;

/// Errors produced by bound evaluation, inversion, and the oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    /// `limit` carries the violated boundary (e.g. `n/2` for the MGF
    /// argument), or NaN when no single boundary applies.
    Domain {
        what: &'static str,
        value: f64,
        limit: f64,
    },
    /// Paired vectors have mismatched lengths.
    Shape { expected: usize, actual: usize },
    /// A probability vector failed validation.
    InvalidProbabilities(String),
    /// An enumeration would exceed the configured composition budget.
    Budget { compositions: u128, budget: u128 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value, limit } => {
                if limit.is_nan() {
                    write!(f, "domain error: {what} (got {value})")
                } else {
                    write!(f, "domain error: {what} (got {value}, boundary {limit})")
                }
            }
            Error::Shape { expected, actual } => {
                write!(f, "shape error: expected length {expected}, got {actual}")
            }
            Error::InvalidProbabilities(reason) => {
                write!(f, "invalid probability vector: {reason}")
            }
            Error::Budget {
                compositions,
                budget,
            } => write!(
                f,
                "enumeration budget exceeded: {compositions} compositions > budget {budget}"
            ),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain {
            what,
            value,
            limit: f64::NAN,
        }
    }

    pub(crate) fn domain_with_limit(what: &'static str, value: f64, limit: f64) -> Self {
        Error::Domain { what, value, limit }
    }
}
