use std::fmt;

/// Errors surfaced by the library.
///
/// `Domain` marks a violated precondition and names it; `Refused` marks an
/// operation whose cost estimate exceeded its budget; `Boundary` marks a
/// comparison against a transcendental quantity that stayed undecided past
/// the precision cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    Domain(String),
    Refused {
        reason: String,
        estimated_cost: Option<u128>,
    },
    Boundary(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn refused(reason: impl Into<String>, estimated_cost: Option<u128>) -> Self {
        Error::Refused {
            reason: reason.into(),
            estimated_cost,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Refused {
                reason,
                estimated_cost,
            } => match estimated_cost {
                Some(cost) => write!(f, "refused: {reason} (estimated cost {cost})"),
                None => write!(f, "refused: {reason}"),
            },
            Error::Boundary(msg) => write!(f, "boundary: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
