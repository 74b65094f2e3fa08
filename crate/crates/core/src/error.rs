use thiserror::Error;

/// Errors raised by the solvers, oracles and file loaders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse rational {input:?}: {reason}")]
    ParseRational { input: String, reason: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    /// A configurable size guard refused the request.
    #[error("{what} needs {needed} but the budget is {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        limit: String,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A result that the underlying mathematics guarantees did not hold.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn budget(what: &'static str, needed: impl ToString, limit: impl ToString) -> Self {
        Error::BudgetExceeded {
            what,
            needed: needed.to_string(),
            limit: limit.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
