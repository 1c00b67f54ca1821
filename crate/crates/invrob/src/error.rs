//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong building or solving a problem.
#[derive(Error, Debug)]
pub enum Error {
    /// Caller passed inconsistent dimensions or values (wrong vector length,
    /// non-finite coordinate, empty objective list, ...).
    #[error("usage: {0}")]
    Usage(String),

    /// A problem function returned a non-finite value.
    #[error("evaluation of {which} returned {value} at x={x:?}, u={u:?}")]
    Evaluation {
        which: String,
        value: f64,
        x: Vec<f64>,
        u: Vec<f64>,
    },

    /// A contract of the model was violated at runtime (e.g. a budget slack
    /// function returned a negative component).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input outside the supported domain of an operation.
    #[error("domain: {0}")]
    Domain(String),

    /// A feature combination the crate deliberately does not support.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// No decision satisfies the nominal rows within tolerance; carries the
    /// smallest violation found and where it was observed.
    #[error("infeasible: best decision {x:?} still violates {row} by {violation:.6e}")]
    Infeasible {
        x: Vec<f64>,
        row: String,
        violation: f64,
    },

    /// The exchange loop ran out of rounds; carries the best incumbent.
    #[error("solver did not converge after {rounds} rounds (violation {violation:.6e})")]
    Nonconverged {
        rounds: u32,
        violation: f64,
        incumbent: Box<crate::solver::SolveResult>,
    },

    /// Problem-spec file could not be parsed or validated.
    #[error("spec: {0}")]
    Spec(String),

    /// Expression text could not be parsed.
    #[error("expression: {0}")]
    Expr(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI/FFI exit status for this error: 1 solver failure, 2 infeasible,
    /// 3 bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Nonconverged { .. } => 1,
            Error::Infeasible { .. } => 2,
            Error::Usage(_)
            | Error::Spec(_)
            | Error::Expr(_)
            | Error::Domain(_)
            | Error::Unsupported(_)
            | Error::Io(_) => 3,
            Error::Evaluation { .. } | Error::Contract(_) => 1,
        }
    }
}
