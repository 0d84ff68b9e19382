use thiserror::Error;

use crate::model::{ActionId, StateId, ValueVector};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("models do not share the same state/action skeleton: {0}")]
    SkeletonMismatch(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("distribution for action {action} puts {prob} on state {state}, outside [{lo}, {hi}]")]
    BoundViolation {
        action: ActionId,
        state: StateId,
        prob: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("action {action} is not available in state {state}")]
    UnavailableAction { state: StateId, action: ActionId },

    #[error("policy has no choice for state {0}")]
    MissingChoice(StateId),

    #[error("interval row is infeasible: lower sum {lo_sum}, upper sum {hi_sum}")]
    InfeasibleRow { lo_sum: f64, hi_sum: f64 },

    #[error("row has {0} successors, too many for vertex enumeration")]
    RowTooLarge(usize),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence {
        iterations: usize,
        residual: f64,
        last: ValueVector,
    },

    #[error("enumeration needs {combinations} combinations, above the limit of {limit}")]
    TooLarge { combinations: f64, limit: f64 },

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("internal error: {0}")]
    Internal(String),
}
