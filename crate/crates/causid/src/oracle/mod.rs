//! Numeric ground truth for identification results.
//!
//! [`DiscreteScm`] is a random, strictly positive discrete causal model over a
//! diagram with one latent variable per bidirected edge. Exact enumeration
//! gives its observational and interventional distributions as
//! [`JointTable`]s, and [`evaluate_expression`] gives a symbolic expression a
//! value on an observational table. Comparing the two checks an
//! identification result against the model it claims to describe.

mod eval;
mod scm;
mod table;
mod verify;

use causid_core::IdentError;
use thiserror::Error;

pub use eval::{conditional_mutual_information, evaluate, evaluate_expression};
pub use scm::{DiscreteScm, Latent, DEFAULT_CELL_CAP};
pub use table::{Assignments, JointTable};
pub use verify::{verify_query, ModelBank, VerifyReport, TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid cardinality: {0}")]
    InvalidCardinality(String),
    #[error("state space of {cells} cells exceeds the cap of {cap}")]
    StateSpaceTooLarge { cells: usize, cap: usize },
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("variable `{0}` is not in the table")]
    UnknownVariable(String),
    #[error("division by zero")]
    ZeroDivisor,
    #[error("table shape mismatch: {0}")]
    Shape(String),
    #[error("free variable `{0}` is marked as summation-bound")]
    ContextMismatch(String),
    #[error(transparent)]
    Ident(#[from] IdentError),
}
