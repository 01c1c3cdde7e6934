use thiserror::Error;

use crate::interpreter::FixpointError;
use crate::lang::{BreakError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Break(#[from] BreakError),
    #[error("variable `{0}` is not declared in the state space")]
    Unbound(String),
    #[error("invalid state space: {0}")]
    Space(String),
    #[error("fixpoint: {0}")]
    Fixpoint(#[from] FixpointError),
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
