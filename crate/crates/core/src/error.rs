use thiserror::Error;

use crate::coeff::Coefficient;
use crate::series::RingLabel;

/// Domain errors raised by the core computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not integral: {0}")]
    NotIntegral(String),

    #[error("not a unit: {0}")]
    NonUnit(String),

    /// The form has a nonzero `u^-1 du` term, so it is not exact.
    #[error("form is not exact: residue {residue} obstructs integration")]
    IntegralObstruction { residue: Coefficient },

    #[error("insufficient window: {0}")]
    InsufficientWindow(String),

    #[error("cannot determine degree: {0}")]
    CannotDetermineDegree(String),

    /// Block indices are 1-based, as in the block notation `C_ij`.
    #[error("not framed: block ({block_row}, {block_col}) of the connection must vanish")]
    NotFramed { block_row: usize, block_col: usize },

    #[error("{op} is not available over {ring}")]
    UnsupportedRing { op: &'static str, ring: RingLabel },

    #[error("incompatible operands: {0}")]
    Incompatible(String),
}

impl Error {
    /// Stable machine-readable code for this error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::NotIntegral(_) => "not_integral",
            Error::NonUnit(_) => "non_unit",
            Error::IntegralObstruction { .. } => "integral_obstruction",
            Error::InsufficientWindow(_) => "insufficient_window",
            Error::CannotDetermineDegree(_) => "cannot_determine_degree",
            Error::NotFramed { .. } => "not_framed",
            Error::UnsupportedRing { .. } => "unsupported_ring",
            Error::Incompatible(_) => "incompatible_operands",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
