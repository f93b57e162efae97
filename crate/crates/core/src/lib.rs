//! Exact truncated-series calculus over rational and p-adic coefficients:
//! logarithms, residues, unipotent connections and their line integrals.

pub mod coeff;
pub mod error;
pub mod matrix;
pub mod nabla;
pub mod scheme;
pub mod series;

pub use coeff::{Coefficient, PAdic, PadicCtx, Rational, Scalar};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use series::{DifferentialForm, RingLabel, TruncatedSeries};
