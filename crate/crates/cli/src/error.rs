use serde_json::{json, Value};
use thiserror::Error;

/// Everything a command can fail with. Input problems exit with 2, domain
/// errors from the computation exit with 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("missing O(...) marker: {0}")]
    MissingOMarker(String),

    #[error("exponent out of window: {0}")]
    ExponentOutOfWindow(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error(transparent)]
    Domain(#[from] lineint::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage_error",
            CliError::Syntax { .. } => "syntax_error",
            CliError::MissingOMarker(_) => "missing_o_marker",
            CliError::ExponentOutOfWindow(_) => "exponent_out_of_window",
            CliError::Schema(_) => "schema_error",
            CliError::Io(_) => "io_error",
            CliError::Domain(e) => e.code(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }

    /// The machine-readable error object.
    pub fn to_json(&self) -> Value {
        let mut obj = json!({
            "code": self.code(),
            "message": self.to_string(),
        });
        match self {
            CliError::Syntax { line, column, .. } => {
                obj["line"] = json!(line);
                obj["column"] = json!(column);
            }
            CliError::Domain(lineint::Error::IntegralObstruction { residue }) => {
                obj["residue"] = json!(residue.to_string());
            }
            CliError::Domain(lineint::Error::NotFramed {
                block_row,
                block_col,
            }) => {
                obj["block"] = json!([block_row, block_col]);
            }
            _ => {}
        }
        json!({ "error": obj })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;
    use lineint::{Coefficient, Rational};

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        let e = CliError::from(lineint::Error::NonUnit("t".into()));
        assert_eq!(e.exit_code(), 1);
        assert_eq!(e.code(), "non_unit");
    }

    #[test]
    fn obstruction_carries_residue() {
        let e = CliError::from(lineint::Error::IntegralObstruction {
            residue: Coefficient::Rational(Rational::from_integer(3.into())),
        });
        assert_eq!(e.to_json()["error"]["residue"], "3");
    }
}
