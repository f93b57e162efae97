//! Connection and family files.
//!
//! ```json
//! { "signature": [1, 1], "ring": "FormalChar0", "var": "t", "trunc": 8,
//!   "connection": [["0", "1 + O(t^8)"], ["0", "0"]] }
//! ```
//!
//! A family file has two-variable entries, either `"0"` or
//! `{"du": "...", "dx": "..."}`, and an optional `fiber_var` (default `x`).

use serde::Deserialize;

use lineint::nabla::{validate_framed, ConnectionMatrix, FramedNablaModule, Signature};
use lineint::scheme::{BiForm, BiSeries, FramedFamily};
use lineint::{DifferentialForm, Matrix, RingLabel, TruncatedSeries};

use crate::error::{CliError, CliResult};
use crate::syntax::{check_ring, parse_biseries, parse_form, CliScalar, MAX_WINDOW};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionFile {
    pub signature: Vec<usize>,
    pub ring: String,
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub abs_prec: Option<i64>,
    #[serde(default)]
    pub trunc: Option<i64>,
    #[serde(default)]
    pub var: Option<String>,
    pub connection: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FamilyEntry {
    Text(String),
    Form {
        #[serde(default)]
        du: Option<String>,
        #[serde(default)]
        dx: Option<String>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub signature: Vec<usize>,
    pub ring: String,
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub abs_prec: Option<i64>,
    #[serde(default)]
    pub trunc: Option<i64>,
    #[serde(default)]
    pub var: Option<String>,
    #[serde(default)]
    pub fiber_var: Option<String>,
    pub connection: Vec<Vec<FamilyEntry>>,
}

fn schema(message: impl Into<String>) -> CliError {
    CliError::Schema(message.into())
}

fn file_trunc(trunc: Option<i64>) -> CliResult<Option<i64>> {
    match trunc {
        Some(t) if !(0..=MAX_WINDOW).contains(&t) => Err(schema(format!("trunc {t} must lie in [0, {MAX_WINDOW}]"))),
        t => Ok(t),
    }
}

pub fn read_connection_file(text: &str) -> CliResult<ConnectionFile> {
    serde_json::from_str(text).map_err(|e| schema(e.to_string()))
}

pub fn read_family_file(text: &str) -> CliResult<FamilyFile> {
    serde_json::from_str(text).map_err(|e| schema(e.to_string()))
}

pub fn parse_ring(label: &str) -> CliResult<RingLabel> {
    label.parse().map_err(|_| schema(format!("unknown ring label {label:?}")))
}

pub fn parse_var(name: Option<&str>, field: &str) -> CliResult<Option<char>> {
    match name {
        None => Ok(None),
        Some(s @ ("t" | "u" | "x")) => Ok(s.chars().next()),
        Some(s) => Err(schema(format!("{field} must be t, u or x, got {s:?}"))),
    }
}

fn square<T>(rows: &[Vec<T>], signature: &Signature) -> CliResult<()> {
    let r = signature.total();
    if rows.len() != r || rows.iter().any(|row| row.len() != r) {
        return Err(schema(format!(
            "connection must be a {r}x{r} array for signature {:?}",
            signature.parts()
        )));
    }
    Ok(())
}

fn signature(parts: &[usize]) -> CliResult<Signature> {
    Signature::new(parts.to_vec()).map_err(|e| schema(e.to_string()))
}

fn is_zero_entry(text: &str) -> bool {
    text.trim() == "0"
}

/// Reads the connection of a file. `"0"` entries take the window of the
/// other entries, or `trunc` when every entry is `"0"`.
pub fn build_module<C: CliScalar>(
    file: &ConnectionFile,
    ring: RingLabel,
    ctx: &C::Ctx,
    var: Option<char>,
    trunc: Option<i64>,
) -> CliResult<(FramedNablaModule<C>, char)> {
    check_ring::<C>(ring)?;
    let sig = signature(&file.signature)?;
    square(&file.connection, &sig)?;
    let mut var = var;
    let mut parsed: Vec<Vec<Option<DifferentialForm<C>>>> = Vec::new();
    for (i, row) in file.connection.iter().enumerate() {
        let mut out = Vec::new();
        for (j, text) in row.iter().enumerate() {
            if is_zero_entry(text) {
                out.push(None);
                continue;
            }
            let form = parse_form::<C>(text, ctx, &mut var, Some(ring)).map_err(|e| in_entry(e, i, j))?;
            out.push(Some(form));
        }
        parsed.push(out);
    }
    let window = parsed
        .iter()
        .flatten()
        .flatten()
        .map(|f| f.coefficient().trunc_order())
        .min()
        .or(file_trunc(trunc)?)
        .ok_or_else(|| schema("every entry is \"0\"; give trunc to fix the window"))?;
    let entries = Matrix::try_from_fn(sig.total(), sig.total(), |i, j| match &parsed[i][j] {
        Some(f) => Ok::<_, CliError>(f.clone()),
        None => Ok(DifferentialForm::new(TruncatedSeries::zero(ring, ctx.clone(), 0.min(window), window)?)),
    })?;
    let module = validate_framed(sig, ConnectionMatrix::new(ring, ctx.clone(), entries)?)?;
    Ok((module, var.unwrap_or('t')))
}

fn in_entry(e: CliError, i: usize, j: usize) -> CliError {
    match e {
        CliError::Syntax { line, column, message } => CliError::Syntax {
            line,
            column,
            message: format!("entry [{},{}]: {message}", i + 1, j + 1),
        },
        CliError::MissingOMarker(m) => CliError::MissingOMarker(format!("entry [{},{}]: {m}", i + 1, j + 1)),
        CliError::ExponentOutOfWindow(m) => {
            CliError::ExponentOutOfWindow(format!("entry [{},{}]: {m}", i + 1, j + 1))
        }
        other => other,
    }
}

fn family_trunc(trunc: Option<i64>) -> CliResult<Option<(i64, i64)>> {
    match trunc {
        Some(t) if !(0..=1 << 10).contains(&t) => Err(schema(format!("trunc {t} must lie in [0, 1024] for a family"))),
        t => Ok(t.map(|t| (t, t))),
    }
}

/// Reads a family file. Zero parts take the common window of the others;
/// all parts are cut down to that common window.
pub fn build_family<C: CliScalar>(
    file: &FamilyFile,
    ring: RingLabel,
    ctx: &C::Ctx,
    base: Option<char>,
    fiber: char,
) -> CliResult<(FramedFamily<C>, char)> {
    check_ring::<C>(ring)?;
    let sig = signature(&file.signature)?;
    square(&file.connection, &sig)?;
    let mut base = base;
    let mut read = |text: &Option<String>, i: usize, j: usize| -> CliResult<Option<BiSeries<C>>> {
        match text {
            None => Ok(None),
            Some(t) if is_zero_entry(t) => Ok(None),
            Some(t) => parse_biseries::<C>(t, ctx, &mut base, fiber, Some(ring))
                .map(Some)
                .map_err(|e| in_entry(e, i, j)),
        }
    };
    let mut parsed = Vec::new();
    for (i, row) in file.connection.iter().enumerate() {
        let mut out = Vec::new();
        for (j, entry) in row.iter().enumerate() {
            out.push(match entry {
                FamilyEntry::Text(t) if is_zero_entry(t) => (None, None),
                FamilyEntry::Text(_) => {
                    return Err(schema(format!(
                        "entry [{},{}] must be \"0\" or an object with du and dx",
                        i + 1,
                        j + 1
                    )))
                }
                FamilyEntry::Form { du, dx } => (read(du, i, j)?, read(dx, i, j)?),
            });
        }
        parsed.push(out);
    }
    let (tu, tx) = parsed
        .iter()
        .flatten()
        .flat_map(|(a, b)| [a, b])
        .flatten()
        .map(|s| (s.trunc_u(), s.trunc_x()))
        .reduce(|(a, b), (c, d)| (a.min(c), b.min(d)))
        .or(family_trunc(file.trunc)?)
        .ok_or_else(|| schema("every entry is \"0\"; give trunc to fix the window"))?;
    let part = |s: &Option<BiSeries<C>>| -> CliResult<BiSeries<C>> {
        match s {
            Some(s) => Ok(s.restrict(tu, tx)),
            None => Ok(BiSeries::zero(ring, ctx.clone(), tu, tx)?),
        }
    };
    let connection = Matrix::try_from_fn(sig.total(), sig.total(), |i, j| {
        let (du, dx) = &parsed[i][j];
        Ok::<_, CliError>(BiForm::new(part(du)?, part(dx)?)?)
    })?;
    let family = FramedFamily::new(sig, ring, ctx.clone(), connection)?;
    Ok((family, base.unwrap_or('u')))
}
