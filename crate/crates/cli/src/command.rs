//! Subcommands and their option handling.

use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lineint::matrix::Matrix;
use lineint::nabla::{fundamental_solution, invariant, trivialize, FramedNablaModule};
use lineint::scheme::{curvature, line_integral, BiSeries};
use lineint::series::{degree_of_unit, dlog, formal_log, padic_log_dagger, padic_log_onemius_py, residue};
use lineint::{PAdic, PadicCtx, Rational, RingLabel, Scalar, TruncatedSeries};

use crate::error::{CliError, CliResult};
use crate::files::{build_family, build_module, parse_ring, parse_var, read_connection_file, read_family_file};
use crate::render::{
    biseries_json, biseries_text, form_text, matrix_json, matrix_text, series_json, series_text, RenderScalar,
};
use crate::syntax::{MAX_PREC, parse_biseries, parse_biseries_matrix, parse_form, parse_series, parse_series_matrix, CliScalar};

#[derive(Debug, Parser)]
#[command(name = "lineint", version, about = "Truncated series, logarithms and line integrals")]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rational,
    #[value(name = "p-adic", alias = "padic")]
    PAdic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Series,
    Form,
    Biseries,
    Matrix,
    Bimatrix,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Coefficient mode; p-adic is implied by --p or --abs-prec.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,

    #[arg(long, global = true)]
    pub p: Option<u64>,

    /// Working absolute precision N: coefficients are known modulo p^N.
    #[arg(long = "abs-prec", global = true, allow_negative_numbers = true)]
    pub abs_prec: Option<i64>,

    /// Truncation order of inputs and results.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub trunc: Option<i64>,

    /// Ring label, e.g. FormalChar0, GammaPlus, RobbaPlus.
    #[arg(long, global = true)]
    pub ring: Option<String>,

    /// Series variable: t, u or x.
    #[arg(long, global = true)]
    pub var: Option<String>,

    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Formal logarithm of a unit of k[[t]].
    Log {
        #[arg(allow_hyphen_values = true)]
        series: String,
    },
    /// p-adic logarithm of a unit of O[[u]].
    Plog {
        #[arg(allow_hyphen_values = true)]
        series: String,
        /// Read the input as y and return log(1 - p y).
        #[arg(long)]
        onemius: bool,
    },
    /// Logarithmic derivative dx/x.
    Dlog {
        #[arg(allow_hyphen_values = true)]
        series: String,
        /// Print the degree of the unit instead.
        #[arg(long)]
        degree: bool,
    },
    /// Residue of a form (a bare series is read as the coefficient of du).
    Residue {
        #[arg(allow_hyphen_values = true)]
        form: String,
    },
    /// Fundamental solution S of S' = N S for the matrix N in a connection file.
    Fundsol { file: String },
    /// Unipotent trivialization of a framed connection.
    Trivialize { file: String },
    /// Normalized trivialization, the invariant of a framed connection.
    Invariant { file: String },
    /// Curvature of a family.
    Curvature {
        #[arg(long)]
        family: Option<String>,
        file: Option<String>,
    },
    /// Line integral of a family along the section x = v - 1.
    Integrate {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        section: String,
    },
    /// Parses a value and prints it back in canonical form.
    ParseCheck {
        #[arg(allow_hyphen_values = true)]
        input: String,
        #[arg(long, value_enum, default_value = "series")]
        kind: Kind,
    },
}

/// Where commands read `-` from.
pub trait Stdin {
    fn read_all(&mut self) -> CliResult<String>;
}

pub struct ProcessStdin;

impl Stdin for ProcessStdin {
    fn read_all(&mut self) -> CliResult<String> {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        Ok(s)
    }
}

impl Stdin for &str {
    fn read_all(&mut self) -> CliResult<String> {
        Ok(self.to_string())
    }
}

fn expression(arg: &str, stdin: &mut dyn Stdin) -> CliResult<String> {
    if arg == "-" {
        stdin.read_all()
    } else {
        Ok(arg.to_string())
    }
}

fn file_text(path: &str, stdin: &mut dyn Stdin) -> CliResult<String> {
    if path == "-" {
        stdin.read_all()
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
    }
}

/// A computed result in both output forms.
pub struct Rendered {
    pub text: String,
    pub json: Value,
}

pub trait Coeff: CliScalar + RenderScalar {}

impl<C: CliScalar + RenderScalar> Coeff for C {}

enum Ctx {
    Rational,
    PAdic(PadicCtx),
}

/// Primes up to this bound are checked by trial division.
const MAX_PRIME: u64 = 1 << 31;

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn resolve_ctx(o: &Options, file_p: Option<u64>, file_prec: Option<i64>) -> CliResult<Ctx> {
    let p = o.p.or(file_p);
    let prec = o.abs_prec.or(file_prec);
    let mode = o
        .mode
        .unwrap_or(if p.is_some() || prec.is_some() { Mode::PAdic } else { Mode::Rational });
    match (mode, p, prec) {
        (Mode::Rational, None, None) => Ok(Ctx::Rational),
        (Mode::Rational, _, _) => Err(usage("--p and --abs-prec only apply in p-adic mode")),
        (Mode::PAdic, Some(p), _) if p > MAX_PRIME => Err(usage(format!("--p {p} exceeds the supported {MAX_PRIME}"))),
        (Mode::PAdic, _, Some(n)) if n > MAX_PREC => {
            Err(usage(format!("--abs-prec {n} exceeds the supported {MAX_PREC}")))
        }
        (Mode::PAdic, Some(p), Some(n)) => Ok(Ctx::PAdic(PadicCtx::new(p, n)?)),
        (Mode::PAdic, _, _) => Err(usage("p-adic mode needs both --p and --abs-prec")),
    }
}

fn trunc_flag(o: &Options) -> CliResult<Option<i64>> {
    match o.trunc {
        Some(t) if t < 1 => Err(usage(format!("--trunc must be at least 1, got {t}"))),
        t => Ok(t),
    }
}

fn var_flag(o: &Options) -> CliResult<Option<char>> {
    parse_var(o.var.as_deref(), "--var").map_err(|_| usage("--var must be t, u or x"))
}

fn ring_flag(o: &Options) -> CliResult<Option<RingLabel>> {
    o.ring
        .as_deref()
        .map(|r| r.parse().map_err(|e: lineint::Error| usage(e.to_string())))
        .transpose()
}

fn cut<C: Scalar>(s: TruncatedSeries<C>, trunc: Option<i64>) -> TruncatedSeries<C> {
    match trunc {
        Some(t) => s.truncate(t),
        None => s,
    }
}

fn series_out<C: Coeff>(s: &TruncatedSeries<C>, var: char) -> Rendered {
    Rendered {
        text: series_text(s, var),
        json: series_json(s),
    }
}

fn series_matrix_out<C: Coeff>(m: &Matrix<TruncatedSeries<C>>, var: char) -> Rendered {
    Rendered {
        text: matrix_text(m, |s| series_text(s, var)),
        json: matrix_json(m, series_json),
    }
}

fn biseries_matrix_out<C: Coeff>(m: &Matrix<BiSeries<C>>, base: char, fiber: char) -> Rendered {
    Rendered {
        text: matrix_text(m, |s| biseries_text(s, base, fiber)),
        json: matrix_json(m, biseries_json),
    }
}

/// Parses the command line and runs it.
pub fn execute(cli: &Cli, stdin: &mut dyn Stdin) -> CliResult<Rendered> {
    let o = &cli.options;
    let trunc = trunc_flag(o)?;
    let var = var_flag(o)?;
    let ring = ring_flag(o)?;
    match &cli.command {
        Command::Log { series } => {
            let text = expression(series, stdin)?;
            match resolve_ctx(o, None, None)? {
                Ctx::Rational => {
                    let mut var = var;
                    let s = cut(parse_series::<Rational>(&text, &(), &mut var, ring)?, trunc);
                    Ok(series_out(&formal_log(&s)?, var.unwrap_or('t')))
                }
                Ctx::PAdic(_) => Err(usage("log works over rational coefficients; use plog in p-adic mode")),
            }
        }
        Command::Plog { series, onemius } => {
            let text = expression(series, stdin)?;
            match resolve_ctx(o, None, None)? {
                Ctx::PAdic(ctx) => {
                    let mut var = var;
                    let s = cut(parse_series::<PAdic>(&text, &ctx, &mut var, ring)?, trunc);
                    let z = if *onemius { padic_log_onemius_py(&s)? } else { padic_log_dagger(&s)? };
                    Ok(series_out(&z, var.unwrap_or('u')))
                }
                Ctx::Rational => Err(usage("plog needs --p and --abs-prec; use log for rational series")),
            }
        }
        Command::Dlog { series, degree } => {
            let text = expression(series, stdin)?;
            match resolve_ctx(o, None, None)? {
                Ctx::Rational if *degree => Err(usage("--degree needs p-adic mode")),
                Ctx::Rational => run_dlog::<Rational>(&text, &(), var, ring, trunc),
                Ctx::PAdic(ctx) if *degree => {
                    let mut var = var;
                    let s = cut(parse_series::<PAdic>(&text, &ctx, &mut var, ring)?, trunc);
                    let d = degree_of_unit(&s)?;
                    Ok(Rendered {
                        text: d.to_string(),
                        json: json!({ "degree": d }),
                    })
                }
                Ctx::PAdic(ctx) => run_dlog::<PAdic>(&text, &ctx, var, ring, trunc),
            }
        }
        Command::Residue { form } => {
            let text = expression(form, stdin)?;
            match resolve_ctx(o, None, None)? {
                Ctx::Rational => run_residue::<Rational>(&text, &(), var, ring),
                Ctx::PAdic(ctx) => run_residue::<PAdic>(&text, &ctx, var, ring),
            }
        }
        Command::Fundsol { file } => {
            let f = read_connection_file(&file_text(file, stdin)?)?;
            match resolve_ctx(o, f.p, f.abs_prec)? {
                Ctx::Rational => {
                    let ring = ring.map_or_else(|| parse_ring(&f.ring), Ok)?;
                    let (module, var) = build_module::<Rational>(&f, ring, &(), var.or(parse_var(f.var.as_deref(), "var")?), f.trunc)?;
                    let t = trunc.or(f.trunc).unwrap_or(module.connection().trunc_order() + 1);
                    Ok(series_matrix_out(&fundamental_solution(module.connection(), t)?, var))
                }
                Ctx::PAdic(_) => Err(lineint::Error::UnsupportedRing {
                    op: "the fundamental-solution recurrence",
                    ring: ring.map_or_else(|| parse_ring(&f.ring), Ok)?,
                }
                .into()),
            }
        }
        Command::Trivialize { file } | Command::Invariant { file } => {
            let f = read_connection_file(&file_text(file, stdin)?)?;
            let normalize = matches!(cli.command, Command::Invariant { .. });
            let ring = ring.map_or_else(|| parse_ring(&f.ring), Ok)?;
            let var = var.or(parse_var(f.var.as_deref(), "var")?);
            match resolve_ctx(o, f.p, f.abs_prec)? {
                Ctx::Rational => {
                    let (module, var) = build_module::<Rational>(&f, ring, &(), var, f.trunc)?;
                    run_trivialize(&module, var, trunc.or(f.trunc), normalize)
                }
                Ctx::PAdic(ctx) => {
                    let (module, var) = build_module::<PAdic>(&f, ring, &ctx, var, f.trunc)?;
                    run_trivialize(&module, var, trunc.or(f.trunc), normalize)
                }
            }
        }
        Command::Curvature { family, file } => {
            let path = match (family, file) {
                (Some(p), None) | (None, Some(p)) => p,
                _ => return Err(usage("curvature takes one family file")),
            };
            let f = read_family_file(&file_text(path, stdin)?)?;
            let ring = ring.map_or_else(|| parse_ring(&f.ring), Ok)?;
            let base = var.or(parse_var(f.var.as_deref(), "var")?);
            let fiber = parse_var(f.fiber_var.as_deref(), "fiber_var")?.unwrap_or('x');
            match resolve_ctx(o, f.p, f.abs_prec)? {
                Ctx::Rational => {
                    let (fam, base) = build_family::<Rational>(&f, ring, &(), base, fiber)?;
                    Ok(biseries_matrix_out(&curvature(&fam)?, base, fiber))
                }
                Ctx::PAdic(ctx) => {
                    let (fam, base) = build_family::<PAdic>(&f, ring, &ctx, base, fiber)?;
                    Ok(biseries_matrix_out(&curvature(&fam)?, base, fiber))
                }
            }
        }
        Command::Integrate { family, section } => {
            let f = read_family_file(&file_text(family, stdin)?)?;
            let section = expression(section, stdin)?;
            let ring = ring.map_or_else(|| parse_ring(&f.ring), Ok)?;
            let base = var.or(parse_var(f.var.as_deref(), "var")?);
            let fiber = parse_var(f.fiber_var.as_deref(), "fiber_var")?.unwrap_or('x');
            match resolve_ctx(o, f.p, f.abs_prec)? {
                Ctx::Rational => run_integrate::<Rational>(&f, ring, &(), base, fiber, &section, trunc),
                Ctx::PAdic(ctx) => run_integrate::<PAdic>(&f, ring, &ctx, base, fiber, &section, trunc),
            }
        }
        Command::ParseCheck { input, kind } => {
            let text = expression(input, stdin)?;
            match resolve_ctx(o, None, None)? {
                Ctx::Rational => run_parse_check::<Rational>(&text, &(), *kind, var, ring),
                Ctx::PAdic(ctx) => run_parse_check::<PAdic>(&text, &ctx, *kind, var, ring),
            }
        }
    }
}

fn run_dlog<C: Coeff>(
    text: &str,
    ctx: &C::Ctx,
    var: Option<char>,
    ring: Option<RingLabel>,
    trunc: Option<i64>,
) -> CliResult<Rendered> {
    let mut var = var;
    let s = cut(parse_series::<C>(text, ctx, &mut var, ring)?, trunc);
    let var = var.unwrap_or('t');
    let w = dlog(&s)?;
    Ok(Rendered {
        text: form_text(&w, var),
        json: series_json(w.coefficient()),
    })
}

fn run_residue<C: Coeff>(text: &str, ctx: &C::Ctx, var: Option<char>, ring: Option<RingLabel>) -> CliResult<Rendered> {
    let mut var = var;
    let form = parse_form::<C>(text, ctx, &mut var, ring)?;
    let r = residue(&form)?;
    Ok(Rendered {
        text: r.to_string(),
        json: json!({ "residue": r.to_string(), "p": C::prime(ctx) }),
    })
}

fn run_trivialize<C: Coeff>(
    module: &FramedNablaModule<C>,
    var: char,
    trunc: Option<i64>,
    normalize: bool,
) -> CliResult<Rendered> {
    let t = trunc.unwrap_or(module.connection().trunc_order() + 1);
    if normalize {
        let inv = invariant(module, t)?;
        let mut out = series_matrix_out(inv.matrix.entries(), var);
        out.json["normalized"] = json!(inv.normalized);
        Ok(out)
    } else {
        Ok(series_matrix_out(trivialize(module, t)?.entries(), var))
    }
}

fn run_integrate<C: Coeff>(
    f: &crate::files::FamilyFile,
    ring: RingLabel,
    ctx: &C::Ctx,
    base: Option<char>,
    fiber: char,
    section: &str,
    trunc: Option<i64>,
) -> CliResult<Rendered> {
    let (fam, base) = build_family::<C>(f, ring, ctx, base, fiber)?;
    let mut var = Some(base);
    let v = cut(parse_series::<C>(section, ctx, &mut var, None)?, trunc).relabel(fam.ring())?;
    let inv = line_integral(&fam, &v)?;
    let mut out = series_matrix_out(inv.matrix.entries(), base);
    out.json["normalized"] = json!(inv.normalized);
    Ok(out)
}

fn run_parse_check<C: Coeff>(
    text: &str,
    ctx: &C::Ctx,
    kind: Kind,
    var: Option<char>,
    ring: Option<RingLabel>,
) -> CliResult<Rendered> {
    let mut var = var;
    Ok(match kind {
        Kind::Series => {
            let s = parse_series::<C>(text, ctx, &mut var, ring)?;
            series_out(&s, var.unwrap_or('t'))
        }
        Kind::Form => {
            let f = parse_form::<C>(text, ctx, &mut var, ring)?;
            Rendered {
                text: form_text(&f, var.unwrap_or('t')),
                json: series_json(f.coefficient()),
            }
        }
        Kind::Biseries => {
            let s = parse_biseries::<C>(text, ctx, &mut var, 'x', ring)?;
            Rendered {
                text: biseries_text(&s, var.unwrap_or('u'), 'x'),
                json: biseries_json(&s),
            }
        }
        Kind::Matrix => {
            let m = parse_series_matrix::<C>(text, ctx, &mut var, ring)?;
            series_matrix_out(&m, var.unwrap_or('t'))
        }
        Kind::Bimatrix => {
            let m = parse_biseries_matrix::<C>(text, ctx, &mut var, 'x', ring)?;
            biseries_matrix_out(&m, var.unwrap_or('u'), 'x')
        }
    })
}
