//! Tokenizer and parsers for the textual series syntax.
//!
//! ```text
//! term   ::= coeff ['*'] mono | coeff | mono
//! mono   ::= var ['^' int] ('*' var ['^' int])*
//! coeff  ::= int ['/' int] | '(' p '^' int '*' unit '(' 'mod' p '^' int ')' ')' | '(' '0' '(' 'mod' p '^' int ')' ')'
//! series ::= ['-'] term (('+' | '-') term)* '+' 'O(' var '^' int [',' var '^' int] ')'
//! ```

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use lineint::coeff::CoeffKind;
use lineint::scheme::BiSeries;
use lineint::{DifferentialForm, Matrix, PAdic, PadicCtx, Rational, RingLabel, Scalar, TruncatedSeries};

use crate::error::{CliError, CliResult};

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn syntax(pos: Pos, message: impl Into<String>) -> CliError {
    CliError::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

/// Splits `text` into tokens; the returned position is the end of input.
pub fn tokenize(text: &str) -> CliResult<(Vec<Token>, Pos)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                digits.push(d);
                chars.next();
                column += 1;
            }
            let n = digits.parse::<BigInt>().expect("ascii digits");
            out.push(Token { tok: Tok::Num(n), pos });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut word = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_alphabetic() {
                    break;
                }
                word.push(d);
                chars.next();
                column += 1;
            }
            out.push(Token {
                tok: Tok::Ident(word),
                pos,
            });
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            other => return Err(syntax(pos, format!("unexpected character {other:?}"))),
        };
        chars.next();
        column += 1;
        out.push(Token { tok, pos });
    }
    Ok((out, Pos { line, column }))
}

/// Largest number of coefficients a parsed window may hold.
pub const MAX_WINDOW: i64 = 1 << 20;

/// Largest absolute precision accepted for a p-adic literal.
pub const MAX_PREC: i64 = 1 << 16;

/// A coefficient as written.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Rational(Rational),
    PAdic {
        prime: BigInt,
        /// `None` for a written zero.
        valuation: Option<i64>,
        unit: BigInt,
        prec: i64,
    },
}

#[derive(Debug, Clone)]
struct RawTerm {
    negative: bool,
    coeff: Option<(Literal, Pos)>,
    mono: Vec<(char, i64, Pos)>,
    pos: Pos,
}

#[derive(Debug, Clone)]
struct RawSeries {
    terms: Vec<RawTerm>,
    marker: Option<(Vec<(char, i64, Pos)>, Pos)>,
}

struct Cursor<'a> {
    toks: &'a [Token],
    i: usize,
    end: Pos,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Token], end: Pos) -> Self {
        Cursor { toks, i: 0, end }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Tok> {
        self.toks.get(self.i + k).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map_or(self.end, |t| t.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.i);
        self.i += 1;
        t
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(t) => show(t),
        }
    }

    fn expect(&mut self, want: &Tok) -> CliResult<Pos> {
        if self.peek() == Some(want) {
            let pos = self.pos();
            self.i += 1;
            Ok(pos)
        } else {
            Err(syntax(self.pos(), format!("expected {}, found {}", show(want), self.describe())))
        }
    }

    fn num(&mut self) -> CliResult<(BigInt, Pos)> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let pos = self.pos();
                self.i += 1;
                Ok((n.clone(), pos))
            }
            _ => Err(syntax(self.pos(), format!("expected a number, found {}", self.describe()))),
        }
    }

    fn int(&mut self) -> CliResult<i64> {
        let pos = self.pos();
        let negative = match self.peek() {
            Some(Tok::Minus) => {
                self.i += 1;
                true
            }
            Some(Tok::Plus) => {
                self.i += 1;
                false
            }
            _ => false,
        };
        let (n, _) = self.num()?;
        let n = if negative { -n } else { n };
        n.to_i64().ok_or_else(|| syntax(pos, format!("exponent {n} is out of range")))
    }

    fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }
}

fn show(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Ident(s) => format!("{s:?}"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBracket => "'['".into(),
        Tok::RBracket => "']'".into(),
        Tok::Comma => "','".into(),
    }
}

fn var_of(t: Option<&Tok>) -> Option<char> {
    match t {
        Some(Tok::Ident(s)) if matches!(s.as_str(), "t" | "u" | "x") => s.chars().next(),
        _ => None,
    }
}

fn is_marker(c: &Cursor) -> bool {
    matches!(c.peek(), Some(Tok::Ident(s)) if s == "O") && c.peek_at(1) == Some(&Tok::LParen)
}

fn parse_raw(c: &mut Cursor) -> CliResult<RawSeries> {
    let mut terms = Vec::new();
    if is_marker(c) {
        let marker = parse_marker(c)?;
        finish(c)?;
        return Ok(RawSeries {
            terms,
            marker: Some(marker),
        });
    }
    let mut negative = match c.peek() {
        Some(Tok::Minus) => {
            c.bump();
            true
        }
        _ => false,
    };
    loop {
        terms.push(parse_term(c, negative)?);
        match c.peek() {
            None => return Ok(RawSeries { terms, marker: None }),
            Some(Tok::Plus) => {
                c.bump();
                if is_marker(c) {
                    let marker = parse_marker(c)?;
                    finish(c)?;
                    return Ok(RawSeries {
                        terms,
                        marker: Some(marker),
                    });
                }
                negative = false;
            }
            Some(Tok::Minus) => {
                c.bump();
                negative = true;
            }
            Some(_) => return Err(syntax(c.pos(), format!("expected '+' or '-', found {}", c.describe()))),
        }
    }
}

fn finish(c: &Cursor) -> CliResult<()> {
    if c.at_end() {
        Ok(())
    } else {
        Err(syntax(c.pos(), format!("unexpected {} after the O(...) marker", c.describe())))
    }
}

fn parse_marker(c: &mut Cursor) -> CliResult<(Vec<(char, i64, Pos)>, Pos)> {
    let pos = c.pos();
    c.bump();
    c.expect(&Tok::LParen)?;
    let mut vars = vec![parse_varpow(c)?];
    while c.peek() == Some(&Tok::Comma) {
        c.bump();
        vars.push(parse_varpow(c)?);
    }
    c.expect(&Tok::RParen)?;
    Ok((vars, pos))
}

fn parse_varpow(c: &mut Cursor) -> CliResult<(char, i64, Pos)> {
    let pos = c.pos();
    let v = var_of(c.peek())
        .ok_or_else(|| syntax(pos, format!("expected a variable t, u or x, found {}", c.describe())))?;
    c.bump();
    let e = if c.peek() == Some(&Tok::Caret) {
        c.bump();
        c.int()?
    } else {
        1
    };
    Ok((v, e, pos))
}

fn parse_mono(c: &mut Cursor) -> CliResult<Vec<(char, i64, Pos)>> {
    let mut mono = vec![parse_varpow(c)?];
    while c.peek() == Some(&Tok::Star) {
        c.bump();
        mono.push(parse_varpow(c)?);
    }
    Ok(mono)
}

fn parse_term(c: &mut Cursor, negative: bool) -> CliResult<RawTerm> {
    let pos = c.pos();
    match c.peek() {
        Some(Tok::Num(_)) | Some(Tok::LParen) => {
            let lit_pos = c.pos();
            let lit = parse_coeff(c)?;
            let mono = if c.peek() == Some(&Tok::Star) {
                c.bump();
                parse_mono(c)?
            } else if var_of(c.peek()).is_some() {
                parse_mono(c)?
            } else {
                Vec::new()
            };
            Ok(RawTerm {
                negative,
                coeff: Some((lit, lit_pos)),
                mono,
                pos,
            })
        }
        _ if var_of(c.peek()).is_some() => Ok(RawTerm {
            negative,
            coeff: None,
            mono: parse_mono(c)?,
            pos,
        }),
        _ => Err(syntax(pos, format!("expected a term, found {}", c.describe()))),
    }
}

fn parse_rational(c: &mut Cursor) -> CliResult<Rational> {
    let (n, _) = c.num()?;
    if c.peek() == Some(&Tok::Slash) {
        c.bump();
        let (d, pos) = c.num()?;
        if d.is_zero() {
            return Err(syntax(pos, "zero denominator"));
        }
        Ok(Rational::new(n, d))
    } else {
        Ok(Rational::from_integer(n))
    }
}

fn parse_coeff(c: &mut Cursor) -> CliResult<Literal> {
    if c.peek() != Some(&Tok::LParen) {
        return Ok(Literal::Rational(parse_rational(c)?));
    }
    c.bump();
    let negative = if c.peek() == Some(&Tok::Minus) {
        c.bump();
        true
    } else {
        false
    };
    let lit = match (c.peek(), c.peek_at(1)) {
        (Some(Tok::Num(_)), Some(Tok::Caret)) if !negative => {
            let (prime, _) = c.num()?;
            c.bump();
            let vpos = c.pos();
            let valuation = c.int()?;
            if valuation.abs() > MAX_PREC {
                return Err(syntax(vpos, format!("valuation {valuation} exceeds the supported {MAX_PREC}")));
            }
            c.expect(&Tok::Star)?;
            let (unit, _) = c.num()?;
            let (_, prec) = parse_mod(c, Some(&prime))?;
            Literal::PAdic {
                prime,
                valuation: Some(valuation),
                unit,
                prec,
            }
        }
        (Some(Tok::Num(n)), Some(Tok::LParen)) if !negative => {
            let pos = c.pos();
            if !n.is_zero() {
                return Err(syntax(pos, "a p-adic literal is p^v*u (mod p^N) or 0 (mod p^N)"));
            }
            c.bump();
            let (prime, prec) = parse_mod(c, None)?;
            Literal::PAdic {
                prime,
                valuation: None,
                unit: BigInt::zero(),
                prec,
            }
        }
        _ => {
            let q = parse_rational(c)?;
            Literal::Rational(if negative { -q } else { q })
        }
    };
    c.expect(&Tok::RParen)?;
    Ok(lit)
}

/// `'(' 'mod' p '^' N ')'`, returning `(p, N)`.
fn parse_mod(c: &mut Cursor, prime: Option<&BigInt>) -> CliResult<(BigInt, i64)> {
    c.expect(&Tok::LParen)?;
    match c.peek() {
        Some(Tok::Ident(s)) if s == "mod" => {
            c.bump();
        }
        _ => return Err(syntax(c.pos(), format!("expected \"mod\", found {}", c.describe()))),
    }
    let (p, pos) = c.num()?;
    if let Some(prime) = prime.filter(|&q| q != &p) {
        return Err(syntax(pos, format!("modulus {p}^N does not match the prime {prime}")));
    }
    c.expect(&Tok::Caret)?;
    let npos = c.pos();
    let n = c.int()?;
    if n.abs() > MAX_PREC {
        return Err(syntax(npos, format!("precision {n} exceeds the supported {MAX_PREC}")));
    }
    c.expect(&Tok::RParen)?;
    Ok((p, n))
}

/// Coefficient types the parser can produce.
pub trait CliScalar: Scalar {
    fn from_literal(lit: &Literal, ctx: &Self::Ctx) -> Result<Self, String>;

    /// Ring of a parsed series when none is given.
    fn infer_ring(laurent: bool, integral: bool) -> RingLabel;

    /// Ring of a parsed two-variable series when none is given.
    fn infer_bi_ring(integral: bool) -> RingLabel {
        Self::infer_ring(false, integral)
    }
}

impl CliScalar for Rational {
    fn from_literal(lit: &Literal, _: &()) -> Result<Self, String> {
        match lit {
            Literal::Rational(q) => Ok(q.clone()),
            Literal::PAdic { .. } => Err("p-adic literal in rational mode".into()),
        }
    }

    fn infer_ring(laurent: bool, _: bool) -> RingLabel {
        if laurent {
            RingLabel::FormalLaurent
        } else {
            RingLabel::FormalChar0
        }
    }
}

impl CliScalar for PAdic {
    fn from_literal(lit: &Literal, ctx: &PadicCtx) -> Result<Self, String> {
        match lit {
            Literal::Rational(q) => Ok(PAdic::from_rational(ctx, q)),
            Literal::PAdic {
                prime,
                valuation,
                unit,
                prec,
            } => {
                if *prime != BigInt::from(ctx.prime()) {
                    return Err(format!("literal is {prime}-adic, the working prime is {}", ctx.prime()));
                }
                match valuation {
                    None => Ok(PAdic::zero(ctx.prime(), *prec)),
                    Some(v) => PAdic::new(ctx.prime(), *v, unit.clone(), *prec).map_err(|e| e.to_string()),
                }
            }
        }
    }

    fn infer_ring(laurent: bool, integral: bool) -> RingLabel {
        match (laurent, integral) {
            (true, _) => RingLabel::E,
            (false, true) => RingLabel::GammaPlus,
            (false, false) => RingLabel::EPlus,
        }
    }
}

/// Checks that a ring label fits the coefficient type.
pub fn check_ring<C: Scalar>(ring: RingLabel) -> CliResult<()> {
    if ring.coeff_kind() == C::KIND {
        Ok(())
    } else {
        let mode = match C::KIND {
            CoeffKind::Rational => "rational",
            CoeffKind::PAdic => "p-adic",
        };
        Err(CliError::Usage(format!("ring {ring} does not take {mode} coefficients")))
    }
}

fn literal_value<C: CliScalar>(term: &RawTerm, ctx: &C::Ctx) -> CliResult<C> {
    let c = match &term.coeff {
        None => C::one(ctx),
        Some((lit, pos)) => C::from_literal(lit, ctx).map_err(|m| syntax(*pos, m))?,
    };
    Ok(if term.negative { c.negated() } else { c })
}

fn unify_var(slot: &mut Option<char>, v: char, pos: Pos) -> CliResult<()> {
    match slot {
        Some(w) if *w != v => Err(syntax(pos, format!("expected a series in {w}, found {v}"))),
        _ => {
            *slot = Some(v);
            Ok(())
        }
    }
}

/// Parses a series from tokens; `var` is filled in with the variable used.
fn series_from_tokens<C: CliScalar>(
    toks: &[Token],
    end: Pos,
    ctx: &C::Ctx,
    var: &mut Option<char>,
    ring: Option<RingLabel>,
) -> CliResult<TruncatedSeries<C>> {
    if let Some(r) = ring {
        check_ring::<C>(r)?;
    }
    let mut cur = Cursor::new(toks, end);
    let raw = parse_raw(&mut cur)?;
    let mut terms = Vec::with_capacity(raw.terms.len());
    for t in &raw.terms {
        let mut degree: i64 = 0;
        for &(v, e, pos) in &t.mono {
            unify_var(var, v, pos)?;
            degree = degree
                .checked_add(e)
                .ok_or_else(|| syntax(pos, "exponent is out of range"))?;
        }
        terms.push((degree, literal_value::<C>(t, ctx)?, t.pos));
    }
    let Some((marker, mpos)) = raw.marker else {
        return Err(CliError::MissingOMarker(format!(
            "the series must end in + O({}^k)",
            var.unwrap_or('t')
        )));
    };
    if marker.len() != 1 {
        return Err(syntax(mpos, "a one-variable series takes O(var^k)"));
    }
    let (v, trunc, vpos) = marker[0];
    unify_var(var, v, vpos)?;
    let laurent = trunc < 0 || terms.iter().any(|(d, _, _)| *d < 0);
    let integral = terms.iter().all(|(_, c, _)| c.is_integral());
    let ring = ring.unwrap_or_else(|| C::infer_ring(laurent, integral));
    let v = var.expect("set by the marker");
    for (d, _, pos) in &terms {
        if *d >= trunc {
            return Err(CliError::ExponentOutOfWindow(format!(
                "{v}^{d} at line {}, column {} is not below O({v}^{trunc})",
                pos.line, pos.column
            )));
        }
        if *d < 0 && ring.nonnegative_only() {
            return Err(CliError::ExponentOutOfWindow(format!(
                "{v}^{d} at line {}, column {} has negative degree in {ring}",
                pos.line, pos.column
            )));
        }
    }
    if trunc < 0 && ring.nonnegative_only() {
        return Err(CliError::ExponentOutOfWindow(format!("O({v}^{trunc}) lies below degree 0 in {ring}")));
    }
    let min = terms.iter().map(|(d, _, _)| *d).min().unwrap_or(0).min(0).min(trunc);
    if (trunc as i128 - min as i128) > MAX_WINDOW as i128 {
        return Err(CliError::ExponentOutOfWindow(format!(
            "the window [{min}, {trunc}) holds more than {MAX_WINDOW} coefficients"
        )));
    }
    let mut slots: Vec<Option<C>> = vec![None; (trunc - min) as usize];
    for (d, c, _) in terms {
        let slot = &mut slots[(d - min) as usize];
        *slot = Some(match slot.take() {
            None => c,
            Some(prev) => prev.plus(&c),
        });
    }
    let coeffs = slots.into_iter().map(|c| c.unwrap_or_else(|| C::zero(ctx))).collect();
    Ok(TruncatedSeries::new(ring, ctx.clone(), min, coeffs)?)
}

/// Strips a `( ... ) dv` wrapper, returning the inner tokens and `v`.
fn strip_differential(toks: &[Token]) -> CliResult<Option<(&[Token], char, Pos)>> {
    let n = toks.len();
    if n < 3 {
        return Ok(None);
    }
    let (last, pos) = match &toks[n - 1].tok {
        Tok::Ident(s) if s.len() == 2 && s.starts_with('d') => (s, toks[n - 1].pos),
        _ => return Ok(None),
    };
    let v = last.chars().nth(1).expect("two characters");
    if !matches!(v, 't' | 'u' | 'x') {
        return Err(syntax(pos, format!("unknown differential {last}")));
    }
    if toks[0].tok != Tok::LParen || toks[n - 2].tok != Tok::RParen {
        return Err(syntax(toks[0].pos, format!("write a form as ( series ) {last}")));
    }
    let mut depth = 0i64;
    for (k, t) in toks[..n - 1].iter().enumerate() {
        match t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth -= 1,
            _ => {}
        }
        if depth == 0 && k < n - 2 {
            return Err(syntax(toks[0].pos, format!("write a form as ( series ) {last}")));
        }
    }
    Ok(Some((&toks[1..n - 2], v, pos)))
}

fn form_from_tokens<C: CliScalar>(
    toks: &[Token],
    end: Pos,
    ctx: &C::Ctx,
    var: &mut Option<char>,
    ring: Option<RingLabel>,
) -> CliResult<DifferentialForm<C>> {
    match strip_differential(toks)? {
        Some((inner, v, pos)) => {
            unify_var(var, v, pos)?;
            let close = toks[toks.len() - 2].pos;
            Ok(DifferentialForm::new(series_from_tokens(inner, close, ctx, var, ring)?))
        }
        None => Ok(DifferentialForm::new(series_from_tokens(toks, end, ctx, var, ring)?)),
    }
}

/// Parses `text` as a one-variable series. A preset `var` must match the
/// variable written; otherwise it is set to the first one seen.
pub fn parse_series<C: CliScalar>(
    text: &str,
    ctx: &C::Ctx,
    var: &mut Option<char>,
    ring: Option<RingLabel>,
) -> CliResult<TruncatedSeries<C>> {
    let (toks, end) = tokenize(text)?;
    series_from_tokens(&toks, end, ctx, var, ring)
}

/// Parses `( series ) dv`, or a bare series read as the coefficient of `dv`.
pub fn parse_form<C: CliScalar>(
    text: &str,
    ctx: &C::Ctx,
    var: &mut Option<char>,
    ring: Option<RingLabel>,
) -> CliResult<DifferentialForm<C>> {
    let (toks, end) = tokenize(text)?;
    form_from_tokens(&toks, end, ctx, var, ring)
}

fn bi_from_tokens<C: CliScalar>(
    toks: &[Token],
    end: Pos,
    ctx: &C::Ctx,
    base: &mut Option<char>,
    fiber: char,
    ring: Option<RingLabel>,
) -> CliResult<BiSeries<C>> {
    if let Some(r) = ring {
        check_ring::<C>(r)?;
    }
    let mut cur = Cursor::new(toks, end);
    let raw = parse_raw(&mut cur)?;
    let mut terms = Vec::with_capacity(raw.terms.len());
    let place = |v: char, pos: Pos, base: &mut Option<char>| -> CliResult<bool> {
        if v == fiber {
            Ok(false)
        } else {
            unify_var(base, v, pos)?;
            Ok(true)
        }
    };
    for t in &raw.terms {
        let (mut i, mut j): (i64, i64) = (0, 0);
        for &(v, e, pos) in &t.mono {
            let slot = if place(v, pos, base)? { &mut i } else { &mut j };
            *slot = slot
                .checked_add(e)
                .ok_or_else(|| syntax(pos, "exponent is out of range"))?;
        }
        terms.push((i, j, literal_value::<C>(t, ctx)?, t.pos));
    }
    let Some((marker, mpos)) = raw.marker else {
        return Err(CliError::MissingOMarker(format!(
            "the series must end in + O({}^a, {fiber}^b)",
            base.unwrap_or('u')
        )));
    };
    let (mut tu, mut tx) = (None, None);
    for &(v, e, pos) in &marker {
        let slot = if place(v, pos, base)? { &mut tu } else { &mut tx };
        if slot.replace(e).is_some() {
            return Err(syntax(pos, format!("{v} appears twice in the O(...) marker")));
        }
    }
    let (Some(tu), Some(tx)) = (tu, tx) else {
        return Err(syntax(mpos, format!("a two-variable series takes O(u^a, {fiber}^b)")));
    };
    let b = base.expect("set by the marker");
    for (i, j, _, pos) in &terms {
        if *i < 0 || *j < 0 || *i >= tu || *j >= tx {
            return Err(CliError::ExponentOutOfWindow(format!(
                "{b}^{i}*{fiber}^{j} at line {}, column {} lies outside O({b}^{tu}, {fiber}^{tx})",
                pos.line, pos.column
            )));
        }
    }
    if tu < 0 || tx < 0 {
        return Err(CliError::ExponentOutOfWindow(format!(
            "O({b}^{tu}, {fiber}^{tx}) has a negative bound"
        )));
    }
    if tu as i128 * tx as i128 > MAX_WINDOW as i128 {
        return Err(CliError::ExponentOutOfWindow(format!(
            "O({b}^{tu}, {fiber}^{tx}) holds more than {MAX_WINDOW} coefficients"
        )));
    }
    let integral = terms.iter().all(|(_, _, c, _)| c.is_integral());
    let ring = ring.unwrap_or_else(|| C::infer_bi_ring(integral));
    let mut slots: Vec<Option<C>> = vec![None; (tu * tx) as usize];
    for (i, j, c, _) in terms {
        let slot = &mut slots[(i * tx + j) as usize];
        *slot = Some(match slot.take() {
            None => c,
            Some(prev) => prev.plus(&c),
        });
    }
    let coeffs = slots.into_iter().map(|c| c.unwrap_or_else(|| C::zero(ctx))).collect();
    Ok(BiSeries::new(ring, ctx.clone(), tu, tx, coeffs)?)
}

/// Parses `text` as a series in a base variable and the fiber variable.
pub fn parse_biseries<C: CliScalar>(
    text: &str,
    ctx: &C::Ctx,
    base: &mut Option<char>,
    fiber: char,
    ring: Option<RingLabel>,
) -> CliResult<BiSeries<C>> {
    let (toks, end) = tokenize(text)?;
    bi_from_tokens(&toks, end, ctx, base, fiber, ring)
}

/// Parses lines `[i,j] entry` (1-based) into a matrix; every entry must appear once.
pub fn parse_matrix<T>(
    text: &str,
    mut entry: impl FnMut(&[Token], Pos) -> CliResult<T>,
) -> CliResult<Matrix<T>> {
    let (toks, end) = tokenize(text)?;
    let mut lines: Vec<&[Token]> = Vec::new();
    let mut start = 0;
    for k in 1..=toks.len() {
        if k == toks.len() || toks[k].pos.line != toks[start].pos.line {
            lines.push(&toks[start..k]);
            start = k;
        }
    }
    let mut cells: Vec<(usize, usize, T, Pos)> = Vec::new();
    for (n, line) in lines.iter().enumerate() {
        let line_end = lines.get(n + 1).map_or(end, |_| Pos {
            line: line[0].pos.line,
            column: line.last().map_or(1, |t| t.pos.column + 1),
        });
        let mut c = Cursor::new(line, line_end);
        let pos = c.expect(&Tok::LBracket)?;
        let i = index(&mut c)?;
        c.expect(&Tok::Comma)?;
        let j = index(&mut c)?;
        c.expect(&Tok::RBracket)?;
        let rest = &line[c.i..];
        if rest.is_empty() {
            return Err(syntax(line_end, format!("entry [{i},{j}] is empty")));
        }
        let value = entry(rest, line_end)?;
        if cells.iter().any(|(a, b, _, _)| (*a, *b) == (i, j)) {
            return Err(syntax(pos, format!("entry [{i},{j}] is given twice")));
        }
        cells.push((i, j, value, pos));
    }
    let rows = cells.iter().map(|c| c.0).max().unwrap_or(0);
    let cols = cells.iter().map(|c| c.1).max().unwrap_or(0);
    if rows == 0 {
        return Err(syntax(end, "expected matrix entries [i,j] ..."));
    }
    if cells.len() != rows * cols {
        let (i, j) = (1..=rows)
            .flat_map(|i| (1..=cols).map(move |j| (i, j)))
            .find(|&(i, j)| !cells.iter().any(|c| (c.0, c.1) == (i, j)))
            .expect("some entry is missing");
        return Err(syntax(end, format!("entry [{i},{j}] of the {rows}x{cols} matrix is missing")));
    }
    cells.sort_by_key(|c| (c.0, c.1));
    let mut it = cells.into_iter().map(|c| c.2);
    Ok(Matrix::from_fn(rows, cols, |_, _| it.next().expect("counted")))
}

fn index(c: &mut Cursor) -> CliResult<usize> {
    let (n, pos) = c.num()?;
    match n.to_usize() {
        Some(k) if k >= 1 => Ok(k),
        _ => Err(syntax(pos, format!("matrix index {n} must be a positive integer"))),
    }
}

/// A matrix of one-variable series, sharing one variable.
pub fn parse_series_matrix<C: CliScalar>(
    text: &str,
    ctx: &C::Ctx,
    var: &mut Option<char>,
    ring: Option<RingLabel>,
) -> CliResult<Matrix<TruncatedSeries<C>>> {
    parse_matrix(text, |toks, end| series_from_tokens(toks, end, ctx, var, ring))
}

/// A matrix of two-variable series.
pub fn parse_biseries_matrix<C: CliScalar>(
    text: &str,
    ctx: &C::Ctx,
    base: &mut Option<char>,
    fiber: char,
    ring: Option<RingLabel>,
) -> CliResult<Matrix<BiSeries<C>>> {
    parse_matrix(text, |toks, end| bi_from_tokens(toks, end, ctx, base, fiber, ring))
}
