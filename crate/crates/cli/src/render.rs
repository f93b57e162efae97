//! Text and JSON output. The text forms are read back by [`crate::syntax`].

use num_traits::{One, Signed};
use serde_json::{json, Value};

use lineint::scheme::BiSeries;
use lineint::series::valuation_profile;
use lineint::{DifferentialForm, Matrix, PAdic, PadicCtx, Rational, Scalar, TruncatedSeries};

/// Coefficient printing shared by the series printers.
pub trait RenderScalar: Scalar {
    /// Whether a zero coefficient must be written to keep its precision.
    fn zero_is_visible(&self, ctx: &Self::Ctx) -> bool;

    /// Appends ` + c*m` (or the leading `c*m` when `first`).
    fn push_term(&self, out: &mut String, mono: &str, first: bool, ctx: &Self::Ctx);

    fn prime(ctx: &Self::Ctx) -> Option<u64>;

    /// `(degree, valuation)` pairs attached to structured output.
    fn profile(s: &TruncatedSeries<Self>) -> Option<Vec<(i64, i64)>>;
}

fn join(out: &mut String, first: bool, negative: bool) {
    match (first, negative) {
        (true, true) => out.push('-'),
        (true, false) => {}
        (false, true) => out.push_str(" - "),
        (false, false) => out.push_str(" + "),
    }
}

impl RenderScalar for Rational {
    fn zero_is_visible(&self, _: &()) -> bool {
        false
    }

    fn push_term(&self, out: &mut String, mono: &str, first: bool, _: &()) {
        join(out, first, self.is_negative());
        let a = self.abs();
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(mono);
        } else {
            out.push_str(&format!("{a}*{mono}"));
        }
    }

    fn prime(_: &()) -> Option<u64> {
        None
    }

    fn profile(_: &TruncatedSeries<Self>) -> Option<Vec<(i64, i64)>> {
        None
    }
}

impl RenderScalar for PAdic {
    fn zero_is_visible(&self, ctx: &PadicCtx) -> bool {
        self.is_zero() && self.abs_prec() != ctx.prec()
    }

    fn push_term(&self, out: &mut String, mono: &str, first: bool, ctx: &PadicCtx) {
        join(out, first, false);
        let c = if self.is_zero() && self.abs_prec() == ctx.prec() {
            "0".to_string()
        } else {
            format!("({self})")
        };
        out.push_str(&c);
        if !mono.is_empty() {
            out.push('*');
            out.push_str(mono);
        }
    }

    fn prime(ctx: &PadicCtx) -> Option<u64> {
        Some(ctx.prime())
    }

    fn profile(s: &TruncatedSeries<Self>) -> Option<Vec<(i64, i64)>> {
        Some(valuation_profile(s))
    }
}

fn power(var: char, e: i64) -> String {
    match e {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{e}"),
    }
}

/// `c0 + c1*t + ... + O(t^T)`; a zero series prints as `0 + O(t^T)`.
pub fn series_text<C: RenderScalar>(s: &TruncatedSeries<C>, var: char) -> String {
    let ctx = s.ctx();
    let (min, trunc) = (s.min_degree(), s.trunc_order());
    let marker = format!("O({var}^{trunc})");
    if min == trunc && trunc <= 0 {
        return marker;
    }
    let mut out = String::new();
    let mut first = true;
    for (d, c) in s.terms() {
        // the lowest stored degree fixes the window when it is negative
        let anchor = d == min && min < 0;
        if c.is_zero() && !anchor && !c.zero_is_visible(ctx) {
            continue;
        }
        c.push_term(&mut out, &power(var, d), first, ctx);
        first = false;
    }
    if first {
        out.push('0');
    }
    out.push_str(" + ");
    out.push_str(&marker);
    out
}

pub fn form_text<C: RenderScalar>(f: &DifferentialForm<C>, var: char) -> String {
    format!("({}) d{var}", series_text(f.coefficient(), var))
}

pub fn biseries_text<C: RenderScalar>(s: &BiSeries<C>, base: char, fiber: char) -> String {
    let marker = format!("O({base}^{}, {fiber}^{})", s.trunc_u(), s.trunc_x());
    if s.trunc_u() == 0 || s.trunc_x() == 0 {
        return marker;
    }
    let ctx = s.ctx();
    let mut out = String::new();
    let mut first = true;
    for (i, j, c) in s.terms() {
        if c.is_zero() && !c.zero_is_visible(ctx) {
            continue;
        }
        let mono = match (power(base, i), power(fiber, j)) {
            (a, b) if a.is_empty() => b,
            (a, b) if b.is_empty() => a,
            (a, b) => format!("{a}*{b}"),
        };
        c.push_term(&mut out, &mono, first, ctx);
        first = false;
    }
    if first {
        out.push('0');
    }
    out.push_str(" + ");
    out.push_str(&marker);
    out
}

/// One `[i,j] entry` line per entry, 1-based, row-major.
pub fn matrix_text<T>(m: &Matrix<T>, entry: impl Fn(&T) -> String) -> String {
    m.iter()
        .map(|(i, j, x)| format!("[{},{}] {}", i + 1, j + 1, entry(x)))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn series_json<C: RenderScalar>(s: &TruncatedSeries<C>) -> Value {
    let mut v = json!({
        "window": [s.min_degree(), s.trunc_order()],
        "coeffs": s.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "ring": s.ring().name(),
        "p": C::prime(s.ctx()),
    });
    if let Some(profile) = C::profile(s) {
        v["profile"] = json!(profile.into_iter().map(|(d, k)| [d, k]).collect::<Vec<_>>());
    }
    v
}

pub fn biseries_json<C: RenderScalar>(s: &BiSeries<C>) -> Value {
    let rows: Vec<Vec<String>> = (0..s.trunc_u())
        .map(|i| (0..s.trunc_x()).map(|j| s.coeff(i, j).expect("in window").to_string()).collect())
        .collect();
    json!({
        "window": [s.trunc_u(), s.trunc_x()],
        "coeffs": rows,
        "ring": s.ring().name(),
        "p": C::prime(s.ctx()),
    })
}

pub fn matrix_json<T>(m: &Matrix<T>, entry: impl Fn(&T) -> Value) -> Value {
    let rows: Vec<Vec<Value>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(&entry).collect())
        .collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": rows })
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use lineint::RingLabel;

    fn rat(min: i64, cs: &[(i64, i64)]) -> TruncatedSeries<Rational> {
        let ring = if min < 0 { RingLabel::FormalLaurent } else { RingLabel::FormalChar0 };
        TruncatedSeries::new(
            ring,
            (),
            min,
            cs.iter().map(|&(n, d)| Rational::new(BigInt::from(n), BigInt::from(d))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rational_text() {
        let s = rat(0, &[(0, 1), (-1, 1), (-1, 2), (0, 1), (3, 1)]);
        assert_eq!(series_text(&s, 't'), "-t - 1/2*t^2 + 3*t^4 + O(t^5)");
        assert_eq!(series_text(&rat(0, &[(0, 1), (0, 1)]), 't'), "0 + O(t^2)");
        assert_eq!(series_text(&rat(-2, &[(0, 1), (1, 1), (5, 1)]), 'u'), "0*u^-2 + u^-1 + 5 + O(u^1)");
        assert_eq!(series_text(&rat(0, &[]), 't'), "O(t^0)");
    }

    #[test]
    fn padic_text() {
        let ctx = PadicCtx::new(2, 6).unwrap();
        let s = TruncatedSeries::new(
            RingLabel::GammaPlus,
            ctx,
            0,
            vec![PAdic::from_int(2, 3, 6), PAdic::zero(2, 6), PAdic::zero(2, 3), PAdic::from_int(2, -4, 6)],
        )
        .unwrap();
        assert_eq!(
            series_text(&s, 'u'),
            "(2^0*3 (mod 2^6)) + (0 (mod 2^3))*u^2 + (2^2*15 (mod 2^6))*u^3 + O(u^4)"
        );
        let j = series_json(&s);
        assert_eq!(j["p"], 2);
        assert_eq!(j["profile"], json!([[0, 0], [3, 2]]));
    }

    #[test]
    fn matrix_lines() {
        let m = Matrix::from_fn(2, 2, |i, j| (i + j) as i64);
        assert_eq!(matrix_text(&m, |x| x.to_string()), "[1,1] 0\n[1,2] 1\n[2,1] 1\n[2,2] 2");
    }
}
