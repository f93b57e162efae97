use crate::coeff::{CoeffKind, PAdic, Rational, Scalar};
use crate::error::{Error, Result};

use super::calculus::{antiderive, dlog};
use super::{RingLabel, TruncatedSeries};

/// Writes a unit of a power-series ring as `c (1 - w)` with `w(0) = 0`.
pub fn unit_decompose<C: Scalar>(a: &TruncatedSeries<C>) -> Result<(C, TruncatedSeries<C>)> {
    if !a.ring().nonnegative_only() {
        return Err(Error::UnsupportedRing {
            op: "unit decomposition",
            ring: a.ring(),
        });
    }
    let c = a
        .coeff(0)
        .ok_or_else(|| Error::InsufficientWindow("the constant term is not known".into()))?;
    if c.is_zero() {
        return Err(Error::NonUnit("constant term vanishes".into()));
    }
    if a.ring().integral() && c.order() != Some(0) {
        return Err(Error::NonUnit(format!(
            "constant term {c} is not a unit of {}",
            a.ring()
        )));
    }
    let ctx = a.ctx().clone();
    let coeffs = a
        .terms()
        .map(|(d, x)| {
            if d == 0 {
                C::zero(&ctx)
            } else {
                x.checked_div(&c).expect("nonzero divisor").negated()
            }
        })
        .collect();
    let w = TruncatedSeries::new(a.ring(), ctx, 0, coeffs)?;
    Ok((c, w))
}

/// `log(c (1 - w)) = -sum_{n >= 1} w^n / n`, dropping the constant `c`.
pub fn formal_log(a: &TruncatedSeries<Rational>) -> Result<TruncatedSeries<Rational>> {
    if a.ring() != RingLabel::FormalChar0 {
        return Err(Error::UnsupportedRing {
            op: "formal logarithm",
            ring: a.ring(),
        });
    }
    let (_, w) = unit_decompose(a)?;
    let trunc = a.trunc_order();
    let mut acc = TruncatedSeries::zero(a.ring(), (), 0, trunc)?;
    let Some(order) = w.leading_degree() else {
        return Ok(acc);
    };
    let mut power = w.clone();
    let mut n = 1;
    // w^n starts in degree n * order, so later terms leave the window
    while n * order < trunc {
        acc = acc.sub(&power.div_int(n)?)?;
        power = power.mul(&w)?;
        n += 1;
    }
    Ok(acc)
}

/// `z = -sum_{n >= 1} (p y)^n / n`, the logarithm of `1 - p y`.
///
/// Terms are added while `n - floor(log_p n)` is below the working precision;
/// beyond that `v_p(p^n / n)` already exceeds it.
pub fn padic_log_onemius_py(y: &TruncatedSeries<PAdic>) -> Result<TruncatedSeries<PAdic>> {
    if let Some((d, c)) = y.terms().find(|(_, c)| !c.is_integral()) {
        return Err(Error::NotIntegral(format!(
            "coefficient {c} of degree {d} has negative valuation"
        )));
    }
    let ctx = *y.ctx();
    let p = ctx.prime();
    let prec = ctx.prec();
    let py = y.mul_int(p as i64);
    let mut acc = TruncatedSeries::zero(y.ring(), ctx, y.min_degree(), y.trunc_order())?;
    let mut power = py.clone();
    let mut n: i64 = 1;
    while n - floor_log(n as u64, p) < prec {
        acc = acc.sub(&power.div_int(n)?)?;
        power = power.mul(&py)?;
        n += 1;
    }
    acc.map_coeffs(|c| c.cap_precision(prec))
}

fn floor_log(n: u64, p: u64) -> i64 {
    let mut k = 0;
    let mut q = n;
    while q >= p {
        q /= p;
        k += 1;
    }
    k
}

/// The zero-constant-term antiderivative of `dlog(v)` in `R_+`, representing
/// the class `log^dagger(v)`.
pub fn padic_log_dagger(v: &TruncatedSeries<PAdic>) -> Result<TruncatedSeries<PAdic>> {
    if !v.ring().nonnegative_only() {
        return Err(Error::UnsupportedRing {
            op: "p-adic logarithm",
            ring: v.ring(),
        });
    }
    if let Some((d, c)) = v.terms().find(|(_, c)| !c.is_integral()) {
        return Err(Error::NotIntegral(format!(
            "coefficient {c} of degree {d} is not in O[[u]]"
        )));
    }
    match v.coeff(0) {
        Some(c) if c.order() == Some(0) => {}
        Some(c) => {
            return Err(Error::NonUnit(format!(
                "constant term {c} is not a unit of O"
            )))
        }
        None => return Err(Error::InsufficientWindow("the constant term is not known".into())),
    }
    let w = dlog(&v.relabel(RingLabel::RobbaPlus)?)?;
    antiderive(&w, RingLabel::RobbaPlus)
}

/// Degree of the reduction of a Laurent series: the first degree whose
/// coefficient is a p-adic unit.
pub fn degree_of_unit(x: &TruncatedSeries<PAdic>) -> Result<i64> {
    for (d, c) in x.terms() {
        match c.valuation() {
            Some(0) => return Ok(d),
            Some(v) if v < 0 => {
                return Err(Error::NotIntegral(format!(
                    "coefficient {c} of degree {d} has no reduction mod p"
                )))
            }
            Some(_) => {}
            None if c.abs_prec() < 1 => {
                return Err(Error::CannotDetermineDegree(format!(
                    "coefficient of degree {d} is not known mod p"
                )))
            }
            None => {}
        }
    }
    Err(Error::CannotDetermineDegree(format!(
        "every coefficient below O(u^{}) vanishes mod p",
        x.trunc_order()
    )))
}

/// `(degree, valuation)` for every nonzero coefficient in the window.
pub fn valuation_profile(s: &TruncatedSeries<PAdic>) -> Vec<(i64, i64)> {
    s.terms()
        .filter_map(|(d, c)| c.valuation().map(|v| (d, v)))
        .collect()
}

/// Checks `v_p(s_{m p^i}) = -i` for every `i >= 1` with `m p^i` in the window.
pub fn unboundedness_witness(s: &TruncatedSeries<PAdic>, m: i64) -> Result<bool> {
    if m < 1 {
        return Err(Error::InvalidInput(format!("m must be positive, got {m}")));
    }
    debug_assert_eq!(s.ring().coeff_kind(), CoeffKind::PAdic);
    let p = s.ctx().prime() as i64;
    let mut probes = Vec::new();
    let mut degree = m.saturating_mul(p);
    let mut i = 1;
    while degree < s.trunc_order() {
        probes.push((i, degree));
        degree = degree.saturating_mul(p);
        i += 1;
    }
    if probes.len() < 2 {
        return Err(Error::InsufficientWindow(format!(
            "O(u^{}) reaches fewer than two of the degrees {m} * {p}^i",
            s.trunc_order()
        )));
    }
    Ok(probes.into_iter().all(|(i, d)| {
        s.coeff(d).and_then(|c| c.valuation()) == Some(-i)
    }))
}
