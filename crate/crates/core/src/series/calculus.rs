use crate::coeff::Scalar;
use crate::error::{Error, Result};

use super::{DifferentialForm, RingLabel, TruncatedSeries};

/// `d(sum x_j u^j) = (sum j x_j u^(j-1)) du`; the window drops by one degree.
pub fn derive<C: Scalar>(s: &TruncatedSeries<C>) -> DifferentialForm<C> {
    let ctx = s.ctx().clone();
    let ring = s.ring();
    // degree -1 only exists in Laurent rings, where it carries the 0 * x_0 term
    let min_degree = if ring.nonnegative_only() {
        (s.min_degree() - 1).max(0)
    } else {
        s.min_degree() - 1
    };
    let trunc = (s.trunc_order() - 1).max(min_degree);
    let coeffs = (min_degree..trunc)
        .map(|d| {
            let x = s.coeff(d + 1).expect("inside the window");
            x.mul_int(d + 1)
        })
        .collect();
    DifferentialForm::new(TruncatedSeries::raw(ring, ctx, min_degree, coeffs))
}

/// The coefficient of `u^-1 du`.
pub fn residue<C: Scalar>(form: &DifferentialForm<C>) -> Result<C> {
    let s = form.coefficient();
    if s.ring().nonnegative_only() {
        return Ok(C::zero(s.ctx()));
    }
    s.coeff(-1).ok_or_else(|| {
        Error::InsufficientWindow(format!(
            "degree -1 is not known: the form is only known modulo u^{}",
            s.trunc_order()
        ))
    })
}

/// The antiderivative with zero constant term, read in `target`.
///
/// A nonzero `u^-1 du` term has no antiderivative and is reported with its
/// residue. Coefficient precision drops by `v_p(i + 1)` in degree `i + 1`.
pub fn antiderive<C: Scalar>(
    form: &DifferentialForm<C>,
    target: RingLabel,
) -> Result<TruncatedSeries<C>> {
    let f = form.coefficient();
    if target.coeff_kind() != C::KIND {
        return Err(Error::UnsupportedRing {
            op: "antiderivative with these coefficients",
            ring: target,
        });
    }
    if let Some(r) = f.coeff(-1) {
        if !r.is_zero() {
            return Err(Error::IntegralObstruction {
                residue: r.to_coefficient(),
            });
        }
    }
    if target.nonnegative_only() {
        if let Some((d, _)) = f.terms().find(|(d, c)| *d < -1 && !c.is_zero()) {
            return Err(Error::Incompatible(format!(
                "form has a term in degree {d}; its antiderivative cannot live in {target}"
            )));
        }
    }
    let min_degree = if target.nonnegative_only() {
        0
    } else {
        (f.min_degree() + 1).min(0)
    };
    let trunc = (f.trunc_order() + 1).max(min_degree);
    let ctx = f.ctx().clone();
    let coeffs = (min_degree..trunc)
        .map(|d| {
            if d == 0 {
                C::zero(&ctx)
            } else {
                f.coeff(d - 1).expect("inside the window").div_int(d)
            }
        })
        .collect();
    TruncatedSeries::new(target, ctx, min_degree, coeffs).map_err(|e| match e {
        Error::NotIntegral(msg) => Error::NotIntegral(format!("antiderivative leaves {target}: {msg}")),
        other => other,
    })
}

/// `x -> dx / x` for a unit `x`.
pub fn dlog<C: Scalar>(x: &TruncatedSeries<C>) -> Result<DifferentialForm<C>> {
    let inv = x.inverse()?;
    let dx = derive(x);
    Ok(DifferentialForm::new(dx.coefficient().mul(&inv)?))
}
