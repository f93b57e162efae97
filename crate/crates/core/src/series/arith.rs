use crate::coeff::Scalar;
use crate::error::{Error, Result};

use super::TruncatedSeries;

impl<C: Scalar> TruncatedSeries<C> {
    fn compatible(&self, other: &Self) -> Result<C::Ctx> {
        if self.ring != other.ring {
            return Err(Error::Incompatible(format!(
                "series over {} and {}",
                self.ring, other.ring
            )));
        }
        C::join_ctx(&self.ctx, &other.ctx).ok_or_else(|| {
            Error::Incompatible(format!(
                "coefficient contexts {:?} and {:?}",
                self.ctx, other.ctx
            ))
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, C::plus)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, C::minus)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&C, &C) -> C) -> Result<Self> {
        let ctx = self.compatible(other)?;
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.trunc_order().min(other.trunc_order());
        let zero = C::zero(&ctx);
        let pick = |s: &Self, d: i64| -> C {
            if d < s.min_degree {
                zero.clone()
            } else {
                s.coeffs[(d - s.min_degree) as usize].clone()
            }
        };
        let coeffs = (lo..hi).map(|d| f(&pick(self, d), &pick(other, d))).collect();
        Ok(TruncatedSeries::raw(self.ring, ctx, lo, coeffs))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(C::negated).collect();
        TruncatedSeries::raw(self.ring, self.ctx.clone(), self.min_degree, coeffs)
    }

    /// Multiplies every coefficient by `c`; fails if an integral ring would be left.
    pub fn scale(&self, c: &C) -> Result<Self> {
        self.map_coeffs(|x| x.times(c))
    }

    pub fn mul_int(&self, n: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.mul_int(n)).collect();
        TruncatedSeries::raw(self.ring, self.ctx.clone(), self.min_degree, coeffs)
    }

    pub fn div_int(&self, n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        self.map_coeffs(|c| c.div_int(n))
    }

    /// Multiplies by `x^k`, shifting the window.
    pub fn shift(&self, k: i64) -> Result<Self> {
        TruncatedSeries::new(
            self.ring,
            self.ctx.clone(),
            self.min_degree + k,
            self.coeffs.clone(),
        )
    }

    /// Cauchy product on the provable window: with windows `[m_a, T_a)` and
    /// `[m_b, T_b)` the result is known on `[m_a + m_b, min(T_a + m_b, T_b + m_a))`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let ctx = self.compatible(other)?;
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![C::zero(&ctx); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            if a.is_zero() && a.zero_precision().is_none() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                coeffs[i + j] = coeffs[i + j].plus(&a.times(b));
            }
        }
        Ok(TruncatedSeries::raw(
            self.ring,
            ctx,
            self.min_degree + other.min_degree,
            coeffs,
        ))
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return TruncatedSeries::one(self.ring, self.ctx.clone(), self.trunc_order().max(0));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Locates the coefficient that makes the series invertible.
    ///
    /// The lowest nonzero coefficient must dominate the window (no other
    /// coefficient of smaller valuation), be a unit in integral rings, and sit
    /// in degree 0 for rings without negative degrees. Returns its index in the
    /// stored window and the precision bound inherited from the skipped,
    /// approximately zero, lower coefficients.
    pub(crate) fn unit_leading(&self) -> Result<(usize, Option<i64>)> {
        let idx = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| Error::NonUnit("the series vanishes on its window".into()))?;
        let degree = self.min_degree + idx as i64;
        if self.ring.nonnegative_only() && degree != 0 {
            return Err(Error::NonUnit(format!(
                "constant term vanishes in {} (first nonzero degree {degree})",
                self.ring
            )));
        }
        let lead = &self.coeffs[idx];
        let v = lead.order().expect("nonzero coefficient");
        if self.ring.integral() && v != 0 {
            return Err(Error::NonUnit(format!(
                "leading coefficient {lead} is not a unit of the integral ring {}",
                self.ring
            )));
        }
        if let Some((d, c)) = self
            .terms()
            .skip(idx + 1)
            .find(|(_, c)| c.order().is_some_and(|w| w < v))
        {
            return Err(Error::NonUnit(format!(
                "coefficient {c} of degree {d} dominates the leading coefficient {lead}"
            )));
        }
        let floor = self.coeffs[..idx]
            .iter()
            .filter_map(C::zero_precision)
            .min()
            .map(|p| p - 2 * v);
        Ok((idx, floor))
    }

    /// Multiplicative inverse of a unit, by long division from the leading term.
    ///
    /// If the leading coefficient sits in degree `m` of the window `[_, T)`,
    /// the inverse is known on `[-m, T - 2m)`.
    pub fn inverse(&self) -> Result<Self> {
        let (idx, floor) = self.unit_leading()?;
        let m = self.min_degree + idx as i64;
        let a = &self.coeffs[idx..];
        let lead = &a[0];
        let one = C::one(&self.ctx);
        let inv_lead = one.checked_div(lead).expect("leading coefficient is nonzero");
        let n = a.len();
        let mut b: Vec<C> = Vec::with_capacity(n);
        b.push(inv_lead.clone());
        for k in 1..n {
            let mut acc = C::zero(&self.ctx);
            for j in 1..=k {
                acc = acc.plus(&a[j].times(&b[k - j]));
            }
            b.push(acc.times(&inv_lead).negated());
        }
        if let Some(prec) = floor {
            b = b.iter().map(|c| c.cap_precision(prec)).collect();
        }
        TruncatedSeries::new(self.ring, self.ctx.clone(), -m, b)
    }
}
