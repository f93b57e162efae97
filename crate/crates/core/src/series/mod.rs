//! Truncated power and Laurent series over the coefficient rings.
//!
//! A [`TruncatedSeries`] stores the coefficients of degrees
//! `min_degree .. trunc_order`. Degrees below `min_degree` are zero and
//! degrees at or above `trunc_order` are unknown, so every operation only
//! produces coefficients it can prove from its inputs.

mod arith;
mod calculus;
mod log;

use std::fmt;
use std::str::FromStr;

use crate::coeff::{CoeffKind, Scalar};
use crate::error::{Error, Result};

pub use calculus::{antiderive, derive, dlog, residue};
pub use log::{
    degree_of_unit, formal_log, padic_log_dagger, padic_log_onemius_py, unboundedness_witness,
    unit_decompose, valuation_profile,
};

/// The ring a series is meant to live in.
///
/// Growth conditions of the overconvergent rings are not checkable on a
/// finite window; the label records intent and fixes the window sign,
/// integrality and coefficient kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingLabel {
    /// `k[[t]]` with rational coefficients.
    FormalChar0,
    /// `k((t))` with rational coefficients.
    FormalLaurent,
    /// `O[[u]]`.
    GammaPlus,
    /// `O[[u]][1/p]`.
    EPlus,
    /// Bidirectional series over `O` with coefficients tending to zero at `-inf`.
    Gamma,
    /// `Gamma[1/p]`.
    E,
    /// The bounded Robba ring and its integral subring.
    Dagger,
    /// Nonnegative part of the Robba ring.
    RobbaPlus,
    Robba,
}

impl RingLabel {
    pub const ALL: [RingLabel; 9] = [
        RingLabel::FormalChar0,
        RingLabel::FormalLaurent,
        RingLabel::GammaPlus,
        RingLabel::EPlus,
        RingLabel::Gamma,
        RingLabel::E,
        RingLabel::Dagger,
        RingLabel::RobbaPlus,
        RingLabel::Robba,
    ];

    pub fn nonnegative_only(self) -> bool {
        matches!(
            self,
            RingLabel::FormalChar0 | RingLabel::GammaPlus | RingLabel::EPlus | RingLabel::RobbaPlus
        )
    }

    /// Coefficients must have valuation `>= 0`.
    pub fn integral(self) -> bool {
        matches!(self, RingLabel::GammaPlus | RingLabel::Gamma)
    }

    pub fn coeff_kind(self) -> CoeffKind {
        match self {
            RingLabel::FormalChar0 | RingLabel::FormalLaurent => CoeffKind::Rational,
            _ => CoeffKind::PAdic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RingLabel::FormalChar0 => "FormalChar0",
            RingLabel::FormalLaurent => "FormalLaurent",
            RingLabel::GammaPlus => "GammaPlus",
            RingLabel::EPlus => "EPlus",
            RingLabel::Gamma => "Gamma",
            RingLabel::E => "E",
            RingLabel::Dagger => "Dagger",
            RingLabel::RobbaPlus => "RobbaPlus",
            RingLabel::Robba => "Robba",
        }
    }
}

impl fmt::Display for RingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RingLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RingLabel::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown ring label {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<C: Scalar> {
    ring: RingLabel,
    ctx: C::Ctx,
    min_degree: i64,
    coeffs: Vec<C>,
}

/// A series times the formal generator `du` (or `dt`).
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialForm<C: Scalar> {
    coefficient: TruncatedSeries<C>,
}

impl<C: Scalar> TruncatedSeries<C> {
    /// Checked constructor: the window covers `min_degree .. min_degree + coeffs.len()`.
    pub fn new(ring: RingLabel, ctx: C::Ctx, min_degree: i64, coeffs: Vec<C>) -> Result<Self> {
        let s = TruncatedSeries {
            ring,
            ctx,
            min_degree,
            coeffs,
        };
        s.validate()?;
        Ok(s)
    }

    /// Unchecked constructor for results whose invariants hold by construction.
    pub(crate) fn raw(ring: RingLabel, ctx: C::Ctx, min_degree: i64, coeffs: Vec<C>) -> Self {
        TruncatedSeries {
            ring,
            ctx,
            min_degree,
            coeffs,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.ring.coeff_kind() != C::KIND {
            return Err(Error::UnsupportedRing {
                op: "this coefficient kind",
                ring: self.ring,
            });
        }
        if self.ring.nonnegative_only() && self.min_degree < 0 {
            return Err(Error::InvalidInput(format!(
                "{} only has nonnegative degrees, window starts at {}",
                self.ring, self.min_degree
            )));
        }
        if self.ring.integral() {
            if let Some((d, c)) = self.terms().find(|(_, c)| !c.is_integral()) {
                return Err(Error::NotIntegral(format!(
                    "coefficient {c} of degree {d} is not integral in {}",
                    self.ring
                )));
            }
        }
        Ok(())
    }

    pub fn zero(ring: RingLabel, ctx: C::Ctx, min_degree: i64, trunc_order: i64) -> Result<Self> {
        if trunc_order < min_degree {
            return Err(Error::InvalidInput(format!(
                "window [{min_degree}, {trunc_order}) is empty or reversed"
            )));
        }
        let len = (trunc_order - min_degree) as usize;
        TruncatedSeries::new(ring, ctx.clone(), min_degree, vec![C::zero(&ctx); len])
    }

    /// `c + O(x^trunc_order)`.
    pub fn constant(ring: RingLabel, ctx: C::Ctx, c: C, trunc_order: i64) -> Result<Self> {
        let mut s = TruncatedSeries::zero(ring, ctx, 0, trunc_order.max(0))?;
        if let Some(slot) = s.coeffs.first_mut() {
            *slot = c;
        }
        s.validate()?;
        Ok(s)
    }

    pub fn one(ring: RingLabel, ctx: C::Ctx, trunc_order: i64) -> Result<Self> {
        let one = C::one(&ctx);
        TruncatedSeries::constant(ring, ctx, one, trunc_order)
    }

    /// Builds a series from `(degree, coefficient)` pairs on the window
    /// `min(0, lowest degree) .. trunc_order`.
    pub fn from_terms(
        ring: RingLabel,
        ctx: C::Ctx,
        terms: impl IntoIterator<Item = (i64, C)>,
        trunc_order: i64,
    ) -> Result<Self> {
        let terms: Vec<(i64, C)> = terms.into_iter().collect();
        let min_degree = terms.iter().map(|(d, _)| *d).min().unwrap_or(0).min(0);
        let mut s: TruncatedSeries<C> = TruncatedSeries::zero(ring, ctx, min_degree, trunc_order.max(min_degree))?;
        for (d, c) in terms {
            if d >= s.trunc_order() {
                return Err(Error::InsufficientWindow(format!(
                    "term of degree {d} lies beyond O(x^{trunc_order})"
                )));
            }
            let i = (d - min_degree) as usize;
            s.coeffs[i] = s.coeffs[i].plus(&c);
        }
        s.validate()?;
        Ok(s)
    }

    pub fn ring(&self) -> RingLabel {
        self.ring
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn trunc_order(&self) -> i64 {
        self.min_degree + self.coeffs.len() as i64
    }

    /// Stored coefficients, lowest degree first.
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `x^degree`; `None` when the degree is not known.
    pub fn coeff(&self, degree: i64) -> Option<C> {
        if degree >= self.trunc_order() {
            None
        } else if degree < self.min_degree {
            Some(C::zero(&self.ctx))
        } else {
            Some(self.coeffs[(degree - self.min_degree) as usize].clone())
        }
    }

    /// `(degree, coefficient)` over the stored window.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.min_degree + i as i64, c))
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn leading_degree(&self) -> Option<i64> {
        self.terms().find(|(_, c)| !c.is_zero()).map(|(d, _)| d)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Forgets everything from degree `trunc_order` on.
    pub fn truncate(&self, trunc_order: i64) -> Self {
        let keep = (trunc_order - self.min_degree).clamp(0, self.coeffs.len() as i64) as usize;
        let mut s = self.clone();
        s.coeffs.truncate(keep);
        s
    }

    /// Same coefficients, read in another ring.
    pub fn relabel(&self, ring: RingLabel) -> Result<Self> {
        let mut s = self.clone();
        s.ring = ring;
        if ring.nonnegative_only() && s.min_degree < 0 {
            if s.terms().any(|(d, c)| d < 0 && !c.is_zero()) {
                return Err(Error::Incompatible(format!(
                    "series has negative-degree terms and cannot live in {ring}"
                )));
            }
            let drop = (-s.min_degree).min(s.coeffs.len() as i64) as usize;
            s.coeffs.drain(..drop);
            s.min_degree = 0;
        }
        s.validate()?;
        Ok(s)
    }

    /// Extends the stored window downwards with zeros.
    pub fn with_min_degree(&self, min_degree: i64) -> Self {
        if min_degree >= self.min_degree {
            return self.clone();
        }
        let pad = (self.min_degree - min_degree) as usize;
        let mut coeffs = vec![C::zero(&self.ctx); pad];
        coeffs.extend(self.coeffs.iter().cloned());
        TruncatedSeries::raw(self.ring, self.ctx.clone(), min_degree, coeffs)
    }

    /// Compares coefficients on the common window at the coarser precision.
    ///
    /// Two series whose stored windows do not overlap cannot be compared.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        let lo = self.min_degree.max(other.min_degree);
        let hi = self.trunc_order().min(other.trunc_order());
        if lo >= hi {
            return Err(Error::InsufficientWindow(format!(
                "windows [{}, {}) and [{}, {}) do not overlap",
                self.min_degree,
                self.trunc_order(),
                other.min_degree,
                other.trunc_order()
            )));
        }
        let start = self.min_degree.min(other.min_degree);
        Ok((start..hi).all(|d| {
            let a = self.coeff(d).expect("below truncation");
            let b = other.coeff(d).expect("below truncation");
            a.minus(&b).is_zero()
        }))
    }

    /// Applies `f` to every stored coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(f).collect();
        TruncatedSeries::new(self.ring, self.ctx.clone(), self.min_degree, coeffs)
    }
}

impl<C: Scalar> DifferentialForm<C> {
    pub fn new(coefficient: TruncatedSeries<C>) -> Self {
        DifferentialForm { coefficient }
    }

    /// The zero form on the window `0 .. trunc_order`.
    pub fn zero(ring: RingLabel, ctx: C::Ctx, trunc_order: i64) -> Result<Self> {
        Ok(DifferentialForm::new(TruncatedSeries::zero(
            ring,
            ctx,
            0,
            trunc_order.max(0),
        )?))
    }

    /// The series multiplying `du`.
    pub fn coefficient(&self) -> &TruncatedSeries<C> {
        &self.coefficient
    }

    pub fn into_coefficient(self) -> TruncatedSeries<C> {
        self.coefficient
    }

    pub fn ring(&self) -> RingLabel {
        self.coefficient.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }
}
