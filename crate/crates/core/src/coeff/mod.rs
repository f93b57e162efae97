//! Exact scalars: rationals for the characteristic-0 theory and p-adic
//! numbers for `Z_p`/`Q_p`, with `F_p` residues.

mod padic;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use padic::{padic_normalize, vp_int, PAdic, PadicCtx, ResidueElement};

pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffKind {
    Rational,
    PAdic,
}

/// A coefficient of either kind, used where the kind is only known at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Rational(Rational),
    PAdic(PAdic),
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Rational(q) => write!(f, "{q}"),
            Coefficient::PAdic(x) => write!(f, "{x}"),
        }
    }
}

/// Field operations shared by the coefficient types of a series.
///
/// Values are created relative to a context (`()` for rationals, the prime and
/// working precision for p-adics). Binary operations assume both operands come
/// from compatible contexts; series-level code checks that before calling in.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    type Ctx: Clone + PartialEq + fmt::Debug + Send + Sync;

    const KIND: CoeffKind;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn from_int(ctx: &Self::Ctx, n: i64) -> Self;
    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self;

    fn one(ctx: &Self::Ctx) -> Self {
        Self::from_int(ctx, 1)
    }

    /// Common context of two operands, if they may be combined.
    fn join_ctx(a: &Self::Ctx, b: &Self::Ctx) -> Option<Self::Ctx>;

    fn is_zero(&self) -> bool;

    /// Valuation used for unit and integrality tests: the p-adic valuation,
    /// or `0` for every nonzero rational. `None` for zero.
    fn order(&self) -> Option<i64>;

    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn checked_div(&self, rhs: &Self) -> Option<Self>;
    fn mul_int(&self, n: i64) -> Self;
    fn div_int(&self, n: i64) -> Self;

    /// Absolute precision of a zero value; `None` for exact zeros.
    fn zero_precision(&self) -> Option<i64> {
        None
    }

    fn cap_precision(&self, _prec: i64) -> Self {
        self.clone()
    }

    fn is_integral(&self) -> bool {
        self.order().is_none_or(|v| v >= 0)
    }

    fn to_coefficient(&self) -> Coefficient;
}

impl Scalar for Rational {
    type Ctx = ();

    const KIND: CoeffKind = CoeffKind::Rational;

    fn zero(_: &()) -> Self {
        <Rational as Zero>::zero()
    }

    fn from_int(_: &(), n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_rational(_: &(), q: &Rational) -> Self {
        q.clone()
    }

    fn join_ctx(_: &(), _: &()) -> Option<()> {
        Some(())
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn order(&self) -> Option<i64> {
        (!Zero::is_zero(self)).then_some(0)
    }

    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn negated(&self) -> Self {
        -self
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        (!Zero::is_zero(rhs)).then(|| self / rhs)
    }

    fn mul_int(&self, n: i64) -> Self {
        self * BigInt::from(n)
    }

    fn div_int(&self, n: i64) -> Self {
        assert!(n != 0, "division by zero");
        self / BigInt::from(n)
    }

    fn to_coefficient(&self) -> Coefficient {
        Coefficient::Rational(self.clone())
    }
}

impl Scalar for PAdic {
    type Ctx = PadicCtx;

    const KIND: CoeffKind = CoeffKind::PAdic;

    fn zero(ctx: &PadicCtx) -> Self {
        PAdic::zero(ctx.prime(), ctx.prec())
    }

    fn from_int(ctx: &PadicCtx, n: i64) -> Self {
        PAdic::from_int(ctx.prime(), n, ctx.prec())
    }

    fn from_rational(ctx: &PadicCtx, q: &Rational) -> Self {
        padic::normalize_unchecked(q.numer(), q.denom(), ctx.prime(), ctx.prec())
    }

    fn join_ctx(a: &PadicCtx, b: &PadicCtx) -> Option<PadicCtx> {
        (a.prime() == b.prime()).then(|| {
            PadicCtx::new(a.prime(), a.prec().min(b.prec())).expect("joined context is valid")
        })
    }

    fn is_zero(&self) -> bool {
        PAdic::is_zero(self)
    }

    fn order(&self) -> Option<i64> {
        self.valuation()
    }

    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn negated(&self) -> Self {
        -self
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        PAdic::checked_div(self, rhs)
    }

    fn mul_int(&self, n: i64) -> Self {
        PAdic::mul_int(self, n)
    }

    fn div_int(&self, n: i64) -> Self {
        PAdic::div_int(self, n)
    }

    fn zero_precision(&self) -> Option<i64> {
        self.is_zero().then(|| self.abs_prec())
    }

    fn cap_precision(&self, prec: i64) -> Self {
        PAdic::cap_precision(self, prec)
    }

    fn to_coefficient(&self) -> Coefficient {
        Coefficient::PAdic(self.clone())
    }
}

/// `|q| == 1`, used by printers to drop unit coefficients.
pub fn is_plus_minus_one(q: &Rational) -> bool {
    q.abs().is_one()
}
