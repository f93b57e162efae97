//! p-adic numbers with tracked absolute precision.
//!
//! A [`PAdic`] is an element of `Q_p` known modulo `p^abs_prec`. Nonzero
//! values are stored as `p^valuation * unit` with `unit` reduced modulo
//! `p^(abs_prec - valuation)`, so the representation is canonical and the
//! derived equality is equality of (value, precision) pairs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdic {
    prime: u64,
    /// `None` for a value indistinguishable from zero at `abs_prec`.
    valuation: Option<i64>,
    unit: BigInt,
    abs_prec: i64,
}

/// An element of the residue field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueElement {
    prime: u64,
    value: u64,
}

/// Prime and working absolute precision shared by the p-adic coefficients of
/// a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicCtx {
    prime: u64,
    prec: i64,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn p_pow(prime: u64, exp: i64) -> BigInt {
    debug_assert!(exp >= 0);
    num_traits::pow(BigInt::from(prime), exp as usize)
}

/// Splits `n != 0` as `p^k * m` with `p` not dividing `m`.
fn strip_prime(n: &BigInt, prime: u64) -> (i64, BigInt) {
    let p = BigInt::from(prime);
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return (k, m);
        }
        m = q;
        k += 1;
    }
}

/// Inverse of `a` modulo `modulus`; `a` must be coprime to it.
fn inverse_mod(a: &BigInt, modulus: &BigInt) -> BigInt {
    if modulus.is_one() {
        return BigInt::zero();
    }
    let e = a.mod_floor(modulus).extended_gcd(modulus);
    debug_assert!(e.gcd.is_one(), "inverse of a non-unit modulo p^k");
    e.x.mod_floor(modulus)
}

/// The p-adic valuation of a nonzero machine integer.
pub fn vp_int(n: i64, prime: u64) -> i64 {
    assert!(n != 0, "valuation of zero");
    let mut n = n.unsigned_abs();
    let mut k = 0;
    while n % prime == 0 {
        n /= prime;
        k += 1;
    }
    k
}

impl PadicCtx {
    pub fn new(prime: u64, prec: i64) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::InvalidInput(format!("{prime} is not a prime")));
        }
        if prec < 1 {
            return Err(Error::InvalidInput(format!(
                "absolute precision must be at least 1, got {prec}"
            )));
        }
        Ok(PadicCtx { prime, prec })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }
}

impl PAdic {
    /// Normalizes `p^valuation * m` known modulo `p^abs_prec`. `m` may be zero
    /// or divisible by `p`.
    fn from_parts(prime: u64, valuation: i64, m: BigInt, abs_prec: i64) -> PAdic {
        if m.is_zero() {
            return PAdic::zero(prime, abs_prec);
        }
        let (k, m) = strip_prime(&m, prime);
        let v = valuation + k;
        if v >= abs_prec {
            return PAdic::zero(prime, abs_prec);
        }
        let unit = m.mod_floor(&p_pow(prime, abs_prec - v));
        PAdic {
            prime,
            valuation: Some(v),
            unit,
            abs_prec,
        }
    }

    /// The value known to be `0 mod p^abs_prec`.
    pub fn zero(prime: u64, abs_prec: i64) -> PAdic {
        PAdic {
            prime,
            valuation: None,
            unit: BigInt::zero(),
            abs_prec,
        }
    }

    pub fn from_int(prime: u64, n: i64, abs_prec: i64) -> PAdic {
        PAdic::from_parts(prime, 0, BigInt::from(n), abs_prec)
    }

    /// Builds `p^valuation * unit (mod p^abs_prec)` from its printed parts.
    pub fn new(prime: u64, valuation: i64, unit: BigInt, abs_prec: i64) -> Result<PAdic> {
        if !is_prime(prime) {
            return Err(Error::InvalidInput(format!("{prime} is not a prime")));
        }
        if unit.is_zero() || (&unit % BigInt::from(prime)).is_zero() {
            return Err(Error::InvalidInput(format!(
                "unit {unit} must be coprime to {prime}"
            )));
        }
        if valuation >= abs_prec {
            return Err(Error::InvalidInput(format!(
                "valuation {valuation} must lie below the precision {abs_prec}"
            )));
        }
        Ok(PAdic::from_parts(prime, valuation, unit, abs_prec))
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// `None` when the value is zero at its precision.
    pub fn valuation(&self) -> Option<i64> {
        self.valuation
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn abs_prec(&self) -> i64 {
        self.abs_prec
    }

    pub fn is_zero(&self) -> bool {
        self.valuation.is_none()
    }

    /// Lower bound for the valuation: the precision stands in for `+inf`.
    fn val_floor(&self) -> i64 {
        self.valuation.unwrap_or(self.abs_prec)
    }

    fn check_prime(&self, other: &PAdic) {
        assert_eq!(
            self.prime, other.prime,
            "p-adic operands over different primes"
        );
    }

    fn add_impl(&self, other: &PAdic) -> PAdic {
        self.check_prime(other);
        let prec = self.abs_prec.min(other.abs_prec);
        let m = self.val_floor().min(other.val_floor());
        if m >= prec {
            return PAdic::zero(self.prime, prec);
        }
        let modulus = p_pow(self.prime, prec - m);
        let mut sum = BigInt::zero();
        for x in [self, other] {
            if let Some(v) = x.valuation {
                sum += &x.unit * p_pow(self.prime, v - m);
            }
        }
        PAdic::from_parts(self.prime, m, sum.mod_floor(&modulus), prec)
    }

    fn negate(&self) -> PAdic {
        match self.valuation {
            None => self.clone(),
            Some(v) => PAdic::from_parts(self.prime, v, -&self.unit, self.abs_prec),
        }
    }

    fn mul_impl(&self, other: &PAdic) -> PAdic {
        self.check_prime(other);
        let prec = (self.abs_prec + other.val_floor()).min(other.abs_prec + self.val_floor());
        match (self.valuation, other.valuation) {
            (Some(va), Some(vb)) => {
                PAdic::from_parts(self.prime, va + vb, &self.unit * &other.unit, prec)
            }
            _ => PAdic::zero(self.prime, prec),
        }
    }

    /// Quotient in `Q_p`; `None` when the divisor is zero at its precision.
    pub fn checked_div(&self, other: &PAdic) -> Option<PAdic> {
        self.check_prime(other);
        let vb = other.valuation?;
        let Some(va) = self.valuation else {
            return Some(PAdic::zero(self.prime, self.abs_prec - vb));
        };
        let rel = (self.abs_prec - va).min(other.abs_prec - vb);
        let modulus = p_pow(self.prime, rel);
        let q = &self.unit * inverse_mod(&other.unit, &modulus);
        Some(PAdic::from_parts(self.prime, va - vb, q, va - vb + rel))
    }

    /// Exact multiplication by an integer; precision rises by `v_p(n)`.
    pub fn mul_int(&self, n: i64) -> PAdic {
        if n == 0 {
            return PAdic::zero(self.prime, self.abs_prec);
        }
        let (k, m) = strip_prime(&BigInt::from(n), self.prime);
        match self.valuation {
            None => PAdic::zero(self.prime, self.abs_prec + k),
            Some(v) => PAdic::from_parts(self.prime, v + k, &self.unit * m, self.abs_prec + k),
        }
    }

    /// Exact division by a nonzero integer; precision drops by `v_p(n)`.
    pub fn div_int(&self, n: i64) -> PAdic {
        assert!(n != 0, "division by zero");
        let (k, m) = strip_prime(&BigInt::from(n), self.prime);
        match self.valuation {
            None => PAdic::zero(self.prime, self.abs_prec - k),
            Some(v) => {
                let rel = self.abs_prec - v;
                let q = &self.unit * inverse_mod(&m, &p_pow(self.prime, rel));
                PAdic::from_parts(self.prime, v - k, q, self.abs_prec - k)
            }
        }
    }

    /// Forgets digits beyond `p^prec` (no-op when already coarser).
    pub fn cap_precision(&self, prec: i64) -> PAdic {
        if prec >= self.abs_prec {
            return self.clone();
        }
        match self.valuation {
            None => PAdic::zero(self.prime, prec),
            Some(v) => PAdic::from_parts(self.prime, v, self.unit.clone(), prec),
        }
    }

    /// True iff `self - other` vanishes at the coarser of the two precisions.
    pub fn agrees_with(&self, other: &PAdic) -> bool {
        self.prime == other.prime && self.add_impl(&other.negate()).is_zero()
    }

    /// Reduction of an integral value into `F_p`.
    pub fn reduce_mod_p(&self) -> Result<ResidueElement> {
        match self.valuation {
            Some(v) if v < 0 => Err(Error::NotIntegral(format!(
                "{self} has valuation {v} and no reduction mod {}",
                self.prime
            ))),
            Some(0) => {
                let r = (&self.unit % BigInt::from(self.prime))
                    .to_u64()
                    .expect("residue fits in u64");
                Ok(ResidueElement::new(self.prime, r))
            }
            Some(_) => Ok(ResidueElement::new(self.prime, 0)),
            None if self.abs_prec >= 1 => Ok(ResidueElement::new(self.prime, 0)),
            None => Err(Error::InvalidInput(format!(
                "{self} is not known modulo {}",
                self.prime
            ))),
        }
    }

    /// Teichmuller-free lift: the representative in `[0, p)`.
    pub fn lift_from_residue(x: ResidueElement, abs_prec: i64) -> PAdic {
        PAdic::from_parts(x.prime, 0, BigInt::from(x.value), abs_prec)
    }
}

/// Reads `num/den` as an element of `Q_p` known modulo `p^abs_prec`.
pub fn padic_normalize(num: &BigInt, den: &BigInt, prime: u64, abs_prec: i64) -> Result<PAdic> {
    if den.is_zero() {
        return Err(Error::InvalidInput("zero denominator".into()));
    }
    if !is_prime(prime) {
        return Err(Error::InvalidInput(format!("{prime} is not a prime")));
    }
    if abs_prec < 1 {
        return Err(Error::InvalidInput(format!(
            "absolute precision must be at least 1, got {abs_prec}"
        )));
    }
    Ok(normalize_unchecked(num, den, prime, abs_prec))
}

pub(crate) fn normalize_unchecked(num: &BigInt, den: &BigInt, prime: u64, abs_prec: i64) -> PAdic {
    if num.is_zero() {
        return PAdic::zero(prime, abs_prec);
    }
    let (a, n) = strip_prime(num, prime);
    let (b, d) = strip_prime(den, prime);
    let v = a - b;
    if v >= abs_prec {
        return PAdic::zero(prime, abs_prec);
    }
    let modulus = p_pow(prime, abs_prec - v);
    let d = if d.is_negative() { -d } else { d };
    let sign = if den.is_negative() { -1 } else { 1 };
    let m = n * sign * inverse_mod(&d, &modulus);
    PAdic::from_parts(prime, v, m, abs_prec)
}

impl ResidueElement {
    pub fn new(prime: u64, value: u64) -> ResidueElement {
        ResidueElement {
            prime,
            value: value % prime,
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn value(&self) -> u64 {
        self.value
    }
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prime;
        match self.valuation {
            None => write!(f, "0 (mod {p}^{})", self.abs_prec),
            Some(v) => write!(f, "{p}^{v}*{} (mod {p}^{})", self.unit, self.abs_prec),
        }
    }
}

impl fmt::Display for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.prime)
    }
}

impl Add for &PAdic {
    type Output = PAdic;
    fn add(self, rhs: &PAdic) -> PAdic {
        self.add_impl(rhs)
    }
}

impl Sub for &PAdic {
    type Output = PAdic;
    fn sub(self, rhs: &PAdic) -> PAdic {
        self.add_impl(&rhs.negate())
    }
}

impl Mul for &PAdic {
    type Output = PAdic;
    fn mul(self, rhs: &PAdic) -> PAdic {
        self.mul_impl(rhs)
    }
}

impl Neg for &PAdic {
    type Output = PAdic;
    fn neg(self) -> PAdic {
        self.negate()
    }
}
