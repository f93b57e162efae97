//! Two-variable families over `Spf O[[u, x]]` (or `k[[t, x]]`): total
//! differentials, curvature, sections `x -> v - 1` and line integrals.

use crate::coeff::Scalar;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nabla::{invariant, validate_framed, ConnectionMatrix, FramedNablaModule, InvariantRepresentative, Signature};
use crate::series::{derive, DifferentialForm, RingLabel, TruncatedSeries};

/// `sum a_ij u^i x^j`, known for `i < trunc_u` and `j < trunc_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiSeries<C: Scalar> {
    ring: RingLabel,
    ctx: C::Ctx,
    trunc_u: i64,
    trunc_x: i64,
    coeffs: Vec<C>,
}

impl<C: Scalar> BiSeries<C> {
    /// `coeffs` is row-major: index `i * trunc_x + j` holds `a_ij`.
    pub fn new(ring: RingLabel, ctx: C::Ctx, trunc_u: i64, trunc_x: i64, coeffs: Vec<C>) -> Result<Self> {
        if !ring.nonnegative_only() {
            return Err(Error::UnsupportedRing {
                op: "two-variable series",
                ring,
            });
        }
        if ring.coeff_kind() != C::KIND {
            return Err(Error::UnsupportedRing {
                op: "this coefficient kind",
                ring,
            });
        }
        if trunc_u < 0 || trunc_x < 0 || coeffs.len() as i64 != trunc_u * trunc_x {
            return Err(Error::InvalidInput(format!(
                "{} coefficients do not fill a {trunc_u}x{trunc_x} window",
                coeffs.len()
            )));
        }
        let s = BiSeries {
            ring,
            ctx,
            trunc_u,
            trunc_x,
            coeffs,
        };
        if ring.integral() {
            if let Some((i, j, c)) = s.terms().find(|(_, _, c)| !c.is_integral()) {
                return Err(Error::NotIntegral(format!(
                    "coefficient {c} of u^{i} x^{j} is not integral in {ring}"
                )));
            }
        }
        Ok(s)
    }

    pub fn zero(ring: RingLabel, ctx: C::Ctx, trunc_u: i64, trunc_x: i64) -> Result<Self> {
        let n = (trunc_u.max(0) * trunc_x.max(0)) as usize;
        BiSeries::new(ring, ctx.clone(), trunc_u, trunc_x, vec![C::zero(&ctx); n])
    }

    /// Sums `(i, j, a_ij)` triples into a window; terms outside it are an error.
    pub fn from_terms(
        ring: RingLabel,
        ctx: C::Ctx,
        terms: impl IntoIterator<Item = (i64, i64, C)>,
        trunc_u: i64,
        trunc_x: i64,
    ) -> Result<Self> {
        let mut s: BiSeries<C> = BiSeries::zero(ring, ctx, trunc_u, trunc_x)?;
        for (i, j, c) in terms {
            if i < 0 || j < 0 || i >= trunc_u || j >= trunc_x {
                return Err(Error::InsufficientWindow(format!(
                    "term u^{i} x^{j} lies outside O(u^{trunc_u}, x^{trunc_x})"
                )));
            }
            let k = s.index(i, j);
            s.coeffs[k] = s.coeffs[k].plus(&c);
        }
        BiSeries::new(s.ring, s.ctx, trunc_u, trunc_x, s.coeffs)
    }

    fn index(&self, i: i64, j: i64) -> usize {
        (i * self.trunc_x + j) as usize
    }

    fn from_fn(ring: RingLabel, ctx: C::Ctx, trunc_u: i64, trunc_x: i64, f: impl Fn(i64, i64) -> C) -> Self {
        let mut coeffs = Vec::with_capacity((trunc_u.max(0) * trunc_x.max(0)) as usize);
        for i in 0..trunc_u.max(0) {
            for j in 0..trunc_x.max(0) {
                coeffs.push(f(i, j));
            }
        }
        BiSeries {
            ring,
            ctx,
            trunc_u: trunc_u.max(0),
            trunc_x: trunc_x.max(0),
            coeffs,
        }
    }

    pub fn ring(&self) -> RingLabel {
        self.ring
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn trunc_u(&self) -> i64 {
        self.trunc_u
    }

    pub fn trunc_x(&self) -> i64 {
        self.trunc_x
    }

    /// Coefficient of `u^i x^j`; `None` outside the window.
    pub fn coeff(&self, i: i64, j: i64) -> Option<C> {
        if i < 0 || j < 0 {
            Some(C::zero(&self.ctx))
        } else if i >= self.trunc_u || j >= self.trunc_x {
            None
        } else {
            Some(self.coeffs[self.index(i, j)].clone())
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64, &C)> + '_ {
        let tx = self.trunc_x.max(1);
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, c)| (k as i64 / tx, k as i64 % tx, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn restrict(&self, trunc_u: i64, trunc_x: i64) -> Self {
        let (tu, tx) = (trunc_u.min(self.trunc_u), trunc_x.min(self.trunc_x));
        BiSeries::from_fn(self.ring, self.ctx.clone(), tu, tx, |i, j| {
            self.coeffs[self.index(i, j)].clone()
        })
    }

    fn compatible(&self, other: &Self) -> Result<C::Ctx> {
        if self.ring != other.ring {
            return Err(Error::Incompatible(format!(
                "two-variable series over {} and {}",
                self.ring, other.ring
            )));
        }
        C::join_ctx(&self.ctx, &other.ctx)
            .ok_or_else(|| Error::Incompatible("coefficient contexts differ".into()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let ctx = self.compatible(other)?;
        let (tu, tx) = (self.trunc_u.min(other.trunc_u), self.trunc_x.min(other.trunc_x));
        Ok(BiSeries::from_fn(self.ring, ctx, tu, tx, |i, j| {
            self.coeffs[self.index(i, j)].plus(&other.coeffs[other.index(i, j)])
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        BiSeries {
            coeffs: self.coeffs.iter().map(C::negated).collect(),
            ..self.clone()
        }
    }

    /// Product on the common window.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let ctx = self.compatible(other)?;
        let (tu, tx) = (self.trunc_u.min(other.trunc_u), self.trunc_x.min(other.trunc_x));
        let mut out = BiSeries::from_fn(self.ring, ctx.clone(), tu, tx, |_, _| C::zero(&ctx));
        for i1 in 0..tu {
            for j1 in 0..tx {
                let a = &self.coeffs[self.index(i1, j1)];
                if a.is_zero() && a.zero_precision().is_none() {
                    continue;
                }
                for i2 in 0..tu - i1 {
                    for j2 in 0..tx - j1 {
                        let k = out.index(i1 + i2, j1 + j2);
                        out.coeffs[k] = out.coeffs[k].plus(&a.times(&other.coeffs[other.index(i2, j2)]));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `d/du`, known on `(trunc_u - 1, trunc_x)`.
    pub fn partial_u(&self) -> Self {
        BiSeries::from_fn(self.ring, self.ctx.clone(), self.trunc_u - 1, self.trunc_x, |i, j| {
            self.coeffs[self.index(i + 1, j)].mul_int(i + 1)
        })
    }

    /// `d/dx`, known on `(trunc_u, trunc_x - 1)`.
    pub fn partial_x(&self) -> Self {
        BiSeries::from_fn(self.ring, self.ctx.clone(), self.trunc_u, self.trunc_x - 1, |i, j| {
            self.coeffs[self.index(i, j + 1)].mul_int(j + 1)
        })
    }

    /// Coefficients of `x^j` as a series in `u`.
    pub fn x_column(&self, j: i64) -> TruncatedSeries<C> {
        let coeffs = (0..self.trunc_u).map(|i| self.coeffs[self.index(i, j)].clone()).collect();
        TruncatedSeries::new(self.ring, self.ctx.clone(), 0, coeffs).expect("column of a valid series")
    }
}

/// `a du + b dx` with both parts on one window.
#[derive(Debug, Clone, PartialEq)]
pub struct BiForm<C: Scalar> {
    du: BiSeries<C>,
    dx: BiSeries<C>,
}

impl<C: Scalar> BiForm<C> {
    pub fn new(du: BiSeries<C>, dx: BiSeries<C>) -> Result<Self> {
        if du.ring != dx.ring || (du.trunc_u, du.trunc_x) != (dx.trunc_u, dx.trunc_x) {
            return Err(Error::Incompatible(format!(
                "form parts over {} O(u^{}, x^{}) and {} O(u^{}, x^{})",
                du.ring, du.trunc_u, du.trunc_x, dx.ring, dx.trunc_u, dx.trunc_x
            )));
        }
        Ok(BiForm { du, dx })
    }

    pub fn zero(ring: RingLabel, ctx: C::Ctx, trunc_u: i64, trunc_x: i64) -> Result<Self> {
        let z = BiSeries::zero(ring, ctx, trunc_u, trunc_x)?;
        Ok(BiForm { du: z.clone(), dx: z })
    }

    pub fn du(&self) -> &BiSeries<C> {
        &self.du
    }

    pub fn dx(&self) -> &BiSeries<C> {
        &self.dx
    }

    pub fn ring(&self) -> RingLabel {
        self.du.ring
    }

    pub fn is_zero(&self) -> bool {
        self.du.is_zero() && self.dx.is_zero()
    }
}

/// `ds = s_u du + s_x dx`, both parts on `(trunc_u - 1, trunc_x - 1)`.
pub fn total_d<C: Scalar>(s: &BiSeries<C>) -> BiForm<C> {
    let (tu, tx) = (s.trunc_u - 1, s.trunc_x - 1);
    BiForm {
        du: s.partial_u().restrict(tu, tx),
        dx: s.partial_x().restrict(tu, tx),
    }
}

/// Coefficient of `du ^ dx` in `d(a du + b dx) = (b_u - a_x) du ^ dx`.
pub fn exterior_d<C: Scalar>(f: &BiForm<C>) -> Result<BiSeries<C>> {
    f.dx.partial_u().sub(&f.du.partial_x())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FramedFamily<C: Scalar> {
    signature: Signature,
    ring: RingLabel,
    ctx: C::Ctx,
    connection: Matrix<BiForm<C>>,
}

impl<C: Scalar> FramedFamily<C> {
    /// Checks size and strict block upper triangularity.
    pub fn new(signature: Signature, ring: RingLabel, ctx: C::Ctx, connection: Matrix<BiForm<C>>) -> Result<Self> {
        let r = signature.total();
        if connection.rows() != r || connection.cols() != r {
            return Err(Error::InvalidInput(format!(
                "connection is {}x{}, the signature {:?} needs {r}x{r}",
                connection.rows(),
                connection.cols(),
                signature.parts()
            )));
        }
        let mut joined = ctx;
        for (i, j, f) in connection.iter() {
            if f.ring() != ring {
                return Err(Error::Incompatible(format!(
                    "entry ({}, {}) lives in {}, the family in {ring}",
                    i + 1,
                    j + 1,
                    f.ring()
                )));
            }
            joined = C::join_ctx(&joined, &f.du.ctx)
                .ok_or_else(|| Error::Incompatible("coefficient contexts differ".into()))?;
            let (a, b) = (signature.block_of(i), signature.block_of(j));
            if a >= b && !f.is_zero() {
                return Err(Error::NotFramed {
                    block_row: a + 1,
                    block_col: b + 1,
                });
            }
        }
        Ok(FramedFamily {
            signature,
            ring,
            ctx: joined,
            connection,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn ring(&self) -> RingLabel {
        self.ring
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn connection(&self) -> &Matrix<BiForm<C>> {
        &self.connection
    }

    pub fn entry(&self, i: usize, j: usize) -> &BiForm<C> {
        self.connection.get(i, j)
    }
}

/// `nabla(e_1) = 0`, `nabla(e_2) = e_1 (x) dx / (1 + x)` on `O(u^tu, x^tx)`.
pub fn log_family<C: Scalar>(ring: RingLabel, ctx: C::Ctx, trunc_u: i64, trunc_x: i64) -> Result<FramedFamily<C>> {
    let zero = BiForm::zero(ring, ctx.clone(), trunc_u, trunc_x)?;
    let geometric = (0..trunc_x).map(|j| (0, j, C::from_int(&ctx, if j % 2 == 0 { 1 } else { -1 })));
    let dx = if trunc_u > 0 {
        BiSeries::from_terms(ring, ctx.clone(), geometric, trunc_u, trunc_x)?
    } else {
        BiSeries::zero(ring, ctx.clone(), trunc_u, trunc_x)?
    };
    let c12 = BiForm::new(zero.du.clone(), dx)?;
    let connection = Matrix::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { c12.clone() } else { zero.clone() });
    FramedFamily::new(Signature::new(vec![1, 1])?, ring, ctx, connection)
}

/// `F = d_u C_x - d_x C_u + C_u C_x - C_x C_u`, the `du ^ dx` coefficient.
pub fn curvature<C: Scalar>(family: &FramedFamily<C>) -> Result<Matrix<BiSeries<C>>> {
    let r = family.signature.total();
    Matrix::try_from_fn(r, r, |i, j| {
        let f = family.entry(i, j);
        let mut acc = f.dx.partial_u().sub(&f.du.partial_x())?;
        for k in 0..r {
            let (a, b) = (family.entry(i, k), family.entry(k, j));
            if (a.is_zero() && a.du.zero_precision_free()) || (b.is_zero() && b.du.zero_precision_free()) {
                continue;
            }
            acc = acc.add(&a.du.mul(&b.dx)?)?.sub(&a.dx.mul(&b.du)?)?;
        }
        Ok(acc)
    })
}

impl<C: Scalar> BiSeries<C> {
    fn zero_precision_free(&self) -> bool {
        self.coeffs.iter().all(|c| c.zero_precision().is_none())
    }
}

/// Image of `s` under `x -> v - 1` on the window `[0, trunc)`.
fn substitute<C: Scalar>(s: &BiSeries<C>, shifted: &TruncatedSeries<C>, trunc: i64) -> Result<TruncatedSeries<C>> {
    let ring = s.ring;
    let ctx = C::join_ctx(&s.ctx, shifted.ctx())
        .ok_or_else(|| Error::Incompatible("coefficient contexts differ".into()))?;
    let mut acc = TruncatedSeries::zero(ring, ctx.clone(), 0, trunc)?;
    if s.is_zero() && s.zero_precision_free() {
        return Ok(acc);
    }
    let mut power = TruncatedSeries::one(ring, ctx, trunc)?;
    for j in 0..s.trunc_x {
        acc = acc.add(&s.x_column(j).mul(&power)?.truncate(trunc))?;
        if j + 1 < s.trunc_x {
            power = power.mul(shifted)?.truncate(trunc);
        }
    }
    Ok(acc)
}

/// Pulls a family back along the section `x -> v - 1`.
///
/// With `w = v - 1` of order `k >= 1` the unknown `x^j` terms (`j >= trunc_x`)
/// start in degree `trunc_x * k`, which must not undercut the output window.
/// A nonzero constant term of `w` is only allowed over an integral p-adic
/// ring with `v_p(w_0) >= 1`, where it costs precision.
pub fn section_pullback<C: Scalar>(family: &FramedFamily<C>, v: &TruncatedSeries<C>) -> Result<FramedNablaModule<C>> {
    let ring = family.ring;
    if v.ring() != ring {
        return Err(Error::Incompatible(format!(
            "section lives in {}, the family in {ring}",
            v.ring()
        )));
    }
    let ctx = C::join_ctx(&family.ctx, v.ctx())
        .ok_or_else(|| Error::Incompatible("coefficient contexts differ".into()))?;
    let c0 = v
        .coeff(0)
        .ok_or_else(|| Error::InsufficientWindow("the section's constant term is not known".into()))?;
    if c0.is_zero() || (ring.integral() && c0.order() != Some(0)) {
        return Err(Error::NonUnit(format!("the section {c0} + ... is not a unit of {ring}")));
    }
    let shifted = v.sub(&TruncatedSeries::one(ring, ctx.clone(), v.trunc_order())?)?;
    let (tu, tx) = family
        .connection
        .iter()
        .map(|(_, _, f)| (f.du.trunc_u, f.du.trunc_x))
        .fold((i64::MAX, i64::MAX), |(a, b), (c, d)| (a.min(c), b.min(d)));
    let base = tu.min(v.trunc_order());
    let w0 = shifted.coeff(0).expect("constant term is known");
    // window and precision cap for substituting into a part that is not exactly zero
    let plan: Result<(i64, Option<i64>)> = if w0.is_zero() {
        match shifted.leading_degree() {
            Some(k) if tx.saturating_mul(k) < base => Err(Error::InsufficientWindow(format!(
                "x is known modulo x^{tx}, so the pullback along v - 1 of order {k} is only known below degree {}, short of {base}",
                tx * k
            ))),
            _ => Ok((base, None)),
        }
    } else {
        let v0 = w0.order().expect("nonzero");
        let integral_family = ring.integral() && shifted.terms().all(|(_, c)| c.is_integral());
        if v0 < 1 || !integral_family {
            Err(Error::InsufficientWindow(format!(
                "v(0) - 1 = {w0} does not shrink x^j, so the substitution needs every x^j term"
            )))
        } else {
            Ok((base.min(tx), Some(v0)))
        }
    };
    let trunc = plan.as_ref().map_or(base, |&(t, _)| t);
    let exact_zero = |s: &BiSeries<C>| s.is_zero() && s.zero_precision_free();
    let dv = derive(v).into_coefficient();
    let r = family.signature.total();
    let entries = Matrix::try_from_fn(r, r, |i, j| {
        let f = family.entry(i, j);
        let mut cap = None;
        let a = if exact_zero(&f.du) {
            TruncatedSeries::zero(ring, ctx.clone(), 0, trunc)?
        } else {
            cap = plan.clone()?.1;
            substitute(&f.du, &shifted, trunc)?
        };
        // a constant section has dv = 0, so the dx parts drop out
        let b = if exact_zero(&f.dx) || dv.is_zero() {
            TruncatedSeries::zero(ring, ctx.clone(), 0, trunc.min(dv.trunc_order()).max(0))?
        } else {
            cap = plan.clone()?.1;
            substitute(&f.dx, &shifted, trunc)?.mul(&dv)?
        };
        let mut form = a.add(&b)?;
        if let Some(v0) = cap {
            let coeffs = form.terms().map(|(d, c)| c.cap_precision((tx - d) * v0)).collect();
            form = TruncatedSeries::new(ring, form.ctx().clone(), form.min_degree(), coeffs)?;
        }
        Ok::<_, Error>(DifferentialForm::new(form))
    })?;
    validate_framed(family.signature.clone(), ConnectionMatrix::new(ring, ctx, entries)?)
}

/// The line integral at the section `v`: the invariant of the pulled-back module.
pub fn line_integral<C: Scalar>(family: &FramedFamily<C>, v: &TruncatedSeries<C>) -> Result<InvariantRepresentative<C>> {
    let module = section_pullback(family, v)?;
    invariant(&module, v.trunc_order())
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::coeff::{PAdic, PadicCtx, Rational};
    use crate::matrix::is_identity;
    use crate::series::{dlog, formal_log, padic_log_dagger, valuation_profile};

    fn q(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn bi(terms: &[(i64, i64, i64)], tu: i64, tx: i64) -> BiSeries<Rational> {
        BiSeries::from_terms(RingLabel::FormalChar0, (), terms.iter().map(|&(i, j, c)| (i, j, q(c))), tu, tx).unwrap()
    }

    fn ints(cs: &[i64]) -> TruncatedSeries<Rational> {
        TruncatedSeries::new(RingLabel::FormalChar0, (), 0, cs.iter().map(|&c| q(c)).collect()).unwrap()
    }

    #[test]
    fn total_d_examples() {
        let f = total_d(&bi(&[(1, 1, 1)], 4, 4));
        assert_eq!(f.du(), &bi(&[(0, 1, 1)], 3, 3));
        assert_eq!(f.dx(), &bi(&[(1, 0, 1)], 3, 3));
        assert!(total_d(&bi(&[(0, 0, 5)], 3, 3)).is_zero());
        let f = total_d(&bi(&[(0, 2, 1), (3, 0, 1)], 5, 5));
        assert_eq!(f.du(), &bi(&[(2, 0, 3)], 4, 4));
        assert_eq!(f.dx(), &bi(&[(0, 1, 2)], 4, 4));
    }

    #[test]
    fn d_squared_vanishes() {
        let s = bi(&[(1, 2, 3), (2, 1, -1), (0, 3, 7), (3, 3, 2)], 5, 5);
        assert!(exterior_d(&total_d(&s)).unwrap().is_zero());
    }

    #[test]
    fn curvature_examples() {
        let fam = log_family::<Rational>(RingLabel::FormalChar0, (), 6, 6).unwrap();
        let f = curvature(&fam).unwrap();
        assert!(f.iter().all(|(_, _, s)| s.is_zero()));

        let z = BiForm::zero(RingLabel::FormalChar0, (), 4, 4).unwrap();
        let x_du = BiForm::new(bi(&[(0, 1, 1)], 4, 4), bi(&[], 4, 4)).unwrap();
        let conn = Matrix::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { x_du.clone() } else { z.clone() });
        let fam = FramedFamily::new(Signature::new(vec![1, 1]).unwrap(), RingLabel::FormalChar0, (), conn).unwrap();
        let f = curvature(&fam).unwrap();
        assert_eq!(f.get(0, 1).coeff(0, 0), Some(q(-1)));
        assert!(f.get(0, 1).terms().skip(1).all(|(_, _, c)| c == &q(0)));
    }

    #[test]
    fn family_must_be_framed() {
        let z = BiForm::zero(RingLabel::FormalChar0, (), 3, 3).unwrap();
        let du = BiForm::new(bi(&[(0, 0, 1)], 3, 3), bi(&[], 3, 3)).unwrap();
        let conn = Matrix::from_fn(2, 2, |i, j| if (i, j) == (1, 1) { du.clone() } else { z.clone() });
        let err = FramedFamily::new(Signature::new(vec![1, 1]).unwrap(), RingLabel::FormalChar0, (), conn);
        assert_eq!(err.unwrap_err(), Error::NotFramed { block_row: 2, block_col: 2 });
    }

    #[test]
    fn pullback_gives_log_module() {
        let fam = log_family::<Rational>(RingLabel::FormalChar0, (), 8, 8).unwrap();
        let v = ints(&[1, -1, 0, 0, 0, 0, 0, 0]);
        let m = section_pullback(&fam, &v).unwrap();
        let expected = dlog(&v).unwrap().into_coefficient();
        assert!(m.connection().entry(0, 1).coefficient().agrees_with(&expected).unwrap());

        let v = ints(&[1, 1, 0, 0, 0, 0]);
        let m = section_pullback(&fam, &v).unwrap();
        // du / (1 + u)
        assert_eq!(m.connection().entry(0, 1).coefficient(), &ints(&[1, -1, 1, -1, 1]));
    }

    #[test]
    fn constant_section() {
        let z = BiForm::zero(RingLabel::FormalChar0, (), 4, 4).unwrap();
        let c = BiForm::new(bi(&[(1, 0, 2), (0, 1, 5)], 4, 4), bi(&[(0, 0, 1)], 4, 4)).unwrap();
        let conn = Matrix::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { c.clone() } else { z.clone() });
        let fam = FramedFamily::new(Signature::new(vec![1, 1]).unwrap(), RingLabel::FormalChar0, (), conn).unwrap();
        let m = section_pullback(&fam, &ints(&[1, 0, 0, 0])).unwrap();
        assert_eq!(m.connection().entry(0, 1).coefficient(), &ints(&[0, 2, 0]));
        let inv = line_integral(&log_family(RingLabel::FormalChar0, (), 5, 5).unwrap(), &ints(&[3, 0, 0, 0])).unwrap();
        assert!(is_identity(inv.matrix.entries()));
    }

    #[test]
    fn short_fiber_window_is_an_error() {
        let fam = log_family::<Rational>(RingLabel::FormalChar0, (), 8, 3).unwrap();
        let v = ints(&[1, -1, 0, 0, 0, 0, 0, 0]);
        assert!(matches!(section_pullback(&fam, &v), Err(Error::InsufficientWindow(_))));
        let v = ints(&[2, -1, 0, 0]);
        assert!(matches!(section_pullback(&fam, &v), Err(Error::InsufficientWindow(_))));
    }

    #[test]
    fn formal_line_integral() {
        let fam = log_family::<Rational>(RingLabel::FormalChar0, (), 6, 6).unwrap();
        let v = ints(&[1, -1, 0, 0, 0]);
        let inv = line_integral(&fam, &v).unwrap();
        assert_eq!(inv.matrix.entry(0, 1), &formal_log(&v).unwrap());
    }

    #[test]
    fn padic_line_integral() {
        let ctx = PadicCtx::new(2, 12).unwrap();
        let fam = log_family::<PAdic>(RingLabel::GammaPlus, ctx, 12, 12).unwrap();
        let v = TruncatedSeries::new(
            RingLabel::GammaPlus,
            ctx,
            0,
            [1, -1, 0, 0, 0, 0, 0, 0, 0].iter().map(|&c| PAdic::from_int(2, c, 12)).collect(),
        )
        .unwrap();
        let inv = line_integral(&fam, &v).unwrap();
        let entry = inv.matrix.entry(0, 1);
        assert_eq!(entry, &padic_log_dagger(&v).unwrap());
        let profile = valuation_profile(entry);
        for pair in [(2, -1), (4, -2), (8, -3)] {
            assert!(profile.contains(&pair));
        }
    }

    #[test]
    fn padic_constant_offset_costs_precision() {
        // v = 3 + u over Z_2: v - 1 = 2 + u
        let ctx = PadicCtx::new(2, 10).unwrap();
        let fam = log_family::<PAdic>(RingLabel::GammaPlus, ctx, 6, 6).unwrap();
        let v = TruncatedSeries::new(
            RingLabel::GammaPlus,
            ctx,
            0,
            [3, 1, 0, 0, 0, 0].iter().map(|&c| PAdic::from_int(2, c, 10)).collect(),
        )
        .unwrap();
        let m = section_pullback(&fam, &v).unwrap();
        let c = m.connection().entry(0, 1).coefficient();
        let expected = dlog(&v).unwrap().into_coefficient();
        assert!(c.agrees_with(&expected).unwrap());
        assert!(c.terms().all(|(d, x)| x.abs_prec() <= 6 - d));
    }
}
