//! Connections in a chosen frame: fundamental solutions, framed modules,
//! blockwise unipotent trivialization and the line-integral invariant.
//!
//! A connection matrix `C` acts by `nabla(e_j) = sum_i e_i (x) C_ij`. A
//! trivialization is a unipotent `V` with `dV = V C` and `V(0) = I`; the
//! horizontal basis `S` solves `dS = -C S`, and `V = S^-1`.

use std::ops::Range;

use crate::coeff::{Rational, Scalar};
use crate::error::{Error, Result};
use crate::matrix::{series_matmul, Matrix};
use crate::series::{antiderive, derive, DifferentialForm, RingLabel, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    parts: Vec<usize>,
}

impl Signature {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("signature must have at least one part".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "signature parts must be positive: {parts:?}"
            )));
        }
        Ok(Signature { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn block_count(&self) -> usize {
        self.parts.len()
    }

    /// Indices covered by block `b`.
    pub fn block_range(&self, b: usize) -> Range<usize> {
        let start: usize = self.parts[..b].iter().sum();
        start..start + self.parts[b]
    }

    /// Block containing index `i`.
    pub fn block_of(&self, i: usize) -> usize {
        let mut end = 0;
        for (b, &r) in self.parts.iter().enumerate() {
            end += r;
            if i < end {
                return b;
            }
        }
        panic!("index {i} outside a signature of total {}", self.total());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix<C: Scalar> {
    ring: RingLabel,
    ctx: C::Ctx,
    entries: Matrix<DifferentialForm<C>>,
}

impl<C: Scalar> ConnectionMatrix<C> {
    /// Square matrix of forms, all over `ring` with contexts compatible with `ctx`.
    pub fn new(ring: RingLabel, ctx: C::Ctx, entries: Matrix<DifferentialForm<C>>) -> Result<Self> {
        if !entries.is_square() || entries.rows() == 0 {
            return Err(Error::InvalidInput(format!(
                "connection matrix must be square and nonempty, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        let mut joined = ctx;
        for (i, j, f) in entries.iter() {
            if f.ring() != ring {
                return Err(Error::Incompatible(format!(
                    "entry ({}, {}) lives in {}, the connection in {ring}",
                    i + 1,
                    j + 1,
                    f.ring()
                )));
            }
            joined = C::join_ctx(&joined, f.coefficient().ctx()).ok_or_else(|| {
                Error::Incompatible(format!("entry ({}, {}) has another coefficient context", i + 1, j + 1))
            })?;
        }
        Ok(ConnectionMatrix {
            ring,
            ctx: joined,
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    pub fn ring(&self) -> RingLabel {
        self.ring
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn entries(&self) -> &Matrix<DifferentialForm<C>> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &DifferentialForm<C> {
        self.entries.get(i, j)
    }

    /// The coefficient series of every entry.
    pub fn coefficients(&self) -> Matrix<TruncatedSeries<C>> {
        self.entries.map(|f| f.coefficient().clone())
    }

    /// Smallest truncation order among the entries.
    pub fn trunc_order(&self) -> i64 {
        self.entries
            .iter()
            .map(|(_, _, f)| f.coefficient().trunc_order())
            .min()
            .expect("nonempty matrix")
    }

    pub fn neg(&self) -> Self {
        ConnectionMatrix {
            ring: self.ring,
            ctx: self.ctx.clone(),
            entries: self
                .entries
                .map(|f| DifferentialForm::new(f.coefficient().neg())),
        }
    }

    pub fn relabel(&self, ring: RingLabel) -> Result<Self> {
        let entries = self
            .entries
            .try_map(|f| f.coefficient().relabel(ring).map(DifferentialForm::new))?;
        ConnectionMatrix::new(ring, self.ctx.clone(), entries)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FramedNablaModule<C: Scalar> {
    signature: Signature,
    connection: ConnectionMatrix<C>,
}

impl<C: Scalar> FramedNablaModule<C> {
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn connection(&self) -> &ConnectionMatrix<C> {
        &self.connection
    }

    pub fn ring(&self) -> RingLabel {
        self.connection.ring
    }
}

/// Checks that the connection is strictly block upper triangular.
pub fn validate_framed<C: Scalar>(
    signature: Signature,
    connection: ConnectionMatrix<C>,
) -> Result<FramedNablaModule<C>> {
    if connection.size() != signature.total() {
        return Err(Error::InvalidInput(format!(
            "connection has size {} but the signature {:?} has total {}",
            connection.size(),
            signature.parts(),
            signature.total()
        )));
    }
    for a in 0..signature.block_count() {
        for b in 0..=a {
            let nonzero = signature.block_range(a).any(|i| {
                signature
                    .block_range(b)
                    .any(|j| !connection.entry(i, j).is_zero())
            });
            if nonzero {
                return Err(Error::NotFramed {
                    block_row: a + 1,
                    block_col: b + 1,
                });
            }
        }
    }
    Ok(FramedNablaModule {
        signature,
        connection,
    })
}

/// `S = sum U_i t^i` with `U_0 = I` and `(i + 1) U_{i+1} = sum_j N_j U_{i-j}`,
/// so that `S' = N S`. Known modulo `t^min(T, trunc(N) + 1)`.
pub fn fundamental_solution(
    n: &ConnectionMatrix<Rational>,
    trunc: i64,
) -> Result<Matrix<TruncatedSeries<Rational>>> {
    if n.ring() != RingLabel::FormalChar0 {
        return Err(Error::UnsupportedRing {
            op: "the fundamental-solution recurrence",
            ring: n.ring(),
        });
    }
    if trunc < 1 {
        return Err(Error::InvalidInput(format!("truncation order must be at least 1, got {trunc}")));
    }
    let r = n.size();
    let t = trunc.min(n.trunc_order() + 1) as usize;
    let zero = Rational::zero(&());
    let nj = |j: usize| Matrix::from_fn(r, r, |a, b| n.entry(a, b).coefficient().coeff(j as i64).unwrap_or_else(|| zero.clone()));
    let ns: Vec<Matrix<Rational>> = (0..t.saturating_sub(1)).map(nj).collect();
    let mut us: Vec<Matrix<Rational>> = vec![Matrix::from_fn(r, r, |a, b| {
        Rational::from_int(&(), (a == b) as i64)
    })];
    for i in 0..t.saturating_sub(1) {
        let mut next = Matrix::from_fn(r, r, |_, _| zero.clone());
        for j in 0..=i {
            let (nm, um) = (&ns[j], &us[i - j]);
            for a in 0..r {
                for b in 0..r {
                    let mut acc = next.get(a, b).clone();
                    for k in 0..r {
                        let x = nm.get(a, k);
                        if !Scalar::is_zero(x) {
                            acc += x * um.get(k, b);
                        }
                    }
                    next.set(a, b, acc);
                }
            }
        }
        us.push(next.map(|x| x.div_int(i as i64 + 1)));
    }
    Matrix::try_from_fn(r, r, |a, b| {
        TruncatedSeries::new(
            RingLabel::FormalChar0,
            (),
            0,
            us.iter().map(|u| u.get(a, b).clone()).collect(),
        )
    })
}

/// Columns are a basis of horizontal sections: the fundamental solution for `N = -C`.
pub fn horizontal_basis(
    module: &FramedNablaModule<Rational>,
    trunc: i64,
) -> Result<Matrix<TruncatedSeries<Rational>>> {
    fundamental_solution(&module.connection.neg(), trunc)
}

/// An element of the unipotent group of a signature: identity diagonal
/// blocks, zero blocks below the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct UnipotentMatrix<C: Scalar> {
    signature: Signature,
    ring: RingLabel,
    entries: Matrix<TruncatedSeries<C>>,
}

impl<C: Scalar> UnipotentMatrix<C> {
    pub fn new(signature: Signature, ring: RingLabel, entries: Matrix<TruncatedSeries<C>>) -> Result<Self> {
        if !entries.is_square() || entries.rows() != signature.total() {
            return Err(Error::InvalidInput(format!(
                "a {}x{} matrix does not fit the signature {:?}",
                entries.rows(),
                entries.cols(),
                signature.parts()
            )));
        }
        for (i, j, s) in entries.iter() {
            if s.ring() != ring {
                return Err(Error::Incompatible(format!(
                    "entry ({}, {}) lives in {}, expected {ring}",
                    i + 1,
                    j + 1,
                    s.ring()
                )));
            }
            let (bi, bj) = (signature.block_of(i), signature.block_of(j));
            if bi < bj {
                continue;
            }
            let ok = s.terms().all(|(d, c)| {
                if i == j && d == 0 {
                    c.minus(&C::one(s.ctx())).is_zero()
                } else {
                    c.is_zero()
                }
            });
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "entry ({}, {}) breaks the unipotent block shape",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(UnipotentMatrix {
            signature,
            ring,
            entries,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn ring(&self) -> RingLabel {
        self.ring
    }

    pub fn entries(&self) -> &Matrix<TruncatedSeries<C>> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &TruncatedSeries<C> {
        self.entries.get(i, j)
    }

    pub fn into_entries(self) -> Matrix<TruncatedSeries<C>> {
        self.entries
    }

    /// Constant terms; `None` where an entry is not known in degree 0.
    pub fn at_zero(&self) -> Matrix<Option<C>> {
        self.entries.map(|s| s.coeff(0))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.signature != other.signature {
            return Err(Error::Incompatible("unipotent matrices of different signatures".into()));
        }
        UnipotentMatrix::new(
            self.signature.clone(),
            self.ring,
            series_matmul(&self.entries, &other.entries)?,
        )
    }

    /// Inverse by back-substitution along the superdiagonal blocks:
    /// `W_ij = -V_ij - sum W_ik V_kj` over blocks strictly between.
    pub fn inverse(&self) -> Result<Self> {
        let sig = &self.signature;
        let n = sig.total();
        let mut w = self.entries.clone();
        for offset in 1..sig.block_count() {
            for a in 0..sig.block_count() - offset {
                let b = a + offset;
                for i in sig.block_range(a) {
                    for j in sig.block_range(b) {
                        let mut acc = self.entries.get(i, j).neg();
                        for k in 0..n {
                            let bk = sig.block_of(k);
                            if a < bk && bk < b {
                                acc = acc.sub(&w.get(i, k).mul(self.entries.get(k, j))?)?;
                            }
                        }
                        w.set(i, j, acc);
                    }
                }
            }
        }
        UnipotentMatrix::new(sig.clone(), self.ring, w)
    }
}

/// Blockwise trivialization: `V_ab = int (C_ab + sum_{a<c<b} V_ac C_cb)`
/// by superdiagonal offset, then row, each with zero constant term.
pub fn trivialize<C: Scalar>(module: &FramedNablaModule<C>, trunc: i64) -> Result<UnipotentMatrix<C>> {
    let ring = module.ring();
    if !matches!(
        ring,
        RingLabel::FormalChar0 | RingLabel::FormalLaurent | RingLabel::RobbaPlus | RingLabel::Robba
    ) {
        return Err(Error::UnsupportedRing {
            op: "trivialization",
            ring,
        });
    }
    let sig = &module.signature;
    let conn = &module.connection;
    let ctx = conn.ctx().clone();
    let n = sig.total();
    let mut v = Matrix::try_from_fn(n, n, |i, j| {
        if i == j {
            TruncatedSeries::one(ring, ctx.clone(), trunc)
        } else {
            TruncatedSeries::zero(ring, ctx.clone(), 0, trunc.max(0))
        }
    })?;
    for offset in 1..sig.block_count() {
        for a in 0..sig.block_count() - offset {
            let b = a + offset;
            for i in sig.block_range(a) {
                for j in sig.block_range(b) {
                    let mut integrand = conn.entry(i, j).coefficient().clone();
                    for k in 0..n {
                        let bk = sig.block_of(k);
                        if a < bk && bk < b {
                            integrand = integrand.add(&v.get(i, k).mul(conn.entry(k, j).coefficient())?)?;
                        }
                    }
                    let entry = antiderive(&DifferentialForm::new(integrand), ring)?;
                    v.set(i, j, entry.truncate(trunc));
                }
            }
        }
    }
    UnipotentMatrix::new(sig.clone(), ring, v)
}

/// `dV - V C` vanishes on the window both sides know, capped at `T - 1`.
pub fn matrix_residual<C: Scalar>(
    module: &FramedNablaModule<C>,
    v: &Matrix<TruncatedSeries<C>>,
    trunc: i64,
) -> Result<bool> {
    let n = module.signature.total();
    if v.rows() != n || v.cols() != n {
        return Err(Error::InvalidInput(format!(
            "matrix is {}x{}, module has rank {n}",
            v.rows(),
            v.cols()
        )));
    }
    let vc = series_matmul(v, &module.connection.coefficients())?;
    for (i, j, x) in v.iter() {
        let lhs = derive(x).into_coefficient().truncate(trunc - 1);
        let rhs = vc.get(i, j).truncate(trunc - 1);
        if !lhs.agrees_with(&rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The double-coset representative attached to a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantRepresentative<C: Scalar> {
    pub matrix: UnipotentMatrix<C>,
    /// `matrix(0) = I`, which fixes the right coset.
    pub normalized: bool,
}

/// Pulls the connection back to `R_+` (or keeps `k[[t]]`) and returns the
/// trivialization with `V(0) = I`.
pub fn invariant<C: Scalar>(module: &FramedNablaModule<C>, trunc: i64) -> Result<InvariantRepresentative<C>> {
    let target = match module.ring() {
        RingLabel::FormalChar0 => RingLabel::FormalChar0,
        RingLabel::GammaPlus | RingLabel::EPlus | RingLabel::RobbaPlus => RingLabel::RobbaPlus,
        ring => {
            return Err(Error::UnsupportedRing {
                op: "the line-integral invariant",
                ring,
            })
        }
    };
    let relabeled = FramedNablaModule {
        signature: module.signature.clone(),
        connection: module.connection.relabel(target)?,
    };
    let matrix = trivialize(&relabeled, trunc)?;
    let normalized = matrix.at_zero().iter().all(|(i, j, c)| {
        c.as_ref().is_some_and(|c| {
            let ctx = matrix.entry(i, j).ctx();
            c.minus(&C::from_int(ctx, (i == j) as i64)).is_zero()
        })
    });
    Ok(InvariantRepresentative { matrix, normalized })
}
