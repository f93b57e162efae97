//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use lineint::coeff::Coefficient;
use lineint::matrix::{is_identity, series_matmul};
use lineint::nabla::{horizontal_basis, matrix_residual, trivialize, validate_framed, ConnectionMatrix, Signature};
use lineint::scheme::{curvature, line_integral, log_family, BiForm, BiSeries, FramedFamily};
use lineint::series::{
    antiderive, degree_of_unit, derive, dlog, formal_log, padic_log_dagger, padic_log_onemius_py, residue,
    unboundedness_witness, valuation_profile,
};
use lineint::{DifferentialForm, Error, Matrix, PAdic, PadicCtx, Rational, RingLabel, Scalar, TruncatedSeries};
use lineint_cli::render::{biseries_text, form_text, matrix_text, series_text, RenderScalar};
use lineint_cli::run_with_stdin;
use lineint_cli::syntax::{parse_biseries_matrix, parse_form, parse_series, parse_series_matrix, CliScalar};

type Check = Result<(), String>;

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_series(ring: RingLabel, min: i64, cs: Vec<Rational>) -> TruncatedSeries<Rational> {
    TruncatedSeries::new(ring, (), min, cs).unwrap()
}

fn padic_series(ring: RingLabel, ctx: PadicCtx, min: i64, cs: &[i64]) -> TruncatedSeries<PAdic> {
    let p = ctx.prime();
    TruncatedSeries::new(ring, ctx, min, cs.iter().map(|&c| PAdic::from_int(p, c, ctx.prec())).collect()).unwrap()
}

fn small_rational(rng: &mut StdRng) -> Rational {
    q(rng.gen_range(-9..=9), rng.gen_range(1..=6))
}

/// Truncated product of coefficient vectors starting in degree 0.
fn conv(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    let mut out = vec![q(0, 1); len];
    for (i, x) in a.iter().enumerate().take(len) {
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `-sum_{n >= 1} w^n / n` on `len` coefficients, for `w(0) = 0`.
fn log_one_minus(w: &[Rational], len: usize) -> Vec<Rational> {
    let mut acc = vec![q(0, 1); len];
    let mut power = w.to_vec();
    for n in 1..len as i64 {
        for (a, x) in acc.iter_mut().zip(&power) {
            *a -= x / BigInt::from(n);
        }
        power = conv(&power, w, len);
    }
    acc
}

/// `-u^n / n` for `0 < n < len`: the coefficients of `log(1 - u)`.
fn log_one_minus_u(len: usize) -> Vec<Rational> {
    (0..len as i64).map(|n| if n == 0 { q(0, 1) } else { q(-1, n) }).collect()
}

fn criterion_1() -> Check {
    let v = rat_series(RingLabel::FormalChar0, 0, [vec![q(1, 1), q(-1, 1)], vec![q(0, 1); 62]].concat());
    let z = formal_log(&v).map_err(|e| e.to_string())?;
    ensure(z.min_degree() == 0 && z.trunc_order() == 64, || format!("window [{}, {})", z.min_degree(), z.trunc_order()))?;
    let expected = log_one_minus_u(64);
    ensure(z.coeffs() == expected.as_slice(), || "coefficients differ from -1/n".into())
}

fn random_unit(rng: &mut StdRng, len: usize) -> TruncatedSeries<Rational> {
    let mut cs = vec![loop {
        let c = small_rational(rng);
        if !Scalar::is_zero(&c) {
            break c;
        }
    }];
    cs.extend((1..len).map(|_| if rng.gen_bool(0.6) { small_rational(rng) } else { q(0, 1) }));
    rat_series(RingLabel::FormalChar0, 0, cs)
}

fn criterion_2(rng: &mut StdRng) -> Check {
    for k in 0..200 {
        let a = random_unit(rng, 32);
        let b = random_unit(rng, 32);
        let ab = a.mul(&b).unwrap();
        let la = formal_log(&a).unwrap();
        let lhs = formal_log(&ab).unwrap();
        let rhs = la.add(&formal_log(&b).unwrap()).unwrap();
        ensure(lhs == rhs, || format!("case {k}: log(ab) != log(a) + log(b)"))?;
        let c = a.coeff(0).unwrap();
        let constant = TruncatedSeries::constant(RingLabel::FormalChar0, (), c, 32).unwrap();
        ensure(formal_log(&constant).unwrap().is_zero(), || format!("case {k}: log of a constant"))?;
        if k < 20 {
            let c0 = a.coeff(0).unwrap();
            let w: Vec<Rational> = a.coeffs().iter().enumerate().map(|(d, x)| if d == 0 { q(0, 1) } else { -(x / &c0) }).collect();
            ensure(la.coeffs() == log_one_minus(&w, 32).as_slice(), || format!("case {k}: differs from the power-sum oracle"))?;
        }
    }
    Ok(())
}

fn criterion_3(rng: &mut StdRng) -> Check {
    for k in 0..100 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let ctx = PadicCtx::new(p, 12).unwrap();
        let d: i64 = rng.gen_range(-5..=5);
        let mut values = vec![0i64; 32];
        let lead = loop {
            let c = rng.gen_range(1..60i64);
            if c % p as i64 != 0 {
                break c * if rng.gen_bool(0.5) { -1 } else { 1 };
            }
        };
        values[(d + 8) as usize] = lead;
        for slot in values.iter_mut().skip((d + 9) as usize) {
            *slot = rng.gen_range(-60..=60);
        }
        let x = padic_series(RingLabel::E, ctx, -8, &values);
        let r = residue(&dlog(&x).map_err(|e| format!("case {k}: {e}"))?).map_err(|e| format!("case {k}: {e}"))?;
        let deg = degree_of_unit(&x).map_err(|e| format!("case {k}: {e}"))?;
        ensure(deg == d, || format!("case {k}: degree {deg}, planted {d}"))?;
        ensure(r.agrees_with(&PAdic::from_int(p, d, 12)), || format!("case {k}: residue {r} for degree {d}"))?;
    }
    Ok(())
}

fn criterion_4(rng: &mut StdRng) -> Check {
    for k in 0..100 {
        let min: i64 = rng.gen_range(-6..=-1);
        let len = rng.gen_range((1 - min) as usize..(15 - min) as usize);
        if k % 2 == 0 {
            let s = rat_series(RingLabel::FormalLaurent, min, (0..len).map(|_| small_rational(rng)).collect());
            let ds = derive(&s);
            ensure(Scalar::is_zero(&residue(&ds).unwrap()), || format!("case {k}: nonzero residue"))?;
            let back = antiderive(&ds, RingLabel::FormalLaurent).map_err(|e| format!("case {k}: {e}"))?;
            let expected = s.map_coeffs(|c| c.clone()).unwrap();
            let expected = rat_series(
                RingLabel::FormalLaurent,
                min,
                expected.terms().map(|(d, c)| if d == 0 { q(0, 1) } else { c.clone() }).collect(),
            );
            ensure(back.agrees_with(&expected).unwrap(), || format!("case {k}: antiderive(derive(s)) != s - s(0)"))?;
        } else {
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let ctx = PadicCtx::new(p, 10).unwrap();
            let values: Vec<i64> = (0..len).map(|_| rng.gen_range(-50..=50)).collect();
            let s = padic_series(RingLabel::E, ctx, min, &values);
            let ds = derive(&s);
            ensure(residue(&ds).unwrap().is_zero(), || format!("case {k}: nonzero residue"))?;
            let back = antiderive(&ds, RingLabel::E).map_err(|e| format!("case {k}: {e}"))?;
            let zeroed: Vec<i64> = values.iter().enumerate().map(|(i, &c)| if min + i as i64 == 0 { 0 } else { c }).collect();
            let expected = padic_series(RingLabel::E, ctx, min, &zeroed);
            ensure(back.agrees_with(&expected).unwrap(), || format!("case {k}: antiderive(derive(s)) != s - s(0)"))?;
        }
    }
    Ok(())
}

fn criterion_5() -> Check {
    let mut obstructed = 0;
    for p in [2u64, 3] {
        let ctx = PadicCtx::new(p, 10).unwrap();
        let choices = [q(0, 1), q(1, 1), q(-1, 1), q(1, p as i64)];
        for code in 0..4usize.pow(7) {
            let cs: Vec<PAdic> = (0..7)
                .map(|k| PAdic::from_rational(&ctx, &choices[(code / 4usize.pow(k)) % 4]))
                .collect();
            let c = cs[2].clone();
            let form = DifferentialForm::new(TruncatedSeries::new(RingLabel::Robba, ctx, -3, cs).unwrap());
            match antiderive(&form, RingLabel::Robba) {
                Ok(s) => {
                    ensure(c.is_zero(), || format!("p = {p}, form {code}: integrated despite residue {c}"))?;
                    ensure(derive(&s).coefficient().agrees_with(form.coefficient()).unwrap(), || {
                        format!("p = {p}, form {code}: antiderivative does not differentiate back")
                    })?;
                }
                Err(Error::IntegralObstruction {
                    residue: Coefficient::PAdic(r),
                }) => {
                    ensure(!c.is_zero() && r == c, || format!("p = {p}, form {code}: residue {r}, expected {c}"))?;
                    obstructed += 1;
                }
                Err(e) => return Err(format!("p = {p}, form {code}: {e}")),
            }
        }
    }
    ensure(obstructed == 2 * 3 * 4usize.pow(6), || format!("{obstructed} obstructed forms"))
}

fn criterion_6() -> Check {
    for p in [2u64, 3, 5] {
        let ctx = PadicCtx::new(p, 12).unwrap();
        let t = (p.pow(3) + 1) as usize;
        let mut values = vec![0i64; t];
        values[0] = 1;
        values[1] = -1;
        let v = padic_series(RingLabel::GammaPlus, ctx, 0, &values);
        let z = padic_log_dagger(&v).map_err(|e| e.to_string())?;
        for i in 1..=3u32 {
            let c = z.coeff(p.pow(i) as i64).ok_or_else(|| format!("p = {p}: degree {} not in window", p.pow(i)))?;
            ensure(c.valuation() == Some(-(i as i64)), || format!("p = {p}: v(z_{}) = {:?}", p.pow(i), c.valuation()))?;
        }
        ensure(unboundedness_witness(&z, 1).map_err(|e| e.to_string())?, || format!("p = {p}: witness is false"))?;
        for (n, q) in log_one_minus_u(t).iter().enumerate() {
            let c = z.coeff(n as i64).unwrap();
            ensure(c.agrees_with(&PAdic::from_rational(&ctx, q)), || format!("p = {p}: z_{n} = {c}, expected {q}"))?;
        }
    }
    Ok(())
}

fn criterion_7(rng: &mut StdRng) -> Check {
    for k in 0..50 {
        let p = [2u64, 3][k % 2];
        let ctx = PadicCtx::new(p, 12).unwrap();
        let values: Vec<i64> = (0..16).map(|_| rng.gen_range(-100..=100)).collect();
        let y = padic_series(RingLabel::GammaPlus, ctx, 0, &values);
        let z = padic_log_onemius_py(&y).map_err(|e| format!("case {k}: {e}"))?;
        ensure(z.terms().all(|(_, c)| c.valuation().is_none_or(|v| v >= 0)), || format!("case {k}: negative valuation"))?;
        // exact rational sum of -(p y)^n / n for every n whose term survives mod p^12
        let py: Vec<Rational> = values.iter().map(|&c| q(c * p as i64, 1)).collect();
        let mut acc = vec![q(0, 1); 16];
        let mut power = py.clone();
        for n in 1..48i64 {
            for (a, x) in acc.iter_mut().zip(&power) {
                *a -= x / BigInt::from(n);
            }
            power = conv(&power, &py, 16);
        }
        for (d, x) in acc.iter().enumerate() {
            let c = z.coeff(d as i64).unwrap();
            ensure(c.agrees_with(&PAdic::from_rational(&ctx, x)), || format!("case {k}: degree {d} differs from the exact sum"))?;
        }
    }
    Ok(())
}

fn criterion_8(rng: &mut StdRng) -> Check {
    let shapes = [vec![1usize, 1], vec![2, 1], vec![1, 1, 1]];
    let t = 24usize;
    for k in 0..50 {
        let sig = Signature::new(shapes[k % 3].clone()).unwrap();
        let n = sig.total();
        let entries = Matrix::from_fn(n, n, |i, j| {
            let cs = if sig.block_of(i) < sig.block_of(j) {
                (0..t).map(|_| if rng.gen_bool(0.5) { small_rational(rng) } else { q(0, 1) }).collect()
            } else {
                vec![q(0, 1); t]
            };
            DifferentialForm::new(rat_series(RingLabel::FormalChar0, 0, cs))
        });
        let module = validate_framed(sig, ConnectionMatrix::new(RingLabel::FormalChar0, (), entries).unwrap())
            .map_err(|e| format!("case {k}: {e}"))?;
        let v = trivialize(&module, t as i64).map_err(|e| format!("case {k}: {e}"))?;
        let s = horizontal_basis(&module, t as i64).map_err(|e| format!("case {k}: {e}"))?;
        ensure(is_identity(&series_matmul(v.entries(), &s).unwrap()), || format!("case {k}: V S != I"))?;
        ensure(matrix_residual(&module, v.entries(), t as i64).unwrap(), || format!("case {k}: dV != V C"))?;
    }
    Ok(())
}

fn criterion_9() -> Check {
    let fam = log_family::<Rational>(RingLabel::FormalChar0, (), 16, 16).unwrap();
    let v = rat_series(RingLabel::FormalChar0, 0, [vec![q(1, 1), q(-1, 1)], vec![q(0, 1); 14]].concat());
    let inv = line_integral(&fam, &v).map_err(|e| e.to_string())?;
    let v12 = inv.matrix.entry(0, 1);
    ensure(v12.min_degree() == 0 && v12.trunc_order() == 16, || format!("window ends at {}", v12.trunc_order()))?;
    ensure(v12.coeffs() == log_one_minus_u(16).as_slice(), || format!("V12 = {}", series_text(v12, 't')))?;
    ensure(v12 == &formal_log(&v).unwrap(), || "V12 differs from formal_log(1 - t)".into())
}

fn criterion_10() -> Check {
    let ctx = PadicCtx::new(2, 12).unwrap();
    let fam = log_family::<PAdic>(RingLabel::GammaPlus, ctx, 12, 12).unwrap();
    let v = padic_series(RingLabel::GammaPlus, ctx, 0, &[1, -1, 0, 0, 0, 0, 0, 0, 0]);
    let inv = line_integral(&fam, &v).map_err(|e| e.to_string())?;
    let v12 = inv.matrix.entry(0, 1);
    let dagger = padic_log_dagger(&v).unwrap();
    ensure(v12 == &dagger, || format!("V12 = {}", series_text(v12, 'u')))?;
    let profile = valuation_profile(v12);
    for pair in [(2, -1), (4, -2), (8, -3)] {
        ensure(profile.contains(&pair), || format!("profile {profile:?} lacks {pair:?}"))?;
    }
    ensure(unboundedness_witness(v12, 1).unwrap(), || "witness is false".into())?;
    for (n, x) in log_one_minus_u(9).iter().enumerate() {
        let c = v12.coeff(n as i64).unwrap();
        ensure(c.agrees_with(&PAdic::from_rational(&ctx, x)), || format!("V12 at u^{n} is {c}"))?;
    }
    Ok(())
}

/// Termwise `int_0^u`.
fn integrate_terms(f: &[Rational]) -> Vec<Rational> {
    let mut out = vec![q(0, 1)];
    out.extend(f.iter().enumerate().map(|(n, c)| c / BigInt::from(n as i64 + 1)));
    out
}

fn criterion_11() -> Check {
    let t = 10usize;
    let du = |cs: Vec<Rational>| DifferentialForm::new(rat_series(RingLabel::FormalChar0, 0, cs));
    let one: Vec<Rational> = (0..t).map(|n| q((n == 0) as i64, 1)).collect();
    let u: Vec<Rational> = (0..t).map(|n| q((n == 1) as i64, 1)).collect();
    for (c23, expected_degree, expected) in [(one.clone(), 2, q(1, 2)), (u, 3, q(1, 3))] {
        let entries = Matrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 1) => du(one.clone()),
            (1, 2) => du(c23.clone()),
            _ => du(vec![q(0, 1); t]),
        });
        let sig = Signature::new(vec![1, 1, 1]).unwrap();
        let module = validate_framed(sig, ConnectionMatrix::new(RingLabel::FormalChar0, (), entries).unwrap())
            .map_err(|e| e.to_string())?;
        let v = trivialize(&module, t as i64).map_err(|e| e.to_string())?;
        let v13 = v.entry(0, 2);
        // V12 = int C12, V13 = int V12 C23
        let v12_oracle = integrate_terms(&one);
        let v13_oracle = integrate_terms(&conv(&v12_oracle, &c23, t));
        for (d, c) in v13.terms() {
            let want = v13_oracle.get(d as usize).cloned().unwrap_or_else(|| q(0, 1));
            ensure(c == &want, || format!("V13 at u^{d} is {c}, oracle {want}"))?;
            let exact = if d == expected_degree { expected.clone() } else { q(0, 1) };
            ensure(c == &exact, || format!("V13 at u^{d} is {c}"))?;
        }
        ensure(v13.trunc_order() > expected_degree, || "window too short".into())?;
    }
    Ok(())
}

fn criterion_12() -> Check {
    let ctx = PadicCtx::new(2, 12).unwrap();
    let fam = log_family::<PAdic>(RingLabel::GammaPlus, ctx, 12, 12).unwrap();
    let f = curvature(&fam).map_err(|e| e.to_string())?;
    ensure(f.iter().all(|(_, _, s)| s.is_zero()), || "the logarithm family is not flat".into())?;
    let x_du = BiSeries::from_terms(RingLabel::GammaPlus, ctx, [(0, 1, PAdic::from_int(2, 1, 12))], 12, 12).unwrap();
    let zero = BiSeries::zero(RingLabel::GammaPlus, ctx, 12, 12).unwrap();
    let planted = Matrix::from_fn(2, 2, |i, j| {
        if (i, j) == (0, 1) {
            BiForm::new(x_du.clone(), zero.clone()).unwrap()
        } else {
            BiForm::new(zero.clone(), zero.clone()).unwrap()
        }
    });
    let planted = FramedFamily::new(Signature::new(vec![1, 1]).unwrap(), RingLabel::GammaPlus, ctx, planted).unwrap();
    let g = curvature(&planted).map_err(|e| e.to_string())?;
    ensure(!g.get(0, 1).is_zero(), || "planted family is flat".into())?;
    ensure(g.get(0, 1).coeff(0, 0).unwrap().agrees_with(&PAdic::from_int(2, -1, 12)), || "F12(0, 0) != -1".into())
}

fn random_padic(rng: &mut StdRng, ctx: &PadicCtx) -> PAdic {
    let p = ctx.prime();
    match rng.gen_range(0..10) {
        0..=3 => PAdic::zero(p, ctx.prec()),
        4 => PAdic::zero(p, rng.gen_range(-3..=ctx.prec() + 3)),
        _ => {
            let v = rng.gen_range(-3..=5);
            let n = v + rng.gen_range(1..=15);
            let unit = loop {
                let u: i64 = rng.gen_range(1..100_000);
                if u % p as i64 != 0 {
                    break u;
                }
            };
            PAdic::new(p, v, BigInt::from(unit), n).unwrap()
        }
    }
}

fn random_rational(rng: &mut StdRng) -> Rational {
    if rng.gen_bool(0.35) {
        q(0, 1)
    } else {
        q(rng.gen_range(-200..=200), rng.gen_range(1..=12))
    }
}

fn round_trip<C: CliScalar + RenderScalar>(s: &TruncatedSeries<C>, var: char) -> Check {
    let once = series_text(s, var);
    let back = parse_series::<C>(&once, s.ctx(), &mut None, None).map_err(|e| format!("{once}: {e}"))?;
    let twice = series_text(&back, var);
    ensure(once == twice, || format!("{once} came back as {twice}"))?;
    let f = DifferentialForm::new(s.clone());
    let once = form_text(&f, var);
    let back = parse_form::<C>(&once, s.ctx(), &mut None, None).map_err(|e| format!("{once}: {e}"))?;
    ensure(once == form_text(&back, var), || format!("form {once} changed"))
}

fn criterion_13(rng: &mut StdRng) -> Check {
    let vars = ['t', 'u', 'x'];
    for k in 0..500 {
        let var = vars[rng.gen_range(0..3)];
        let min: i64 = if rng.gen_bool(0.5) { rng.gen_range(-5..=0) } else { rng.gen_range(0..=3) };
        let len = rng.gen_range(0..12usize);
        let laurent = min < 0;
        match k % 5 {
            0 | 1 => {
                let ring = if laurent { RingLabel::FormalLaurent } else { RingLabel::FormalChar0 };
                let s = rat_series(ring, min, (0..len).map(|_| random_rational(rng)).collect());
                round_trip(&s, var).map_err(|e| format!("case {k}: {e}"))?;
            }
            2 | 3 => {
                let p = [2u64, 3, 5, 7][rng.gen_range(0..4)];
                let ctx = PadicCtx::new(p, rng.gen_range(1..=16)).unwrap();
                let ring = if laurent { RingLabel::Robba } else { RingLabel::RobbaPlus };
                let cs = (0..len).map(|_| random_padic(rng, &ctx)).collect();
                let s = TruncatedSeries::new(ring, ctx, min, cs).unwrap();
                round_trip(&s, var).map_err(|e| format!("case {k}: {e}"))?;
            }
            _ if k % 10 == 4 => {
                let (r, c, trunc) = (rng.gen_range(1..4), rng.gen_range(1..4), rng.gen_range(1..8i64));
                let m = Matrix::from_fn(r, c, |_, _| {
                    let min = rng.gen_range(-2..=0);
                    let ring = if min < 0 { RingLabel::FormalLaurent } else { RingLabel::FormalChar0 };
                    rat_series(ring, min, (min..trunc).map(|_| random_rational(rng)).collect())
                });
                let once = matrix_text(&m, |s| series_text(s, var));
                let back = parse_series_matrix::<Rational>(&once, &(), &mut None, None)
                    .map_err(|e| format!("case {k}: {once}: {e}"))?;
                let twice = matrix_text(&back, |s| series_text(s, var));
                ensure(once == twice, || format!("case {k}: {once} came back as {twice}"))?;
            }
            _ => {
                let p = [2u64, 3][rng.gen_range(0..2)];
                let ctx = PadicCtx::new(p, rng.gen_range(1..=10)).unwrap();
                let (tu, tx) = (rng.gen_range(0..5i64), rng.gen_range(0..5i64));
                let base = ['t', 'u'][rng.gen_range(0..2)];
                let m = Matrix::from_fn(2, 2, |_, _| {
                    let cs = (0..tu * tx).map(|_| random_padic(rng, &ctx)).collect();
                    BiSeries::new(RingLabel::EPlus, ctx, tu, tx, cs).unwrap()
                });
                let once = matrix_text(&m, |s| biseries_text(s, base, 'x'));
                let back = parse_biseries_matrix::<PAdic>(&once, &ctx, &mut None, 'x', None)
                    .map_err(|e| format!("case {k}: {once}: {e}"))?;
                let twice = matrix_text(&back, |s| biseries_text(s, base, 'x'));
                ensure(once == twice, || format!("case {k}: {once} came back as {twice}"))?;
            }
        }
    }
    error_codes_reachable()
}

const LOG_FAMILY_2ADIC: &str = include_str!("../data/log_family_2adic.json");

fn error_codes_reachable() -> Check {
    let robba = r#"{"signature": [1, 1], "ring": "Robba", "p": 2, "abs_prec": 8, "var": "u",
                    "connection": [["0", "u^-1 + O(u^4)"], ["0", "0"]]}"#;
    let lower = r#"{"signature": [1, 1], "ring": "FormalChar0", "var": "t",
                    "connection": [["0", "0"], ["1 + O(t^4)", "0"]]}"#;
    let padic_conn = r#"{"signature": [1, 1], "ring": "GammaPlus", "p": 2, "abs_prec": 8, "var": "u",
                         "connection": [["0", "1 + O(u^4)"], ["0", "0"]]}"#;
    let short_fiber = r#"{"signature": [1, 1], "ring": "FormalChar0", "var": "t",
                          "connection": [["0", {"dx": "1 - x + O(t^8, x^2)"}], ["0", "0"]]}"#;
    let cases: Vec<(&str, Vec<&str>, &str)> = vec![
        ("usage_error", vec!["log"], ""),
        ("syntax_error", vec!["log", "1 + * t + O(t^3)"], ""),
        ("missing_o_marker", vec!["log", "1 - t"], ""),
        ("exponent_out_of_window", vec!["log", "t^5 + O(t^3)"], ""),
        ("schema_error", vec!["trivialize", "-"], "{\"signature\": [1]}"),
        ("io_error", vec!["trivialize", "/nonexistent/connection.json"], ""),
        ("invalid_input", vec!["--p", "4", "--abs-prec", "8", "plog", "1 + O(u^2)"], ""),
        ("not_integral", vec!["--p", "2", "--abs-prec", "8", "plog", "1/2 + u + O(u^4)"], ""),
        ("non_unit", vec!["log", "t + O(t^3)"], ""),
        ("integral_obstruction", vec!["trivialize", "-"], robba),
        ("insufficient_window", vec!["residue", "0*u^-3 + O(u^-1)"], ""),
        ("insufficient_window", vec!["integrate", "--family", "-", "--section", "1 - t + O(t^8)"], short_fiber),
        ("cannot_determine_degree", vec!["--p", "2", "--abs-prec", "8", "dlog", "--degree", "2*u^-1 + 2 + O(u^2)"], ""),
        ("not_framed", vec!["trivialize", "-"], lower),
        ("unsupported_ring", vec!["fundsol", "-"], padic_conn),
        ("incompatible_operands", vec!["integrate", "--family", "-", "--section", "u^-1 + 1 + O(u^9)"], LOG_FAMILY_2ADIC),
    ];
    let mut reached = BTreeSet::new();
    for (code, args, stdin) in cases {
        let out = run_with_stdin(std::iter::once("lineint").chain(args.iter().copied()), &mut &*stdin);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).map_err(|e| format!("{args:?}: {e}"))?;
        let got = v["error"]["code"].as_str().unwrap_or("").to_string();
        ensure(got == code, || format!("{args:?} gave {got:?}, wanted {code:?}"))?;
        let want_exit = if matches!(
            code,
            "usage_error" | "syntax_error" | "missing_o_marker" | "exponent_out_of_window" | "schema_error" | "io_error"
        ) {
            2
        } else {
            1
        };
        ensure(out.exit_code == want_exit, || format!("{args:?} exited {}", out.exit_code))?;
        reached.insert(got);
    }
    let documented: BTreeSet<String> = [
        "usage_error",
        "syntax_error",
        "missing_o_marker",
        "exponent_out_of_window",
        "schema_error",
        "io_error",
        "invalid_input",
        "not_integral",
        "non_unit",
        "integral_obstruction",
        "insufficient_window",
        "cannot_determine_degree",
        "not_framed",
        "unsupported_ring",
        "incompatible_operands",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    ensure(reached == documented, || format!("unreached codes: {:?}", documented.difference(&reached).collect::<Vec<_>>()))
}

fn main() {
    let mut rng = StdRng::seed_from_u64(0x5eed_1e7);
    let results: Vec<(&str, Check)> = vec![
        ("formal logarithm of 1 - t at T = 64", run(criterion_1)),
        ("homomorphism suite, 200 units", run(|| criterion_2(&mut rng))),
        ("res(dlog x) = deg x, 100 units over E", run(|| criterion_3(&mut rng))),
        ("exact forms integrate back, 100 series", run(|| criterion_4(&mut rng))),
        ("obstruction sweep over R", run(criterion_5)),
        ("valuation pattern of log(1 - u)", run(criterion_6)),
        ("integrality of log(1 - p y), 50 inputs", run(|| criterion_7(&mut rng))),
        ("recurrence vs integration, 50 modules", run(|| criterion_8(&mut rng))),
        ("formal line integral is log(1 - t)", run(criterion_9)),
        ("p-adic line integral is log(1 - u)", run(criterion_10)),
        ("iterated integral shape", run(criterion_11)),
        ("curvature", run(criterion_12)),
        ("text round trip and error codes", run(|| criterion_13(&mut rng))),
    ];
    let mut failed = 0;
    for (k, (name, result)) in results.iter().enumerate() {
        match result {
            Ok(()) => println!("criterion {:>2} PASS  {name}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn run(f: impl FnOnce() -> Check) -> Check {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}
