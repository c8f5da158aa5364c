//! q-series primitives: q-integers, q-Pochhammer symbols and basic
//! hypergeometric series over truncated series rings.
//!
//! Conventions: `(a;p)_n = prod_{k=0}^{n-1} (1 - a p^k)`, `(a;p)_0 = 1`,
//! and the infinite product `(a;p)_inf` truncates as soon as the factors
//! are 1 modulo the series window. The base `p` is passed as a series (one
//! "step" of the product), so the same code computes `(x;p^2)_inf` in a
//! ring whose variable is p^{1/2}.

use alloc::sync::Arc;

use crate::poly::{MPoly, VarSet};
use crate::series::TruncatedSeries;
use crate::{Error, Result};

/// The q-integer `[m]_q = (q^m - q^-m)/(q - q^-1)` as a Laurent polynomial.
pub fn qint(ctx: &Arc<VarSet>, m: i64) -> MPoly {
    if m == 0 {
        return MPoly::zero(ctx);
    }
    let a = m.unsigned_abs() as i64;
    let mut p = MPoly::zero(ctx);
    for j in 0..a {
        let e = (a - 1 - 2 * j) as i32;
        p = p.add(&MPoly::monomial(ctx, "q", e, num_traits::One::one()));
    }
    if m < 0 {
        p.neg()
    } else {
        p
    }
}

/// `q - q^-1`.
pub fn q_minus_qinv(ctx: &Arc<VarSet>) -> MPoly {
    MPoly::var(ctx, "q").sub(&MPoly::monomial(ctx, "q", -1, num_traits::One::one()))
}

/// Finite q-Pochhammer `(a;p)_n`.
pub fn poch_finite(a: &TruncatedSeries, pstep: &TruncatedSeries, n: u32) -> TruncatedSeries {
    let one = TruncatedSeries::one(a.ctx());
    let mut acc = one.clone();
    let mut apk = a.clone();
    for _ in 0..n {
        acc = acc.mul(&one.sub(&apk));
        apk = apk.mul(pstep);
    }
    acc
}

/// Infinite q-Pochhammer `(a;p)_inf`, truncated: factors are multiplied
/// until `a p^k` vanishes modulo the window.
pub fn poch_infinite(a: &TruncatedSeries, pstep: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !pstep.constant_term().is_zero() {
        return Err(Error::Config(
            "infinite Pochhammer base must have zero constant term".into(),
        ));
    }
    let one = TruncatedSeries::one(a.ctx());
    let mut acc = one.clone();
    let mut apk = a.clone();
    while !apk.is_zero() {
        acc = acc.mul(&one.sub(&apk));
        apk = apk.mul(pstep);
    }
    Ok(acc)
}

/// Basic hypergeometric series
/// `2phi1(qa, qb; qc; p, x) = sum_n (qa;p)_n (qb;p)_n / ((p;p)_n (qc;p)_n) x^n`,
/// truncated; `x` must vanish at order zero so that only finitely many
/// terms survive.
pub fn hyper_2phi1(
    qa: &TruncatedSeries,
    qb: &TruncatedSeries,
    qc: &TruncatedSeries,
    pstep: &TruncatedSeries,
    x: &TruncatedSeries,
) -> Result<TruncatedSeries> {
    if !x.constant_term().is_zero() {
        return Err(Error::Config(
            "2phi1 argument must have zero constant term".into(),
        ));
    }
    let mut acc = TruncatedSeries::one(x.ctx());
    let mut xn = TruncatedSeries::one(x.ctx());
    let mut n = 0u32;
    loop {
        n += 1;
        xn = xn.mul(x);
        if xn.is_zero() {
            break;
        }
        let num = poch_finite(qa, pstep, n).mul(&poch_finite(qb, pstep, n));
        let den = poch_finite(pstep, pstep, n).mul(&poch_finite(qc, pstep, n));
        let den_inv = den.invert().map_err(|_| {
            Error::SingularParameter(alloc::format!(
                "vanishing Pochhammer denominator at n = {n}"
            ))
        })?;
        acc = acc.add(&num.mul(&den_inv).mul(&xn));
    }
    Ok(acc)
}

/// The c-less single-numerator analogue
/// `1phi0(qa; p, x) = sum_n (qa;p)_n / (p;p)_n x^n`.
pub fn hyper_1phi0(
    qa: &TruncatedSeries,
    pstep: &TruncatedSeries,
    x: &TruncatedSeries,
) -> Result<TruncatedSeries> {
    if !x.constant_term().is_zero() {
        return Err(Error::Config(
            "1phi0 argument must have zero constant term".into(),
        ));
    }
    let mut acc = TruncatedSeries::one(x.ctx());
    let mut xn = TruncatedSeries::one(x.ctx());
    let mut n = 0u32;
    loop {
        n += 1;
        xn = xn.mul(x);
        if xn.is_zero() {
            break;
        }
        let num = poch_finite(qa, pstep, n);
        let den = poch_finite(pstep, pstep, n);
        let den_inv = den.invert().map_err(|_| {
            Error::SingularParameter(alloc::format!(
                "vanishing Pochhammer denominator at n = {n}"
            ))
        })?;
        acc = acc.add(&num.mul(&den_inv).mul(&xn));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use crate::ratfunc::RatFunc;
    use crate::series::SeriesCtx;

    fn setup(np: i32, nz: i32) -> (Arc<VarSet>, Arc<SeriesCtx>) {
        let cf = VarSet::new(&[("q", true), ("w", true)]);
        let ctx = SeriesCtx::new(&cf, &[("p", np), ("z", nz)]).unwrap();
        (cf, ctx)
    }

    #[test]
    fn qint_values() {
        let cf = VarSet::new(&[("q", true)]);
        assert!(qint(&cf, 0).is_zero());
        assert!(qint(&cf, 1).is_one());
        // [2]_q = q + q^-1
        let two = MPoly::var(&cf, "q").add(&MPoly::monomial(&cf, "q", -1, num_traits::One::one()));
        assert_eq!(qint(&cf, 2), two);
        assert_eq!(qint(&cf, -2), two.neg());
        // [3]_q at q = 2 is 21/4
        assert_eq!(qint(&cf, 3).eval(&[rat_int(2)]), rat(21, 4));
    }

    #[test]
    fn poch_finite_basics() {
        let (cf, ctx) = setup(6, 2);
        let p = TruncatedSeries::var(&ctx, "p");
        // a is a p-free rational constant
        let a = TruncatedSeries::constant(&ctx, RatFunc::constant(&cf, rat(2, 3)));
        let one = TruncatedSeries::one(&ctx);
        assert_eq!(poch_finite(&a, &p, 0), one);
        // (a;p)_2 = (1-a)(1-ap)
        let expect = one.sub(&a).mul(&one.sub(&a.mul(&p)));
        assert_eq!(poch_finite(&a, &p, 2), expect);
    }

    #[test]
    fn poch_recursion() {
        // (a;p)_{n+1} = (a;p)_n (1 - a p^n) for n = 0..5 at random rational a
        let (cf, ctx) = setup(8, 1);
        let p = TruncatedSeries::var(&ctx, "p");
        let one = TruncatedSeries::one(&ctx);
        for (num, den) in [(2i64, 3i64), (-5, 7), (9, 4), (1, 1), (-3, 8), (11, 6)] {
            let a = TruncatedSeries::constant(&ctx, RatFunc::constant(&cf, rat(num, den)));
            let mut pn = one.clone();
            for n in 0..=5u32 {
                let lhs = poch_finite(&a, &p, n + 1);
                let rhs = poch_finite(&a, &p, n).mul(&one.sub(&a.mul(&pn)));
                assert_eq!(lhs, rhs, "n = {n}, a = {num}/{den}");
                pn = pn.mul(&p);
            }
        }
    }

    #[test]
    fn poch_infinite_low_orders() {
        let (cf, ctx) = setup(1, 1);
        let p = TruncatedSeries::var(&ctx, "p");
        let one = TruncatedSeries::one(&ctx);
        // a = 0 -> 1
        assert_eq!(
            poch_infinite(&TruncatedSeries::zero(&ctx), &p).unwrap(),
            one
        );
        // (ap;p)_inf mod p^2 = 1 - ap for p-free a
        let a = TruncatedSeries::constant(&ctx, RatFunc::var(&cf, "w"));
        let ap = a.mul(&p);
        assert_eq!(poch_infinite(&ap, &p).unwrap(), one.sub(&ap));
        // coefficient of p^1 in (a;p)_inf equals -a(1-a) for p-free a
        let full = poch_infinite(&a, &p).unwrap();
        let w = RatFunc::var(&cf, "w");
        let expect = w.neg().mul(&RatFunc::one(&cf).sub(&w));
        assert!(full.coeff(&[1, 0]).equals(&expect));
        // rejected base with nonzero constant term
        assert!(poch_infinite(&a, &one).is_err());
    }

    #[test]
    fn phi21_first_terms() {
        let (cf, ctx) = setup(4, 4);
        let p = TruncatedSeries::var(&ctx, "p");
        let qa = TruncatedSeries::constant(&ctx, RatFunc::monomial(&cf, "q", -2, num_traits::One::one()));
        let qb = TruncatedSeries::constant(&ctx, RatFunc::var(&cf, "w"));
        let qc = TruncatedSeries::constant(&ctx, RatFunc::monomial(&cf, "w", -1, num_traits::One::one()));
        // x = 0 -> 1
        let zero = TruncatedSeries::zero(&ctx);
        assert_eq!(
            hyper_2phi1(&qa, &qb, &qc, &p, &zero).unwrap(),
            TruncatedSeries::one(&ctx)
        );
        // n = 1 coefficient is (1-qa)(1-qb)/((1-p)(1-qc)) * x with x = z
        let z = TruncatedSeries::var(&ctx, "z");
        let got = hyper_2phi1(&qa, &qb, &qc, &p, &z).unwrap();
        let one = TruncatedSeries::one(&ctx);
        let num = one.sub(&qa).mul(&one.sub(&qb));
        let den = one.sub(&p).mul(&one.sub(&qc));
        let expect_lin = num.mul(&den.invert().unwrap());
        // compare the z^1 layer
        assert_eq!(got.layer("z", 1), expect_lin.layer("z", 0));
    }

    #[test]
    fn phi10_q_binomial_identity_low_order() {
        // 1phi0(z;p,w) with qa = q^-4 and x = p q^2 z equals
        // (p q^-2 z;p)_inf / (p q^2 z;p)_inf; checked here to order 4.
        let (cf, ctx) = setup(4, 4);
        let p = TruncatedSeries::var(&ctx, "p");
        let z = TruncatedSeries::var(&ctx, "z");
        let q2 = RatFunc::monomial(&cf, "q", 2, num_traits::One::one());
        let qm2 = RatFunc::monomial(&cf, "q", -2, num_traits::One::one());
        let qm4 = RatFunc::monomial(&cf, "q", -4, num_traits::One::one());
        let x = p.mul(&z).scale(&q2);
        let lhs = hyper_1phi0(
            &TruncatedSeries::constant(&ctx, qm4),
            &p,
            &x,
        )
        .unwrap();
        let num = poch_infinite(&p.mul(&z).scale(&qm2), &p).unwrap();
        let den = poch_infinite(&p.mul(&z).scale(&q2), &p).unwrap();
        let rhs = num.mul(&den.invert().unwrap());
        assert_eq!(lhs, rhs);
    }
}
