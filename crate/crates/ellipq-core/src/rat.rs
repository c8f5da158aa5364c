//! Arbitrary-precision exact rationals.
//!
//! `Rat` is `num_rational::BigRational`: always stored reduced with a
//! positive denominator, which is exactly the invariant the rest of the
//! crate relies on.

use alloc::string::String;
use alloc::string::ToString;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar.
pub type Rat = num_rational::BigRational;

/// `n` as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact integer power with negative exponents allowed (base must be
/// nonzero when `e < 0`).
pub fn rat_pow(base: &Rat, e: i32) -> Rat {
    if e == 0 {
        return Rat::one();
    }
    if e < 0 && base.is_zero() {
        panic!("zero has no negative power");
    }
    let mut acc = Rat::one();
    let mut b = base.clone();
    let mut n = e.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc *= b.clone();
        }
        b = b.clone() * b;
        n >>= 1;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Parse "a/b" or "a" into a rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

/// Render as "a/b" (or "a" for integers).
pub fn rat_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

/// True for q-sample values that must be rejected: 0, 1 and -1 (the only
/// rational roots of unity) — checked up to order 12 per configuration
/// contract, which for rationals reduces to these three values.
pub fn is_bad_q_sample(q: &Rat) -> bool {
    if q.is_zero() {
        return true;
    }
    let one = Rat::one();
    let mut p = q.clone();
    for _ in 0..12 {
        if p == one {
            return true;
        }
        p *= q;
    }
    q.abs() == one
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_rat("7/5").unwrap(), rat(7, 5));
        assert_eq!(parse_rat("-3").unwrap(), rat_int(-3));
        assert_eq!(rat_string(&rat(7, 5)), "7/5");
        assert_eq!(rat_string(&rat(-6, 3)), "-2");
        assert!(parse_rat("1/0").is_none());
    }

    #[test]
    fn q_sample_guard() {
        assert!(is_bad_q_sample(&rat_int(0)));
        assert!(is_bad_q_sample(&rat_int(1)));
        assert!(is_bad_q_sample(&rat_int(-1)));
        assert!(!is_bad_q_sample(&rat(7, 5)));
        assert!(!is_bad_q_sample(&rat(-9, 7)));
    }
}
