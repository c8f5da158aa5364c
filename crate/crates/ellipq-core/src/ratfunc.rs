//! Rational functions `num / prod_i f_i^{m_i}` with the denominator kept in
//! factored form.
//!
//! Equality is decided by cross-multiplication, so no canonical normal form
//! (and no multivariate gcd) is required. Keeping the denominator factored
//! lets addition cancel repeated factors by cheap trial division, which is
//! what stops coefficient growth in long series computations.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::poly::{MPoly, VarSet};
use crate::rat::Rat;
use crate::{Error, Result};

/// Rational function over a [`VarSet`]; denominator stored as factors with
/// multiplicities, each factor monic in the lexicographic leading term.
#[derive(Clone)]
pub struct RatFunc {
    num: MPoly,
    den: BTreeMap<MPoly, u32>,
}

impl RatFunc {
    pub fn ctx(&self) -> &Arc<VarSet> {
        self.num.ctx()
    }

    pub fn zero(ctx: &Arc<VarSet>) -> RatFunc {
        RatFunc {
            num: MPoly::zero(ctx),
            den: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<VarSet>) -> RatFunc {
        RatFunc {
            num: MPoly::one(ctx),
            den: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<VarSet>, c: Rat) -> RatFunc {
        RatFunc {
            num: MPoly::constant(ctx, c),
            den: BTreeMap::new(),
        }
    }

    pub fn int(ctx: &Arc<VarSet>, n: i64) -> RatFunc {
        RatFunc {
            num: MPoly::int(ctx, n),
            den: BTreeMap::new(),
        }
    }

    pub fn var(ctx: &Arc<VarSet>, v: &str) -> RatFunc {
        RatFunc {
            num: MPoly::var(ctx, v),
            den: BTreeMap::new(),
        }
    }

    pub fn monomial(ctx: &Arc<VarSet>, v: &str, e: i32, c: Rat) -> RatFunc {
        RatFunc {
            num: MPoly::monomial(ctx, v, e, c),
            den: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: MPoly) -> RatFunc {
        RatFunc {
            num: p,
            den: BTreeMap::new(),
        }
    }

    /// `num / den`; `den` must be nonzero.
    pub fn new(num: MPoly, den: MPoly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::NonInvertible("zero denominator".into()));
        }
        let mut r = RatFunc {
            num,
            den: BTreeMap::new(),
        };
        r.push_den_factor(den, 1);
        r.reduce();
        Ok(r)
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    /// The denominator multiplied out.
    pub fn den_expanded(&self) -> MPoly {
        let mut d = MPoly::one(self.num.ctx());
        for (f, &m) in &self.den {
            for _ in 0..m {
                d = d.mul(f);
            }
        }
        d
    }

    pub fn den_factors(&self) -> impl Iterator<Item = (&MPoly, u32)> {
        self.den.iter().map(|(f, &m)| (f, m))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.den.is_empty() {
            return self.num.as_constant();
        }
        if self.num.is_zero() {
            return Some(Rat::zero());
        }
        None
    }

    /// Insert a denominator factor, made monic; constants and unit
    /// monomials are folded into the numerator instead.
    fn push_den_factor(&mut self, f: MPoly, mult: u32) {
        if mult == 0 || f.is_one() {
            return;
        }
        if let Some(c) = f.as_constant() {
            assert!(!c.is_zero(), "zero denominator factor");
            let inv = crate::rat::rat_pow(&c.recip(), mult as i32);
            self.num = self.num.scale(&inv);
            return;
        }
        // Monomial with all-invertible variables: a unit, fold into num.
        if let Some((e, c)) = f.as_monomial() {
            let ctx = self.num.ctx().clone();
            if e.iter()
                .enumerate()
                .all(|(i, &x)| x == 0 || ctx.invertible(i))
            {
                let inv = crate::rat::rat_pow(&c.recip(), mult as i32);
                let mut n = self.num.scale(&inv);
                for (i, &x) in e.iter().enumerate() {
                    if x != 0 {
                        n = n.mul_var_pow(i, -x * mult as i32);
                    }
                }
                self.num = n;
                return;
            }
        }
        let lc = f.leading_coeff();
        let f = f.scale(&lc.recip());
        let inv = crate::rat::rat_pow(&lc.recip(), mult as i32);
        self.num = self.num.scale(&inv);
        *self.den.entry(f).or_insert(0) += mult;
    }

    /// Cancel denominator factors that exactly divide the numerator.
    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let factors: Vec<MPoly> = self.den.keys().cloned().collect();
        for f in factors {
            loop {
                let m = match self.den.get(&f) {
                    Some(&m) if m > 0 => m,
                    _ => break,
                };
                if let Some(q) = self.num.divide_exact(&f) {
                    self.num = q;
                    if m == 1 {
                        self.den.remove(&f);
                    } else {
                        self.den.insert(f.clone(), m - 1);
                    }
                } else {
                    break;
                }
            }
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // num1 * (D/d1) + num2 * (D/d2) over the factor-wise lcm D.
        let mut den: BTreeMap<MPoly, u32> = self.den.clone();
        for (f, &m) in &other.den {
            let e = den.entry(f.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        let mut n1 = self.num.clone();
        let mut n2 = other.num.clone();
        for (f, &m) in &den {
            let m1 = self.den.get(f).copied().unwrap_or(0);
            let m2 = other.den.get(f).copied().unwrap_or(0);
            for _ in m1..m {
                n1 = n1.mul(f);
            }
            for _ in m2..m {
                n2 = n2.mul(f);
            }
        }
        let mut r = RatFunc {
            num: n1.add(&n2),
            den,
        };
        r.reduce();
        r
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero(self.num.ctx());
        }
        let mut r = RatFunc {
            num: self.num.mul(&other.num),
            den: self.den.clone(),
        };
        for (f, &m) in &other.den {
            *r.den.entry(f.clone()).or_insert(0) += m;
        }
        r.reduce();
        r
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero(self.num.ctx());
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, p: &MPoly) -> RatFunc {
        let mut r = RatFunc {
            num: self.num.mul(p),
            den: self.den.clone(),
        };
        r.reduce();
        r
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<RatFunc> {
        if self.num.is_zero() {
            return Err(Error::NonInvertible("zero rational function".into()));
        }
        let mut r = RatFunc {
            num: self.den_expanded(),
            den: BTreeMap::new(),
        };
        r.push_den_factor(self.num.clone(), 1);
        r.reduce();
        Ok(r)
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<RatFunc> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = RatFunc::one(self.num.ctx());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Equality by cross-multiplication.
    pub fn equals(&self, other: &RatFunc) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den_expanded()) == other.num.mul(&self.den_expanded())
    }

    /// Substitute `var -> coeff * prod targets_i^{e_i}` in numerator and all
    /// denominator factors; errors if a denominator factor becomes zero.
    pub fn subst_monomial(
        &self,
        var: usize,
        coeff: &Rat,
        targets: &[(usize, i32)],
    ) -> Result<RatFunc> {
        let num = self.num.subst_monomial(var, coeff, targets);
        let mut r = RatFunc {
            num,
            den: BTreeMap::new(),
        };
        for (f, &m) in &self.den {
            let f2 = f.subst_monomial(var, coeff, targets);
            if f2.is_zero() {
                return Err(Error::NonInvertible(alloc::format!(
                    "denominator factor {f} vanishes under substitution"
                )));
            }
            r.push_den_factor(f2, m);
        }
        r.reduce();
        Ok(r)
    }

    pub fn subst_rat(&self, var: usize, value: &Rat) -> Result<RatFunc> {
        self.subst_monomial(var, value, &[])
    }

    /// Exchange two variables throughout.
    pub fn swap_vars(&self, a: usize, b: usize) -> RatFunc {
        let mut r = RatFunc {
            num: self.num.swap_vars(a, b),
            den: BTreeMap::new(),
        };
        for (f, &m) in &self.den {
            r.push_den_factor(f.swap_vars(a, b), m);
        }
        r
    }

    /// Evaluate at rational values of all variables.
    pub fn eval(&self, values: &[Rat]) -> Result<Rat> {
        let d = self.den_expanded().eval(values);
        if d.is_zero() {
            return Err(Error::NonInvertible("denominator vanishes at sample".into()));
        }
        Ok(self.num.eval(values) / d)
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let mut den = String::new();
        for (fac, &m) in &self.den {
            if !den.is_empty() {
                den.push('*');
            }
            if m == 1 {
                den.push_str(&alloc::format!("({fac})"));
            } else {
                den.push_str(&alloc::format!("({fac})^{m}"));
            }
        }
        write!(f, "({}) / {}", self.num, den)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl RatFunc {
    /// Render as `num` and expanded `den` strings (for reports/JSON).
    pub fn to_num_den_strings(&self) -> (String, String) {
        (self.num.to_string(), self.den_expanded().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;
    use proptest::prelude::*;

    fn ctx() -> Arc<VarSet> {
        VarSet::new(&[("q", true), ("w", true)])
    }

    #[test]
    fn factored_cancellation() {
        let c = ctx();
        let one = MPoly::one(&c);
        let w = MPoly::var(&c, "w");
        let f = one.sub(&w);
        // 1/(1-w) + (-w)/(1-w) = 1
        let a = RatFunc::new(one.clone(), f.clone()).unwrap();
        let b = RatFunc::new(w.neg(), f.clone()).unwrap();
        let s = a.add(&b);
        assert!(s.is_one(), "{s}");
        // (1-w)^2/(1-w) collapses to a polynomial
        let p = RatFunc::new(f.mul(&f), f.clone()).unwrap();
        assert_eq!(p.den_factors().count(), 0);
        assert_eq!(*p.num(), f);
    }

    #[test]
    fn inverse_roundtrip() {
        let c = ctx();
        let w = MPoly::var(&c, "w");
        let g = MPoly::var(&c, "q").sub(&MPoly::monomial(&c, "q", -1, num_traits::One::one()));
        let r = RatFunc::new(w.clone(), g.clone()).unwrap();
        let ri = r.inv().unwrap();
        assert!(r.mul(&ri).is_one());
        assert!(RatFunc::zero(&c).inv().is_err());
    }

    #[test]
    fn monomial_denominators_fold() {
        let c = ctx();
        let q2 = MPoly::monomial(&c, "q", 2, rat_int(3));
        let one = MPoly::one(&c);
        let r = RatFunc::new(one, q2).unwrap();
        assert_eq!(r.den_factors().count(), 0);
        assert_eq!(
            *r.num(),
            MPoly::monomial(&c, "q", -2, crate::rat::rat(1, 3))
        );
    }

    // Small random rational functions for the equivalence-relation check.
    fn arb_poly(c: Arc<VarSet>) -> impl Strategy<Value = MPoly> {
        proptest::collection::vec((-3i32..4, -3i32..4, -4i64..5), 1..4).prop_map(move |ts| {
            let mut p = MPoly::zero(&c);
            for (eq, ew, k) in ts {
                let t = MPoly::monomial(&c, "q", eq, rat_int(k)).mul(&MPoly::monomial(
                    &c,
                    "w",
                    ew,
                    num_traits::One::one(),
                ));
                p = p.add(&t);
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn cross_mul_equality_is_equivalence(
            a in arb_poly(ctx()), b in arb_poly(ctx()), d in arb_poly(ctx())
        ) {
            prop_assume!(!d.is_zero());
            let c = ctx();
            let one = MPoly::one(&c);
            // r1 = a/d, r2 = (a*d)/(d*d) represent the same function; r3 differs by b.
            let r1 = RatFunc::new(a.clone(), d.clone()).unwrap();
            let r2 = RatFunc::new(a.mul(&d), d.mul(&d)).unwrap();
            let r3 = RatFunc::new(a.add(&b), d.clone()).unwrap();
            prop_assert!(r1.equals(&r2));
            prop_assert!(r2.equals(&r1));
            // reflexive
            prop_assert!(r1.equals(&r1));
            // transitive through r2
            let r2b = RatFunc::new(a.mul(&one), d.clone()).unwrap();
            prop_assert!(r2.equals(&r2b) && r2b.equals(&r1));
            // distinct unless b == 0
            if !b.is_zero() {
                prop_assert!(!r1.equals(&r3));
            }
        }

        #[test]
        fn field_ops_consistent(a in arb_poly(ctx()), b in arb_poly(ctx()), d in arb_poly(ctx())) {
            prop_assume!(!d.is_zero());
            let r1 = RatFunc::new(a.clone(), d.clone()).unwrap();
            let r2 = RatFunc::new(b.clone(), d.clone()).unwrap();
            // (a+b)/d == a/d + b/d
            let s = RatFunc::new(a.add(&b), d.clone()).unwrap();
            prop_assert!(r1.add(&r2).equals(&s));
            // (a*b)/(d*d) == (a/d)*(b/d)
            let p = RatFunc::new(a.mul(&b), d.mul(&d)).unwrap();
            prop_assert!(r1.mul(&r2).equals(&p));
        }
    }
}
