//! Sparse multivariate Laurent polynomials over exact rationals.
//!
//! Variables are declared once in a [`VarSet`] shared by every polynomial of
//! a computation. A variable may be flagged invertible (Laurent exponents
//! allowed, e.g. q, w, the central leg symbols u_k) and may carry a square
//! rewrite rule `v^2 = r(other vars)` used for square-root symbols such as
//! s with s^2 = [theta]_q; normalization reduces every exponent of such a
//! variable below 2.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::budget;
use crate::rat::{rat_pow, rat_string, Rat};

/// Exponent vector; one entry per variable of the [`VarSet`].
pub type Expo = SmallVec<[i32; 6]>;

type Terms = alloc::collections::BTreeMap<Expo, Rat>;

/// Declaration of one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Var {
    pub name: String,
    /// Negative exponents allowed.
    pub invertible: bool,
}

/// A fixed, ordered set of variables with optional square rewrite rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSet {
    vars: Vec<Var>,
    /// `sq_rules[i] = Some(terms)` means vars[i]^2 rewrites to that
    /// polynomial (which must not involve vars[i]).
    sq_rules: Vec<Option<Terms>>,
}

impl VarSet {
    /// Build a variable set; `spec` lists `(name, invertible)`.
    pub fn new(spec: &[(&str, bool)]) -> Arc<VarSet> {
        Arc::new(VarSet {
            vars: spec
                .iter()
                .map(|(n, inv)| Var {
                    name: n.to_string(),
                    invertible: *inv,
                })
                .collect(),
            sq_rules: vec![None; spec.len()],
        })
    }

    /// Number of variables.
    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    /// Index of a variable by name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].name
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|v| v.name.as_str())
    }

    pub fn invertible(&self, i: usize) -> bool {
        self.vars[i].invertible
    }

    /// Install `v^2 = rule`; the rule must live over this same set and not
    /// involve `v`. Returns the updated set.
    pub fn with_square_rule(self: &Arc<Self>, var: &str, rule: &MPoly) -> Arc<VarSet> {
        let i = self.index_of(var).expect("unknown variable for square rule");
        assert!(
            rule.terms.keys().all(|e| e[i] == 0),
            "square rule must not involve the variable itself"
        );
        let mut vs = (**self).clone();
        vs.sq_rules[i] = Some(rule.terms.clone());
        Arc::new(vs)
    }

    fn has_sq_rules(&self) -> bool {
        self.sq_rules.iter().any(|r| r.is_some())
    }
}

/// Sparse multivariate Laurent polynomial.
#[derive(Clone)]
pub struct MPoly {
    ctx: Arc<VarSet>,
    terms: Terms,
}

impl MPoly {
    pub fn ctx(&self) -> &Arc<VarSet> {
        &self.ctx
    }

    pub fn zero(ctx: &Arc<VarSet>) -> MPoly {
        MPoly {
            ctx: ctx.clone(),
            terms: Terms::new(),
        }
    }

    pub fn constant(ctx: &Arc<VarSet>, c: Rat) -> MPoly {
        let mut t = Terms::new();
        if !c.is_zero() {
            t.insert(Expo::from_elem(0, ctx.len()), c);
        }
        MPoly {
            ctx: ctx.clone(),
            terms: t,
        }
    }

    pub fn one(ctx: &Arc<VarSet>) -> MPoly {
        Self::constant(ctx, Rat::one())
    }

    pub fn int(ctx: &Arc<VarSet>, n: i64) -> MPoly {
        Self::constant(ctx, crate::rat::rat_int(n))
    }

    /// The monomial `c * var^e`.
    pub fn monomial(ctx: &Arc<VarSet>, var: &str, e: i32, c: Rat) -> MPoly {
        let i = ctx.index_of(var).expect("unknown variable");
        assert!(
            e >= 0 || ctx.invertible(i),
            "negative exponent on non-invertible variable {var}"
        );
        let mut expo = Expo::from_elem(0, ctx.len());
        expo[i] = e;
        let mut t = Terms::new();
        if !c.is_zero() {
            t.insert(expo, c);
        }
        let p = MPoly {
            ctx: ctx.clone(),
            terms: t,
        };
        p.normalized()
    }

    pub fn var(ctx: &Arc<VarSet>, var: &str) -> MPoly {
        Self::monomial(ctx, var, 1, Rat::one())
    }

    /// Build from raw `(exponents, coefficient)` pairs.
    pub fn from_terms(ctx: &Arc<VarSet>, terms: impl IntoIterator<Item = (Expo, Rat)>) -> MPoly {
        let mut t = Terms::new();
        for (e, c) in terms {
            assert_eq!(e.len(), ctx.len(), "exponent arity mismatch");
            if c.is_zero() {
                continue;
            }
            let entry = t.entry(e).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                // remove below in normalization
            }
        }
        MPoly { ctx: ctx.clone(), terms: t }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(e, c)| e.iter().all(|&x| x == 0) && c.is_one())
    }

    /// Constant (all exponents zero) polynomial value, if it is one.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            if e.iter().all(|&x| x == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    /// Single-term polynomial contents, if any.
    pub fn as_monomial(&self) -> Option<(&Expo, &Rat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &Rat)> {
        self.terms.iter()
    }

    fn same_ctx(&self, other: &MPoly) {
        if !Arc::ptr_eq(&self.ctx, &other.ctx) && *self.ctx != *other.ctx {
            panic!(
                "variable set mismatch: [{}] vs [{}]",
                self.ctx.names().collect::<Vec<_>>().join(","),
                other.ctx.names().collect::<Vec<_>>().join(",")
            );
        }
    }

    /// Apply square rewrite rules and drop zero coefficients.
    fn normalized(mut self) -> MPoly {
        self.terms.retain(|_, c| !c.is_zero());
        if self.ctx.has_sq_rules() {
            let needs = self.terms.keys().any(|e| {
                e.iter()
                    .enumerate()
                    .any(|(i, &x)| self.ctx.sq_rules[i].is_some() && x.unsigned_abs() >= 2)
            });
            if needs {
                let ctx = self.ctx.clone();
                let mut out = MPoly::zero(&ctx);
                for (e, c) in core::mem::take(&mut self.terms) {
                    let mut reduced = MPoly {
                        ctx: ctx.clone(),
                        terms: {
                            let mut t = Terms::new();
                            let mut base = e.clone();
                            for (i, rule) in ctx.sq_rules.iter().enumerate() {
                                if rule.is_some() {
                                    base[i] = e[i].rem_euclid(2);
                                }
                            }
                            t.insert(base, c);
                            t
                        },
                    };
                    for (i, rule) in ctx.sq_rules.iter().enumerate() {
                        if let Some(rt) = rule {
                            let k = e[i].div_euclid(2);
                            if k != 0 {
                                assert!(k > 0, "negative square-root symbol power");
                                let rp = MPoly {
                                    ctx: ctx.clone(),
                                    terms: rt.clone(),
                                };
                                for _ in 0..k {
                                    reduced = reduced.mul_raw(&rp);
                                }
                            }
                        }
                    }
                    out = out.add(&reduced);
                }
                return out;
            }
        }
        budget::check(self.terms.len());
        self
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        self.same_ctx(other);
        let mut t = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = t.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c.clone();
        }
        MPoly {
            ctx: self.ctx.clone(),
            terms: t,
        }
        .normalized()
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    /// Product without square-rule reduction (used internally by it).
    fn mul_raw(&self, other: &MPoly) -> MPoly {
        let mut t = Terms::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = ea.clone();
                for (x, y) in e.iter_mut().zip(eb.iter()) {
                    *x += *y;
                }
                let c = ca.clone() * cb.clone();
                let entry = t.entry(e).or_insert_with(Rat::zero);
                *entry += c;
            }
        }
        t.retain(|_, c| !c.is_zero());
        budget::check(t.len());
        MPoly {
            ctx: self.ctx.clone(),
            terms: t,
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        self.same_ctx(other);
        self.mul_raw(other).normalized()
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(&self.ctx);
        }
        MPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    /// Multiply by the monomial `var^e` (exponent may be negative only for
    /// invertible variables or if every term stays nonnegative).
    pub fn mul_var_pow(&self, var: usize, e: i32) -> MPoly {
        if e == 0 {
            return self.clone();
        }
        let mut t = Terms::new();
        for (ex, c) in &self.terms {
            let mut ex = ex.clone();
            ex[var] += e;
            assert!(
                ex[var] >= 0 || self.ctx.invertible(var),
                "negative exponent on non-invertible variable {}",
                self.ctx.name(var)
            );
            t.insert(ex, c.clone());
        }
        MPoly {
            ctx: self.ctx.clone(),
            terms: t,
        }
        .normalized()
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitute `var -> value * prod target_i^{e_i}` (a scaled monomial).
    /// Occurrences with negative exponents require the substituted monomial
    /// coefficient to be nonzero.
    pub fn subst_monomial(&self, var: usize, coeff: &Rat, targets: &[(usize, i32)]) -> MPoly {
        let ctx = &self.ctx;
        let mut out = MPoly::zero(ctx);
        for (e, c) in &self.terms {
            let k = e[var];
            let mut ne = e.clone();
            ne[var] = 0;
            let mut nc = c.clone();
            if k != 0 {
                assert!(!coeff.is_zero() || k > 0, "negative power of zero in substitution");
                nc *= rat_pow(coeff, k);
                for &(t, te) in targets {
                    ne[t] += te * k;
                }
            }
            out = out.add(&MPoly::from_terms(ctx, [(ne, nc)]));
        }
        out
    }

    /// Substitute an exact rational value for a variable.
    pub fn subst_rat(&self, var: usize, value: &Rat) -> MPoly {
        self.subst_monomial(var, value, &[])
    }

    /// Exchange the exponents of two variables in every term.
    pub fn swap_vars(&self, a: usize, b: usize) -> MPoly {
        if a == b {
            return self.clone();
        }
        MPoly {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2.swap(a, b);
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Per-variable minimum exponent over all terms (the monomial content).
    fn content_expo(&self) -> Expo {
        let n = self.ctx.len();
        let mut m = Expo::from_elem(i32::MAX, n);
        for e in self.terms.keys() {
            for i in 0..n {
                m[i] = m[i].min(e[i]);
            }
        }
        m
    }

    /// Leading term under the lexicographic order of exponent vectors.
    fn leading(&self) -> Option<(&Expo, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Leading coefficient (lex order); zero polynomial gives 1.
    pub fn leading_coeff(&self) -> Rat {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rat::one)
    }

    /// Exact division: returns `self / d` when the division is exact in the
    /// Laurent ring (respecting nonnegativity of non-invertible variables),
    /// `None` otherwise.
    pub fn divide_exact(&self, d: &MPoly) -> Option<MPoly> {
        self.same_ctx(d);
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(MPoly::zero(&self.ctx));
        }
        let n = self.ctx.len();
        let cn = self.content_expo();
        let cd = d.content_expo();
        // Shift both to nonnegative, minimal exponents.
        let shift = |p: &MPoly, c: &Expo| -> Terms {
            p.terms
                .iter()
                .map(|(e, k)| {
                    let mut e2 = e.clone();
                    for i in 0..n {
                        e2[i] -= c[i];
                    }
                    (e2, k.clone())
                })
                .collect()
        };
        let mut rem = shift(self, &cn);
        let dd = shift(d, &cd);
        let (dlead, dlc) = {
            let (e, c) = dd.iter().next_back().unwrap();
            (e.clone(), c.clone())
        };
        let mut quo = Terms::new();
        while let Some((rlead, rlc)) = rem.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            let mut t = rlead.clone();
            for i in 0..n {
                t[i] -= dlead[i];
                if t[i] < 0 {
                    return None;
                }
            }
            let qc = rlc / dlc.clone();
            quo.insert(t.clone(), qc.clone());
            for (e, c) in &dd {
                let mut e2 = e.clone();
                for i in 0..n {
                    e2[i] += t[i];
                }
                let entry = rem.entry(e2).or_insert_with(Rat::zero);
                *entry -= qc.clone() * c.clone();
                if entry.is_zero() {
                    // handled by retain below
                }
            }
            rem.retain(|_, c| !c.is_zero());
        }
        // Reattach the content difference.
        let mut out = Terms::new();
        for (e, c) in quo {
            let mut e2 = e;
            for i in 0..n {
                e2[i] += cn[i] - cd[i];
                if e2[i] < 0 && !self.ctx.invertible(i) {
                    return None;
                }
            }
            out.insert(e2, c);
        }
        Some(
            MPoly {
                ctx: self.ctx.clone(),
                terms: out,
            }
            .normalized(),
        )
    }

    /// Evaluate with every variable set to the given rationals (all values
    /// of invertible variables must be nonzero).
    pub fn eval(&self, values: &[Rat]) -> Rat {
        assert_eq!(values.len(), self.ctx.len());
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    t *= rat_pow(&values[i], x);
                }
            }
            acc += t;
        }
        acc
    }

    /// Maximum absolute exponent of `var` over all terms.
    pub fn degree_in(&self, var: usize) -> i32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl Eq for MPoly {}

impl PartialOrd for MPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for MPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        let a: Vec<_> = self.terms.iter().collect();
        let b: Vec<_> = other.terms.iter().collect();
        a.cmp(&b)
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mut mon = String::new();
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    if !mon.is_empty() {
                        mon.push('*');
                    }
                    if x == 1 {
                        mon.push_str(self.ctx.name(i));
                    } else {
                        mon.push_str(&format!("{}^{}", self.ctx.name(i), x));
                    }
                }
            }
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mon.is_empty() {
                write!(f, "{}", rat_string(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mon}")?;
            } else {
                write!(f, "{}*{}", rat_string(&abs), mon)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    fn ctx() -> Arc<VarSet> {
        VarSet::new(&[("q", true), ("w", true), ("x", false)])
    }

    #[test]
    fn arithmetic_basics() {
        let c = ctx();
        let q = MPoly::var(&c, "q");
        let w = MPoly::var(&c, "w");
        let p = q.add(&w).mul(&q.sub(&w)); // q^2 - w^2
        let expect = q.mul(&q).sub(&w.mul(&w));
        assert_eq!(p, expect);
        assert_eq!(p.sub(&p), MPoly::zero(&c));
    }

    #[test]
    fn laurent_and_eval() {
        let c = ctx();
        let qi = MPoly::monomial(&c, "q", -1, Rat::one());
        let q = MPoly::var(&c, "q");
        let g = q.sub(&qi); // q - q^-1
        let v = g.eval(&[crate::rat::rat(2, 1), rat_int(1), rat_int(1)]);
        assert_eq!(v, crate::rat::rat(3, 2));
    }

    #[test]
    fn exact_division() {
        let c = ctx();
        let one = MPoly::one(&c);
        let w = MPoly::var(&c, "w");
        let f = one.sub(&w); // 1 - w
        let p = f.mul(&f).mul(&MPoly::var(&c, "q"));
        let q1 = p.divide_exact(&f).unwrap();
        assert_eq!(q1, f.mul(&MPoly::var(&c, "q")));
        assert!(q1.divide_exact(&w.add(&one)).is_none());
        // Laurent content: (q^-1 - q^-2) / (q - 1) = q^-2
        let qm1 = MPoly::monomial(&c, "q", -1, Rat::one());
        let qm2 = MPoly::monomial(&c, "q", -2, Rat::one());
        let n = qm1.sub(&qm2);
        let d = MPoly::var(&c, "q").sub(&one);
        assert_eq!(n.divide_exact(&d).unwrap(), qm2);
        // non-invertible variable must not go negative
        let x = MPoly::var(&c, "x");
        assert!(one.sub(&x).divide_exact(&x).is_none());
    }

    #[test]
    fn square_rule_reduction() {
        let c = VarSet::new(&[("q", true), ("s", false)]);
        // s^2 = q + q^-1  (i.e. [2]_q)
        let rule = MPoly::var(&c, "q").add(&MPoly::monomial(&c, "q", -1, Rat::one()));
        let c = c.with_square_rule("s", &rule);
        let s = MPoly::var(&c, "s");
        let s2 = s.mul(&s);
        let expect = MPoly::var(&c, "q").add(&MPoly::monomial(&c, "q", -1, Rat::one()));
        assert_eq!(s2, expect);
        let s3 = s2.mul(&s);
        assert_eq!(s3, expect.mul(&s));
    }

    #[test]
    fn substitution() {
        let c = ctx();
        let w = MPoly::var(&c, "w");
        let q = MPoly::var(&c, "q");
        let p = w.mul(&w).add(&q);
        // w -> 2*q^3: w^2 + q -> 4 q^6 + q
        let iw = c.index_of("w").unwrap();
        let iq = c.index_of("q").unwrap();
        let r = p.subst_monomial(iw, &rat_int(2), &[(iq, 3)]);
        let expect = MPoly::monomial(&c, "q", 6, rat_int(4)).add(&q);
        assert_eq!(r, expect);
    }
}
