//! Truncated multivariate formal power series with [`RatFunc`] coefficients.
//!
//! Truncation is per variable (independent bounds, not total degree). Each
//! variable carries a window `lo..=hi` with `lo <= 0 <= hi`; ordinary series
//! variables use `lo = 0`, while a negative `lo` admits bounded Laurent tails
//! (needed when a spectral parameter is substituted by its inverse).
//! Arithmetic discards out-of-window terms deterministically.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use smallvec::SmallVec;

use crate::budget;
use crate::poly::VarSet;
use crate::rat::Rat;
use crate::ratfunc::RatFunc;
use crate::{Error, Result};

/// Exponent vector of the series variables.
pub type SExpo = SmallVec<[i32; 2]>;

/// Shared description of the series ring: variables, truncation windows and
/// the coefficient variable set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesCtx {
    names: Vec<String>,
    lo: Vec<i32>,
    hi: Vec<i32>,
    coeff: Arc<VarSet>,
}

impl SeriesCtx {
    /// Ordinary truncation: every variable is bounded by `0..=hi`.
    pub fn new(coeff: &Arc<VarSet>, vars: &[(&str, i32)]) -> Result<Arc<SeriesCtx>> {
        Self::with_windows(
            coeff,
            &vars.iter().map(|&(n, hi)| (n, 0, hi)).collect::<Vec<_>>(),
        )
    }

    /// General windows `(name, lo, hi)` with `lo <= 0 <= hi`.
    pub fn with_windows(coeff: &Arc<VarSet>, vars: &[(&str, i32, i32)]) -> Result<Arc<SeriesCtx>> {
        for &(n, lo, hi) in vars {
            if lo > 0 || hi < 0 || hi < lo {
                return Err(Error::Config(alloc::format!(
                    "invalid truncation window {lo}..={hi} for series variable {n}"
                )));
            }
        }
        Ok(Arc::new(SeriesCtx {
            names: vars.iter().map(|v| v.0.to_string()).collect(),
            lo: vars.iter().map(|v| v.1).collect(),
            hi: vars.iter().map(|v| v.2).collect(),
            coeff: coeff.clone(),
        }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn coeff_ctx(&self) -> &Arc<VarSet> {
        &self.coeff
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn window(&self, i: usize) -> (i32, i32) {
        (self.lo[i], self.hi[i])
    }

    fn in_window(&self, e: &SExpo) -> bool {
        e.iter()
            .enumerate()
            .all(|(i, &x)| x >= self.lo[i] && x <= self.hi[i])
    }
}

/// Truncated formal power series.
#[derive(Clone)]
pub struct TruncatedSeries {
    ctx: Arc<SeriesCtx>,
    coeffs: BTreeMap<SExpo, RatFunc>,
}

impl TruncatedSeries {
    pub fn ctx(&self) -> &Arc<SeriesCtx> {
        &self.ctx
    }

    pub fn zero(ctx: &Arc<SeriesCtx>) -> TruncatedSeries {
        TruncatedSeries {
            ctx: ctx.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<SeriesCtx>, c: RatFunc) -> TruncatedSeries {
        let mut s = Self::zero(ctx);
        if !c.is_zero() {
            s.coeffs.insert(SExpo::from_elem(0, ctx.len()), c);
        }
        s
    }

    pub fn one(ctx: &Arc<SeriesCtx>) -> TruncatedSeries {
        Self::constant(ctx, RatFunc::one(ctx.coeff_ctx()))
    }

    /// `c * var^e` (dropped silently if outside the window).
    pub fn monomial(ctx: &Arc<SeriesCtx>, var: &str, e: i32, c: RatFunc) -> TruncatedSeries {
        let i = ctx.index_of(var).expect("unknown series variable");
        let mut expo = SExpo::from_elem(0, ctx.len());
        expo[i] = e;
        let mut s = Self::zero(ctx);
        if !c.is_zero() && ctx.in_window(&expo) {
            s.coeffs.insert(expo, c);
        }
        s
    }

    pub fn var(ctx: &Arc<SeriesCtx>, v: &str) -> TruncatedSeries {
        Self::monomial(ctx, v, 1, RatFunc::one(ctx.coeff_ctx()))
    }

    pub fn from_terms(
        ctx: &Arc<SeriesCtx>,
        terms: impl IntoIterator<Item = (SExpo, RatFunc)>,
    ) -> TruncatedSeries {
        let mut s = Self::zero(ctx);
        for (e, c) in terms {
            if c.is_zero() || !ctx.in_window(&e) {
                continue;
            }
            match s.coeffs.get_mut(&e) {
                Some(x) => {
                    let y = x.add(&c);
                    if y.is_zero() {
                        s.coeffs.remove(&e);
                    } else {
                        *x = y;
                    }
                }
                None => {
                    s.coeffs.insert(e, c);
                }
            }
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SExpo, &RatFunc)> {
        self.coeffs.iter()
    }

    /// Coefficient at a given exponent vector (zero if absent).
    pub fn coeff(&self, e: &[i32]) -> RatFunc {
        let key: SExpo = SmallVec::from_slice(e);
        self.coeffs
            .get(&key)
            .cloned()
            .unwrap_or_else(|| RatFunc::zero(self.ctx.coeff_ctx()))
    }

    /// Constant coefficient.
    pub fn constant_term(&self) -> RatFunc {
        self.coeff(&alloc::vec![0; self.ctx.len()])
    }

    fn check_ctx(&self, other: &TruncatedSeries) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(Error::CtxMismatch(alloc::format!(
                "series over [{}] vs [{}]",
                self.ctx.names.join(","),
                other.ctx.names.join(",")
            )))
        }
    }

    pub fn try_add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            match out.coeffs.get_mut(e) {
                Some(x) => {
                    let y = x.add(c);
                    if y.is_zero() {
                        out.coeffs.remove(e);
                    } else {
                        *x = y;
                    }
                }
                None => {
                    out.coeffs.insert(e.clone(), c.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.try_add(other).unwrap()
    }

    pub fn neg(&self) -> TruncatedSeries {
        TruncatedSeries {
            ctx: self.ctx.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.add(&other.neg())
    }

    /// Product truncated to the window.
    pub fn try_mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_ctx(other)?;
        let n = self.ctx.len();
        let mut acc: BTreeMap<SExpo, RatFunc> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let mut e = ea.clone();
                for i in 0..n {
                    e[i] += eb[i];
                }
                if !self.ctx.in_window(&e) {
                    continue;
                }
                let c = ca.mul(cb);
                if c.is_zero() {
                    continue;
                }
                match acc.get_mut(&e) {
                    Some(x) => {
                        let y = x.add(&c);
                        if y.is_zero() {
                            acc.remove(&e);
                        } else {
                            *x = y;
                        }
                    }
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        budget::check(acc.len());
        Ok(TruncatedSeries {
            ctx: self.ctx.clone(),
            coeffs: acc,
        })
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.try_mul(other).unwrap()
    }

    pub fn scale(&self, c: &RatFunc) -> TruncatedSeries {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        let mut out = Self::zero(&self.ctx);
        for (e, x) in &self.coeffs {
            let y = x.mul(c);
            if !y.is_zero() {
                out.coeffs.insert(e.clone(), y);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> TruncatedSeries {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Total-degree-graded iteration order used by the inversion recursion.
    fn graded_exponents(ctx: &SeriesCtx) -> Vec<SExpo> {
        assert!(
            ctx.lo.iter().all(|&l| l == 0),
            "series inversion requires windows starting at 0"
        );
        let mut all: Vec<SExpo> = Vec::new();
        let mut e = SExpo::from_elem(0, ctx.len());
        loop {
            all.push(e.clone());
            let mut i = 0;
            loop {
                if i == ctx.len() {
                    all.sort_by_key(|e| e.iter().map(|&x| x as i64).sum::<i64>());
                    return all;
                }
                if e[i] < ctx.hi[i] {
                    e[i] += 1;
                    break;
                }
                e[i] = 0;
                i += 1;
            }
        }
    }

    /// Two-sided inverse modulo truncation; requires an invertible constant
    /// term and ordinary (nonnegative) windows.
    pub fn invert(&self) -> Result<TruncatedSeries> {
        let a0 = self.constant_term();
        if a0.is_zero() {
            return Err(Error::NonInvertible(
                "series has zero constant term".into(),
            ));
        }
        let a0i = a0.inv()?;
        let n = self.ctx.len();
        let mut out = Self::zero(&self.ctx);
        for e in Self::graded_exponents(&self.ctx) {
            // b_e = a0^{-1} ( [e == 0] - sum_{0 < f <= e} a_f b_{e-f} )
            let mut rhs = if e.iter().all(|&x| x == 0) {
                RatFunc::one(self.ctx.coeff_ctx())
            } else {
                RatFunc::zero(self.ctx.coeff_ctx())
            };
            for (f, af) in &self.coeffs {
                if f.iter().all(|&x| x == 0) {
                    continue;
                }
                if f.iter().zip(e.iter()).all(|(&x, &y)| x <= y) {
                    let mut d = e.clone();
                    for i in 0..n {
                        d[i] -= f[i];
                    }
                    if let Some(b) = out.coeffs.get(&d) {
                        rhs = rhs.sub(&af.mul(b));
                    }
                }
            }
            let b = a0i.mul(&rhs);
            if !b.is_zero() {
                out.coeffs.insert(e, b);
            }
        }
        Ok(out)
    }

    /// Exponential of a series with zero constant term.
    pub fn exp(&self) -> Result<TruncatedSeries> {
        if !self.constant_term().is_zero() {
            return Err(Error::Config(
                "series exponential requires zero constant term".into(),
            ));
        }
        // Nilpotent modulo truncation: stop when the power vanishes.
        let mut acc = Self::one(&self.ctx);
        let mut term = Self::one(&self.ctx);
        let mut k: u64 = 1;
        loop {
            term = term.mul(self);
            if term.is_zero() {
                break;
            }
            let kfac_inv = RatFunc::constant(
                self.ctx.coeff_ctx(),
                Rat::new(1.into(), num_bigint::BigInt::from(k)),
            );
            // divide the running power by k to build self^k / k!
            term = term.scale(&kfac_inv);
            acc = acc.add(&term);
            k += 1;
            if k > 10_000 {
                return Err(Error::Config("series exponential did not terminate".into()));
            }
        }
        Ok(acc)
    }

    /// Substitute `var -> var * prod others^{shift}`; e.g. `z -> p*z` adds
    /// the z-exponent to the p-exponent of every term.
    pub fn shift_var(&self, var: &str, onto: &[(&str, i32)]) -> TruncatedSeries {
        let i = self.ctx.index_of(var).expect("unknown series variable");
        let idx: Vec<(usize, i32)> = onto
            .iter()
            .map(|&(n, k)| (self.ctx.index_of(n).expect("unknown series variable"), k))
            .collect();
        let mut out = Self::zero(&self.ctx);
        for (e, c) in &self.coeffs {
            let mut e2 = e.clone();
            for &(j, k) in &idx {
                e2[j] += k * e[i];
            }
            if self.ctx.in_window(&e2) {
                out.coeffs.insert(e2, c.clone());
            }
        }
        out
    }

    /// Substitute `var -> c * var` (coefficient rescaling by `c^e`).
    pub fn scale_var(&self, var: &str, c: &RatFunc) -> Result<TruncatedSeries> {
        let i = self.ctx.index_of(var).expect("unknown series variable");
        let mut out = Self::zero(&self.ctx);
        for (e, x) in &self.coeffs {
            let y = x.mul(&c.pow(e[i])?);
            if !y.is_zero() {
                out.coeffs.insert(e.clone(), y);
            }
        }
        Ok(out)
    }

    /// Collapse a series variable to an exact coefficient value. Only valid
    /// when the caller knows the discarded tail of that variable is zero
    /// (e.g. the variable's degree is bounded by another variable's order).
    pub fn collapse_var(&self, var: &str, value: &RatFunc) -> Result<TruncatedSeries> {
        let i = self.ctx.index_of(var).expect("unknown series variable");
        let mut out = Self::zero(&self.ctx);
        for (e, x) in &self.coeffs {
            let mut e2 = e.clone();
            e2[i] = 0;
            let y = x.mul(&value.pow(e[i])?);
            let entry = out
                .coeffs
                .entry(e2)
                .or_insert_with(|| RatFunc::zero(self.ctx.coeff_ctx()));
            *entry = entry.add(&y);
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Move the series to another context (same variable names), dropping
    /// terms outside the target window.
    pub fn restrict(&self, target: &Arc<SeriesCtx>) -> TruncatedSeries {
        assert_eq!(self.ctx.names, target.names, "series variable mismatch");
        let mut out = Self::zero(target);
        for (e, c) in &self.coeffs {
            if target.in_window(e) {
                out.coeffs.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Map all coefficients (e.g. substitute a sampled q).
    pub fn map_coeffs(
        &self,
        f: &mut dyn FnMut(&RatFunc) -> Result<RatFunc>,
    ) -> Result<TruncatedSeries> {
        let mut out = Self::zero(&self.ctx);
        for (e, c) in &self.coeffs {
            let y = f(c)?;
            if !y.is_zero() {
                out.coeffs.insert(e.clone(), y);
            }
        }
        Ok(out)
    }

    /// Extract the sub-series of terms with `var` exponent equal to `k`,
    /// with that exponent zeroed.
    pub fn layer(&self, var: &str, k: i32) -> TruncatedSeries {
        let i = self.ctx.index_of(var).expect("unknown series variable");
        let mut out = Self::zero(&self.ctx);
        for (e, c) in &self.coeffs {
            if e[i] == k {
                let mut e2 = e.clone();
                e2[i] = 0;
                out.coeffs.insert(e2, c.clone());
            }
        }
        out
    }

    /// First (lexicographically smallest) nonzero term, for witnesses.
    pub fn first_term(&self) -> Option<(Vec<(String, i32)>, &RatFunc)> {
        self.coeffs.iter().next().map(|(e, c)| {
            (
                e.iter()
                    .enumerate()
                    .map(|(i, &x)| (self.ctx.name(i).to_string(), x))
                    .collect(),
                c,
            )
        })
    }
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        if self.coeffs.len() != other.coeffs.len() {
            return false;
        }
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .all(|((e1, c1), (e2, c2))| e1 == e2 && c1.equals(c2))
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut mon = String::new();
            for (i, &x) in e.iter().enumerate() {
                if x != 0 {
                    if !mon.is_empty() {
                        mon.push('*');
                    }
                    if x == 1 {
                        mon.push_str(self.ctx.name(i));
                    } else {
                        mon.push_str(&alloc::format!("{}^{}", self.ctx.name(i), x));
                    }
                }
            }
            if mon.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{mon}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;
    use proptest::prelude::*;

    fn setup() -> (Arc<VarSet>, Arc<SeriesCtx>) {
        let cf = VarSet::new(&[("q", true)]);
        let ctx = SeriesCtx::new(&cf, &[("z", 6)]).unwrap();
        (cf, ctx)
    }

    #[test]
    fn truncating_mul() {
        let cf = VarSet::new(&[("q", true)]);
        let ctx2 = SeriesCtx::new(&cf, &[("z", 2)]).unwrap();
        let one = TruncatedSeries::one(&ctx2);
        let z = TruncatedSeries::var(&ctx2, "z");
        // (1+z)(1-z) = 1 - z^2 at N_z = 2
        let p = one.add(&z).mul(&one.sub(&z));
        assert_eq!(p, one.sub(&z.mul(&z)));
        // (1+z)^2 at N_z = 1 drops z^2
        let ctx1 = SeriesCtx::new(&cf, &[("z", 1)]).unwrap();
        let one = TruncatedSeries::one(&ctx1);
        let z = TruncatedSeries::var(&ctx1, "z");
        let p = one.add(&z).mul(&one.add(&z));
        let expect = one.add(&z.scale(&RatFunc::int(&cf, 2)));
        assert_eq!(p, expect);
    }

    #[test]
    fn geometric_inverse() {
        let cf = VarSet::new(&[("q", true)]);
        let ctx = SeriesCtx::new(&cf, &[("z", 3)]).unwrap();
        let one = TruncatedSeries::one(&ctx);
        let z = TruncatedSeries::var(&ctx, "z");
        let inv = one.sub(&z).invert().unwrap();
        // 1 + z + z^2 + z^3
        let expect = one.add(&z).add(&z.pow(2)).add(&z.pow(3));
        assert_eq!(inv, expect);
        assert_eq!(one.invert().unwrap(), one);
        assert!(z.invert().is_err());
    }

    #[test]
    fn inverse_of_one_minus_qz() {
        let (cf, ctx) = setup();
        let one = TruncatedSeries::one(&ctx);
        let qz = TruncatedSeries::monomial(&ctx, "z", 1, RatFunc::var(&cf, "q"));
        let a = one.sub(&qz);
        let ai = a.invert().unwrap();
        assert_eq!(a.mul(&ai), one);
        assert_eq!(ai.mul(&a), one);
    }

    #[test]
    fn exp_log_structure() {
        let (cf, ctx) = setup();
        let z = TruncatedSeries::var(&ctx, "z");
        let e = z.exp().unwrap();
        // coefficient of z^3 is 1/6
        assert!(e
            .coeff(&[3])
            .equals(&RatFunc::constant(&cf, crate::rat::rat(1, 6))));
        // exp(z)*exp(-z) = 1
        let em = z.neg().exp().unwrap();
        assert_eq!(e.mul(&em), TruncatedSeries::one(&ctx));
    }

    #[test]
    fn shift_and_layer() {
        let cf = VarSet::new(&[("q", true)]);
        let ctx = SeriesCtx::new(&cf, &[("p", 4), ("z", 4)]).unwrap();
        let z = TruncatedSeries::var(&ctx, "z");
        let p = TruncatedSeries::var(&ctx, "p");
        let s = TruncatedSeries::one(&ctx).add(&z).add(&z.pow(2));
        let t = s.shift_var("z", &[("p", 1)]); // z -> p z
        let expect = TruncatedSeries::one(&ctx)
            .add(&z.mul(&p))
            .add(&z.pow(2).mul(&p.pow(2)));
        assert_eq!(t, expect);
        assert_eq!(t.layer("p", 1), z);
        assert_eq!(t.layer("p", 0), TruncatedSeries::one(&ctx));
    }

    fn arb_series() -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec((0i32..4, -3i64..4), 1..5).prop_map(|ts| {
            let cf = VarSet::new(&[("q", true)]);
            let ctx = SeriesCtx::new(&cf, &[("z", 3)]).unwrap();
            TruncatedSeries::from_terms(
                &ctx,
                ts.into_iter().map(|(e, c)| {
                    (
                        SExpo::from_slice(&[e]),
                        RatFunc::constant(&cf, rat_int(c)),
                    )
                }),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            // associativity and distributivity at fixed bounds, exact equality
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn inverse_is_two_sided(a in arb_series()) {
            // u = 1 + z*a is always a unit
            let one = TruncatedSeries::one(a.ctx());
            let u = one.add(&a.mul(&TruncatedSeries::var(a.ctx(), "z")));
            let ui = u.invert().unwrap();
            prop_assert_eq!(u.mul(&ui), one.clone());
            prop_assert_eq!(ui.mul(&u), one);
        }
    }
}
