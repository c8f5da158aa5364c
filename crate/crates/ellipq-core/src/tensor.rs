//! PBW computer algebra for U_q[sl(1|1)] and its graded tensor powers.
//!
//! Presentation (the minimal one compatible with the coproduct and the
//! R-matrix; the defining relations are not printed in the source material,
//! so this choice is an explicit assumption of the implementation):
//!
//!   e^2 = f^2 = 0,   {e,f} = (t - t^-1)/(q - q^-1),
//!   t = q^h central,  t_ex e t_ex^-1 = q^2 e,  t_ex f t_ex^-1 = q^-2 f.
//!
//! Since t is central and group-like it never appears as a PBW factor: its
//! powers on leg k live in the coefficient field as the invertible symbol
//! u_k = q^{h^(k)}. A term of a tensor element is
//!
//!   coeff(q, w, u_1..u_n) * prod G_{kl}^{m} * (x)_legs t_ex^x e^a f^b
//!
//! where G_{kl} is the formal Cartan exponential q^{-T} on legs (k,l),
//! T = (h (x) h_ex + h_ex (x) h)/2, with the exchange rules
//!
//!   G_{kl} e^(k) = e^(k) u_l^-1 G_{kl},   G_{kl} f^(k) = f^(k) u_l G_{kl}
//!
//! (symmetrically in k and l). G is never expanded; only single-leg central
//! u-factors appear because (h,h) = 0 and (h,alpha) = 0.
//!
//! Normal form orders every term as coefficient, G symbols, then per leg
//! t_ex powers, e, f; Koszul signs are applied on every reordering of odd
//! factors. Normal forms are unique, so equality of elements (and hence
//! every axiom check) is decidable.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use smallvec::SmallVec;

use crate::budget;
use crate::poly::{MPoly, VarSet};
use crate::rat::Rat;
use crate::ratfunc::RatFunc;
use crate::{Error, Result};

/// Maximum number of tensor legs the engine supports.
pub const MAX_LEGS: usize = 4;

/// Shared context: the coefficient variable set plus the indices of the
/// distinguished variables q, w and u_1..u_4.
#[derive(Debug)]
pub struct AlgCtx {
    coeff: Arc<VarSet>,
    #[allow(dead_code)]
    q: usize,
    w: usize,
    u: [usize; MAX_LEGS],
}

impl AlgCtx {
    /// The standard context over Q(q, w, u_1..u_4).
    pub fn standard() -> Arc<AlgCtx> {
        let coeff = VarSet::new(&[
            ("q", true),
            ("w", true),
            ("u1", true),
            ("u2", true),
            ("u3", true),
            ("u4", true),
        ]);
        Self::from_varset(coeff)
    }

    /// Wrap an existing variable set; it must contain q, w and u_1..u_4.
    pub fn from_varset(coeff: Arc<VarSet>) -> Arc<AlgCtx> {
        let q = coeff.index_of("q").expect("coefficient set needs q");
        let w = coeff.index_of("w").expect("coefficient set needs w");
        let u = [
            coeff.index_of("u1").expect("coefficient set needs u1"),
            coeff.index_of("u2").expect("coefficient set needs u2"),
            coeff.index_of("u3").expect("coefficient set needs u3"),
            coeff.index_of("u4").expect("coefficient set needs u4"),
        ];
        Arc::new(AlgCtx { coeff, q, w, u })
    }

    pub fn coeff(&self) -> &Arc<VarSet> {
        &self.coeff
    }

    pub fn w_var(&self) -> usize {
        self.w
    }

    /// Coefficient-field index of u_k (legs are 1-based).
    pub fn u_var(&self, leg: usize) -> usize {
        self.u[leg - 1]
    }

    /// q^e as a coefficient.
    pub fn q_pow(&self, e: i32) -> RatFunc {
        RatFunc::monomial(&self.coeff, "q", e, Rat::from_integer(1.into()))
    }

    /// u_k^e as a coefficient.
    pub fn u_pow(&self, leg: usize, e: i32) -> RatFunc {
        RatFunc::from_poly(MPoly::monomial(
            &self.coeff,
            self.coeff.name(self.u_var(leg)),
            e,
            Rat::from_integer(1.into()),
        ))
    }

    /// (u_k - u_k^-1)/(q - q^-1): the value of {e,f} on leg k.
    pub fn nu(&self, leg: usize) -> RatFunc {
        let name = self.coeff.name(self.u_var(leg));
        let u = MPoly::var(&self.coeff, name);
        let ui = MPoly::monomial(&self.coeff, name, -1, Rat::from_integer(1.into()));
        let g = crate::qseries::q_minus_qinv(&self.coeff);
        RatFunc::new(u.sub(&ui), g).expect("q - q^-1 is nonzero")
    }
}

/// PBW monomial of one leg: t_ex^tex * e^e * f^f.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LegMono {
    pub tex: i32,
    pub e: bool,
    pub f: bool,
}

impl LegMono {
    pub fn parity(&self) -> u8 {
        ((self.e as u8) + (self.f as u8)) & 1
    }

    pub fn is_one(&self) -> bool {
        self.tex == 0 && !self.e && !self.f
    }
}

/// Multiset of Cartan exponential symbols: sorted ((k,l), exponent) with
/// k < l and nonzero exponents.
pub type GSyms = SmallVec<[((u8, u8), i32); 4]>;

fn g_insert(g: &mut GSyms, pair: (u8, u8), m: i32) {
    if m == 0 {
        return;
    }
    let pair = if pair.0 <= pair.1 {
        pair
    } else {
        (pair.1, pair.0)
    };
    assert!(pair.0 != pair.1, "Cartan exponential needs two distinct legs");
    match g.binary_search_by_key(&pair, |x| x.0) {
        Ok(i) => {
            g[i].1 += m;
            if g[i].1 == 0 {
                g.remove(i);
            }
        }
        Err(i) => g.insert(i, (pair, m)),
    }
}

/// Structural part of a term (everything except the coefficient).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TermKey {
    pub g: GSyms,
    pub legs: SmallVec<[LegMono; MAX_LEGS]>,
}

impl TermKey {
    pub fn one(n: usize) -> TermKey {
        TermKey {
            g: GSyms::new(),
            legs: SmallVec::from_elem(LegMono::default(), n),
        }
    }
}

/// Element of a graded tensor power of U_q[sl(1|1)] in PBW normal form.
#[derive(Clone)]
pub struct TensorElement {
    ctx: Arc<AlgCtx>,
    nlegs: usize,
    terms: BTreeMap<TermKey, RatFunc>,
}

impl TensorElement {
    pub fn ctx(&self) -> &Arc<AlgCtx> {
        &self.ctx
    }

    pub fn nlegs(&self) -> usize {
        self.nlegs
    }

    pub fn zero(ctx: &Arc<AlgCtx>, n: usize) -> TensorElement {
        assert!(n >= 1 && n <= MAX_LEGS);
        TensorElement {
            ctx: ctx.clone(),
            nlegs: n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<AlgCtx>, n: usize) -> TensorElement {
        Self::scalar(ctx, n, RatFunc::one(ctx.coeff()))
    }

    pub fn scalar(ctx: &Arc<AlgCtx>, n: usize, c: RatFunc) -> TensorElement {
        let mut t = Self::zero(ctx, n);
        if !c.is_zero() {
            t.terms.insert(TermKey::one(n), c);
        }
        t
    }

    pub fn singleton(ctx: &Arc<AlgCtx>, n: usize, key: TermKey, c: RatFunc) -> TensorElement {
        let mut t = Self::zero(ctx, n);
        if !c.is_zero() {
            t.terms.insert(key, c);
        }
        t
    }

    /// The generator e on one leg.
    pub fn gen_e(ctx: &Arc<AlgCtx>, leg: usize, n: usize) -> TensorElement {
        let mut key = TermKey::one(n);
        key.legs[leg - 1].e = true;
        Self::singleton(ctx, n, key, RatFunc::one(ctx.coeff()))
    }

    /// The generator f on one leg.
    pub fn gen_f(ctx: &Arc<AlgCtx>, leg: usize, n: usize) -> TensorElement {
        let mut key = TermKey::one(n);
        key.legs[leg - 1].f = true;
        Self::singleton(ctx, n, key, RatFunc::one(ctx.coeff()))
    }

    /// t^m on one leg (a central coefficient u_k^m).
    pub fn gen_t(ctx: &Arc<AlgCtx>, leg: usize, m: i32, n: usize) -> TensorElement {
        Self::scalar(ctx, n, ctx.u_pow(leg, m))
    }

    /// t_ex^m on one leg.
    pub fn gen_tex(ctx: &Arc<AlgCtx>, leg: usize, m: i32, n: usize) -> TensorElement {
        let mut key = TermKey::one(n);
        key.legs[leg - 1].tex = m;
        Self::singleton(ctx, n, key, RatFunc::one(ctx.coeff()))
    }

    /// The Cartan exponential G_{kl}^m = (q^{-T})^m on legs (k,l).
    pub fn g_sym(ctx: &Arc<AlgCtx>, k: usize, l: usize, m: i32, n: usize) -> TensorElement {
        let mut key = TermKey::one(n);
        g_insert(&mut key.g, (k as u8, l as u8), m);
        Self::singleton(ctx, n, key, RatFunc::one(ctx.coeff()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(k, c)| k.g.is_empty() && k.legs.iter().all(|m| m.is_one()) && c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &RatFunc)> {
        self.terms.iter()
    }

    fn accumulate(&mut self, key: TermKey, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(x) => {
                let y = x.add(&c);
                if y.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *x = y;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.nlegs, other.nlegs, "leg count mismatch");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> TensorElement {
        TensorElement {
            ctx: self.ctx.clone(),
            nlegs: self.nlegs,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &RatFunc) -> TensorElement {
        if c.is_zero() {
            return Self::zero(&self.ctx, self.nlegs);
        }
        let mut out = Self::zero(&self.ctx, self.nlegs);
        for (k, x) in &self.terms {
            let y = x.mul(c);
            if !y.is_zero() {
                out.terms.insert(k.clone(), y);
            }
        }
        out
    }

    /// Product of two single-leg PBW monomials; may branch into two terms
    /// through f e = nu - e f.
    fn leg_mul(
        ctx: &AlgCtx,
        leg: usize,
        a: LegMono,
        b: LegMono,
    ) -> SmallVec<[(RatFunc, LegMono); 2]> {
        let mut out = SmallVec::new();
        // move t_ex^{b.tex} left: e t_ex = q^-2 t_ex e, f t_ex = q^2 t_ex f
        let mut qexp = 0i32;
        if a.f {
            qexp += 2 * b.tex;
        }
        if a.e {
            qexp -= 2 * b.tex;
        }
        let base = ctx.q_pow(qexp);
        let tex = a.tex + b.tex;
        if a.f && b.e {
            // e^{a.e} (f e) f^{b.f} with f e = nu - e f
            out.push((
                base.mul(&ctx.nu(leg)),
                LegMono {
                    tex,
                    e: a.e,
                    f: b.f,
                },
            ));
            if !a.e && !b.f {
                out.push((
                    base.neg(),
                    LegMono {
                        tex,
                        e: true,
                        f: true,
                    },
                ));
            }
        } else {
            if (a.e && b.e) || (a.f && b.f) {
                return out; // e^2 = f^2 = 0
            }
            out.push((
                base,
                LegMono {
                    tex,
                    e: a.e || b.e,
                    f: a.f || b.f,
                },
            ));
        }
        out
    }

    /// Graded product: the tensor multiplication rule
    /// (a (x) b)(a' (x) b') = (-1)^{[b][a']} (a a' (x) b b').
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.nlegs, other.nlegs, "leg count mismatch");
        let n = self.nlegs;
        let ctx = &self.ctx;
        let mut out = Self::zero(ctx, n);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                // Koszul interleave sign: sum over k < l of [B_k][A_l]
                let mut sgn = 0u8;
                for k in 0..n {
                    if kb.legs[k].parity() == 1 {
                        for l in (k + 1)..n {
                            sgn ^= ka.legs[l].parity();
                        }
                    }
                }
                let mut coeff = ca.mul(cb);
                if sgn == 1 {
                    coeff = coeff.neg();
                }
                // move the right factor's G symbols left across the left
                // factor's leg monomials: e^(k) G^m = G^m e^(k) u_l^m and
                // f^(k) G^m = G^m f^(k) u_l^-m
                let mut g = ka.g.clone();
                for &((gk, gl), m) in &kb.g {
                    for (leg_here, u_other) in [(gk, gl), (gl, gk)] {
                        let mono = ka.legs[(leg_here - 1) as usize];
                        let mut uexp = 0i32;
                        if mono.e {
                            uexp += m;
                        }
                        if mono.f {
                            uexp -= m;
                        }
                        if uexp != 0 {
                            coeff = coeff.mul(&ctx.u_pow(u_other as usize, uexp));
                        }
                    }
                    g_insert(&mut g, (gk, gl), m);
                }
                // per-leg PBW products (each may branch once)
                let mut partial: SmallVec<[(RatFunc, SmallVec<[LegMono; MAX_LEGS]>); 4]> =
                    SmallVec::new();
                partial.push((coeff, SmallVec::new()));
                for leg in 0..n {
                    let pieces = Self::leg_mul(ctx, leg + 1, ka.legs[leg], kb.legs[leg]);
                    if pieces.is_empty() {
                        partial.clear();
                        break;
                    }
                    let mut next: SmallVec<[(RatFunc, SmallVec<[LegMono; MAX_LEGS]>); 4]> =
                        SmallVec::new();
                    for (c0, legs0) in partial.iter() {
                        for (cp, mp) in pieces.iter() {
                            let mut legs1 = legs0.clone();
                            legs1.push(*mp);
                            next.push((c0.mul(cp), legs1));
                        }
                    }
                    partial = next;
                }
                for (c, legs) in partial {
                    out.accumulate(TermKey { g: g.clone(), legs }, c);
                }
            }
        }
        budget::check(out.terms.len());
        out
    }

    /// Coefficient substitution on every term.
    pub fn map_coeffs(
        &self,
        f: &mut dyn FnMut(&RatFunc) -> Result<RatFunc>,
    ) -> Result<TensorElement> {
        let mut out = Self::zero(&self.ctx, self.nlegs);
        for (k, c) in &self.terms {
            out.accumulate(k.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Apply the coproduct to leg k (1-based): leg k splits into legs
    /// (k, k+1) and higher legs shift up.
    ///
    /// On generators: D(e) = e (x) 1 + t (x) e, D(f) = f (x) t^-1 + 1 (x) f,
    /// D(t) = t (x) t, D(t_ex) = t_ex (x) t_ex; Cartan additivity splits
    /// G_{kl} into a product of two G symbols.
    pub fn coproduct_leg(&self, k: usize) -> TensorElement {
        assert!(k >= 1 && k <= self.nlegs);
        let n = self.nlegs + 1;
        assert!(n <= MAX_LEGS, "coproduct exceeds the maximum leg count");
        let ctx = &self.ctx;
        let one_rat = Rat::from_integer(1.into());
        let shift = |leg: u8| -> u8 {
            if (leg as usize) > k {
                leg + 1
            } else {
                leg
            }
        };
        let mut out = Self::zero(ctx, n);
        for (key, c) in &self.terms {
            // coefficient: u_j -> u_{j+1} for j > k (top down), then
            // u_k -> u_k u_{k+1}
            let mut coeff = c.clone();
            for j in (k + 1..=self.nlegs).rev() {
                coeff = coeff
                    .subst_monomial(ctx.u_var(j), &one_rat, &[(ctx.u_var(j + 1), 1)])
                    .expect("monomial substitution cannot fail");
            }
            coeff = coeff
                .subst_monomial(
                    ctx.u_var(k),
                    &one_rat,
                    &[(ctx.u_var(k), 1), (ctx.u_var(k + 1), 1)],
                )
                .expect("monomial substitution cannot fail");
            // split / relabel G symbols
            let mut g = GSyms::new();
            for &((a, b), m) in &key.g {
                if (a as usize) == k {
                    let b_ = shift(b);
                    g_insert(&mut g, (k as u8, b_), m);
                    g_insert(&mut g, (k as u8 + 1, b_), m);
                } else if (b as usize) == k {
                    let a_ = shift(a);
                    g_insert(&mut g, (a_, k as u8), m);
                    g_insert(&mut g, (a_, k as u8 + 1), m);
                } else {
                    g_insert(&mut g, (shift(a), shift(b)), m);
                }
            }
            // prefix: legs < k in place, t_ex part duplicated on (k, k+1)
            let mono = key.legs[k - 1];
            let mut prefix_key = TermKey::one(n);
            prefix_key.g = g;
            for j in 1..k {
                prefix_key.legs[j - 1] = key.legs[j - 1];
            }
            prefix_key.legs[k - 1] = LegMono {
                tex: mono.tex,
                ..Default::default()
            };
            prefix_key.legs[k] = LegMono {
                tex: mono.tex,
                ..Default::default()
            };
            let mut elem = Self::singleton(ctx, n, prefix_key, coeff);
            if mono.e {
                let de = Self::gen_e(ctx, k, n)
                    .add(&Self::gen_e(ctx, k + 1, n).scale(&ctx.u_pow(k, 1)));
                elem = elem.mul(&de);
            }
            if mono.f {
                let df = Self::gen_f(ctx, k, n)
                    .scale(&ctx.u_pow(k + 1, -1))
                    .add(&Self::gen_f(ctx, k + 1, n));
                elem = elem.mul(&df);
            }
            // suffix: legs > k, shifted up
            let mut suffix_key = TermKey::one(n);
            let mut need_suffix = false;
            for j in (k + 1)..=self.nlegs {
                if !key.legs[j - 1].is_one() {
                    need_suffix = true;
                }
                suffix_key.legs[j] = key.legs[j - 1];
            }
            if need_suffix {
                elem = elem.mul(&Self::singleton(
                    ctx,
                    n,
                    suffix_key,
                    RatFunc::one(ctx.coeff()),
                ));
            }
            out = out.add(&elem);
        }
        out
    }

    /// Counit applied to leg k: terms with e or f on that leg vanish, the
    /// leg is removed and higher legs shift down.
    pub fn counit_leg(&self, k: usize) -> TensorElement {
        assert!(k >= 1 && k <= self.nlegs);
        assert!(self.nlegs >= 2, "counit needs a leg to remain");
        let ctx = &self.ctx;
        let one_rat = Rat::from_integer(1.into());
        let n = self.nlegs - 1;
        let mut out = Self::zero(ctx, n);
        for (key, c) in &self.terms {
            let mono = key.legs[k - 1];
            if mono.e || mono.f {
                continue;
            }
            // coefficient: u_k -> 1, then u_j -> u_{j-1} for j > k
            let mut coeff = c
                .subst_rat(ctx.u_var(k), &one_rat)
                .expect("substituting 1 cannot fail");
            for j in (k + 1)..=self.nlegs {
                coeff = coeff
                    .subst_monomial(ctx.u_var(j), &one_rat, &[(ctx.u_var(j - 1), 1)])
                    .expect("monomial substitution cannot fail");
            }
            // (eps on one leg of) q^{-T} = 1 since eps(h) = eps(h_ex) = 0
            let mut g = GSyms::new();
            for &((a, b), m) in &key.g {
                if (a as usize) == k || (b as usize) == k {
                    continue;
                }
                let a_ = if (a as usize) > k { a - 1 } else { a };
                let b_ = if (b as usize) > k { b - 1 } else { b };
                g_insert(&mut g, (a_, b_), m);
            }
            let mut legs = SmallVec::from_elem(LegMono::default(), n);
            let mut idx = 0;
            for j in 1..=self.nlegs {
                if j == k {
                    continue;
                }
                legs[idx] = key.legs[j - 1];
                idx += 1;
            }
            out.accumulate(TermKey { g, legs }, coeff);
        }
        out
    }

    /// Antipode applied to leg k: the graded anti-homomorphism with
    /// S(e) = -t^-1 e, S(f) = -f t, S(t) = t^-1, S(t_ex) = t_ex^-1; on the
    /// Cartan exponentials (S on leg k of) G_{kl}^m = G_{kl}^{-m}.
    pub fn antipode_leg(&self, k: usize) -> TensorElement {
        assert!(k >= 1 && k <= self.nlegs);
        let ctx = &self.ctx;
        let one_rat = Rat::from_integer(1.into());
        let n = self.nlegs;
        let mut out = Self::zero(ctx, n);
        for (key, c) in &self.terms {
            let mono = key.legs[k - 1];
            // Koszul correction for moving S(M_k) left past legs j < k
            let mut sgn = 0u8;
            if mono.parity() == 1 {
                for j in 1..k {
                    sgn ^= key.legs[j - 1].parity();
                }
            }
            let mut coeff = c
                .subst_monomial(ctx.u_var(k), &one_rat, &[(ctx.u_var(k), -1)])
                .expect("monomial substitution cannot fail");
            if sgn == 1 {
                coeff = coeff.neg();
            }
            // S(t_ex^x e^a f^b) = (-1)^{ab} S(f)^b S(e)^a t_ex^{-x}
            let mut uexp = 0i32;
            let mut negs = 0u8;
            if mono.e && mono.f {
                negs ^= 1;
            }
            if mono.f {
                negs ^= 1; // S(f) = -f t
                uexp += 1;
            }
            if mono.e {
                negs ^= 1; // S(e) = -t^-1 e
                uexp -= 1;
            }
            if negs == 1 {
                coeff = coeff.neg();
            }
            if uexp != 0 {
                coeff = coeff.mul(&ctx.u_pow(k, uexp));
            }
            // flip G exponents on pairs containing leg k
            let mut g = GSyms::new();
            for &((a, b), m) in &key.g {
                let m2 = if (a as usize) == k || (b as usize) == k {
                    -m
                } else {
                    m
                };
                g_insert(&mut g, (a, b), m2);
            }
            // assemble in order: S(M_k)-word, then coeff * G', then the
            // remaining legs in their original slots
            let mut elem = Self::scalar(ctx, n, coeff);
            if mono.f {
                elem = elem.mul(&Self::gen_f(ctx, k, n));
            }
            if mono.e {
                elem = elem.mul(&Self::gen_e(ctx, k, n));
            }
            if mono.tex != 0 {
                elem = elem.mul(&Self::gen_tex(ctx, k, -mono.tex, n));
            }
            if !g.is_empty() {
                let mut gkey = TermKey::one(n);
                gkey.g = g;
                elem = elem.mul(&Self::singleton(ctx, n, gkey, RatFunc::one(ctx.coeff())));
            }
            let mut rest = TermKey::one(n);
            let mut need = false;
            for j in 1..=n {
                if j != k && !key.legs[j - 1].is_one() {
                    rest.legs[j - 1] = key.legs[j - 1];
                    need = true;
                }
            }
            if need {
                elem = elem.mul(&Self::singleton(ctx, n, rest, RatFunc::one(ctx.coeff())));
            }
            out = out.add(&elem);
        }
        out
    }

    /// Graded swap of adjacent legs k and k+1.
    pub fn swap_adjacent(&self, k: usize) -> TensorElement {
        assert!(k >= 1 && k < self.nlegs);
        let ctx = &self.ctx;
        let mut out = Self::zero(ctx, self.nlegs);
        for (key, c) in &self.terms {
            let ma = key.legs[k - 1];
            let mb = key.legs[k];
            let mut coeff = c.swap_vars(ctx.u_var(k), ctx.u_var(k + 1));
            if ma.parity() & mb.parity() == 1 {
                coeff = coeff.neg();
            }
            let mut legs = key.legs.clone();
            legs.swap(k - 1, k);
            let relabel = |x: u8| -> u8 {
                if x as usize == k {
                    k as u8 + 1
                } else if x as usize == k + 1 {
                    k as u8
                } else {
                    x
                }
            };
            let mut g = GSyms::new();
            for &((a, b), m) in &key.g {
                g_insert(&mut g, (relabel(a), relabel(b)), m);
            }
            out.accumulate(TermKey { g, legs }, coeff);
        }
        out
    }

    /// Place this element's legs onto `targets` (strictly increasing,
    /// 1-based) of an n-leg space, identity elsewhere.
    pub fn embed(&self, targets: &[usize], n: usize) -> TensorElement {
        assert_eq!(targets.len(), self.nlegs);
        assert!(n <= MAX_LEGS);
        assert!(
            targets.windows(2).all(|w| w[0] < w[1]) && targets.iter().all(|&t| t >= 1 && t <= n),
            "embedding targets must be strictly increasing and in range"
        );
        let ctx = &self.ctx;
        let one_rat = Rat::from_integer(1.into());
        let mut out = Self::zero(ctx, n);
        for (key, c) in &self.terms {
            // u_i -> u_{targets[i]}, from the highest original leg down
            let mut coeff = c.clone();
            for i in (1..=self.nlegs).rev() {
                if targets[i - 1] != i {
                    coeff = coeff
                        .subst_monomial(
                            ctx.u_var(i),
                            &one_rat,
                            &[(ctx.u_var(targets[i - 1]), 1)],
                        )
                        .expect("monomial substitution cannot fail");
                }
            }
            let mut legs = SmallVec::from_elem(LegMono::default(), n);
            for i in 1..=self.nlegs {
                legs[targets[i - 1] - 1] = key.legs[i - 1];
            }
            let mut g = GSyms::new();
            for &((a, b), m) in &key.g {
                g_insert(
                    &mut g,
                    (
                        targets[(a - 1) as usize] as u8,
                        targets[(b - 1) as usize] as u8,
                    ),
                    m,
                );
            }
            out.accumulate(TermKey { g, legs }, coeff);
        }
        out
    }

    /// Multiplication map on adjacent legs: legs k and k+1 merge into one
    /// leg (no Koszul signs; the merge does not transpose anything). Fails
    /// on a Cartan exponential joining exactly the two merged legs, whose
    /// product image q^{-h h_ex} is quadratic and leaves the model.
    pub fn merge_adjacent(&self, k: usize) -> Result<TensorElement> {
        assert!(k >= 1 && k < self.nlegs);
        let ctx = &self.ctx;
        let one_rat = Rat::from_integer(1.into());
        let n = self.nlegs - 1;
        let mut out = Self::zero(ctx, n);
        for (key, c) in &self.terms {
            let ma = key.legs[k - 1];
            let mb = key.legs[k];
            let mut coeff = c.clone();
            // Cartan parts of G pairs touching leg k+1 must move left past
            // the leg-k monomial: e picks up u_l^{+m}, f picks up u_l^{-m}.
            let mut g = GSyms::new();
            for &((a, b), m) in &key.g {
                let (a_us, b_us) = (a as usize, b as usize);
                if (a_us == k && b_us == k + 1) || (a_us == k + 1 && b_us == k) {
                    return Err(Error::Unsupported(
                        "merging the two legs of a Cartan exponential".into(),
                    ));
                }
                let other = if a_us == k + 1 {
                    Some(b_us)
                } else if b_us == k + 1 {
                    Some(a_us)
                } else {
                    None
                };
                if let Some(l) = other {
                    let mut uexp = 0i32;
                    if ma.e {
                        uexp += m;
                    }
                    if ma.f {
                        uexp -= m;
                    }
                    if uexp != 0 {
                        coeff = coeff.mul(&ctx.u_pow(l, uexp));
                    }
                }
                // relabel: k+1 -> k, legs above shift down
                let relabel = |x: usize| -> u8 {
                    if x > k {
                        (x - 1) as u8
                    } else {
                        x as u8
                    }
                };
                g_insert(&mut g, (relabel(a_us), relabel(b_us)), m);
            }
            // coefficient legs: u_{k+1} -> u_k, then shift down
            coeff = coeff
                .subst_monomial(ctx.u_var(k + 1), &one_rat, &[(ctx.u_var(k), 1)])
                .expect("monomial substitution cannot fail");
            for j in (k + 2)..=self.nlegs {
                coeff = coeff
                    .subst_monomial(ctx.u_var(j), &one_rat, &[(ctx.u_var(j - 1), 1)])
                    .expect("monomial substitution cannot fail");
            }
            // multiply the two leg monomials inside the merged leg
            for (cp, mono) in Self::leg_mul(ctx, k, ma, mb) {
                let mut legs = SmallVec::from_elem(LegMono::default(), n);
                let mut idx = 0;
                for j in 1..=self.nlegs {
                    if j == k + 1 {
                        continue;
                    }
                    legs[idx] = if j == k { mono } else { key.legs[j - 1] };
                    idx += 1;
                }
                out.accumulate(
                    TermKey {
                        g: g.clone(),
                        legs,
                    },
                    coeff.mul(&cp),
                );
            }
        }
        Ok(out)
    }

    /// Inverse for elements of the form (single Cartan term) + nilpotent
    /// part (every remaining term carries at least one e or f).
    pub fn inverse(&self) -> Result<TensorElement> {
        let ctx = &self.ctx;
        let n = self.nlegs;
        let mut cartan: Option<(TermKey, RatFunc)> = None;
        let mut nil = Self::zero(ctx, n);
        for (k, c) in &self.terms {
            if k.legs.iter().all(|m| !m.e && !m.f) {
                if cartan.is_some() {
                    return Err(Error::NonInvertible(
                        "tensor element has a non-monomial Cartan part".into(),
                    ));
                }
                cartan = Some((k.clone(), c.clone()));
            } else {
                nil.terms.insert(k.clone(), c.clone());
            }
        }
        let (ck, cc) = cartan.ok_or_else(|| {
            Error::NonInvertible("tensor element has no invertible Cartan part".into())
        })?;
        // X = C (1 + C^-1 N)  =>  X^-1 = (sum_j (-C^-1 N)^j) C^-1
        let mut cinv_key = TermKey::one(n);
        for (i, m) in ck.legs.iter().enumerate() {
            cinv_key.legs[i].tex = -m.tex;
        }
        for &((a, b), m) in &ck.g {
            g_insert(&mut cinv_key.g, (a, b), -m);
        }
        let cinv = Self::singleton(ctx, n, cinv_key, cc.inv()?);
        let m = cinv.mul(&nil).neg();
        let mut acc = Self::one(ctx, n);
        let mut p = Self::one(ctx, n);
        for _ in 0..(2 * n + 1) {
            p = p.mul(&m);
            if p.is_zero() {
                break;
            }
            acc = acc.add(&p);
        }
        if !p.is_zero() {
            return Err(Error::NonInvertible(
                "nilpotent part did not terminate".into(),
            ));
        }
        Ok(acc.mul(&cinv))
    }

    /// Render the lexicographically first term, for residual witnesses.
    pub fn first_term_string(&self) -> Option<String> {
        self.terms.iter().next().map(|(k, c)| {
            let mut s = alloc::format!("({c})");
            for &((a, b), m) in &k.g {
                s.push_str(&alloc::format!(" G{a}{b}^{m}"));
            }
            for (i, m) in k.legs.iter().enumerate() {
                if !m.is_one() {
                    s.push_str(&alloc::format!(" [leg{}:", i + 1));
                    if m.tex != 0 {
                        s.push_str(&alloc::format!(" tex^{}", m.tex));
                    }
                    if m.e {
                        s.push_str(" e");
                    }
                    if m.f {
                        s.push_str(" f");
                    }
                    s.push(']');
                }
            }
            s
        })
    }
}

impl PartialEq for TensorElement {
    fn eq(&self, other: &Self) -> bool {
        if self.nlegs != other.nlegs || self.terms.len() != other.terms.len() {
            return false;
        }
        self.terms
            .iter()
            .zip(other.terms.iter())
            .all(|((k1, c1), (k2, c2))| k1 == k2 && c1.equals(c2))
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for &((a, b), m) in &k.g {
                if m == 1 {
                    write!(f, "*G{a}{b}")?;
                } else {
                    write!(f, "*G{a}{b}^{m}")?;
                }
            }
            for (i, m) in k.legs.iter().enumerate() {
                if m.tex != 0 {
                    write!(f, "*tex{}^{}", i + 1, m.tex)?;
                }
                if m.e {
                    write!(f, "*e{}", i + 1)?;
                }
                if m.f {
                    write!(f, "*f{}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<AlgCtx> {
        AlgCtx::standard()
    }

    fn e1(c: &Arc<AlgCtx>) -> TensorElement {
        TensorElement::gen_e(c, 1, 1)
    }

    fn f1(c: &Arc<AlgCtx>) -> TensorElement {
        TensorElement::gen_f(c, 1, 1)
    }

    #[test]
    fn pbw_relations() {
        let c = ctx();
        // e*e = 0
        assert!(e1(&c).mul(&e1(&c)).is_zero());
        // f*e = nu - e*f
        let fe = f1(&c).mul(&e1(&c));
        let expect = TensorElement::scalar(&c, 1, c.nu(1)).sub(&e1(&c).mul(&f1(&c)));
        assert_eq!(fe, expect);
        // {e,f} = (t - t^-1)/(q - q^-1)
        let anti = e1(&c).mul(&f1(&c)).add(&f1(&c).mul(&e1(&c)));
        assert_eq!(anti, TensorElement::scalar(&c, 1, c.nu(1)));
        // t_ex e = q^2 e t_ex
        let lhs = TensorElement::gen_tex(&c, 1, 1, 1).mul(&e1(&c));
        let rhs = e1(&c)
            .mul(&TensorElement::gen_tex(&c, 1, 1, 1))
            .scale(&c.q_pow(2));
        assert_eq!(lhs, rhs);
        // t_ex f = q^-2 f t_ex
        let lhs = TensorElement::gen_tex(&c, 1, 1, 1).mul(&f1(&c));
        let rhs = f1(&c)
            .mul(&TensorElement::gen_tex(&c, 1, 1, 1))
            .scale(&c.q_pow(-2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn g_exchange_rules() {
        let c = ctx();
        let g12 = TensorElement::g_sym(&c, 1, 2, 1, 2);
        let e_leg1 = TensorElement::gen_e(&c, 1, 2);
        // G12 (e (x) 1) = (e (x) 1) u2^-1 G12
        assert_eq!(
            g12.mul(&e_leg1),
            e_leg1.mul(&g12).scale(&c.u_pow(2, -1))
        );
        // G12 (f (x) 1) = (f (x) 1) u2 G12
        let f_leg1 = TensorElement::gen_f(&c, 1, 2);
        assert_eq!(g12.mul(&f_leg1), f_leg1.mul(&g12).scale(&c.u_pow(2, 1)));
        // symmetric on the other leg
        let e_leg2 = TensorElement::gen_e(&c, 2, 2);
        assert_eq!(
            g12.mul(&e_leg2),
            e_leg2.mul(&g12).scale(&c.u_pow(1, -1))
        );
    }

    #[test]
    fn graded_signs_across_legs() {
        let c = ctx();
        // (1 (x) f)(e (x) 1) = -(e (x) f)
        let f2 = TensorElement::gen_f(&c, 2, 2);
        let e1 = TensorElement::gen_e(&c, 1, 2);
        assert_eq!(f2.mul(&e1), e1.mul(&f2).neg());
    }

    #[test]
    fn coproduct_on_generators() {
        let c = ctx();
        // D(e) = e (x) 1 + t (x) e = e1 + u1 e2
        let de = e1(&c).coproduct_leg(1);
        let expect = TensorElement::gen_e(&c, 1, 2)
            .add(&TensorElement::gen_e(&c, 2, 2).scale(&c.u_pow(1, 1)));
        assert_eq!(de, expect);
        // D(f) = f (x) t^-1 + 1 (x) f = u2^-1 f1 + f2
        let df = f1(&c).coproduct_leg(1);
        let expect = TensorElement::gen_f(&c, 1, 2)
            .scale(&c.u_pow(2, -1))
            .add(&TensorElement::gen_f(&c, 2, 2));
        assert_eq!(df, expect);
        // D(1) = 1 (x) 1
        assert!(TensorElement::one(&c, 1).coproduct_leg(1).is_one());
        // D is an algebra map: D(ef) = D(e) D(f)
        let def = e1(&c).mul(&f1(&c)).coproduct_leg(1);
        assert_eq!(def, de.mul(&df));
        // coassociativity on every generator
        for a in [
            e1(&c),
            f1(&c),
            TensorElement::gen_t(&c, 1, 1, 1),
            TensorElement::gen_tex(&c, 1, 1, 1),
            e1(&c).mul(&f1(&c)),
        ] {
            let d = a.coproduct_leg(1);
            assert_eq!(d.coproduct_leg(1), d.coproduct_leg(2), "a = {a}");
        }
    }

    #[test]
    fn coproduct_splits_g() {
        let c = ctx();
        let g = TensorElement::g_sym(&c, 1, 2, 1, 2);
        // (D (x) 1) G12 = G13 G23 on 3 legs
        assert_eq!(
            g.coproduct_leg(1),
            TensorElement::g_sym(&c, 1, 3, 1, 3).mul(&TensorElement::g_sym(&c, 2, 3, 1, 3))
        );
        // (1 (x) D) G12 = G12 G13
        assert_eq!(
            g.coproduct_leg(2),
            TensorElement::g_sym(&c, 1, 2, 1, 3).mul(&TensorElement::g_sym(&c, 1, 3, 1, 3))
        );
    }

    #[test]
    fn counit_coproduct_axiom() {
        let c = ctx();
        // (eps (x) 1) D(a) = a = (1 (x) eps) D(a) on generators
        for a in [
            e1(&c),
            f1(&c),
            TensorElement::gen_t(&c, 1, 2, 1),
            TensorElement::gen_tex(&c, 1, -1, 1),
            e1(&c).mul(&f1(&c)),
        ] {
            let d = a.coproduct_leg(1);
            assert_eq!(d.counit_leg(1), a, "left counit on {a}");
            assert_eq!(d.counit_leg(2), a, "right counit on {a}");
        }
    }

    #[test]
    fn antipode_values() {
        let c = ctx();
        // S(e) = -t^-1 e
        assert_eq!(e1(&c).antipode_leg(1), e1(&c).scale(&c.u_pow(1, -1)).neg());
        // S(f) = -f t
        assert_eq!(f1(&c).antipode_leg(1), f1(&c).scale(&c.u_pow(1, 1)).neg());
        // S(ef) = -S(f)S(e) = -f e
        assert_eq!(
            e1(&c).mul(&f1(&c)).antipode_leg(1),
            f1(&c).mul(&e1(&c)).neg()
        );
        // eps(S(a)) = eps(a) for a in {e, f, t, ef}
        for a in [
            e1(&c),
            f1(&c),
            TensorElement::gen_t(&c, 1, 1, 1),
            e1(&c).mul(&f1(&c)),
        ] {
            let emb = a.embed(&[1], 2);
            let s_emb = a.antipode_leg(1).embed(&[1], 2);
            assert_eq!(emb.counit_leg(1), s_emb.counit_leg(1));
        }
        // hopf antipode axiom in the base Hopf algebra:
        // m (S (x) 1) D(a) = eps(a) 1
        for a in [
            e1(&c),
            f1(&c),
            TensorElement::gen_tex(&c, 1, 1, 1),
            e1(&c).mul(&f1(&c)),
        ] {
            let m = a.coproduct_leg(1).antipode_leg(1).merge_adjacent(1).unwrap();
            let eps = a.embed(&[1], 2).counit_leg(1);
            assert_eq!(m, eps, "antipode axiom on {a}");
        }
    }

    #[test]
    fn merge_with_g_corrections() {
        let c = ctx();
        // m on legs (1,2) of G13 * (e (x) 1 (x) 1): moving the leg-2 Cartan
        // part of G23 past e on leg 1 is exercised via G23 * e1
        let g23 = TensorElement::g_sym(&c, 2, 3, 1, 3);
        let e1 = TensorElement::gen_e(&c, 1, 3);
        let x = e1.mul(&g23); // e1 G23 in normal form
        let merged = x.merge_adjacent(1).unwrap();
        // after merging, G23 -> G12 and its former leg-2 part has to cross
        // e: e^(1) picks up u_l^{+1} with l the other G leg (now 2)
        let expect = TensorElement::gen_e(&c, 1, 2)
            .mul(&TensorElement::g_sym(&c, 1, 2, 1, 2));
        assert_eq!(merged, expect);
        // merging the two legs of a G symbol is rejected
        let g12 = TensorElement::g_sym(&c, 1, 2, 1, 2);
        assert!(g12.merge_adjacent(1).is_err());
    }

    #[test]
    fn swap_and_embed() {
        let c = ctx();
        // T(e (x) f) = -f (x) e
        let ef = TensorElement::gen_e(&c, 1, 2).mul(&TensorElement::gen_f(&c, 2, 2));
        let swapped = ef.swap_adjacent(1);
        let fe = TensorElement::gen_f(&c, 1, 2).mul(&TensorElement::gen_e(&c, 2, 2));
        assert_eq!(swapped, fe.neg());
        assert_eq!(swapped.swap_adjacent(1), ef);
        // embed legs (1,2) -> (1,3)
        let emb = ef.embed(&[1, 3], 3);
        let direct = TensorElement::gen_e(&c, 1, 3).mul(&TensorElement::gen_f(&c, 3, 3));
        assert_eq!(emb, direct);
        // u-dependence moves with the leg
        let t = TensorElement::gen_t(&c, 2, 1, 2);
        assert_eq!(t.embed(&[1, 3], 3), TensorElement::gen_t(&c, 3, 1, 3));
    }

    #[test]
    fn unipotent_inverse() {
        let c = ctx();
        let one = TensorElement::one(&c, 2);
        let nil = TensorElement::gen_e(&c, 1, 2)
            .mul(&TensorElement::gen_f(&c, 2, 2))
            .scale(&RatFunc::var(c.coeff(), "w"));
        let x = one.add(&nil);
        let xi = x.inverse().unwrap();
        assert!(x.mul(&xi).is_one());
        assert!(xi.mul(&x).is_one());
        // with a Cartan exponential factor
        let g = TensorElement::g_sym(&c, 1, 2, 1, 2);
        let y = x.mul(&g);
        let yi = y.inverse().unwrap();
        assert!(y.mul(&yi).is_one());
        assert!(yi.mul(&y).is_one());
    }

    #[test]
    fn normal_form_is_associative() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let c = ctx();
        let mut rng = StdRng::seed_from_u64(42);
        let rand_elem = |rng: &mut StdRng| -> TensorElement {
            let mut acc = TensorElement::zero(&c, 2);
            for _ in 0..3 {
                let mut key = TermKey::one(2);
                for leg in 0..2 {
                    key.legs[leg] = LegMono {
                        tex: rng.gen_range(-1..2),
                        e: rng.gen_bool(0.5),
                        f: rng.gen_bool(0.5),
                    };
                }
                if rng.gen_bool(0.5) {
                    g_insert(&mut key.g, (1, 2), rng.gen_range(-1..2));
                }
                let coeff =
                    RatFunc::constant(c.coeff(), crate::rat::rat_int(rng.gen_range(-3..4)))
                        .mul(&c.u_pow(1, rng.gen_range(-1..2)));
                acc = acc.add(&TensorElement::singleton(&c, 2, key, coeff));
            }
            acc
        };
        for _ in 0..12 {
            let a = rand_elem(&mut rng);
            let b = rand_elem(&mut rng);
            let d = rand_elem(&mut rng);
            assert_eq!(a.mul(&b).mul(&d), a.mul(&b.mul(&d)));
            assert_eq!(a.mul(&b.add(&d)), a.mul(&b).add(&a.mul(&d)));
        }
    }

    #[test]
    fn normal_form_idempotent() {
        // multiplying by 1 reproduces the element exactly
        let c = ctx();
        let x = TensorElement::gen_e(&c, 1, 3)
            .mul(&TensorElement::gen_f(&c, 2, 3))
            .mul(&TensorElement::g_sym(&c, 1, 3, 2, 3))
            .scale(&c.nu(2));
        assert_eq!(x.mul(&TensorElement::one(&c, 3)), x);
        assert_eq!(TensorElement::one(&c, 3).mul(&x), x);
    }
}
