//! Z2-graded linear algebra on tensor powers of the (1|1)-dimensional space
//! V = C v1 + C v2 with v1 even and v2 odd.
//!
//! Basis ordering of tensor powers is lexicographic with leg 1 most
//! significant; the parity of a basis vector is the number of odd factors
//! mod 2. All Koszul sign bookkeeping is centralized here, in
//! [`SuperOp::super_kron`] and the leg-embedding routines.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ratfunc::RatFunc;
use crate::series::TruncatedSeries;
use crate::{Error, Result};

/// Scalar ring abstraction implemented by [`RatFunc`] and
/// [`TruncatedSeries`]. Constants are derived from existing values
/// (`zero_like`/`one_like`) so scalars can carry their variable contexts.
pub trait Scalar: Clone + PartialEq + fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Result<Self>;
}

impl Scalar for RatFunc {
    fn zero_like(&self) -> Self {
        RatFunc::zero(self.ctx())
    }
    fn one_like(&self) -> Self {
        RatFunc::one(self.ctx())
    }
    fn add(&self, o: &Self) -> Self {
        RatFunc::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RatFunc::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFunc::mul(self, o)
    }
    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn inv(&self) -> Result<Self> {
        RatFunc::inv(self)
    }
}

impl Scalar for TruncatedSeries {
    fn zero_like(&self) -> Self {
        TruncatedSeries::zero(self.ctx())
    }
    fn one_like(&self) -> Self {
        TruncatedSeries::one(self.ctx())
    }
    fn add(&self, o: &Self) -> Self {
        TruncatedSeries::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        TruncatedSeries::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        TruncatedSeries::mul(self, o)
    }
    fn neg(&self) -> Self {
        TruncatedSeries::neg(self)
    }
    fn is_zero(&self) -> bool {
        TruncatedSeries::is_zero(self)
    }
    fn inv(&self) -> Result<Self> {
        self.invert()
    }
}

/// Parity of basis state `i` of V (states are numbered 0 = v1, 1 = v2).
#[inline]
pub fn state_parity(i: usize) -> u8 {
    (i & 1) as u8
}

/// Parity of a tensor-power basis index (number of odd legs mod 2).
#[inline]
pub fn basis_parity(b: usize) -> u8 {
    (b.count_ones() & 1) as u8
}

/// Parity-graded square operator on `legs` tensor copies of V, stored dense.
#[derive(Clone, PartialEq)]
pub struct SuperOp<T: Scalar> {
    legs: usize,
    dim: usize,
    a: Vec<T>,
}

impl<T: Scalar> SuperOp<T> {
    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn zero(legs: usize, proto: &T) -> Self {
        let dim = 1usize << legs;
        SuperOp {
            legs,
            dim,
            a: alloc::vec![proto.zero_like(); dim * dim],
        }
    }

    pub fn identity(legs: usize, proto: &T) -> Self {
        let mut m = Self::zero(legs, proto);
        for i in 0..m.dim {
            m.a[i * m.dim + i] = proto.one_like();
        }
        m
    }

    /// Matrix unit e_{ij} on a single leg (i, j in {1, 2} as in the paper).
    pub fn unit(i: usize, j: usize, proto: &T) -> Self {
        assert!((1..=2).contains(&i) && (1..=2).contains(&j));
        let mut m = Self::zero(1, proto);
        m.a[(i - 1) * 2 + (j - 1)] = proto.one_like();
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.a[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.a[r * self.dim + c] = v;
    }

    pub fn proto(&self) -> &T {
        &self.a[0]
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.legs, o.legs);
        let mut m = self.clone();
        for (x, y) in m.a.iter_mut().zip(o.a.iter()) {
            *x = x.add(y);
        }
        m
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.legs, o.legs);
        let mut m = self.clone();
        for (x, y) in m.a.iter_mut().zip(o.a.iter()) {
            *x = x.sub(y);
        }
        m
    }

    pub fn neg(&self) -> Self {
        let mut m = self.clone();
        for x in m.a.iter_mut() {
            *x = x.neg();
        }
        m
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut m = self.clone();
        for x in m.a.iter_mut() {
            *x = x.mul(c);
        }
        m
    }

    /// Operator composition (ordinary matrix product; the grading lives in
    /// how tensor products of operators are formed, not in composition).
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.legs, o.legs, "leg count mismatch in composition");
        let d = self.dim;
        let mut m = Self::zero(self.legs, self.proto());
        for r in 0..d {
            for k in 0..d {
                let x = self.get(r, k);
                if x.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let y = o.get(k, c);
                    if y.is_zero() {
                        continue;
                    }
                    let t = x.mul(y);
                    let e = &mut m.a[r * d + c];
                    *e = e.add(&t);
                }
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    /// Graded tensor product: with homogeneous entries the composition rule
    /// `(A (x) B)(C (x) D) = (-1)^{[B][C]} (AC (x) BD)` holds.
    pub fn super_kron(&self, o: &Self) -> Self {
        let la = self.legs;
        let lb = o.legs;
        let da = self.dim;
        let db = o.dim;
        let mut m = Self::zero(la + lb, self.proto());
        let dim = m.dim;
        for ra in 0..da {
            for ca in 0..da {
                let x = self.get(ra, ca);
                if x.is_zero() {
                    continue;
                }
                for rb in 0..db {
                    for cb in 0..db {
                        let y = o.get(rb, cb);
                        if y.is_zero() {
                            continue;
                        }
                        // Koszul sign: parity of the B-entry times the
                        // column parity of the A-slot it moves across.
                        let sign =
                            ((basis_parity(rb) ^ basis_parity(cb)) & basis_parity(ca)) == 1;
                        let r = ra * db + rb;
                        let c = ca * db + cb;
                        let v = x.mul(y);
                        m.a[r * dim + c] = if sign { v.neg() } else { v };
                    }
                }
            }
        }
        m
    }

    /// The graded flip P on V (x) V: P(v_i (x) v_j) = (-1)^{[v_i][v_j]} v_j (x) v_i.
    pub fn graded_flip(proto: &T) -> Self {
        let mut m = Self::zero(2, proto);
        for i in 0..2usize {
            for j in 0..2usize {
                let r = j * 2 + i;
                let c = i * 2 + j;
                let v = proto.one_like();
                m.a[r * 4 + c] = if i == 1 && j == 1 { v.neg() } else { v };
            }
        }
        m
    }

    /// The ungraded permutation flip (negative-control variant of P).
    pub fn plain_flip(proto: &T) -> Self {
        let mut m = Self::zero(2, proto);
        for i in 0..2usize {
            for j in 0..2usize {
                m.a[(j * 2 + i) * 4 + (i * 2 + j)] = proto.one_like();
            }
        }
        m
    }

    /// `X^T = P X P` on two legs.
    pub fn flip_element(&self) -> Self {
        assert_eq!(self.legs, 2);
        let p = Self::graded_flip(self.proto());
        p.mul(self).mul(&p)
    }

    /// Adjacent graded swap embedded at position (k, k+1) of n legs.
    fn adjacent_flip(n: usize, k: usize, proto: &T) -> Self {
        assert!(k >= 1 && k < n);
        let p = Self::graded_flip(proto);
        let mut m = Self::identity(0, proto);
        let mut pos = 1;
        while pos <= n {
            if pos == k {
                m = m.super_kron(&p);
                pos += 2;
            } else {
                m = m.super_kron(&Self::identity(1, proto));
                pos += 1;
            }
        }
        m
    }

    /// Place a two-leg operator on legs (i, j) of an n-leg space using
    /// graded-flip conjugations, e.g. X_13 = (1 (x) P)(X (x) 1)(1 (x) P).
    pub fn embed_on_legs(&self, legs: (usize, usize), n: usize) -> Result<Self> {
        assert_eq!(self.legs, 2);
        let (i, j) = legs;
        if !(1 <= i && i < j && j <= n) {
            return Err(Error::Config(alloc::format!(
                "embedding legs ({i},{j}) out of range for {n} legs"
            )));
        }
        let proto = self.proto();
        let mut y = self.clone();
        for _ in 2..n {
            y = y.super_kron(&Self::identity(1, proto));
        }
        // content sits at positions (1,2); move 2 -> j, then 1 -> i
        for k in 2..j {
            let p = Self::adjacent_flip(n, k, proto);
            y = p.mul(&y).mul(&p);
        }
        for k in 1..i {
            let p = Self::adjacent_flip(n, k, proto);
            y = p.mul(&y).mul(&p);
        }
        Ok(y)
    }

    /// Direct signed basis-action embedding (independent of the flip
    /// construction; used as its oracle).
    pub fn embed_direct(&self, legs: (usize, usize), n: usize) -> Result<Self> {
        assert_eq!(self.legs, 2);
        let (i, j) = legs;
        if !(1 <= i && i < j && j <= n) {
            return Err(Error::Config(alloc::format!(
                "embedding legs ({i},{j}) out of range for {n} legs"
            )));
        }
        let proto = self.proto();
        let mut m = Self::zero(n, proto);
        let dim = m.dim;
        // digits of a basis index: leg 1 most significant
        let bit = |b: usize, leg: usize| (b >> (n - leg)) & 1;
        for (idx, x) in self.a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let (r2, c2) = (idx / 4, idx % 4);
            let (ai, aj) = (r2 >> 1, r2 & 1); // row states at legs i, j
            let (bi, bj) = (c2 >> 1, c2 & 1); // column states
            // coefficient of the graded unit e_{ai,bi} (x) e_{aj,bj}
            let kron_sign = ((aj ^ bj) & bi) == 1;
            let coeff = if kron_sign { x.neg() } else { x.clone() };
            let pa = (ai ^ bi) as usize; // parity of the leg-i unit
            let pb = (aj ^ bj) as usize; // parity of the leg-j unit
            for col in 0..dim {
                if bit(col, i) != bi || bit(col, j) != bj {
                    continue;
                }
                let mut row = col;
                // set row bits at legs i and j
                row = (row & !(1 << (n - i))) | (ai << (n - i));
                row = (row & !(1 << (n - j))) | (aj << (n - j));
                // Koszul: each operator factor crosses the column states of
                // the legs before its slot
                let mut e = 0usize;
                for l in 1..i {
                    e += pa & bit(col, l);
                }
                for l in 1..j {
                    e += pb & bit(col, l);
                }
                let v = if e & 1 == 1 { coeff.neg() } else { coeff.clone() };
                let entry = &mut m.a[row * dim + col];
                *entry = entry.add(&v);
            }
        }
        Ok(m)
    }

    /// Split into (even, odd) parts by entry parity.
    pub fn parity_decompose(&self) -> (Self, Self) {
        let mut even = Self::zero(self.legs, self.proto());
        let mut odd = Self::zero(self.legs, self.proto());
        for r in 0..self.dim {
            for c in 0..self.dim {
                let x = self.get(r, c);
                if x.is_zero() {
                    continue;
                }
                if basis_parity(r) == basis_parity(c) {
                    even.set(r, c, x.clone());
                } else {
                    odd.set(r, c, x.clone());
                }
            }
        }
        (even, odd)
    }

    /// Super-commutator `[a,b] = ab - (-1)^{[a][b]} ba`, defined through the
    /// parity decomposition of both arguments.
    pub fn graded_commutator(&self, o: &Self) -> Self {
        let (ae, ao) = self.parity_decompose();
        let (be, bo) = o.parity_decompose();
        // even-even, even-odd, odd-even: commutator; odd-odd: anticommutator
        let mut acc = Self::zero(self.legs, self.proto());
        for (x, xo) in [(&ae, false), (&ao, true)] {
            for (y, yo) in [(&be, false), (&bo, true)] {
                let xy = x.mul(y);
                let yx = y.mul(x);
                let t = if xo && yo { xy.add(&yx) } else { xy.sub(&yx) };
                acc = acc.add(&t);
            }
        }
        acc
    }

    /// Gauss-Jordan inverse; pivots must be invertible scalars.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(self.legs, self.proto());
        for col in 0..d {
            // find a row >= col with invertible pivot
            let mut piv = None;
            for r in col..d {
                if let Ok(pi) = a.get(r, col).inv() {
                    piv = Some((r, pi));
                    break;
                }
            }
            let (r, pi) = piv.ok_or_else(|| {
                Error::NonInvertible(alloc::format!("no invertible pivot in column {col}"))
            })?;
            if r != col {
                for c in 0..d {
                    a.a.swap(r * d + c, col * d + c);
                    inv.a.swap(r * d + c, col * d + c);
                }
            }
            for c in 0..d {
                a.a[col * d + c] = a.a[col * d + c].mul(&pi);
                inv.a[col * d + c] = inv.a[col * d + c].mul(&pi);
            }
            for r2 in 0..d {
                if r2 == col || a.get(r2, col).is_zero() {
                    continue;
                }
                let f = a.get(r2, col).clone();
                for c in 0..d {
                    let t = f.mul(&a.a[col * d + c]);
                    a.a[r2 * d + c] = a.a[r2 * d + c].sub(&t);
                    let t = f.mul(&inv.a[col * d + c]);
                    inv.a[r2 * d + c] = inv.a[r2 * d + c].sub(&t);
                }
            }
        }
        Ok(inv)
    }

    /// Map every entry.
    pub fn map<U: Scalar>(&self, f: &mut dyn FnMut(&T) -> Result<U>) -> Result<SuperOp<U>> {
        let mut a = Vec::with_capacity(self.a.len());
        for x in &self.a {
            a.push(f(x)?);
        }
        Ok(SuperOp {
            legs: self.legs,
            dim: self.dim,
            a,
        })
    }

    /// First nonzero entry (row, col, value) for residual witnesses.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &T)> {
        for r in 0..self.dim {
            for c in 0..self.dim {
                let x = self.get(r, c);
                if !x.is_zero() {
                    return Some((r, c, x));
                }
            }
        }
        None
    }
}

impl<T: Scalar> fmt::Display for SuperOp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SuperOp[{} legs]", self.legs)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| alloc::format!("{}", self.get(r, c)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Debug for SuperOp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarSet;
    use crate::rat::rat_int;

    fn proto() -> RatFunc {
        RatFunc::one(&VarSet::new(&[("q", true)]))
    }

    fn e(i: usize, j: usize) -> SuperOp<RatFunc> {
        SuperOp::unit(i, j, &proto())
    }

    #[test]
    fn super_kron_koszul_rule() {
        // (e12 (x) e21)(e21 (x) e12) = -(e11 (x) e22): both factors odd
        let a = e(1, 2).super_kron(&e(2, 1));
        let b = e(2, 1).super_kron(&e(1, 2));
        let lhs = a.mul(&b);
        let rhs = e(1, 1).super_kron(&e(2, 2)).neg();
        assert_eq!(lhs, rhs);
        // identity case
        let id1 = SuperOp::identity(1, &proto());
        assert_eq!(id1.super_kron(&id1), SuperOp::identity(2, &proto()));
        // even*even, no sign
        let c = e(1, 1).super_kron(&e(2, 2));
        assert_eq!(c.mul(&c), c);
    }

    #[test]
    fn composition_rule_all_units() {
        // (A (x) B)(C (x) D) = (-1)^{[B][C]} (AC (x) BD) over all matrix units
        let units = [(1, 1), (1, 2), (2, 1), (2, 2)];
        for (a1, a2) in units {
            for (b1, b2) in units {
                for (c1, c2) in units {
                    for (d1, d2) in units {
                        let lhs = e(a1, a2).super_kron(&e(b1, b2)).mul(&e(c1, c2).super_kron(&e(d1, d2)));
                        let ac = e(a1, a2).mul(&e(c1, c2));
                        let bd = e(b1, b2).mul(&e(d1, d2));
                        let mut rhs = ac.super_kron(&bd);
                        let pb = (b1 + b2) % 2; // parity of e_{b1,b2}
                        let pc = (c1 + c2) % 2;
                        if pb == 1 && pc == 1 {
                            rhs = rhs.neg();
                        }
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn graded_flip_properties() {
        let p = SuperOp::graded_flip(&proto());
        // P^2 = 1
        assert_eq!(p.mul(&p), SuperOp::identity(2, &proto()));
        // P(v1 (x) v2) = v2 (x) v1 : column index 0b01 -> row 0b10, sign +
        assert!(!p.get(2, 1).is_zero());
        assert!(p.get(2, 1).is_one());
        // P(v2 (x) v2) = -(v2 (x) v2)
        let m1 = p.get(3, 3).clone();
        assert_eq!(m1, proto().neg());
        // P (a (x) b) P = (-1)^{[a][b]} b (x) a for all matrix units
        let units = [(1, 1), (1, 2), (2, 1), (2, 2)];
        for (a1, a2) in units {
            for (b1, b2) in units {
                let lhs = p.mul(&e(a1, a2).super_kron(&e(b1, b2))).mul(&p);
                let mut rhs = e(b1, b2).super_kron(&e(a1, a2));
                if (a1 + a2) % 2 == 1 && (b1 + b2) % 2 == 1 {
                    rhs = rhs.neg();
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn flip_element_cases() {
        // flip(e12 (x) e21) = -(e21 (x) e12)
        let x = e(1, 2).super_kron(&e(2, 1));
        assert_eq!(x.flip_element(), e(2, 1).super_kron(&e(1, 2)).neg());
        // involution on a random-ish mixed element
        let id = SuperOp::identity(2, &proto());
        assert_eq!(id.flip_element(), id);
        let y = x.add(&e(1, 1).super_kron(&e(2, 2)).scale(&RatFunc::int(x.proto().ctx(), 3)));
        assert_eq!(y.flip_element().flip_element(), y);
    }

    #[test]
    fn embeddings_match_direct_definition() {
        let units = [(1, 1), (1, 2), (2, 1), (2, 2)];
        for n in 2..=4usize {
            for i in 1..n {
                for j in (i + 1)..=n {
                    for (a1, a2) in units {
                        for (b1, b2) in units {
                            let x = e(a1, a2).super_kron(&e(b1, b2));
                            let via_flips = x.embed_on_legs((i, j), n).unwrap();
                            let direct = x.embed_direct((i, j), n).unwrap();
                            assert_eq!(via_flips, direct, "legs ({i},{j}) of {n}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn embed_simple_cases() {
        let x = e(1, 2).super_kron(&e(2, 1));
        // (1,2) of 3 is X (x) I
        let got = x.embed_on_legs((1, 2), 3).unwrap();
        let expect = x.super_kron(&SuperOp::identity(1, &proto()));
        assert_eq!(got, expect);
        // (1,3) of 3 equals (1 (x) P)(X (x) 1)(1 (x) P)
        let p = SuperOp::graded_flip(&proto());
        let onep = SuperOp::identity(1, &proto()).super_kron(&p);
        let expect = onep.mul(&x.super_kron(&SuperOp::identity(1, &proto()))).mul(&onep);
        assert_eq!(x.embed_on_legs((1, 3), 3).unwrap(), expect);
        // identity embeds to identity
        let id2 = SuperOp::identity(2, &proto());
        assert_eq!(
            id2.embed_on_legs((2, 3), 3).unwrap(),
            SuperOp::identity(3, &proto())
        );
        assert!(id2.embed_on_legs((2, 2), 3).is_err());
    }

    #[test]
    fn commutators() {
        // [e12, e21] = e11 + e22 (anticommutator of odd units)
        let got = e(1, 2).graded_commutator(&e(2, 1));
        assert_eq!(got, e(1, 1).add(&e(2, 2)));
        // [X, X] = 0 for odd X = e12
        assert!(e(1, 2).graded_commutator(&e(1, 2)).is_zero());
        // [e11, e22] = 0
        assert!(e(1, 1).graded_commutator(&e(2, 2)).is_zero());
    }

    #[test]
    fn gauss_inverse() {
        let two = RatFunc::constant(proto().ctx(), rat_int(2));
        let m = e(1, 1)
            .scale(&two)
            .add(&e(2, 2))
            .super_kron(&SuperOp::identity(1, &proto()))
            .add(&e(1, 2).super_kron(&e(2, 1)));
        let mi = m.inverse().unwrap();
        assert_eq!(m.mul(&mi), SuperOp::identity(2, &proto()));
        assert_eq!(mi.mul(&m), SuperOp::identity(2, &proto()));
    }
}
