use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::field::{Elem, Embedding, Field};

/// Dense univariate polynomial over a [`Field`], constant term first.
///
/// Stored without trailing zeros; the zero polynomial has no coefficients and
/// `degree() == None`.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly[{:?}]({})", self.field, self.render("x"))
    }
}

impl UniPoly {
    pub fn new(field: &Field, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { field: field.clone(), coeffs }
    }

    pub fn zero(field: &Field) -> Self {
        UniPoly::new(field, Vec::new())
    }

    pub fn one(field: &Field) -> Self {
        UniPoly::constant(field, Elem::ONE)
    }

    pub fn constant(field: &Field, c: Elem) -> Self {
        UniPoly::new(field, vec![c])
    }

    /// The variable itself.
    pub fn x(field: &Field) -> Self {
        UniPoly::monomial(field, Elem::ONE, 1)
    }

    pub fn monomial(field: &Field, c: Elem, e: usize) -> Self {
        let mut v = vec![Elem::ZERO; e + 1];
        v[e] = c;
        UniPoly::new(field, v)
    }

    /// Builds from small integer coefficients (reduced mod p), constant first.
    pub fn from_ints(field: &Field, ints: &[i64]) -> Self {
        UniPoly::new(field, ints.iter().map(|&n| field.from_int(n)).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Elem> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [Elem::ONE]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; for loops that only care
    /// about positive degrees.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> Elem {
        self.coeffs.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == Elem::ONE
    }

    pub fn monic(&self) -> UniPoly {
        match self.field.inv(self.lc()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    pub fn scale(&self, c: Elem) -> UniPoly {
        let f = &self.field;
        UniPoly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        self.coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> UniPoly {
        let f = &self.field;
        UniPoly::new(f, self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| f.mul(f.from_int(i as i64), c)).collect())
    }

    pub fn shift_mul(&self, e: usize) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![Elem::ZERO; e];
        v.extend_from_slice(&self.coeffs);
        UniPoly::new(&self.field, v)
    }

    /// Keeps the terms of degree `< n`.
    pub fn truncate(&self, n: usize) -> UniPoly {
        UniPoly::new(&self.field, self.coeffs.iter().take(n).copied().collect())
    }

    pub fn pow(&self, mut e: u64) -> UniPoly {
        let mut base = self.clone();
        let mut acc = UniPoly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let f = &self.field;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (UniPoly::zero(f), self.clone());
        }
        let lc_inv = f.inv(d.lc()).unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![Elem::ZERO; r.len() - dd];
        for top in (dd..r.len()).rev() {
            let c = f.mul(r[top], lc_inv);
            if c.is_zero() {
                continue;
            }
            q[top - dd] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                let idx = top - dd + i;
                r[idx] = f.sub(r[idx], f.mul(c, di));
            }
        }
        r.truncate(dd);
        (UniPoly::new(f, q), UniPoly::new(f, r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.divrem(d).1
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn exact_div(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (UniPoly::one(f), UniPoly::zero(f));
        let (mut t0, mut t1) = (UniPoly::zero(f), UniPoly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        match f.inv(r0.lc()) {
            Some(inv) => (r0.scale(inv), s0.scale(inv), t0.scale(inv)),
            None => (r0, s0, t0),
        }
    }

    pub fn mulmod(&self, other: &UniPoly, m: &UniPoly) -> UniPoly {
        (self * other).rem(m)
    }

    /// `self^e mod m` by square-and-multiply.
    pub fn powmod(&self, mut e: u128, m: &UniPoly) -> UniPoly {
        let mut base = self.rem(m);
        let mut acc = UniPoly::one(&self.field).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&base, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mulmod(&base, m);
            }
        }
        acc
    }

    /// `self(g(x))`.
    pub fn compose(&self, g: &UniPoly) -> UniPoly {
        let f = &self.field;
        self.coeffs.iter().rev().fold(UniPoly::zero(f), |acc, &c| &(&acc * g) + &UniPoly::constant(f, c))
    }

    /// Applies `c -> c^p` to every coefficient.
    pub fn frobenius_coeffs(&self, power: u64) -> UniPoly {
        let f = &self.field;
        UniPoly::new(f, self.coeffs.iter().map(|&c| f.pow(c, power)).collect())
    }

    /// Pushes coefficients through an embedding.
    pub fn embed(&self, e: &Embedding) -> UniPoly {
        assert_eq!(&self.field, e.source(), "embedding source mismatch");
        UniPoly::new(e.target(), self.coeffs.iter().map(|&c| e.apply(c)).collect())
    }

    /// Pulls coefficients back through an embedding, if they all lie in its image.
    pub fn pull_back(&self, e: &Embedding) -> Option<UniPoly> {
        let coeffs = self.coeffs.iter().map(|&c| e.preimage(c)).collect::<Option<Vec<_>>>()?;
        Some(UniPoly::new(e.source(), coeffs))
    }

    /// Returns `g` with `g^p = self`, when one exists.
    pub fn pth_root(&self) -> Option<UniPoly> {
        let f = &self.field;
        let p = f.characteristic() as usize;
        if self.coeffs.iter().enumerate().any(|(i, c)| i % p != 0 && !c.is_zero()) {
            return None;
        }
        Some(UniPoly::new(f, self.coeffs.iter().step_by(p).map(|&c| f.pth_root(c)).collect()))
    }

    /// Canonical total order: by degree, then coefficients from the constant
    /// term upward in canonical element order.
    pub fn cmp_canonical(&self, other: &UniPoly) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| self.coeffs.cmp(&other.coeffs))
    }

    /// Text form in the given variable, highest degree first.
    pub fn render(&self, var: &str) -> String {
        let terms: Vec<(Elem, Vec<(&str, usize)>)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (c, vec![(var, i)]))
            .collect();
        super::text::render_terms(&self.field, &terms)
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new(f, (0..n).map(|i| f.add(self.coeff(i), rhs.coeff(i))).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let f = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new(f, (0..n).map(|i| f.sub(self.coeff(i), rhs.coeff(i))).collect())
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        let f = &self.field;
        UniPoly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        let f = &self.field;
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(f);
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        UniPoly::new(f, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let f2 = gf(2, 1);
        let f = UniPoly::from_ints(&f2, &[0, 1, 0, 1]);
        assert_eq!(f.derivative(), UniPoly::from_ints(&f2, &[1, 0, 1]));
        let f5 = gf(5, 1);
        assert!(UniPoly::monomial(&f5, Elem::ONE, 5).derivative().is_zero());
    }

    #[test]
    fn pth_root_examples() {
        let f2 = gf(2, 1);
        let x2 = UniPoly::monomial(&f2, Elem::ONE, 2);
        assert_eq!(x2.pth_root(), Some(UniPoly::x(&f2)));
        assert_eq!(UniPoly::monomial(&f2, Elem::ONE, 3).pth_root(), None);
        let f9 = gf(3, 2);
        let t = Elem(3);
        let f = UniPoly::monomial(&f9, t, 3);
        let g = f.pth_root().unwrap();
        assert_eq!(g, UniPoly::monomial(&f9, f9.pow(t, 3), 1));
        assert_eq!(g.pow(3), f);
    }

    #[test]
    fn ext_gcd_bezout() {
        let f7 = gf(7, 1);
        let a = UniPoly::from_ints(&f7, &[1, 2, 3, 1]);
        let b = UniPoly::from_ints(&f7, &[3, 0, 1]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
        assert!(g.is_monic());
    }

    fn arb_poly(field: Field, max_deg: usize) -> impl Strategy<Value = UniPoly> {
        let q = field.order();
        prop::collection::vec(0..q, 0..=max_deg + 1)
            .prop_map(move |v| UniPoly::new(&field, v.into_iter().map(Elem).collect()))
    }

    proptest! {
        #[test]
        fn leibniz_and_linearity(a in arb_poly(gf(3, 2), 8), b in arb_poly(gf(3, 2), 8)) {
            let prod = &a * &b;
            prop_assert_eq!(
                prod.derivative(),
                &(&a.derivative() * &b) + &(&a * &b.derivative())
            );
            prop_assert_eq!((&a + &b).derivative(), &a.derivative() + &b.derivative());
        }

        #[test]
        fn divrem_identity(a in arb_poly(gf(5, 1), 10), b in arb_poly(gf(5, 1), 5)) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.divrem(&b);
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree() < b.degree());
        }

        #[test]
        fn pth_root_law(a in arb_poly(gf(2, 3), 12)) {
            match a.pth_root() {
                Some(g) => prop_assert_eq!(g.pow(2), a),
                None => prop_assert!(a.coeffs().iter().enumerate().any(|(i, c)| i % 2 == 1 && !c.is_zero())),
            }
        }
    }
}
