//! Finite fields `F_{p^k}` in a canonical polynomial-basis model, and the
//! canonical embeddings between them.
//!
//! An element is identified by its index `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! where `c_0 + c_1 t + ... + c_{k-1} t^{k-1}` is its polynomial-basis
//! representative. Index order is the canonical element order: `F_4` enumerates
//! as `0, 1, t, t+1`. Multiplication goes through exp/log tables built once per
//! field; fields are cached, so constructing `F_{p^k}` twice returns the same
//! context.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Default upper bound on the number of elements of a constructible field.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 20;

static FIELD_CAP: AtomicU64 = AtomicU64::new(DEFAULT_FIELD_CAP);

/// Current cap on field order.
pub fn field_cap() -> u64 {
    FIELD_CAP.load(Ordering::Relaxed)
}

/// Change the process-wide cap on field order. Fields already built stay cached.
pub fn set_field_cap(cap: u64) {
    FIELD_CAP.store(cap.max(2), Ordering::Relaxed);
}

/// Index of an element of some [`Field`] in canonical order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Immutable description and arithmetic tables of one finite field.
pub struct FieldCtx {
    p: u32,
    k: u32,
    order: u32,
    /// Monic modulus over `F_p`, low degree first (length `k + 1`).
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for `0 <= i < 2(q-1)`.
    exp: Vec<u32>,
    /// `log[g^i] = i`; `log[0]` is unused.
    log: Vec<u32>,
    /// Zech logarithms `zech[i] = log(1 + g^i)`, `u32::MAX` when `1 + g^i = 0`.
    /// Only populated for odd `p` with `k > 1`.
    zech: Vec<u32>,
    generator: u32,
}

/// Shared handle to a canonical finite field.
#[derive(Clone)]
pub struct Field(Arc<FieldCtx>);

impl Deref for Field {
    type Target = FieldCtx;
    fn deref(&self) -> &FieldCtx {
        &self.0
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

fn cache() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Writes `n = p^k` with `p` prime, if possible.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = prime_factors(n)[0];
    let mut m = n;
    let mut k = 0;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

impl Field {
    /// The canonical field `F_{p^k}`.
    pub fn new(p: u64, k: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroDegree);
        }
        let cap = field_cap();
        let order = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if order > cap as u128 || order > u32::MAX as u128 {
            return Err(Error::FieldTooLarge { p, k, cap });
        }
        let key = (p as u32, k);
        if let Some(f) = cache().lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        // Built outside the lock; a racing duplicate is identical and discarded.
        let built = Field(Arc::new(FieldCtx::build(p as u32, k)));
        let mut guard = cache().lock().unwrap();
        Ok(guard.entry(key).or_insert(built).clone())
    }

    /// The field of order `q`, which must be a prime power.
    pub fn with_order(q: u64) -> Result<Field> {
        match prime_power(q) {
            Some((p, k)) => Field::new(p, k),
            None => Err(Error::InvalidInput(format!("{q} is not a prime power"))),
        }
    }

    /// Parses a field spec `"a^b"` (field of order `a^b`, `a` a prime power)
    /// or a bare order `"q"`.
    pub fn from_spec(spec: &str) -> Result<Field> {
        let s = spec.trim();
        let parse_num = |txt: &str, offset: usize| -> Result<u64> {
            txt.trim().parse::<u64>().map_err(|_| Error::parse(offset, format!("expected an integer, found {txt:?}")))
        };
        let (base, exp) = match s.split_once('^') {
            Some((a, b)) => (parse_num(a, 0)?, parse_num(b, a.len() + 1)? as u32),
            None => (parse_num(s, 0)?, 1),
        };
        let (p, k) =
            prime_power(base).ok_or_else(|| Error::InvalidInput(format!("field base {base} is not a prime power")))?;
        if exp == 0 {
            return Err(Error::ZeroDegree);
        }
        Field::new(p, k * exp)
    }

    /// The prime subfield `F_p`.
    pub fn prime_field(&self) -> Field {
        Field::new(self.p as u64, 1).expect("prime field is always constructible")
    }

    /// The canonical field of degree `m` over this one.
    pub fn extension(&self, m: u32) -> Result<Field> {
        if m == 0 {
            return Err(Error::ZeroDegree);
        }
        Field::new(self.p as u64, self.k * m)
    }

    pub fn ptr_eq(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl FieldCtx {
    fn build(p: u32, k: u32) -> FieldCtx {
        let order = p.pow(k);
        let modulus = if k == 1 { vec![0, 1] } else { canonical_modulus(p, k) };
        let mut ctx =
            FieldCtx { p, k, order, modulus, exp: Vec::new(), log: Vec::new(), zech: Vec::new(), generator: 0 };
        ctx.build_tables();
        ctx
    }

    fn build_tables(&mut self) {
        let q = self.order as u64;
        let n = q - 1;
        if n == 1 {
            // F_2
            self.generator = 1;
            self.exp = vec![1, 1];
            self.log = vec![0, 0];
            return;
        }
        let factors = prime_factors(n);
        let generator = (1..self.order)
            .find(|&g| factors.iter().all(|&r| self.pow_slow(g, n / r) != 1))
            .expect("multiplicative group is cyclic");
        self.generator = generator;

        // g * t^j for each basis vector, so x * g is a digit-weighted sum.
        let gt: Vec<u32> = {
            let mut v = Vec::with_capacity(self.k as usize);
            let mut cur = generator;
            for _ in 0..self.k {
                v.push(cur);
                cur = self.mul_slow(cur, self.t_index());
            }
            v
        };
        let nn = n as usize;
        let mut exp = vec![0u32; 2 * nn];
        let mut log = vec![0u32; self.order as usize];
        let mut cur = 1u32;
        for (i, slot) in exp.iter_mut().take(nn).enumerate() {
            *slot = cur;
            log[cur as usize] = i as u32;
            cur = self.mul_by_table(cur, &gt);
        }
        debug_assert_eq!(cur, 1);
        for i in 0..nn {
            exp[nn + i] = exp[i];
        }
        self.exp = exp;
        self.log = log;

        if self.p != 2 && self.k > 1 {
            let p = self.p;
            self.zech = (0..nn)
                .map(|i| {
                    let v = self.exp[i];
                    let d0 = v % p;
                    let w = v - d0 + (d0 + 1) % p;
                    if w == 0 {
                        u32::MAX
                    } else {
                        self.log[w as usize]
                    }
                })
                .collect();
        }
    }

    fn t_index(&self) -> u32 {
        if self.k == 1 {
            // t reduces to 0 modulo the modulus t; unused for prime fields
            0
        } else {
            self.p
        }
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = vec![0u32; self.k as usize];
        for slot in d.iter_mut() {
            *slot = a % self.p;
            a /= self.p;
        }
        d
    }

    fn pack(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.pack(&s)
    }

    fn scale_slow(&self, a: u32, c: u32) -> u32 {
        let d: Vec<u32> = self.digits(a).iter().map(|&x| ((x as u64 * c as u64) % self.p as u64) as u32).collect();
        self.pack(&d)
    }

    fn mul_by_table(&self, x: u32, gt: &[u32]) -> u32 {
        if self.k == 1 {
            return ((x as u64 * gt[0] as u64) % self.p as u64) as u32;
        }
        let mut acc = 0u32;
        for (j, c) in self.digits(x).into_iter().enumerate() {
            if c == 0 {
                continue;
            }
            acc = if self.p == 2 { acc ^ gt[j] } else { self.add_slow(acc, self.scale_slow(gt[j], c)) };
        }
        acc
    }

    /// Schoolbook polynomial-basis product, used only while building tables.
    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let k = self.k as usize;
        if k == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for top in (k..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                let idx = top - k + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let d: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
        self.pack(&d)
    }

    fn pow_slow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    /// Characteristic `p`.
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Degree `k` over the prime field.
    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Number of elements `q = p^k`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficients of the defining modulus over `F_p`, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The least primitive element in canonical order.
    pub fn generator(&self) -> Elem {
        Elem(self.generator)
    }

    /// All elements in canonical order, starting with zero.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(Elem)
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.p as i64) as u32)
    }

    /// Element with the given polynomial-basis coefficients (constant first).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        if coeffs.len() > self.k as usize {
            return Err(Error::InvalidInput(format!(
                "{} coefficients given for a degree-{} field",
                coeffs.len(),
                self.k
            )));
        }
        let mut d = vec![0u32; self.k as usize];
        for (slot, &c) in d.iter_mut().zip(coeffs) {
            *slot = c % self.p;
        }
        Ok(Elem(self.pack(&d)))
    }

    /// Polynomial-basis coefficients of `a`, constant first, length `k`.
    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        self.digits(a.0)
    }

    /// True when `a` lies in the prime subfield.
    pub fn in_prime_field(&self, a: Elem) -> bool {
        a.0 < self.p
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if self.k == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= self.p { s - self.p } else { s });
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let n = self.order - 1;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let diff = if lb >= la { lb - la } else { lb + n - la };
        let z = self.zech[diff as usize];
        if z == u32::MAX {
            Elem::ZERO
        } else {
            Elem(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        if self.k == 1 {
            return Elem(self.p - a.0);
        }
        let half = (self.order - 1) / 2;
        Elem(self.exp[(self.log[a.0 as usize] + half) as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        Elem(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.0 == 0 {
            return None;
        }
        let n = self.order - 1;
        let l = self.log[a.0 as usize];
        Some(Elem(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let n = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Elem(self.exp[((l * (e % n)) % n) as usize])
    }

    /// Signed exponent power; negative exponents need a nonzero base.
    pub fn pow_signed(&self, a: Elem, e: i64) -> Option<Elem> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.inv(a).map(|ai| self.pow(ai, e.unsigned_abs()))
        }
    }

    /// Absolute Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.p as u64)
    }

    /// Inverse Frobenius `a -> a^{1/p} = a^{p^{k-1}}`.
    pub fn pth_root(&self, a: Elem) -> Elem {
        self.pow(a, (self.p as u64).pow(self.k - 1))
    }

    /// Discrete logarithm to the canonical generator; `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u32> {
        (a.0 != 0).then(|| self.log[a.0 as usize])
    }

    /// Renders `a` as a polynomial in `t`, highest power first (`"t^2+2*t+1"`).
    pub fn render(&self, a: Elem) -> String {
        let d = self.digits(a.0);
        let mut parts = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

/// Checked element carrying its field, for callers that want mismatches
/// reported rather than assumed away.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElem {
    pub field: Field,
    pub value: Elem,
}

/// Operation selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    /// Inverse of the first operand; the second is ignored.
    Inv,
    /// First operand raised to the index of the second read as an integer.
    Pow(u64),
}

impl FieldElem {
    pub fn new(field: &Field, value: Elem) -> Self {
        FieldElem { field: field.clone(), value }
    }

    fn same_field(&self, other: &FieldElem) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()))
        }
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(FieldElem::new(&self.field, self.field.add(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(FieldElem::new(&self.field, self.field.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<FieldElem> {
        let v = self.field.inv(self.value).ok_or(Error::DivisionByZero)?;
        Ok(FieldElem::new(&self.field, v))
    }

    pub fn pow(&self, e: u64) -> FieldElem {
        FieldElem::new(&self.field, self.field.pow(self.value, e))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.render(self.value))
    }
}

/// Single entry point for checked field arithmetic.
pub fn field_arith(a: &FieldElem, b: &FieldElem, op: ArithOp) -> Result<FieldElem> {
    a.same_field(b)?;
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Inv => a.inv(),
        ArithOp::Pow(e) => Ok(a.pow(e)),
    }
}

/// Canonical injective homomorphism `F_{p^k} -> F_{p^{km}}`.
pub struct Embedding {
    src: Field,
    dst: Field,
    generator_image: Elem,
    table: Vec<Elem>,
    preimage: HashMap<Elem, Elem>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({:?} -> {:?}, t -> {})", self.src, self.dst, self.dst.render(self.generator_image))
    }
}

type EmbeddingCache = Mutex<HashMap<((u32, u32), (u32, u32)), Arc<Embedding>>>;

fn embedding_cache() -> &'static EmbeddingCache {
    static CACHE: OnceLock<EmbeddingCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Embedding {
    /// The canonical embedding: the generator `t` of `src` maps to the least
    /// root of the source modulus in `dst`.
    pub fn new(src: &Field, dst: &Field) -> Result<Arc<Embedding>> {
        if src.p != dst.p || !dst.k.is_multiple_of(src.k) {
            return Err(Error::IncompatibleFields { src: src.to_string(), dst: dst.to_string() });
        }
        let key = ((src.p, src.k), (dst.p, dst.k));
        if let Some(e) = embedding_cache().lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let generator_image = if src.k == 1 {
            Elem::ZERO
        } else {
            dst.elements()
                .find(|&z| {
                    let v = src.modulus.iter().rev().fold(Elem::ZERO, |acc, &c| dst.add(dst.mul(acc, z), Elem(c)));
                    v.is_zero()
                })
                .expect("a finite field contains every root of its subfield moduli")
        };
        let mut powers = Vec::with_capacity(src.k as usize);
        let mut cur = Elem::ONE;
        for _ in 0..src.k {
            powers.push(cur);
            cur = dst.mul(cur, generator_image);
        }
        let table: Vec<Elem> = src
            .elements()
            .map(|a| {
                src.coeffs(a).iter().zip(&powers).fold(Elem::ZERO, |acc, (&c, &pw)| dst.add(acc, dst.mul(Elem(c), pw)))
            })
            .collect();
        let preimage = table.iter().enumerate().map(|(i, &img)| (img, Elem(i as u32))).collect();
        let emb = Arc::new(Embedding { src: src.clone(), dst: dst.clone(), generator_image, table, preimage });
        let mut guard = embedding_cache().lock().unwrap();
        Ok(guard.entry(key).or_insert(emb).clone())
    }

    pub fn source(&self) -> &Field {
        &self.src
    }

    pub fn target(&self) -> &Field {
        &self.dst
    }

    /// Image of the source generator `t`.
    pub fn generator_image(&self) -> Elem {
        self.generator_image
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        self.table[a.0 as usize]
    }

    /// Inverse image of `b`, if `b` lies in the embedded subfield.
    pub fn preimage(&self, b: Elem) -> Option<Elem> {
        self.preimage.get(&b).copied()
    }
}

/// Canonical embedding of `src` into `dst`.
pub fn embed(src: &Field, dst: &Field) -> Result<Arc<Embedding>> {
    Embedding::new(src, dst)
}

// --- modulus search: dense polynomials over F_p as Vec<u32>, low degree first ---

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn rem_p(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lc_inv = inv_mod(m[dm], p) as u64;
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] as u64 * lc_inv % p as u64;
        for (i, &mi) in m.iter().enumerate() {
            let idx = top - dm + i;
            r[idx] = ((r[idx] as u64 + (p as u64 - c) * mi as u64) % p as u64) as u32;
        }
        trim(&mut r);
    }
    r
}

fn mulmod_p(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
    rem_p(&prod, m, p)
}

fn gcd_p(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem_p(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test for a monic polynomial over `F_p`.
fn is_irreducible_p(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 1..=n / 2 {
        // xp <- xp^p mod f
        let mut acc = vec![1u32];
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod_p(&acc, &base, f, p);
            }
            base = mulmod_p(&base, &base, f, p);
            e >>= 1;
        }
        xp = acc;
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        let g = gcd_p(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Lexicographically least monic irreducible of degree `k`, comparing
/// coefficients from the constant term upward.
fn canonical_modulus(p: u32, k: u32) -> Vec<u32> {
    let total = (p as u64).pow(k);
    for n in 0..total {
        // constant coefficient is the most significant digit of n
        let mut f = vec![0u32; k as usize + 1];
        let mut m = n;
        for i in (0..k as usize).rev() {
            f[i] = (m % p as u64) as u32;
            m /= p as u64;
        }
        f[k as usize] = 1;
        if f[0] == 0 {
            continue;
        }
        if is_irreducible_p(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    /// All fields of order at most `bound`.
    fn small_fields(bound: u64) -> Vec<Field> {
        let mut out = Vec::new();
        for p in [2u64, 3, 5, 7, 11, 13] {
            let mut k = 1;
            while p.pow(k) <= bound {
                out.push(gf(p, k));
                k += 1;
            }
        }
        out
    }

    #[test]
    fn construct_examples() {
        let f2 = gf(2, 1);
        assert_eq!(f2.modulus(), &[0, 1]);
        assert_eq!(f2.order(), 2);
        let f4 = gf(2, 2);
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(Field::new(2, 0).unwrap_err(), Error::ZeroDegree);
        assert!(matches!(Field::new(2, 21).unwrap_err(), Error::FieldTooLarge { .. }));
    }

    #[test]
    fn modulus_matches_brute_force_scan() {
        // independent scan: an irreducible of degree k has no factor of degree <= k/2,
        // checked by trial division against every monic polynomial of that degree
        fn divides(d: &[u32], f: &[u32], p: u32) -> bool {
            rem_p(f, d, p).is_empty()
        }
        for (p, k) in [(2u32, 2u32), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)] {
            let total = p.pow(k);
            let mut expected = None;
            'outer: for n in 0..total {
                let mut f = vec![0u32; k as usize + 1];
                let mut m = n;
                for i in (0..k as usize).rev() {
                    f[i] = m % p;
                    m /= p;
                }
                f[k as usize] = 1;
                for dd in 1..=k / 2 {
                    for c in 0..p.pow(dd) {
                        let mut d = vec![0u32; dd as usize + 1];
                        let mut m = c;
                        for slot in d.iter_mut().take(dd as usize) {
                            *slot = m % p;
                            m /= p;
                        }
                        d[dd as usize] = 1;
                        if divides(&d, &f, p) {
                            continue 'outer;
                        }
                    }
                }
                expected = Some(f);
                break;
            }
            assert_eq!(gf(p as u64, k).modulus(), expected.unwrap().as_slice());
        }
    }

    #[test]
    fn construction_is_idempotent() {
        let a = gf(3, 4);
        let b = gf(3, 4);
        assert!(a.ptr_eq(&b));
        assert_eq!(a.modulus(), b.modulus());
    }

    #[test]
    fn arithmetic_examples() {
        let f4 = gf(2, 2);
        let t = Elem(2);
        assert_eq!(f4.render(t), "t");
        assert_eq!(f4.mul(t, t), Elem(3));
        assert_eq!(f4.render(Elem(3)), "t+1");
        assert_eq!(f4.pow(t, 2), Elem(3));
        let f5 = gf(5, 1);
        assert_eq!(f5.inv(Elem(2)), Some(Elem(3)));
        assert_eq!(f5.inv(Elem(0)), None);
    }

    #[test]
    fn checked_arith_reports_mismatch_and_zero_inverse() {
        let a = FieldElem::new(&gf(2, 2), Elem(1));
        let b = FieldElem::new(&gf(2, 3), Elem(1));
        assert!(matches!(field_arith(&a, &b, ArithOp::Add), Err(Error::FieldMismatch(_, _))));
        let z = FieldElem::new(&gf(5, 1), Elem(0));
        assert_eq!(field_arith(&z, &z, ArithOp::Inv), Err(Error::DivisionByZero));
        let two = FieldElem::new(&gf(5, 1), Elem(2));
        assert_eq!(field_arith(&two, &two, ArithOp::Inv).unwrap().value, Elem(3));
    }

    #[test]
    fn table_arithmetic_matches_schoolbook() {
        for f in small_fields(256) {
            for a in f.elements() {
                for b in f.elements().step_by(((f.order() / 17) as usize).max(1)) {
                    assert_eq!(f.mul(a, b).0, f.mul_slow(a.0, b.0), "{f:?}");
                    assert_eq!(f.add(a, b).0, f.add_slow(a.0, b.0), "{f:?}");
                }
            }
        }
    }

    #[test]
    fn field_axioms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in [gf(2, 4), gf(3, 3), gf(5, 2), gf(7, 1), gf(2, 10), gf(3, 7)] {
            let q = f.order();
            for _ in 0..1000 {
                let a = Elem(rng.gen_range(0..q));
                let b = Elem(rng.gen_range(0..q));
                let c = Elem(rng.gen_range(0..q));
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
                }
            }
        }
    }

    #[test]
    fn frobenius_is_additive_exhaustive() {
        for f in small_fields(64) {
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                }
                assert_eq!(f.frobenius(f.pth_root(a)), a);
            }
        }
    }

    #[test]
    fn enumeration_properties() {
        assert_eq!(gf(2, 1).elements().collect::<Vec<_>>(), vec![Elem(0), Elem(1)]);
        let f4 = gf(2, 2);
        let rendered: Vec<String> = f4.elements().map(|a| f4.render(a)).collect();
        assert_eq!(rendered, ["0", "1", "t", "t+1"]);
        for f in small_fields(64) {
            let all: Vec<Elem> = f.elements().collect();
            let set: std::collections::HashSet<_> = all.iter().collect();
            assert_eq!(set.len(), f.order() as usize);
            assert_eq!(all[0], Elem::ZERO);
            if f.order() > 2 {
                let sum = all.iter().fold(Elem::ZERO, |acc, &a| f.add(acc, a));
                assert_eq!(sum, Elem::ZERO);
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let f2 = gf(2, 1);
        let f4 = gf(2, 2);
        let f16 = gf(2, 4);
        let e = embed(&f2, &f4).unwrap();
        assert_eq!(e.apply(Elem::ONE), Elem::ONE);
        let id = embed(&f4, &f4).unwrap();
        for a in f4.elements() {
            assert_eq!(id.apply(a), a);
        }
        // least root of t^2+t+1 in F_16 by scanning
        let least = f16.elements().find(|&z| f16.add(f16.add(f16.mul(z, z), z), Elem::ONE).is_zero()).unwrap();
        assert_eq!(embed(&f4, &f16).unwrap().generator_image(), least);
        assert!(embed(&f4, &gf(2, 3)).is_err());
        assert!(embed(&f4, &gf(3, 2)).is_err());
    }

    #[test]
    fn embedding_invariants_exhaustive() {
        for src in small_fields(64) {
            for m in 1..=3u32 {
                let Ok(dst) = src.extension(m) else { continue };
                if dst.order() as u64 > 1 << 12 {
                    continue;
                }
                let e = embed(&src, &dst).unwrap();
                let mut seen = std::collections::HashSet::new();
                for a in src.elements() {
                    assert!(seen.insert(e.apply(a)), "not injective");
                    assert_eq!(dst.frobenius(e.apply(a)), e.apply(src.frobenius(a)));
                    for b in src.elements() {
                        assert_eq!(e.apply(src.add(a, b)), dst.add(e.apply(a), e.apply(b)));
                        assert_eq!(e.apply(src.mul(a, b)), dst.mul(e.apply(a), e.apply(b)));
                    }
                    assert_eq!(e.preimage(e.apply(a)), Some(a));
                }
                assert_eq!(e.apply(Elem::ONE), Elem::ONE);
            }
        }
    }

    #[test]
    fn embedding_composition_within_small_towers() {
        for (p, k, a, b) in [(2u64, 1u32, 2u32, 3u32), (2, 1, 2, 2), (3, 1, 2, 2), (2, 2, 2, 2), (3, 2, 2, 2)] {
            let base = gf(p, k);
            let mid = base.extension(a).unwrap();
            let top = base.extension(a * b).unwrap();
            let e1 = embed(&base, &mid).unwrap();
            let e2 = embed(&mid, &top).unwrap();
            let direct = embed(&base, &top).unwrap();
            let composed_agrees = base.elements().all(|x| e2.apply(e1.apply(x)) == direct.apply(x));
            if k == 1 {
                assert!(composed_agrees);
            }
            // every composite is still a homomorphism onto the same subfield
            for x in base.elements() {
                assert!(direct.preimage(e2.apply(e1.apply(x))).is_some());
            }
        }
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(Field::from_spec("2^4").unwrap(), gf(2, 4));
        assert_eq!(Field::from_spec("4^1").unwrap(), gf(2, 2));
        assert_eq!(Field::from_spec("9").unwrap(), gf(3, 2));
        assert!(Field::from_spec("6^1").is_err());
        assert!(matches!(Field::from_spec("x^2"), Err(Error::Parse { .. })));
    }
}
