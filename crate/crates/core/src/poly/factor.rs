//! Univariate factorization over finite fields: squarefree decomposition,
//! distinct-degree splitting, then Cantor–Zassenhaus equal-degree splitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::uni::UniPoly;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5eed_cafe;

/// Fields up to this order count roots by direct evaluation.
pub const DEFAULT_ROOT_SCAN_THRESHOLD: u32 = 1 << 12;

/// `h = unit * prod f_i^{m_i}` with each `f_i` monic irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniFactorization {
    pub unit: Elem,
    pub factors: Vec<(UniPoly, u32)>,
}

impl UniFactorization {
    /// Multiplies the factorization back out.
    pub fn product(&self, field: &Field) -> UniPoly {
        self.factors.iter().fold(UniPoly::constant(field, self.unit), |acc, (f, m)| &acc * &f.pow(*m as u64))
    }
}

/// `Some(g)` with `g^p = f`, or `None` if `f` has a term whose exponent is
/// not divisible by `p`.
pub fn pth_power_test(f: &UniPoly) -> Option<UniPoly> {
    f.pth_root()
}

/// Squarefree decomposition of a monic polynomial: pairs `(s, m)` with the
/// `s` pairwise coprime, squarefree, and `f = prod s^m`.
pub fn squarefree_decomposition(f: &UniPoly) -> Vec<(UniPoly, u32)> {
    let field = f.field();
    let p = field.characteristic();
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let f = f.monic();
    let mut c = f.gcd(&f.derivative());
    let mut w = f.exact_div(&c).unwrap();
    let mut i = 1u32;
    while !w.is_constant() {
        let y = w.gcd(&c);
        let fac = w.exact_div(&y).unwrap();
        if !fac.is_constant() {
            out.push((fac, i));
        }
        c = c.exact_div(&y).unwrap();
        w = y;
        i += 1;
    }
    if !c.is_constant() {
        let root = c.pth_root().expect("leftover of squarefree loop is a p-th power");
        for (g, m) in squarefree_decomposition(&root) {
            out.push((g, m * p));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial: pairs
/// `(g, d)` with `g` the product of all irreducible factors of degree `d`.
pub fn distinct_degree(f: &UniPoly) -> Vec<(UniPoly, usize)> {
    let field = f.field();
    let q = field.order() as u128;
    let x = UniPoly::x(field);
    let mut rest = f.monic();
    let mut h = x.rem(&rest);
    let mut out = Vec::new();
    let mut d = 1;
    while rest.deg0() >= 2 * d {
        h = h.powmod(q, &rest);
        let g = (&h - &x).gcd(&rest);
        if !g.is_one() {
            rest = rest.exact_div(&g).unwrap();
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if !rest.is_constant() {
        let dr = rest.deg0();
        out.push((rest, dr));
    }
    out
}

fn random_poly(field: &Field, below: usize, rng: &mut ChaCha8Rng) -> UniPoly {
    let q = field.order();
    UniPoly::new(field, (0..below).map(|_| Elem(rng.gen_range(0..q))).collect())
}

/// Splits a product of distinct monic irreducibles of common degree `d`.
pub fn equal_degree(f: &UniPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<UniPoly> {
    let n = f.deg0();
    if n == d {
        return vec![f.monic()];
    }
    let field = f.field();
    let q = field.order() as u128;
    let one = UniPoly::one(field);
    loop {
        let a = random_poly(field, n, rng);
        if a.is_constant() {
            continue;
        }
        let b = if q % 2 == 1 {
            // a^{(q^d-1)/2} = (a * a^q * ... * a^{q^{d-1}})^{(q-1)/2}
            let mut norm = a.rem(f);
            let mut conj = norm.clone();
            for _ in 1..d {
                conj = conj.powmod(q, f);
                norm = norm.mulmod(&conj, f);
            }
            &norm.powmod((q - 1) / 2, f) - &one
        } else {
            // absolute trace to F_2
            let steps = field.degree() as usize * d;
            let mut term = a.rem(f);
            let mut acc = term.clone();
            for _ in 1..steps {
                term = term.mulmod(&term, f);
                acc = &acc + &term;
            }
            acc
        };
        let g = b.gcd(f);
        if !g.is_constant() && g.deg0() < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.exact_div(&g).unwrap(), d, rng));
            return out;
        }
    }
}

/// Complete factorization with the default seed.
pub fn uni_factor(h: &UniPoly) -> UniFactorization {
    uni_factor_seeded(h, DEFAULT_SEED)
}

/// Complete factorization into monic irreducibles, sorted in canonical
/// polynomial order. The seed only drives the equal-degree splitting, so the
/// result does not depend on it.
pub fn uni_factor_seeded(h: &UniPoly, seed: u64) -> UniFactorization {
    let unit = h.lc();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (s, m) in squarefree_decomposition(h) {
        for (g, d) in distinct_degree(&s) {
            for irr in equal_degree(&g, d, &mut rng) {
                factors.push((irr, m));
            }
        }
    }
    factors.sort_by(|a, b| a.0.cmp_canonical(&b.0).then(a.1.cmp(&b.1)));
    UniFactorization { unit, factors }
}

/// Ben-Or irreducibility test.
pub fn is_irreducible(h: &UniPoly) -> bool {
    let Some(n) = h.degree() else { return false };
    if n == 0 {
        return false;
    }
    let field = h.field();
    let q = field.order() as u128;
    let h = h.monic();
    let x = UniPoly::x(field);
    let mut xq = x.rem(&h);
    for _ in 1..=n / 2 {
        xq = xq.powmod(q, &h);
        if !(&xq - &x).gcd(&h).is_one() {
            return false;
        }
    }
    true
}

/// Number of distinct roots by evaluating at every element.
pub fn count_roots_scan(h: &UniPoly) -> Result<usize> {
    if h.is_zero() {
        return Err(Error::InvalidInput("root count of the zero polynomial".into()));
    }
    Ok(h.field().elements().filter(|&x| h.eval(x).is_zero()).count())
}

/// Number of distinct roots as `deg gcd(y^q - y mod h, h)`.
pub fn count_roots_gcd(h: &UniPoly) -> Result<usize> {
    if h.is_zero() {
        return Err(Error::InvalidInput("root count of the zero polynomial".into()));
    }
    if h.is_constant() {
        return Ok(0);
    }
    let field = h.field();
    let x = UniPoly::x(field);
    let xq = x.powmod(field.order() as u128, h);
    Ok((&xq - &x).gcd(h).deg0())
}

/// Distinct roots in `h`'s own field, choosing the scan or gcd path by field
/// size.
pub fn count_roots(h: &UniPoly) -> Result<usize> {
    count_roots_with_threshold(h, DEFAULT_ROOT_SCAN_THRESHOLD)
}

pub fn count_roots_with_threshold(h: &UniPoly, threshold: u32) -> Result<usize> {
    if h.field().order() <= threshold {
        count_roots_scan(h)
    } else {
        count_roots_gcd(h)
    }
}

/// Distinct roots in ascending canonical order.
pub fn roots(h: &UniPoly) -> Vec<Elem> {
    if h.is_zero() {
        return h.field().elements().collect();
    }
    if h.is_constant() {
        return Vec::new();
    }
    let field = h.field();
    let x = UniPoly::x(field);
    let split = (&x.powmod(field.order() as u128, h) - &x).gcd(h);
    if split.is_constant() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut out: Vec<Elem> = equal_degree(&split, 1, &mut rng).into_iter().map(|lin| field.neg(lin.coeff(0))).collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn gf(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    #[test]
    fn factor_examples() {
        let f2 = gf(2, 1);
        let r = uni_factor(&UniPoly::from_ints(&f2, &[0, 1, 1]));
        assert_eq!(r.factors, vec![(UniPoly::from_ints(&f2, &[0, 1]), 1), (UniPoly::from_ints(&f2, &[1, 1]), 1)]);
        let f3 = gf(3, 1);
        let h = UniPoly::from_ints(&f3, &[1, 0, 1]);
        assert_eq!(uni_factor(&h).factors, vec![(h.clone(), 1)]);
        // y^3 - 1 over F_4 splits into the three nonzero elements
        let f4 = gf(2, 2);
        let h = UniPoly::from_ints(&f4, &[1, 0, 0, 1]);
        let lin: Vec<UniPoly> = uni_factor(&h).factors.into_iter().map(|(g, _)| g).collect();
        let expected: Vec<UniPoly> =
            [1u32, 2, 3].iter().map(|&a| UniPoly::new(&f4, vec![Elem(a), Elem::ONE])).collect();
        assert_eq!(lin, expected);
    }

    #[test]
    fn count_roots_examples() {
        let f4 = gf(2, 2);
        assert_eq!(count_roots(&UniPoly::from_ints(&f4, &[1, 0, 0, 1])).unwrap(), 3);
        let t = Elem(2);
        let h = UniPoly::new(&f4, vec![t, Elem::ZERO, Elem::ZERO, Elem::ONE]);
        assert_eq!(count_roots(&h).unwrap(), 0);
        assert_eq!(count_roots_gcd(&h).unwrap(), 0);
        let f7 = gf(7, 1);
        assert_eq!(count_roots(&UniPoly::from_ints(&f7, &[4, 1])).unwrap(), 1);
        assert!(count_roots(&UniPoly::zero(&f7)).is_err());
    }

    #[test]
    fn root_count_paths_agree_up_to_256() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, kmax) in [(2u64, 8u32), (3, 5), (5, 3), (7, 2), (11, 2), (13, 2)] {
            for k in 1..=kmax {
                let f = gf(p, k);
                for _ in 0..40 {
                    let deg = rng.gen_range(1..7);
                    let mut h = random_poly(&f, deg + 1, &mut rng);
                    if h.is_zero() {
                        h = UniPoly::one(&f);
                    }
                    assert_eq!(count_roots_scan(&h).unwrap(), count_roots_gcd(&h).unwrap());
                    assert_eq!(roots(&h).len(), count_roots_scan(&h).unwrap());
                }
            }
        }
    }

    #[test]
    fn irreducibility_agrees_with_factorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in [gf(2, 1), gf(3, 1), gf(2, 2), gf(5, 1)] {
            for _ in 0..100 {
                let deg = rng.gen_range(1..7);
                let mut h = random_poly(&f, deg + 1, &mut rng);
                if h.is_constant() {
                    h = UniPoly::x(&f);
                }
                let fac = uni_factor(&h);
                let single = fac.factors.len() == 1 && fac.factors[0].1 == 1;
                assert_eq!(is_irreducible(&h), single, "{h:?}");
            }
        }
    }

    fn arb_field() -> impl Strategy<Value = Field> {
        prop::sample::select(vec![(2u64, 1u32), (2, 2), (3, 1), (3, 2), (5, 1), (2, 3), (7, 1)])
            .prop_map(|(p, k)| gf(p, k))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn factor_round_trip(field in arb_field(), raw in prop::collection::vec(0u32..1 << 20, 2..10), seed in 0u64..1000) {
            let q = field.order();
            let h = UniPoly::new(&field, raw.iter().map(|&c| Elem(c % q)).collect());
            prop_assume!(!h.is_constant());
            let fac = uni_factor_seeded(&h, seed);
            prop_assert_eq!(fac.product(&field), h);
            for (g, _) in &fac.factors {
                prop_assert!(g.is_monic());
                prop_assert!(is_irreducible(g));
            }
            prop_assert_eq!(uni_factor_seeded(&fac.product(&field), seed + 1), fac);
        }
    }
}
