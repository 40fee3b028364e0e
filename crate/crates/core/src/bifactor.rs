//! Bivariate factorization over `F_q` and the absolute-irreducibility
//! decision behind Cohen's exceptionality criterion.
//!
//! Factorization shears `g` so it is monic in `y` of full degree, splits off
//! repeated factors, specializes `x` at a point with a squarefree fiber,
//! factors the fiber, Hensel-lifts the fiber factors in powers of `x - x0`
//! and recombines subsets of lifted factors by exact division. When the base
//! field has no usable shear or specialization point the input is factored
//! over a small extension and the factors are regrouped into Frobenius orbits.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{embed, Elem, Field};
use crate::poly::{count_roots, uni_factor, BiPoly, UniPoly};

/// Largest auxiliary extension degree tried when the base field is too small.
const MAX_AUX_EXTENSION: u32 = 12;

/// `input = unit * prod factor^multiplicity`, each factor irreducible over the
/// coefficient field and normalized to graded leading coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiFactorization {
    pub input: BiPoly,
    pub unit: Elem,
    pub factors: Vec<(BiPoly, u32)>,
    /// Degree of the auxiliary extension the factors were found over before
    /// being regrouped, when the base field was too small.
    pub auxiliary_extension: Option<u32>,
}

impl BiFactorization {
    pub fn product(&self) -> BiPoly {
        let f = self.input.field();
        self.factors.iter().fold(BiPoly::constant(f, self.unit), |acc, (g, m)| &acc * &g.pow(*m as u64))
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AbsolutelyIrreducible,
    Splits,
}

/// Least extension `F_{q^r}` over which an `F_q`-irreducible polynomial
/// factors, with the factorization found there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitWitness {
    pub degree: u32,
    pub field: Field,
    pub factors: Vec<(BiPoly, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsIrredVerdict {
    pub input: BiPoly,
    pub verdict: Verdict,
    pub witness: Option<SplitWitness>,
}

/// Advisory hint from counting affine points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScreenHint {
    LikelyAbsIrredFactorPresent,
    LikelyNone,
}

/// Canonical order on bivariate polynomials: total degree, then the graded
/// term list.
pub fn cmp_bipoly(a: &BiPoly, b: &BiPoly) -> Ordering {
    a.total_degree().cmp(&b.total_degree()).then_with(|| {
        let ta: Vec<_> = a.terms().into_iter().map(|(i, j, c)| (i + j, i, c)).collect();
        let tb: Vec<_> = b.terms().into_iter().map(|(i, j, c)| (i + j, i, c)).collect();
        ta.cmp(&tb)
    })
}

fn monic_y(b: &BiPoly) -> BiPoly {
    let lc = b.lc_y();
    debug_assert!(lc.is_constant(), "divisor of a y-monic polynomial has constant leading coefficient");
    b.scale(b.field().inv(lc.coeff(0)).expect("nonzero leading coefficient"))
}

/// Squarefree decomposition of a `y`-monic polynomial with respect to `y`.
/// `None` when some factor has vanishing `y`-derivative.
fn squarefree_y(h: &BiPoly) -> Option<Vec<(BiPoly, u32)>> {
    let p = h.field().characteristic();
    let mut out = Vec::new();
    if h.deg_y().unwrap_or(0) == 0 {
        return Some(out);
    }
    let hy = h.partial_y();
    let mut c = if hy.is_zero() { h.clone() } else { monic_y(&h.gcd(&hy)) };
    let mut w = h.exact_div(&c)?;
    let mut i = 1u32;
    while w.deg_y().unwrap_or(0) > 0 {
        let y = monic_y(&w.gcd(&c));
        let fac = w.exact_div(&y)?;
        if fac.deg_y().unwrap_or(0) > 0 {
            out.push((monic_y(&fac), i));
        }
        c = c.exact_div(&y)?;
        w = y;
        i += 1;
    }
    if c.deg_y().unwrap_or(0) > 0 {
        let root = c.pth_root()?;
        for (g, m) in squarefree_y(&monic_y(&root))? {
            out.push((g, m * p));
        }
    }
    Some(out)
}

/// Coefficient of `x^k` as a polynomial in `y`.
fn x_coeff(g: &BiPoly, k: usize) -> UniPoly {
    UniPoly::new(g.field(), g.rows().iter().map(|r| r.coeff(k)).collect())
}

/// Lifts `t = a0 * b0 mod x` to `t = A * B mod x^prec` with `A, B` monic in `y`.
fn lift_pair(t: &BiPoly, a0: &UniPoly, b0: &UniPoly, prec: usize) -> (BiPoly, BiPoly) {
    let (g, s, tt) = a0.ext_gcd(b0);
    debug_assert!(g.is_one(), "fiber factors are coprime");
    let mut a = BiPoly::from_y(a0);
    let mut b = BiPoly::from_y(b0);
    for k in 1..prec {
        let err = x_coeff(&(t - &a.mul_trunc_x(&b, k + 1)), k);
        if err.is_zero() {
            continue;
        }
        let alpha = (&tt * &err).rem(a0);
        let beta = (&s * &err).rem(b0);
        a = &a + &BiPoly::from_y(&alpha).mul_x_power(k);
        b = &b + &BiPoly::from_y(&beta).mul_x_power(k);
    }
    (a, b)
}

fn lift_all(t: &BiPoly, fiber_factors: &[UniPoly], prec: usize) -> Vec<BiPoly> {
    if fiber_factors.len() == 1 {
        return vec![t.truncate_x(prec)];
    }
    let mid = fiber_factors.len() / 2;
    let field = t.field();
    let prod = |fs: &[UniPoly]| fs.iter().fold(UniPoly::one(field), |acc, f| &acc * f);
    let (a, b) = lift_pair(t, &prod(&fiber_factors[..mid]), &prod(&fiber_factors[mid..]), prec);
    let mut out = lift_all(&a, &fiber_factors[..mid], prec);
    out.extend(lift_all(&b, &fiber_factors[mid..], prec));
    out
}

/// All `size`-subsets of `items` in lexicographic order.
fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, size, 0, &mut Vec::new(), &mut out);
    out
}

/// Recombines lifted factors into true factors of `t`, trying subsets by
/// increasing size; the first exact division wins.
fn recombine(t: &BiPoly, lifted: &[BiPoly], prec: usize) -> Vec<BiPoly> {
    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut target = t.clone();
    let mut found = Vec::new();
    let mut size = 1;
    'grow: while 2 * size <= remaining.len() {
        for subset in subsets(&remaining, size) {
            let cand = subset.iter().fold(BiPoly::one(t.field()), |acc, &i| acc.mul_trunc_x(&lifted[i], prec));
            let bound = target.total_degree().unwrap_or(0);
            if cand.deg_x().unwrap_or(0) > bound {
                continue;
            }
            if let Some(q) = target.exact_div(&cand) {
                found.push(cand);
                target = q;
                remaining.retain(|i| !subset.contains(i));
                continue 'grow;
            }
        }
        size += 1;
    }
    found.push(target);
    found
}

/// Factors a `y`-monic polynomial that is squarefree with respect to `y`.
/// `None` when no specialization point in the field gives a squarefree fiber.
fn hensel_factor(s: &BiPoly) -> Option<Vec<BiPoly>> {
    let d = s.deg_y().unwrap_or(0);
    if d <= 1 {
        return Some(vec![s.clone()]);
    }
    let field = s.field();
    for x0 in field.elements() {
        let fiber = s.eval_x(x0);
        if !fiber.gcd(&fiber.derivative()).is_one() {
            continue;
        }
        let fac = uni_factor(&fiber);
        if fac.factors.len() == 1 {
            return Some(vec![s.clone()]);
        }
        let shifted = s.shift_x(x0);
        let fiber_factors: Vec<UniPoly> = fac.factors.into_iter().map(|(g, _)| g).collect();
        let prec = 2 * s.total_degree().unwrap_or(d) + 1;
        let lifted = lift_all(&shifted, &fiber_factors, prec);
        let back = field.neg(x0);
        return Some(recombine(&shifted, &lifted, prec).into_iter().map(|g| g.shift_x(back)).collect());
    }
    None
}

/// Factors over the coefficient field without leaving it; `None` when the
/// field is too small to supply a shear and a squarefree fiber.
fn factor_in_field(g: &BiPoly) -> Option<Vec<(BiPoly, u32)>> {
    let field = g.field();
    let top = g.top_form();
    'shear: for lambda in field.elements() {
        let lead = top.eval(lambda, Elem::ONE);
        let Some(lead_inv) = field.inv(lead) else { continue };
        let h = g.shear(lambda).scale(lead_inv);
        let Some(parts) = squarefree_y(&h) else { continue };
        let mut out = Vec::new();
        for (s, m) in parts {
            let Some(facs) = hensel_factor(&s) else { continue 'shear };
            for fct in facs {
                out.push((fct.shear(field.neg(lambda)).normalized(), m));
            }
        }
        out.sort_by(|a, b| cmp_bipoly(&a.0, &b.0).then(a.1.cmp(&b.1)));
        return Some(out);
    }
    None
}

fn factor_via_extension(g: &BiPoly) -> Result<(Vec<(BiPoly, u32)>, u32)> {
    let base = g.field();
    let q = base.order() as u64;
    for m in 2..=MAX_AUX_EXTENSION {
        let ext = base.extension(m).map_err(|e| match e {
            Error::FieldTooLarge { .. } => Error::CapExceeded(format!(
                "bivariate factorization over {base} needs an auxiliary extension beyond the field cap"
            )),
            other => other,
        })?;
        let emb = embed(base, &ext)?;
        let Some(facs) = factor_in_field(&g.embed(&emb)) else { continue };
        let mut used = vec![false; facs.len()];
        let mut out = Vec::new();
        for i in 0..facs.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let (start, mult) = (&facs[i].0, facs[i].1);
            let mut prod = start.clone();
            let mut cur = start.frobenius_coeffs(q);
            while &cur != start {
                let j = facs.iter().position(|(h, _)| h == &cur).expect("Frobenius permutes the factors");
                used[j] = true;
                prod = &prod * &cur;
                cur = cur.frobenius_coeffs(q);
            }
            let pulled =
                prod.normalized().pull_back(&emb).expect("Frobenius-orbit products have base-field coefficients");
            out.push((pulled, mult));
        }
        out.sort_by(|a, b| cmp_bipoly(&a.0, &b.0).then(a.1.cmp(&b.1)));
        return Ok((out, m));
    }
    Err(Error::SearchFailed(format!(
        "no auxiliary extension of degree <= {MAX_AUX_EXTENSION} admits a separable shear"
    )))
}

/// Complete factorization of `g` into irreducibles over its coefficient field.
pub fn bi_factor(g: &BiPoly) -> Result<BiFactorization> {
    if g.is_zero() {
        return Err(Error::InvalidInput("cannot factor the zero polynomial".into()));
    }
    let unit = g.lead().map(|(_, _, c)| c).unwrap();
    if g.is_constant() {
        return Ok(BiFactorization { input: g.clone(), unit, factors: Vec::new(), auxiliary_extension: None });
    }
    let (factors, auxiliary_extension) = match factor_in_field(g) {
        Some(f) => (f, None),
        None => {
            let (f, m) = factor_via_extension(g)?;
            (f, Some(m))
        }
    };
    Ok(BiFactorization { input: g.clone(), unit, factors, auxiliary_extension })
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
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

/// Decides whether an `F_q`-irreducible `g` stays irreducible over the
/// algebraic closure, by refactoring over `F_{q^r}` for each prime `r`
/// dividing the total degree.
pub fn is_abs_irreducible(g: &BiPoly) -> Result<AbsIrredVerdict> {
    let fac = bi_factor(g)?;
    if !fac.is_irreducible() {
        return Err(Error::InvalidInput(format!("{} is reducible over {}", g.render(["x", "y"]), g.field())));
    }
    let base = g.field();
    let e = g.total_degree().unwrap_or(0);
    for r in prime_divisors(e) {
        let ext = base.extension(r as u32).map_err(|err| match err {
            Error::FieldTooLarge { .. } => Error::CapExceeded(format!(
                "absolute irreducibility test needs F_{}^{} beyond the field cap",
                base.order(),
                r
            )),
            other => other,
        })?;
        let emb = embed(base, &ext)?;
        let over_ext = bi_factor(&g.embed(&emb))?;
        if over_ext.factors.len() >= 2 {
            return Ok(AbsIrredVerdict {
                input: g.clone(),
                verdict: Verdict::Splits,
                witness: Some(SplitWitness { degree: r as u32, field: ext, factors: over_ext.factors }),
            });
        }
    }
    Ok(AbsIrredVerdict { input: g.clone(), verdict: Verdict::AbsolutelyIrreducible, witness: None })
}

/// Counts affine points of `g = 0` over `F_{q^n}` and derives a hint from the
/// count. Advisory only.
pub fn point_count_screen(g: &BiPoly, n: u32) -> Result<(u64, ScreenHint)> {
    if g.total_degree().unwrap_or(0) < 1 {
        return Err(Error::InvalidInput("screen needs a nonconstant polynomial".into()));
    }
    let base = g.field();
    let ext = base.extension(n)?;
    let emb = embed(base, &ext)?;
    let ge = g.embed(&emb);
    let qn = ext.order() as u64;
    let mut count = 0u64;
    for x in ext.elements() {
        let fiber = ge.eval_x(x);
        count += if fiber.is_zero() { qn } else { count_roots(&fiber)? as u64 };
    }
    let hint = if 2 * count > qn { ScreenHint::LikelyAbsIrredFactorPresent } else { ScreenHint::LikelyNone };
    Ok((count, hint))
}
