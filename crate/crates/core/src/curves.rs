//! Projective plane curves `G(x, y, z) = 0`, the Jacobian smoothness test,
//! and the auxiliary curve `F(x, z) - y^d - b*y^(d-1)*z - a*z^d` attached to a
//! univariate `f`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{embed, Elem, Field};
use crate::poly::{homogenize, pth_power_test, roots, text, uni_factor, BiPoly, UniPoly};

/// Default number of extension degrees tried by the `(a, b)` search.
pub const DEFAULT_SEARCH_EXTENSION_CAP: u32 = 4;

/// A point `(X : Y : Z)` normalized so its last nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq)]
pub struct ProjPoint {
    pub field: Field,
    pub coords: [Elem; 3],
}

impl ProjPoint {
    pub fn new(field: &Field, coords: [Elem; 3]) -> ProjPoint {
        let pivot = coords.iter().rposition(|c| !c.is_zero()).expect("not all coordinates zero");
        let s = field.inv(coords[pivot]).unwrap();
        ProjPoint { field: field.clone(), coords: coords.map(|c| field.mul(c, s)) }
    }

    pub fn render(&self) -> String {
        let c: Vec<String> = self.coords.iter().map(|&e| text::render_coeff(&self.field, e)).collect();
        format!("({}:{}:{}) over F_{}", c[0], c[1], c[2], self.field.order())
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Smooth,
    /// `witness` is `None` only when the singular point lives beyond the
    /// field cap; `degree` is then the degree of its `x` (or `y`) coordinate.
    Singular {
        witness: Option<ProjPoint>,
        degree: u32,
    },
    Unknown {
        reason: String,
    },
}

impl Certificate {
    pub fn is_smooth(&self) -> bool {
        matches!(self, Certificate::Smooth)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Certificate::Smooth => "smooth",
            Certificate::Singular { .. } => "singular",
            Certificate::Unknown { .. } => "unknown",
        }
    }
}

/// A plane curve of degree `d`, stored as its affine part `g = G(x, y, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneCurve {
    affine: BiPoly,
    degree: usize,
    certificate: Certificate,
}

impl PlaneCurve {
    /// Curve from its affine part and the projective degree.
    pub fn from_affine(affine: BiPoly, degree: usize) -> Result<PlaneCurve> {
        if affine.is_zero() {
            return Err(Error::InvalidInput("the zero form defines no curve".into()));
        }
        if affine.total_degree().unwrap() > degree {
            return Err(Error::InvalidInput(format!(
                "affine part has degree {} above the projective degree {degree}",
                affine.total_degree().unwrap()
            )));
        }
        if degree == 0 {
            return Err(Error::InvalidInput("a nonzero constant form defines no curve".into()));
        }
        let mut c =
            PlaneCurve { affine, degree, certificate: Certificate::Unknown { reason: "not yet checked".into() } };
        c.certificate = jacobian_smooth_check(&c);
        Ok(c)
    }

    /// Parses a homogeneous form in `x, y, z`.
    pub fn parse(field: &Field, src: &str) -> Result<PlaneCurve> {
        let terms = text::parse_terms(field, src, &["x", "y", "z"])?;
        let mut degs = terms.keys().map(|m| m.iter().sum::<u32>());
        let d = degs.next().ok_or_else(|| Error::InvalidInput("the zero form defines no curve".into()))?;
        if degs.any(|e| e != d) {
            return Err(Error::InvalidInput(format!("form {src:?} is not homogeneous")));
        }
        let affine = BiPoly::from_terms(field, terms.into_iter().map(|(m, c)| (m[0] as usize, m[1] as usize, c)));
        PlaneCurve::from_affine(affine, d as usize)
    }

    pub fn field(&self) -> &Field {
        self.affine.field()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `G(x, y, 1)`.
    pub fn affine(&self) -> &BiPoly {
        &self.affine
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// `(d-1)(d-2)/2`, populated only for smooth curves.
    pub fn genus(&self) -> Option<u64> {
        let d = self.degree as u64;
        self.certificate.is_smooth().then(|| (d - 1) * (d - 2) / 2)
    }

    /// Terms `(i, j, k, c)` of `G` with `i + j + k = d`, in descending order.
    pub fn terms(&self) -> Vec<(usize, usize, usize, Elem)> {
        let mut t: Vec<_> = self.affine.terms().into_iter().map(|(i, j, c)| (i, j, self.degree - i - j, c)).collect();
        t.sort_by_key(|a| std::cmp::Reverse((a.0, a.1)));
        t
    }

    pub fn render(&self) -> String {
        let terms: Vec<_> =
            self.terms().into_iter().map(|(i, j, k, c)| (c, vec![("x", i), ("y", j), ("z", k)])).collect();
        text::render_terms(self.field(), &terms)
    }

    /// The same form over an extension field, re-certified there.
    pub fn base_change(&self, target: &Field) -> Result<PlaneCurve> {
        let emb = embed(self.field(), target)?;
        Ok(PlaneCurve { affine: self.affine.embed(&emb), degree: self.degree, certificate: self.certificate.clone() })
    }

    /// Affine parts of `G, G_x, G_y, G_z` on the chart `z = 1`. `G_z` comes
    /// from Euler's identity `x G_x + y G_y + z G_z = d G`.
    pub fn partials(&self) -> [BiPoly; 4] {
        let g = &self.affine;
        let f = g.field();
        let gx = g.partial_x();
        let gy = g.partial_y();
        let euler = &(&BiPoly::x(f) * &gx) + &(&BiPoly::y(f) * &gy);
        let gz = &g.scale(f.from_int(self.degree as i64)) - &euler;
        [g.clone(), gx, gy, gz]
    }

    /// Restrictions of `G, G_x, G_y, G_z` to `z = 0`, as binary forms in `x, y`.
    pub fn partials_at_infinity(&self) -> [BiPoly; 4] {
        let d = self.degree;
        let parts = self.partials();
        [
            parts[0].homogeneous_part(d),
            parts[1].homogeneous_part(d - 1),
            parts[2].homogeneous_part(d - 1),
            parts[3].homogeneous_part(d - 1),
        ]
    }

    /// `G(P)` and its three partials at `P`, over `P`'s field.
    pub fn eval_with_partials(&self, pt: &ProjPoint) -> Result<[Elem; 4]> {
        let emb = embed(self.field(), &pt.field)?;
        let f = &pt.field;
        let [x, y, z] = pt.coords;
        let d = self.degree;
        let degs = [d, d - 1, d - 1, d - 1];
        let mut out = [Elem::ZERO; 4];
        for (k, part) in self.partials().iter().enumerate() {
            let mut acc = Elem::ZERO;
            for (i, j, c) in part.terms() {
                let e = degs[k] - i - j;
                let m = f.mul(f.mul(f.pow(x, i as u64), f.pow(y, j as u64)), f.pow(z, e as u64));
                acc = f.add(acc, f.mul(emb.apply(c), m));
            }
            out[k] = acc;
        }
        Ok(out)
    }

    pub fn contains(&self, pt: &ProjPoint) -> Result<bool> {
        Ok(self.eval_with_partials(pt)?[0].is_zero())
    }

    pub fn is_singular_at(&self, pt: &ProjPoint) -> Result<bool> {
        Ok(self.eval_with_partials(pt)?.iter().all(|c| c.is_zero()))
    }
}

// Arithmetic in K[t]/(phi) for an irreducible phi, with elements kept reduced.
struct AlgExt {
    modulus: UniPoly,
}

impl AlgExt {
    fn reduce(&self, a: &UniPoly) -> UniPoly {
        a.rem(&self.modulus)
    }

    fn mul(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        a.mulmod(b, &self.modulus)
    }

    fn inv(&self, a: &UniPoly) -> UniPoly {
        let (g, s, _) = a.ext_gcd(&self.modulus);
        debug_assert!(g.is_one());
        s
    }

    /// `p(t, y)` as a polynomial in `y` over the extension, trailing zeros
    /// trimmed.
    fn specialize(&self, p: &BiPoly) -> Vec<UniPoly> {
        let mut out: Vec<UniPoly> = p.rows().iter().map(|r| self.reduce(r)).collect();
        while out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        out
    }

    fn rem(&self, a: &[UniPoly], b: &[UniPoly]) -> Vec<UniPoly> {
        let mut r = a.to_vec();
        let lead_inv = self.inv(b.last().unwrap());
        while r.len() >= b.len() {
            let c = self.mul(r.last().unwrap(), &lead_inv);
            let shift = r.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                r[shift + i] = self.reduce(&(&r[shift + i] - &self.mul(&c, bc)));
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        r
    }

    /// Degree of the gcd in `y`; `None` when both inputs are zero.
    fn gcd_degree(&self, polys: &[Vec<UniPoly>]) -> Option<usize> {
        let mut acc: Vec<UniPoly> = Vec::new();
        for p in polys {
            let mut a = acc;
            let mut b = p.clone();
            while !b.is_empty() {
                let r = self.rem(&a, &b);
                a = b;
                b = r;
            }
            acc = a;
        }
        (!acc.is_empty()).then(|| acc.len() - 1)
    }
}

/// Resultant in `y` over `K[x]`, by fraction-free elimination on the
/// Sylvester matrix. Two polynomials free of `y` give their gcd instead, which
/// has the same roots as any elimination polynomial.
fn resultant_y(a: &BiPoly, b: &BiPoly) -> UniPoly {
    let f = a.field();
    let (m, n) = (a.deg_y().unwrap(), b.deg_y().unwrap());
    if m == 0 && n == 0 {
        return a.row(0).gcd(&b.row(0));
    }
    let size = m + n;
    let zero = UniPoly::zero(f);
    let mut mat = vec![vec![zero.clone(); size]; size];
    for r in 0..n {
        for (j, c) in a.rows().iter().enumerate() {
            mat[r][r + m - j] = c.clone();
        }
    }
    for r in 0..m {
        for (j, c) in b.rows().iter().enumerate() {
            mat[n + r][r + n - j] = c.clone();
        }
    }
    let mut sign = false;
    let mut prev = UniPoly::one(f);
    for k in 0..size {
        if mat[k][k].is_zero() {
            match (k + 1..size).find(|&i| !mat[i][k].is_zero()) {
                Some(i) => {
                    mat.swap(k, i);
                    sign = !sign;
                }
                None => return zero,
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&mat[i][j] * &mat[k][k]) - &(&mat[i][k] * &mat[k][j]);
                mat[i][j] = num.exact_div(&prev).expect("Bareiss division is exact");
            }
            mat[i][k] = zero.clone();
        }
        prev = mat[k][k].clone();
    }
    let det = mat[size - 1][size - 1].clone();
    if sign {
        -&det
    } else {
        det
    }
}

/// Univariate in `x` vanishing at the `x`-coordinate of every common zero of
/// `polys`, or `None` when no pair gives a nonzero resultant.
fn elimination_poly(polys: &[BiPoly]) -> Option<UniPoly> {
    let f = polys[0].field();
    let mut acc: Option<UniPoly> = None;
    fn absorb(acc: &mut Option<UniPoly>, r: UniPoly) {
        if !r.is_zero() {
            *acc = Some(match acc.take() {
                Some(a) => a.gcd(&r),
                None => r.monic(),
            });
        }
    }
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            absorb(&mut acc, resultant_y(&polys[i], &polys[j]));
        }
    }
    if acc.is_none() && polys.len() >= 2 {
        'combos: for i in 0..polys.len() {
            for j in 0..polys.len() {
                if i == j {
                    continue;
                }
                for c in f.elements().skip(1).take(16) {
                    let comb = &polys[i] + &polys[j].scale(c);
                    for (k, other) in polys.iter().enumerate() {
                        if k != i && !comb.is_zero() {
                            absorb(&mut acc, resultant_y(&comb, other));
                        }
                    }
                    if acc.is_some() {
                        break 'combos;
                    }
                }
            }
        }
    }
    acc
}

/// Least extension degree `m <= limit` and point `(x0, y0)` over it where
/// every polynomial in `polys` vanishes, with `x0` a root of `phi`.
fn affine_witness(polys: &[BiPoly], phi: &UniPoly, limit: usize) -> Option<ProjPoint> {
    let base = phi.field();
    let e = phi.deg0().max(1);
    for j in 1..=limit {
        let Ok(ext) = base.extension((e * j) as u32) else { return None };
        let emb = embed(base, &ext).ok()?;
        for x0 in roots(&phi.embed(&emb)) {
            let g = polys.iter().map(|p| p.embed(&emb).eval_x(x0)).fold(UniPoly::zero(&ext), |acc, p| acc.gcd(&p));
            if let Some(&y0) = roots(&g).first() {
                return Some(ProjPoint::new(&ext, [x0, y0, Elem::ONE]));
            }
        }
    }
    None
}

/// A point on the curve `h = 0`, searched over increasing extensions.
fn point_on(h: &BiPoly) -> Option<ProjPoint> {
    let base = h.field();
    for m in 1..=8u32 {
        let Ok(ext) = base.extension(m) else { return None };
        let emb = embed(base, &ext).ok()?;
        let he = h.embed(&emb);
        for x0 in ext.elements() {
            if let Some(&y0) = roots(&he.eval_x(x0)).first() {
                return Some(ProjPoint::new(&ext, [x0, y0, Elem::ONE]));
            }
        }
    }
    None
}

/// Decides whether `G` and its three partials share a projective zero over
/// the algebraic closure.
pub fn jacobian_smooth_check(c: &PlaneCurve) -> Certificate {
    let field = c.field().clone();
    let parts: Vec<BiPoly> = c.partials().into_iter().filter(|p| !p.is_zero()).collect();

    // Chart z = 1.
    let common = parts.iter().skip(1).fold(parts[0].clone(), |acc, p| acc.gcd(p));
    if !common.is_constant() {
        let witness = point_on(&common);
        let degree = witness.as_ref().map_or(0, |p| p.field.degree() / field.degree());
        return Certificate::Singular { witness, degree };
    }
    let elim = if parts.iter().any(|p| p.is_constant()) {
        UniPoly::one(&field)
    } else {
        match elimination_poly(&parts) {
            Some(e) => e,
            None => return Certificate::Unknown { reason: "every elimination resultant vanished".into() },
        }
    };
    if !elim.is_constant() {
        for (phi, _) in uni_factor(&elim).factors {
            let ext = AlgExt { modulus: phi.clone() };
            let fibers: Vec<Vec<UniPoly>> = parts.iter().map(|p| ext.specialize(p)).collect();
            let singular = match ext.gcd_degree(&fibers) {
                None => true,
                Some(deg) => deg > 0,
            };
            if singular {
                let limit = c.degree * c.degree;
                let witness = affine_witness(&parts, &phi, limit);
                return Certificate::Singular {
                    degree: witness.as_ref().map_or(phi.deg0() as u32, |p| p.field.degree() / field.degree()),
                    witness,
                };
            }
        }
    }

    // Line z = 0, points (x : 1 : 0).
    let inf = c.partials_at_infinity();
    let line = inf.iter().map(|h| h.eval_y(Elem::ONE)).fold(UniPoly::zero(&field), |acc, p| acc.gcd(&p));
    if line.is_zero() {
        let witness = ProjPoint::new(&field, [Elem::ZERO, Elem::ONE, Elem::ZERO]);
        return Certificate::Singular { witness: Some(witness), degree: 1 };
    }
    if !line.is_constant() {
        let phi = uni_factor(&line).factors.into_iter().map(|(p, _)| p).min_by_key(|p| p.deg0()).unwrap();
        let e = phi.deg0() as u32;
        let witness = field.extension(e).ok().and_then(|ext| {
            let emb = embed(&field, &ext).ok()?;
            let x0 = *roots(&phi.embed(&emb)).first()?;
            Some(ProjPoint::new(&ext, [x0, Elem::ONE, Elem::ZERO]))
        });
        return Certificate::Singular { witness, degree: e };
    }

    // The point (1 : 0 : 0).
    if inf.iter().all(|h| h.eval(Elem::ONE, Elem::ZERO).is_zero()) {
        let witness = ProjPoint::new(&field, [Elem::ONE, Elem::ZERO, Elem::ZERO]);
        return Certificate::Singular { witness: Some(witness), degree: 1 };
    }
    Certificate::Smooth
}

/// Points of `C` on the line `z = 0` over `ctx`, which must contain the
/// curve's field.
pub fn points_at_infinity(c: &PlaneCurve, ctx: &Field) -> Result<Vec<ProjPoint>> {
    let emb = embed(c.field(), ctx)?;
    let top = c.affine.homogeneous_part(c.degree).embed(&emb);
    let mut out: Vec<ProjPoint> =
        roots(&top.eval_y(Elem::ONE)).into_iter().map(|x| ProjPoint::new(ctx, [x, Elem::ONE, Elem::ZERO])).collect();
    if top.eval(Elem::ONE, Elem::ZERO).is_zero() {
        out.push(ProjPoint::new(ctx, [Elem::ONE, Elem::ZERO, Elem::ZERO]));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum Rejection {
    /// The `z`-partial can vanish on `z = 0`.
    Infinity,
    /// `f' = 0` meets `f = v` for a forbidden value `v`.
    ForbiddenValue {
        value: String,
    },
    /// `b = 0` with `p | d` and `f'` nonconstant.
    CriticalFiber,
    Singular {
        witness: Option<String>,
    },
    Uncertified {
        detail: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedPair {
    pub field: String,
    pub a: String,
    pub b: String,
    #[serde(flatten)]
    pub rejection: Rejection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSearchTrace {
    pub f: UniPoly,
    pub field: Field,
    pub a: Elem,
    pub b: Elem,
    /// `-b(d-1)/d`, absent when `p | d`.
    pub x0: Option<Elem>,
    pub forbidden_values: Vec<Elem>,
    pub rejected: Vec<RejectedPair>,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub extension_cap: u32,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { extension_cap: DEFAULT_SEARCH_EXTENSION_CAP }
    }
}

/// The affine part `f(x) - y^d - b*y^(d-1) - a` of the auxiliary curve.
pub fn auxiliary_affine(f: &UniPoly, a: Elem, b: Elem) -> Result<BiPoly> {
    let field = f.field();
    let d = f.deg0();
    let hom = homogenize(f, d)?;
    // F(x, z) with z -> 1 is f(x) again.
    let fx = hom.eval_y(Elem::ONE);
    let mut g = BiPoly::from_x(&fx);
    g = &g - &BiPoly::from_terms(field, [(0, d, Elem::ONE), (0, d - 1, b), (0, 0, a)]);
    Ok(g)
}

fn forbidden_values(f: &UniPoly, a: Elem, b: Elem) -> (Option<Elem>, Vec<Elem>) {
    let field = f.field();
    let d = f.deg0();
    let dd = field.from_int(d as i64);
    if dd.is_zero() {
        let vals = if d >= 3 { vec![a] } else { Vec::new() };
        return (None, vals);
    }
    let x0 = field.div(field.neg(field.mul(b, field.from_int(d as i64 - 1))), dd).unwrap();
    let shifted = field.add(a, field.mul(field.pow(x0, d as u64 - 1), field.add(x0, b)));
    let mut vals = Vec::new();
    if d >= 3 {
        vals.push(a);
    }
    if !vals.contains(&shifted) {
        vals.push(shifted);
    }
    (Some(x0), vals)
}

fn precheck(f: &UniPoly, b: Elem, forbidden: &[Elem]) -> Option<Rejection> {
    let field = f.field();
    let d = f.deg0();
    let df = f.derivative();
    if field.from_int(d as i64).is_zero() {
        let cd = f.coeff(d);
        let cd1 = f.coeff(d - 1);
        let bad = if cd1.is_zero() {
            b.is_zero()
        } else {
            let rhs = field.mul(field.pow(cd1, d as u64), field.pow_signed(cd, 1 - d as i64).unwrap());
            field.pow(b, d as u64) == rhs
        };
        if bad {
            return Some(Rejection::Infinity);
        }
        if b.is_zero() && !df.is_constant() {
            return Some(Rejection::CriticalFiber);
        }
    }
    for &v in forbidden {
        if !df.gcd(&(f - &UniPoly::constant(field, v))).is_one() {
            return Some(Rejection::ForbiddenValue { value: text::render_coeff(field, v) });
        }
    }
    None
}

/// Searches `(a, b)`, `a != 0`, in canonical order over `F_q` and then over
/// extensions of increasing degree, for a smooth auxiliary curve.
pub fn construct_auxiliary_curve(f: &UniPoly, opts: SearchOptions) -> Result<(PlaneCurve, CurveSearchTrace)> {
    let base = f.field().clone();
    let d = f.degree().unwrap_or(0);
    if d < 2 {
        return Err(Error::InvalidInput(format!("auxiliary curve needs degree at least 2, got {}", f.render("x"))));
    }
    if !f.coeff(0).is_zero() {
        return Err(Error::InvalidInput(format!("{} has nonzero constant term", f.render("x"))));
    }
    if pth_power_test(f).is_some() {
        return Err(Error::InvalidInput(format!("{} is a p-th power", f.render("x"))));
    }
    let mut rejected = Vec::new();
    for m in 1..=opts.extension_cap {
        let ext = base.extension(m).map_err(|e| match e {
            Error::FieldTooLarge { .. } => Error::CapExceeded(format!(
                "curve search for {} over {base} needs degree-{m} extension beyond the field cap",
                f.render("x")
            )),
            other => other,
        })?;
        let emb = embed(&base, &ext)?;
        let fe = f.embed(&emb);
        for a in ext.elements().skip(1) {
            for b in ext.elements() {
                let (x0, forbidden) = forbidden_values(&fe, a, b);
                let reject = |rejection| RejectedPair {
                    field: ext.to_string(),
                    a: text::render_coeff(&ext, a),
                    b: text::render_coeff(&ext, b),
                    rejection,
                };
                if let Some(r) = precheck(&fe, b, &forbidden) {
                    rejected.push(reject(r));
                    continue;
                }
                let curve = PlaneCurve::from_affine(auxiliary_affine(&fe, a, b)?, d)?;
                match curve.certificate() {
                    Certificate::Smooth => {
                        let trace = CurveSearchTrace {
                            f: f.clone(),
                            field: ext.clone(),
                            a,
                            b,
                            x0,
                            forbidden_values: forbidden,
                            rejected,
                        };
                        return Ok((curve, trace));
                    }
                    Certificate::Singular { witness, .. } => {
                        rejected.push(reject(Rejection::Singular { witness: witness.as_ref().map(ProjPoint::render) }))
                    }
                    Certificate::Unknown { reason } => {
                        rejected.push(reject(Rejection::Uncertified { detail: reason.clone() }))
                    }
                }
            }
        }
    }
    Err(Error::SearchFailed(format!(
        "no smooth auxiliary curve for {} over extensions of {base} up to degree {}",
        f.render("x"),
        opts.extension_cap
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_uni;

    fn gf(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    fn curve(p: u64, k: u32, s: &str) -> PlaneCurve {
        PlaneCurve::parse(&gf(p, k), s).unwrap()
    }

    /// Exhaustive projective scan for singular points over `field`.
    fn brute_singular(c: &PlaneCurve, field: &Field) -> Vec<ProjPoint> {
        let mut out = Vec::new();
        let els: Vec<Elem> = field.elements().collect();
        let mut pts = Vec::new();
        for &x in &els {
            for &y in &els {
                pts.push([x, y, Elem::ONE]);
            }
            pts.push([x, Elem::ONE, Elem::ZERO]);
        }
        pts.push([Elem::ONE, Elem::ZERO, Elem::ZERO]);
        for coords in pts {
            let pt = ProjPoint::new(field, coords);
            if c.is_singular_at(&pt).unwrap() {
                out.push(pt);
            }
        }
        out
    }

    #[test]
    fn smoothness_examples() {
        assert!(curve(2, 1, "x^3 + y^3 + z^3").certificate().is_smooth());
        assert!(curve(3, 1, "x^2 + y*z").certificate().is_smooth());
        let nodal = curve(5, 1, "y^2*z - x^3 - x^2*z");
        match nodal.certificate() {
            Certificate::Singular { witness: Some(w), degree: 1 } => {
                assert_eq!(w.coords, [Elem::ZERO, Elem::ZERO, Elem::ONE]);
                assert!(nodal.is_singular_at(w).unwrap());
            }
            other => panic!("expected a rational singular point, got {other:?}"),
        }
        assert_eq!(curve(2, 1, "x^3 + y^3 + z^3").genus(), Some(1));
        assert_eq!(nodal.genus(), None);
    }

    #[test]
    fn parse_errors() {
        let f3 = gf(3, 1);
        assert!(PlaneCurve::parse(&f3, "x^2 + y").is_err());
        assert!(PlaneCurve::parse(&f3, "x - x").is_err());
        assert!(matches!(PlaneCurve::parse(&f3, "x^2 + w"), Err(Error::Parse { .. })));
    }

    #[test]
    fn render_round_trip() {
        for (p, k, s) in [(2, 2, "x^3 + [t]*y^2*z + z^3"), (3, 1, "x^3*y + y^3*z + z^3*x"), (5, 1, "2*x^2 + y*z")] {
            let c = curve(p, k, s);
            assert_eq!(PlaneCurve::parse(c.field(), &c.render()).unwrap(), c);
        }
    }

    #[test]
    fn singular_points_off_the_base_field() {
        // (x^2 + 1)^2 - y^2 + y^4 over F_3 is singular at (±i, 0) and (0, ±i)
        let c = curve(3, 1, "x^4 + 2*x^2*z^2 + z^4 - y^2*z^2 + y^4");
        match c.certificate() {
            Certificate::Singular { witness: Some(w), .. } => {
                assert_eq!(w.field.order(), 9);
                assert!(c.is_singular_at(w).unwrap());
            }
            other => panic!("{other:?}"),
        }
        assert!(brute_singular(&c, &gf(3, 1)).is_empty());
    }

    #[test]
    fn singular_at_infinity() {
        // y^2 z = x^3 is a cusp at (0:0:1); swap roles so the cusp is at (0:1:0)
        let c = curve(7, 1, "x^3 - z^2*y");
        let w = match c.certificate() {
            Certificate::Singular { witness: Some(w), .. } => w.clone(),
            other => panic!("{other:?}"),
        };
        assert_eq!(w.coords, [Elem::ZERO, Elem::ONE, Elem::ZERO]);
        let c = curve(7, 1, "y^3 - z^2*x");
        let w = match c.certificate() {
            Certificate::Singular { witness: Some(w), .. } => w.clone(),
            other => panic!("{other:?}"),
        };
        assert_eq!(w.coords, [Elem::ONE, Elem::ZERO, Elem::ZERO]);
    }

    #[test]
    fn jacobian_agrees_with_brute_force() {
        let corpus = [
            (2u64, 1u32, "x^3 + y^3 + z^3"),
            (2, 2, "x^3 + y^3 + z^3"),
            (3, 1, "x^2 + y*z"),
            (5, 1, "y^2*z - x^3 - x^2*z"),
            (3, 1, "x^4 + y^4 + z^4"),
            (2, 1, "x^3*y + y^3*z + z^3*x"),
            (3, 1, "y^2*z - x^3 + x*z^2"),
            (3, 1, "y^2*z - x^3"),
            (2, 1, "y^2*z + y*z^2 + x^3"),
            (2, 1, "y^2*z + x^3"),
            (5, 1, "x^2*y + y^2*z + z^2*x"),
            (7, 1, "x*y*z"),
            (2, 1, "x^2 + y^2 + z^2"),
        ];
        for (p, k, s) in corpus {
            let c = curve(p, k, s);
            let base = c.field().clone();
            for l in 1..=3u32 {
                let q = base.order() as u64;
                if q.pow(3 * l) > 1 << 20 {
                    break;
                }
                let ext = base.extension(l).unwrap();
                let cl = c.base_change(&ext).unwrap();
                let found = brute_singular(&cl, &ext);
                if c.certificate().is_smooth() {
                    assert!(found.is_empty(), "{s} over {ext}: {found:?}");
                }
                if let Certificate::Singular { witness: Some(w), .. } = c.certificate() {
                    if ext.degree().is_multiple_of(w.field.degree()) {
                        assert!(!found.is_empty(), "{s} over {ext}");
                    }
                }
            }
            if let Certificate::Singular { witness: Some(w), .. } = c.certificate() {
                assert!(c.is_singular_at(w).unwrap(), "{s}");
            }
            assert!(!matches!(c.certificate(), Certificate::Unknown { .. }), "{s}");
        }
    }

    #[test]
    fn jacobian_agrees_with_brute_force_on_random_forms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let fields = [gf(2, 1), gf(3, 1), gf(2, 2), gf(5, 1)];
        for case in 0..240 {
            let field = &fields[case % fields.len()];
            let d = rng.gen_range(2..=4usize);
            let mut terms = Vec::new();
            for i in 0..=d {
                for j in 0..=d - i {
                    if rng.gen_bool(0.4) {
                        terms.push((i, j, Elem(rng.gen_range(1..field.order()))));
                    }
                }
            }
            let g = BiPoly::from_terms(field, terms);
            let Ok(c) = PlaneCurve::from_affine(g, d) else { continue };
            assert!(!matches!(c.certificate(), Certificate::Unknown { .. }), "{}", c.render());
            for l in 1..=3u32 {
                if (field.order() as u64).pow(2 * l) > 1 << 16 {
                    break;
                }
                let ext = field.extension(l).unwrap();
                let found = brute_singular(&c.base_change(&ext).unwrap(), &ext);
                match c.certificate() {
                    Certificate::Smooth => assert!(found.is_empty(), "{} over {ext}", c.render()),
                    Certificate::Singular { witness, .. } => {
                        let w = witness.as_ref().expect("witness within cap");
                        assert!(c.is_singular_at(w).unwrap());
                        if l % (w.field.degree() / field.degree()) == 0 {
                            assert!(!found.is_empty(), "{} over {ext}", c.render());
                        }
                    }
                    Certificate::Unknown { .. } => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn points_at_infinity_examples() {
        for ((p, k), d, expected) in [((2u64, 1u32), 3usize, 1usize), ((2, 2), 3, 3), ((5, 1), 2, 2)] {
            let field = gf(p, k);
            let f = UniPoly::monomial(&field, Elem::ONE, d);
            let c = PlaneCurve::from_affine(auxiliary_affine(&f, Elem::ONE, Elem::ZERO).unwrap(), d).unwrap();
            let pts = points_at_infinity(&c, &field).unwrap();
            assert_eq!(pts.len(), expected);
            assert!(pts.iter().all(|pt| pt.coords[1] == Elem::ONE && pt.coords[2].is_zero()));
        }
    }

    #[test]
    fn auxiliary_curve_x3_over_f2() {
        let f2 = gf(2, 1);
        let f = parse_uni(&f2, "x^3").unwrap();
        let (c, trace) = construct_auxiliary_curve(&f, SearchOptions::default()).unwrap();
        assert!(c.certificate().is_smooth());
        assert_eq!(trace.field, f2);
        assert_eq!((trace.a, trace.b), (Elem::ONE, Elem::ZERO));
        assert_eq!(trace.x0, Some(Elem::ZERO));
        assert_eq!(c.render(), "x^3 + y^3 + z^3");
        // affine part is f(x) - y^d - b y^(d-1) - a
        assert_eq!(*c.affine(), auxiliary_affine(&f, trace.a, trace.b).unwrap());
        for n in 1..=4 {
            let ext = f2.extension(n).unwrap();
            let expected = num_integer::gcd(3, ext.order() as u64 - 1) as usize;
            assert_eq!(points_at_infinity(&c, &ext).unwrap().len(), expected);
        }
    }

    #[test]
    fn auxiliary_curve_rejections() {
        let f3 = gf(3, 1);
        assert!(construct_auxiliary_curve(&UniPoly::x(&f3), SearchOptions::default()).is_err());
        let f2 = gf(2, 1);
        assert!(construct_auxiliary_curve(&parse_uni(&f2, "x^2").unwrap(), SearchOptions::default()).is_err());
        assert!(construct_auxiliary_curve(&parse_uni(&f2, "x^3 + 1").unwrap(), SearchOptions::default()).is_err());
    }

    /// Every candidate accepted by the recipe is certified; pairs rejected
    /// for forbidden values really are singular.
    #[test]
    fn recipe_rejections_are_sound() {
        let cases = [
            (2u64, 1u32, "x^3 + x"),
            (3, 1, "x^4 + x"),
            (5, 1, "x^3 + x^2"),
            (2, 2, "x^5 + x^3 + x"),
            (3, 1, "x^3 + x^2 + x"),
            (2, 1, "x^4 + x^3 + x"),
        ];
        for (p, k, s) in cases {
            let field = gf(p, k);
            let f = parse_uni(&field, s).unwrap();
            let d = f.deg0();
            let Ok((c, trace)) = construct_auxiliary_curve(&f, SearchOptions::default()) else { continue };
            assert!(c.certificate().is_smooth());
            assert!(!trace.a.is_zero());
            let emb = embed(&field, &trace.field).unwrap();
            let fe = f.embed(&emb);
            for a in trace.field.elements().skip(1) {
                for b in trace.field.elements() {
                    let (_, forb) = forbidden_values(&fe, a, b);
                    if let Some(Rejection::ForbiddenValue { .. }) = precheck(&fe, b, &forb) {
                        let cc = PlaneCurve::from_affine(auxiliary_affine(&fe, a, b).unwrap(), d).unwrap();
                        assert!(!cc.certificate().is_smooth(), "{s}: a={a:?} b={b:?}");
                    }
                }
            }
        }
    }
}
