use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::uni::UniPoly;
use crate::field::{Elem, Embedding, Field};

/// Dense bivariate polynomial, stored as polynomials in the first variable
/// (`x`) for each power of the second (`y`): `rows[j]` is the coefficient of
/// `y^j`.
#[derive(Clone, PartialEq, Eq)]
pub struct BiPoly {
    field: Field,
    rows: Vec<UniPoly>,
    total: Option<usize>,
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly[{:?}]({})", self.field, self.render(["x", "y"]))
    }
}

impl BiPoly {
    pub fn from_rows(field: &Field, mut rows: Vec<UniPoly>) -> Self {
        while rows.last().is_some_and(|r| r.is_zero()) {
            rows.pop();
        }
        let total = rows.iter().enumerate().filter_map(|(j, r)| r.degree().map(|d| d + j)).max();
        BiPoly { field: field.clone(), rows, total }
    }

    /// Builds from `(x-exponent, y-exponent, coefficient)` triples; repeated
    /// monomials are summed.
    pub fn from_terms(field: &Field, terms: impl IntoIterator<Item = (usize, usize, Elem)>) -> Self {
        let mut grid: Vec<Vec<Elem>> = Vec::new();
        for (i, j, c) in terms {
            if grid.len() <= j {
                grid.resize(j + 1, Vec::new());
            }
            let row = &mut grid[j];
            if row.len() <= i {
                row.resize(i + 1, Elem::ZERO);
            }
            row[i] = field.add(row[i], c);
        }
        BiPoly::from_rows(field, grid.into_iter().map(|r| UniPoly::new(field, r)).collect())
    }

    pub fn zero(field: &Field) -> Self {
        BiPoly::from_rows(field, Vec::new())
    }

    pub fn constant(field: &Field, c: Elem) -> Self {
        BiPoly::from_rows(field, vec![UniPoly::constant(field, c)])
    }

    pub fn one(field: &Field) -> Self {
        BiPoly::constant(field, Elem::ONE)
    }

    pub fn x(field: &Field) -> Self {
        BiPoly::from_x(&UniPoly::x(field))
    }

    pub fn y(field: &Field) -> Self {
        BiPoly::from_y(&UniPoly::x(field))
    }

    /// Embeds a univariate polynomial as a polynomial in `x`.
    pub fn from_x(p: &UniPoly) -> Self {
        BiPoly::from_rows(p.field(), vec![p.clone()])
    }

    /// Embeds a univariate polynomial as a polynomial in `y`.
    pub fn from_y(p: &UniPoly) -> Self {
        let f = p.field();
        BiPoly::from_rows(f, p.coeffs().iter().map(|&c| UniPoly::constant(f, c)).collect())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> &[UniPoly] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> UniPoly {
        self.rows.get(j).cloned().unwrap_or_else(|| UniPoly::zero(&self.field))
    }

    pub fn coeff(&self, i: usize, j: usize) -> Elem {
        self.rows.get(j).map_or(Elem::ZERO, |r| r.coeff(i))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.total.is_none_or(|t| t == 0)
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.total
    }

    pub fn deg_y(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn deg_x(&self) -> Option<usize> {
        self.rows.iter().filter_map(|r| r.degree()).max()
    }

    /// Nonzero terms `(i, j, c)` of `c x^i y^j`, in decreasing graded order
    /// (total degree first, then `x`-degree).
    pub fn terms(&self) -> Vec<(usize, usize, Elem)> {
        let mut out: Vec<(usize, usize, Elem)> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(j, r)| {
                r.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, &c)| (i, j, c))
            })
            .collect();
        out.sort_by_key(|a| std::cmp::Reverse((a.0 + a.1, a.0)));
        out
    }

    /// Leading term in graded order.
    pub fn lead(&self) -> Option<(usize, usize, Elem)> {
        self.terms().into_iter().next()
    }

    /// Scales so the graded leading coefficient is 1.
    pub fn normalized(&self) -> BiPoly {
        match self.lead() {
            Some((_, _, c)) => self.scale(self.field.inv(c).unwrap()),
            None => self.clone(),
        }
    }

    pub fn scale(&self, c: Elem) -> BiPoly {
        BiPoly::from_rows(&self.field, self.rows.iter().map(|r| r.scale(c)).collect())
    }

    pub fn eval(&self, x: Elem, y: Elem) -> Elem {
        let f = &self.field;
        self.rows.iter().rev().fold(Elem::ZERO, |acc, r| f.add(f.mul(acc, y), r.eval(x)))
    }

    /// `g(x0, y)` as a polynomial in `y`.
    pub fn eval_x(&self, x0: Elem) -> UniPoly {
        UniPoly::new(&self.field, self.rows.iter().map(|r| r.eval(x0)).collect())
    }

    /// `g(x, y0)` as a polynomial in `x`.
    pub fn eval_y(&self, y0: Elem) -> UniPoly {
        let f = &self.field;
        self.rows.iter().rev().fold(UniPoly::zero(f), |acc, r| &acc.scale(y0) + r)
    }

    pub fn partial_x(&self) -> BiPoly {
        BiPoly::from_rows(&self.field, self.rows.iter().map(|r| r.derivative()).collect())
    }

    pub fn partial_y(&self) -> BiPoly {
        let f = &self.field;
        BiPoly::from_rows(f, self.rows.iter().enumerate().skip(1).map(|(j, r)| r.scale(f.from_int(j as i64))).collect())
    }

    /// Exchanges the roles of `x` and `y`.
    pub fn swap(&self) -> BiPoly {
        BiPoly::from_terms(&self.field, self.terms().into_iter().map(|(i, j, c)| (j, i, c)))
    }

    /// Sum of the terms of total degree `n`.
    pub fn homogeneous_part(&self, n: usize) -> BiPoly {
        BiPoly::from_terms(&self.field, self.terms().into_iter().filter(|(i, j, _)| i + j == n))
    }

    /// Top-degree homogeneous part.
    pub fn top_form(&self) -> BiPoly {
        match self.total {
            Some(t) => self.homogeneous_part(t),
            None => self.clone(),
        }
    }

    /// `g(x + lambda*y, y)`.
    pub fn shear(&self, lambda: Elem) -> BiPoly {
        let f = &self.field;
        let lin = BiPoly::from_terms(f, [(1, 0, Elem::ONE), (0, 1, lambda)]);
        let deg_x = self.deg_x().unwrap_or(0);
        let mut powers = vec![BiPoly::one(f)];
        for i in 1..=deg_x {
            let next = &powers[i - 1] * &lin;
            powers.push(next);
        }
        let mut acc = BiPoly::zero(f);
        for (j, row) in self.rows.iter().enumerate() {
            let mut part = BiPoly::zero(f);
            for (i, &c) in row.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    part = &part + &powers[i].scale(c);
                }
            }
            acc = &acc + &part.mul_y_power(j);
        }
        acc
    }

    /// `g(x + c, y)`.
    pub fn shift_x(&self, c: Elem) -> BiPoly {
        let lin = UniPoly::new(&self.field, vec![c, Elem::ONE]);
        BiPoly::from_rows(&self.field, self.rows.iter().map(|r| r.compose(&lin)).collect())
    }

    pub fn mul_y_power(&self, e: usize) -> BiPoly {
        if self.is_zero() || e == 0 {
            return self.clone();
        }
        let mut rows = vec![UniPoly::zero(&self.field); e];
        rows.extend(self.rows.iter().cloned());
        BiPoly::from_rows(&self.field, rows)
    }

    pub fn mul_x_power(&self, e: usize) -> BiPoly {
        BiPoly::from_rows(&self.field, self.rows.iter().map(|r| r.shift_mul(e)).collect())
    }

    /// Drops every term with `x`-degree `>= n`.
    pub fn truncate_x(&self, n: usize) -> BiPoly {
        BiPoly::from_rows(&self.field, self.rows.iter().map(|r| r.truncate(n)).collect())
    }

    /// Product truncated to `x`-degree `< n`.
    pub fn mul_trunc_x(&self, other: &BiPoly, n: usize) -> BiPoly {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return BiPoly::zero(f);
        }
        let mut rows = vec![UniPoly::zero(f); self.rows.len() + other.rows.len() - 1];
        for (a, ra) in self.rows.iter().enumerate() {
            if ra.is_zero() {
                continue;
            }
            for (b, rb) in other.rows.iter().enumerate() {
                rows[a + b] = &rows[a + b] + &(ra * rb).truncate(n);
            }
        }
        BiPoly::from_rows(f, rows)
    }

    pub fn pow(&self, mut e: u64) -> BiPoly {
        let mut base = self.clone();
        let mut acc = BiPoly::one(&self.field);
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

    /// Coefficient of the top power of `y`, as a polynomial in `x`.
    pub fn lc_y(&self) -> UniPoly {
        self.rows.last().cloned().unwrap_or_else(|| UniPoly::zero(&self.field))
    }

    pub fn is_monic_y(&self) -> bool {
        self.lc_y().is_one()
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    /// Uses leading-term elimination in graded order, so it is valid for any
    /// nonzero divisor.
    pub fn exact_div(&self, d: &BiPoly) -> Option<BiPoly> {
        assert!(!d.is_zero(), "bivariate division by zero");
        let f = &self.field;
        let (di, dj, dc) = d.lead().unwrap();
        let dc_inv = f.inv(dc).unwrap();
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((ri, rj, rc)) = rem.lead() {
            if ri < di || rj < dj {
                return None;
            }
            let c = f.mul(rc, dc_inv);
            quot.push((ri - di, rj - dj, c));
            let step = d.mul_x_power(ri - di).mul_y_power(rj - dj).scale(c);
            rem = &rem - &step;
        }
        Some(BiPoly::from_terms(f, quot))
    }

    /// Monic gcd of the `y`-coefficients.
    pub fn content_y(&self) -> UniPoly {
        self.rows.iter().fold(UniPoly::zero(&self.field), |acc, r| acc.gcd(r))
    }

    /// Divides out [`BiPoly::content_y`].
    pub fn primitive_y(&self) -> BiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content_y();
        BiPoly::from_rows(
            &self.field,
            self.rows.iter().map(|r| r.exact_div(&c).expect("content divides every row")).collect(),
        )
    }

    /// `lc_y(b)^e * self mod b` for a suitable power `e`, over `K[x][y]`.
    fn pseudo_rem(&self, b: &BiPoly) -> BiPoly {
        let db = b.deg_y().expect("pseudo-remainder by zero");
        let lb = BiPoly::from_x(&b.lc_y());
        let mut r = self.clone();
        while let Some(dr) = r.deg_y() {
            if dr < db {
                break;
            }
            let lr = BiPoly::from_x(&r.lc_y());
            r = &(&lb * &r) - &(&lr * &b.mul_y_power(dr - db));
        }
        r
    }

    /// Greatest common divisor in `K[x, y]`, normalized to graded leading
    /// coefficient 1 (zero only when both inputs are zero).
    pub fn gcd(&self, other: &BiPoly) -> BiPoly {
        let f = &self.field;
        if self.is_zero() {
            return other.normalized();
        }
        if other.is_zero() {
            return self.normalized();
        }
        let content = self.content_y().gcd(&other.content_y());
        let mut a = self.primitive_y();
        let mut b = other.primitive_y();
        if a.deg_y() < b.deg_y() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.deg_y() == Some(0) {
                a = BiPoly::one(f);
                break;
            }
            let r = a.pseudo_rem(&b).primitive_y();
            a = b;
            b = r;
        }
        (&BiPoly::from_x(&content) * &a.primitive_y()).normalized()
    }

    /// `h` with `h^p = self`, when one exists.
    pub fn pth_root(&self) -> Option<BiPoly> {
        let f = &self.field;
        let p = f.characteristic() as usize;
        let mut terms = Vec::new();
        for (i, j, c) in self.terms() {
            if i % p != 0 || j % p != 0 {
                return None;
            }
            terms.push((i / p, j / p, f.pth_root(c)));
        }
        Some(BiPoly::from_terms(f, terms))
    }

    /// Applies `c -> c^power` to every coefficient.
    pub fn frobenius_coeffs(&self, power: u64) -> BiPoly {
        BiPoly::from_rows(&self.field, self.rows.iter().map(|r| r.frobenius_coeffs(power)).collect())
    }

    pub fn embed(&self, e: &Embedding) -> BiPoly {
        BiPoly::from_rows(e.target(), self.rows.iter().map(|r| r.embed(e)).collect())
    }

    pub fn pull_back(&self, e: &Embedding) -> Option<BiPoly> {
        let rows = self.rows.iter().map(|r| r.pull_back(e)).collect::<Option<Vec<_>>>()?;
        Some(BiPoly::from_rows(e.source(), rows))
    }

    /// Text form with the given variable names.
    pub fn render(&self, vars: [&str; 2]) -> String {
        let terms: Vec<(Elem, Vec<(&str, usize)>)> =
            self.terms().into_iter().map(|(i, j, c)| (c, vec![(vars[0], i), (vars[1], j)])).collect();
        super::text::render_terms(&self.field, &terms)
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let n = self.rows.len().max(rhs.rows.len());
        BiPoly::from_rows(&self.field, (0..n).map(|j| &self.row(j) + &rhs.row(j)).collect())
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let n = self.rows.len().max(rhs.rows.len());
        BiPoly::from_rows(&self.field, (0..n).map(|j| &self.row(j) - &rhs.row(j)).collect())
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly::from_rows(&self.field, self.rows.iter().map(|r| -r).collect())
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let f = &self.field;
        if self.is_zero() || rhs.is_zero() {
            return BiPoly::zero(f);
        }
        let mut rows = vec![UniPoly::zero(f); self.rows.len() + rhs.rows.len() - 1];
        for (a, ra) in self.rows.iter().enumerate() {
            if ra.is_zero() {
                continue;
            }
            for (b, rb) in rhs.rows.iter().enumerate() {
                rows[a + b] = &rows[a + b] + &(ra * rb);
            }
        }
        BiPoly::from_rows(f, rows)
    }
}
