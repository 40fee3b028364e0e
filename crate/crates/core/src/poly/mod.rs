//! Dense univariate and bivariate polynomial algebra over a [`Field`].

mod bi;
pub mod factor;
pub mod text;
mod uni;

pub use bi::BiPoly;
pub use factor::{
    count_roots, count_roots_gcd, count_roots_scan, count_roots_with_threshold, is_irreducible, pth_power_test, roots,
    uni_factor, uni_factor_seeded, UniFactorization, DEFAULT_ROOT_SCAN_THRESHOLD, DEFAULT_SEED,
};
pub use uni::UniPoly;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// The difference quotient `(f(x) - f(y)) / (x - y)`.
///
/// Computed termwise from `(x^n - y^n)/(x - y) = sum_{i+j=n-1} x^i y^j`.
pub fn diff_quotient(f: &UniPoly) -> Result<BiPoly> {
    if f.degree().unwrap_or(0) < 1 {
        return Err(Error::InvalidInput("difference quotient needs a polynomial of degree at least 1".into()));
    }
    let terms = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !c.is_zero())
        .flat_map(|(n, &c)| (0..n).map(move |i| (i, n - 1 - i, c)));
    Ok(BiPoly::from_terms(f.field(), terms))
}

/// The binary form `F(x, z) = z^d f(x/z)`, returned with `z` as the second
/// variable.
pub fn homogenize(f: &UniPoly, d: usize) -> Result<BiPoly> {
    if f.degree().is_some_and(|deg| deg > d) {
        return Err(Error::InvalidInput(format!("cannot homogenize a degree-{} polynomial to degree {d}", f.deg0())));
    }
    let terms = f.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, &c)| (i, d - i, c));
    Ok(BiPoly::from_terms(f.field(), terms))
}

/// Parses a univariate polynomial in `x`.
pub fn parse_uni(field: &Field, src: &str) -> Result<UniPoly> {
    let terms = text::parse_terms(field, src, &["x"])?;
    let deg = terms.keys().map(|m| m[0] as usize).max().unwrap_or(0);
    let mut coeffs = vec![Elem::ZERO; deg + 1];
    for (m, c) in terms {
        coeffs[m[0] as usize] = c;
    }
    Ok(UniPoly::new(field, coeffs))
}

/// Parses a bivariate polynomial in `x` and `y`.
pub fn parse_bi(field: &Field, src: &str) -> Result<BiPoly> {
    let terms = text::parse_terms(field, src, &["x", "y"])?;
    Ok(BiPoly::from_terms(field, terms.into_iter().map(|(m, c)| (m[0] as usize, m[1] as usize, c))))
}
