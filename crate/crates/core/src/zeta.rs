//! Zeta numerator `P(T) = prod (1 - alpha_i T)` of a smooth plane curve from
//! its point counts, and checks of the Weil structure.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::counting::{count_points, hasse_weil_holds, CountOptions};
use crate::curves::PlaneCurve;
use crate::error::{Error, Result};

/// Relative tolerance on `| |alpha| - sqrt(q) |`.
pub const MODULUS_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilNumber {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    /// Radius of a disc around `(re, im)` guaranteed to contain a root.
    pub error_bound: f64,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaData {
    pub q: u64,
    pub genus: u64,
    /// `P(T) = sum coeffs[k] T^k`, `coeffs[0] = 1`, degree `2g`.
    pub coeffs: Vec<i128>,
    pub weil_numbers: Vec<WeilNumber>,
    /// Functional equation `a_{2g-i} = q^{g-i} a_i` holds exactly.
    pub functional_equation: bool,
    pub max_modulus_deviation: f64,
}

fn overflow() -> Error {
    Error::CapExceeded("zeta coefficients overflow 128-bit integers".into())
}

fn pow_i128(q: u64, e: u32) -> Result<i128> {
    (q as i128).checked_pow(e).ok_or_else(overflow)
}

/// Power sums `S_n = q^n + 1 - N_n`.
fn power_sums(q: u64, counts: &[u64]) -> Result<Vec<i128>> {
    counts.iter().enumerate().map(|(i, &n)| Ok(pow_i128(q, i as u32 + 1)? + 1 - n as i128)).collect()
}

/// `e_1..e_k` from `S_1..S_k` by Newton's identities; errors on a
/// non-integral step.
fn elementary_from_power_sums(s: &[i128]) -> Result<Vec<i128>> {
    let mut e = vec![1i128];
    for k in 1..=s.len() {
        let mut acc = 0i128;
        for i in 1..=k {
            let term = e[k - i].checked_mul(s[i - 1]).ok_or_else(overflow)?;
            acc = if i % 2 == 1 { acc.checked_add(term) } else { acc.checked_sub(term) }.ok_or_else(overflow)?;
        }
        if acc % k as i128 != 0 {
            return Err(Error::Inconsistent(format!("Newton identity at k={k} gives {acc}/{k}, not an integer")));
        }
        e.push(acc / k as i128);
    }
    Ok(e)
}

/// Power sums `S_1..S_n` of the reciprocal roots of `P` with coefficients
/// `a_k = (-1)^k e_k`.
pub fn predicted_power_sums(coeffs: &[i128], n: usize) -> Result<Vec<i128>> {
    let e: Vec<i128> = coeffs.iter().enumerate().map(|(k, &a)| if k % 2 == 0 { a } else { -a }).collect();
    let mut s: Vec<i128> = Vec::with_capacity(n);
    for m in 1..=n {
        let mut acc = 0i128;
        for i in 1..m {
            let ei = e.get(i).copied().unwrap_or(0);
            let term = ei.checked_mul(s[m - i - 1]).ok_or_else(overflow)?;
            acc = if i % 2 == 1 { acc.checked_add(term) } else { acc.checked_sub(term) }.ok_or_else(overflow)?;
        }
        let em = e.get(m).copied().unwrap_or(0);
        let last = em.checked_mul(m as i128).ok_or_else(overflow)?;
        acc = if m % 2 == 1 { acc.checked_add(last) } else { acc.checked_sub(last) }.ok_or_else(overflow)?;
        s.push(acc);
    }
    Ok(s)
}

/// `N_n` predicted by `P(T)` for `n = 1..=count`.
pub fn predicted_counts(z: &ZetaData, count: usize) -> Result<Vec<i128>> {
    let s = predicted_power_sums(&z.coeffs, count)?;
    s.iter().enumerate().map(|(i, &si)| Ok(pow_i128(z.q, i as u32 + 1)? + 1 - si)).collect()
}

fn functional_equation_holds(coeffs: &[i128], q: u64, g: usize) -> Result<bool> {
    for i in 0..=g {
        if coeffs[2 * g - i] != pow_i128(q, (g - i) as u32)?.checked_mul(coeffs[i]).ok_or_else(overflow)? {
            return Ok(false);
        }
    }
    Ok(true)
}

type QPoly = Vec<BigRational>;

fn qtrim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn qrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let mut r = a.clone();
    let mut quot = vec![BigRational::zero(); a.len().saturating_sub(b.len()) + 1];
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let c = r.last().unwrap() / &lb;
        let shift = r.len() - b.len();
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &c * bc;
        }
        quot[shift] = c;
        r = qtrim(r);
    }
    (qtrim(quot), r)
}

fn qgcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = qrem(&a, &b).1;
        a = b;
        b = r;
    }
    let lc = a.last().unwrap().clone();
    a.into_iter().map(|c| c / &lc).collect()
}

fn qderiv(a: &QPoly) -> QPoly {
    qtrim(a.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect())
}

/// Yun's squarefree decomposition over `Q`.
fn squarefree_q(p: &QPoly) -> Vec<(QPoly, u32)> {
    let mut out = Vec::new();
    let dp = qderiv(p);
    let mut a = qgcd(p, &dp);
    let mut b = qrem(p, &a).0;
    let mut c = qrem(&dp, &a).0;
    let mut i = 1;
    loop {
        let db = qderiv(&b);
        let d: QPoly = {
            let len = c.len().max(db.len());
            qtrim(
                (0..len)
                    .map(|k| {
                        c.get(k).cloned().unwrap_or_else(BigRational::zero)
                            - db.get(k).cloned().unwrap_or_else(BigRational::zero)
                    })
                    .collect(),
            )
        };
        if b.len() <= 1 {
            break;
        }
        a = qgcd(&b, &d);
        if a.len() > 1 {
            out.push((a.clone(), i));
        }
        b = qrem(&b, &a).0;
        c = qrem(&d, &a).0;
        i += 1;
    }
    out
}

fn horner(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

/// All roots of a squarefree polynomial by Aberth iteration, each with a
/// disc radius `deg * |p(z)| / |p'(z)|` certified to contain a root.
fn aberth(p: &[Complex64]) -> Vec<(Complex64, f64)> {
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n];
    let monic: Vec<Complex64> = p.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (v, dv) = horner(&monic, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let sum: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * sum);
            z[k] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-16 * radius {
            break;
        }
    }
    z.into_iter()
        .map(|r| {
            let mut r = r;
            for _ in 0..3 {
                let (v, dv) = horner(&monic, r);
                if dv.norm() == 0.0 {
                    break;
                }
                r -= v / dv;
            }
            let (v, dv) = horner(&monic, r);
            let bound = if v.norm() == 0.0 { 0.0 } else { n as f64 * v.norm() / dv.norm() };
            (r, bound)
        })
        .collect()
}

/// The reciprocal roots `alpha_i` of `P(T)`, i.e. the roots of `T^{2g} P(1/T)`.
fn weil_numbers(coeffs: &[i128]) -> Vec<WeilNumber> {
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    let recip: QPoly = coeffs.iter().rev().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
    let mut out = Vec::new();
    for (factor, mult) in squarefree_q(&recip) {
        let cf: Vec<Complex64> = factor.iter().map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)).collect();
        for (r, bound) in aberth(&cf) {
            out.push(WeilNumber { re: r.re, im: r.im, modulus: r.norm(), error_bound: bound, multiplicity: mult });
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

/// Recovers `P(T)` from `N_1..N_g`. Counts past `g` are checked against the
/// recovered polynomial and reported as an inconsistency on mismatch.
pub fn zeta_from_counts(q: u64, genus: u64, counts: &[u64]) -> Result<ZetaData> {
    let g = genus as usize;
    if counts.len() < g {
        return Err(Error::InvalidInput(format!("genus {g} needs counts N_1..N_{g}, got {}", counts.len())));
    }
    let s = power_sums(q, counts)?;
    let e = elementary_from_power_sums(&s[..g])?;
    let mut coeffs = vec![0i128; 2 * g + 1];
    for k in 0..=g {
        coeffs[k] = if k % 2 == 0 { e[k] } else { -e[k] };
    }
    for k in g + 1..=2 * g {
        coeffs[k] = pow_i128(q, (k - g) as u32)?.checked_mul(coeffs[2 * g - k]).ok_or_else(overflow)?;
    }
    if counts.len() > g {
        let predicted = predicted_power_sums(&coeffs, counts.len())?;
        for n in g..counts.len() {
            if predicted[n] != s[n] {
                return Err(Error::Inconsistent(format!(
                    "functional equation predicts N_{} = {}, count is {}",
                    n + 1,
                    pow_i128(q, n as u32 + 1)? + 1 - predicted[n],
                    counts[n]
                )));
            }
        }
    }
    let functional_equation = functional_equation_holds(&coeffs, q, g)?;
    let weil = weil_numbers(&coeffs);
    let sq = (q as f64).sqrt();
    let max_dev = weil.iter().map(|w| (w.modulus - sq).abs()).fold(0.0, f64::max);
    Ok(ZetaData { q, genus, coeffs, weil_numbers: weil, functional_equation, max_modulus_deviation: max_dev })
}

/// Counts `N_1..N_g` of a smooth curve and recovers its zeta numerator.
pub fn zeta_of_curve(c: &PlaneCurve, opts: &CountOptions) -> Result<(ZetaData, Vec<u64>)> {
    let g = c.genus().ok_or_else(|| Error::InvalidInput("zeta numerator needs a curve certified smooth".into()))?;
    let counts: Vec<u64> = (1..=g as u32).map(|n| count_points(c, n, opts).map(|p| p.total)).collect::<Result<_>>()?;
    Ok((zeta_from_counts(c.field().order() as u64, g, &counts)?, counts))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilVerification {
    pub checks: Vec<Check>,
    /// Exact counts `N_1..N_m` used by the checks.
    pub counts: Vec<u64>,
}

impl WeilVerification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `Err` naming the first failed check.
    pub fn ensure(&self) -> Result<()> {
        match self.checks.iter().find(|c| !c.passed) {
            Some(c) => Err(Error::Inconsistent(format!("{} failed: {}", c.name, c.detail))),
            None => Ok(()),
        }
    }
}

/// Runs the four Weil checks on `z` against exact counts of `c` for
/// `n = 1..=min(2g, g + extra)`.
pub fn verify_weil(c: &PlaneCurve, z: &ZetaData, extra: u32, opts: &CountOptions) -> Result<WeilVerification> {
    let g = z.genus as u32;
    let top = (2 * g).min(g + extra).max(1);
    let counts: Vec<u64> = (1..=top).map(|n| count_points(c, n, opts).map(|p| p.total)).collect::<Result<_>>()?;
    verify_weil_counts(z, &counts)
}

/// As [`verify_weil`], with the exact counts `N_1..N_m` supplied.
pub fn verify_weil_counts(z: &ZetaData, counts: &[u64]) -> Result<WeilVerification> {
    let g = z.genus as usize;
    let mut checks = Vec::new();

    let fe = functional_equation_holds(&z.coeffs, z.q, g)?;
    checks.push(Check {
        name: "functional-equation",
        passed: fe && z.coeffs.first() == Some(&1) && z.coeffs.len() == 2 * g + 1,
        detail: format!("a_(2g-i) = q^(g-i) a_i for i = 0..{g}"),
    });

    let sq = (z.q as f64).sqrt();
    let roots: u32 = z.weil_numbers.iter().map(|w| w.multiplicity).sum();
    let dev_ok = z.max_modulus_deviation <= MODULUS_TOLERANCE * sq && roots as usize == 2 * g;
    checks.push(Check {
        name: "weil-moduli",
        passed: dev_ok,
        detail: format!(
            "max | |alpha| - sqrt(q) | = {:.3e}, tolerance {:.3e}",
            z.max_modulus_deviation,
            MODULUS_TOLERANCE * sq
        ),
    });

    let predicted = predicted_counts(z, counts.len())?;
    let mismatches: Vec<String> = (g..counts.len())
        .filter(|&i| predicted[i] != counts[i] as i128)
        .map(|i| format!("n={}: predicted {}, counted {}", i + 1, predicted[i], counts[i]))
        .collect();
    checks.push(Check {
        name: "count-prediction",
        passed: mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            format!("levels {}..={} match", g + 1, counts.len())
        } else {
            mismatches.join("; ")
        },
    });

    let mut hw_fail = Vec::new();
    for (i, &n) in counts.iter().enumerate() {
        let qn = z.q.pow(i as u32 + 1);
        let defect = qn as i64 + 1 - n as i64;
        if !hasse_weil_holds(defect, z.genus, qn) {
            hw_fail.push(format!("n={}: |A|={}", i + 1, defect.abs()));
        }
    }
    checks.push(Check {
        name: "hasse-weil",
        passed: hw_fail.is_empty(),
        detail: if hw_fail.is_empty() {
            format!("|A(n)|^2 <= 4 g^2 q^n for n = 1..={}", counts.len())
        } else {
            hw_fail.join("; ")
        },
    });
    Ok(WeilVerification { checks, counts: counts.to_vec() })
}

/// Largest `| |alpha| - sqrt(q) | / sqrt(q)` over the Weil numbers.
pub fn relative_deviation(z: &ZetaData) -> f64 {
    z.max_modulus_deviation / (z.q as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use proptest::prelude::*;

    fn curve(p: u64, k: u32, s: &str) -> PlaneCurve {
        PlaneCurve::parse(&Field::new(p, k).unwrap(), s).unwrap()
    }

    #[test]
    fn genus_zero_is_trivial() {
        let z = zeta_from_counts(3, 0, &[]).unwrap();
        assert_eq!(z.coeffs, vec![1]);
        assert!(z.weil_numbers.is_empty());
        assert_eq!(predicted_counts(&z, 3).unwrap(), vec![4, 10, 28]);
    }

    #[test]
    fn fermat_cubic_over_f4() {
        let z = zeta_from_counts(4, 1, &[9]).unwrap();
        assert_eq!(z.coeffs, vec![1, 4, 4]);
        assert!(z.functional_equation);
        assert_eq!(z.weil_numbers.len(), 1);
        let w = &z.weil_numbers[0];
        assert_eq!(w.multiplicity, 2);
        assert!((w.re + 2.0).abs() < 1e-12 && w.im.abs() < 1e-12);
        assert_eq!(predicted_counts(&z, 2).unwrap()[1], 9);
        assert!(relative_deviation(&z) <= MODULUS_TOLERANCE);
    }

    #[test]
    fn corrupted_count_is_inconsistent() {
        assert!(matches!(zeta_from_counts(4, 1, &[10, 9]), Err(Error::Inconsistent(_))));
        let bad = zeta_from_counts(4, 1, &[10]).unwrap();
        let v = verify_weil_counts(&bad, &[10, 9]).unwrap();
        assert!(!v.passed());
        assert!(v.ensure().is_err());
        let names: Vec<_> = v.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert!(names.contains(&"count-prediction"));
        assert!(names.contains(&"weil-moduli"));
    }

    #[test]
    fn non_integral_newton_step() {
        // g = 2 over F_2 with N_1 = 3, N_2 = 4: 2 e_2 = e_1 S_1 - S_2 = 0 - 1
        assert!(matches!(zeta_from_counts(2, 2, &[3, 4]), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn smooth_corpus_predictions_match_counts() {
        let corpus = [
            (2u64, 2u32, "x^3 + y^3 + z^3"),
            (2, 1, "x^3 + y^3 + z^3"),
            (3, 1, "y^2*z - x^3 + x*z^2"),
            (2, 1, "x^3*y + y^3*z + z^3*x"),
            (3, 1, "x^4 + y^4 + z^4"),
        ];
        for (p, k, s) in corpus {
            let c = curve(p, k, s);
            let opts = CountOptions::default();
            let (z, _) = zeta_of_curve(&c, &opts).unwrap();
            let g = z.genus as u32;
            let v = verify_weil(&c, &z, g, &opts).unwrap();
            assert!(v.passed(), "{s}: {:?}", v.checks);
            assert_eq!(v.counts.len(), 2 * g as usize);
        }
    }

    /// Newton's identities invert the power-sum map on polynomials built
    /// from the functional equation.
    fn arb_zeta() -> impl Strategy<Value = (u64, Vec<i128>)> {
        (prop::sample::select(vec![2u64, 3, 4, 5]), prop::collection::vec(-6i128..=6, 1..4)).prop_map(|(q, low)| {
            let g = low.len();
            let mut coeffs = vec![1i128];
            coeffs.extend(low);
            for k in g + 1..=2 * g {
                coeffs.push((q as i128).pow((k - g) as u32) * coeffs[2 * g - k]);
            }
            (q, coeffs)
        })
    }

    proptest! {
        #[test]
        fn newton_round_trip((q, coeffs) in arb_zeta()) {
            let g = (coeffs.len() - 1) / 2;
            let s = predicted_power_sums(&coeffs, 2 * g).unwrap();
            let counts: Vec<i128> = s
                .iter()
                .enumerate()
                .map(|(i, &si)| (q as i128).pow(i as u32 + 1) + 1 - si)
                .collect();
            prop_assume!(counts.iter().all(|&c| c >= 0));
            let counts: Vec<u64> = counts.into_iter().map(|c| c as u64).collect();
            let z = zeta_from_counts(q, g as u64, &counts[..g]).unwrap();
            prop_assert_eq!(&z.coeffs, &coeffs);
            prop_assert!(z.functional_equation);
        }
    }
}
