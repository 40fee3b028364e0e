//! Exact point counts of plane curves over `F_{q^n}`, the defect sequence
//! `A(n) = q^n + 1 - N_n`, Hasse-Weil comparisons and the growth report.

use num_integer::Roots;
use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{points_at_infinity, PlaneCurve};
use crate::error::{Error, Result};
use crate::field::{embed, Elem, Field};
use crate::poly::{count_roots_with_threshold, BiPoly, UniPoly, DEFAULT_ROOT_SCAN_THRESHOLD};

/// Default ceiling on `q^n` for a single counting level.
pub const DEFAULT_COUNT_CAP: u64 = 1 << 20;

const CHUNK: usize = 1 << 10;

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    pub level_cap: u64,
    pub parallel: bool,
    pub root_scan_threshold: u32,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { level_cap: DEFAULT_COUNT_CAP, parallel: true, root_scan_threshold: DEFAULT_ROOT_SCAN_THRESHOLD }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PointCount {
    pub n: u32,
    pub q_n: u64,
    pub total: u64,
    /// Points with `z != 0`.
    pub affine: u64,
    /// Points with `z = 0`.
    pub infinity: u64,
}

/// `F_{q^n}` over the curve's field, checked against the level cap.
pub fn level_field(c: &PlaneCurve, n: u32, cap: u64) -> Result<Field> {
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    let q = c.field().order() as u64;
    match q.checked_pow(n) {
        Some(qn) if qn <= cap => {}
        _ => return Err(Error::CapExceeded(format!("counting over F_{q}^{n} exceeds the level cap {cap}"))),
    }
    c.field().extension(n).map_err(|e| match e {
        Error::FieldTooLarge { .. } => Error::CapExceeded(format!("F_{q}^{n} exceeds the field cap")),
        other => other,
    })
}

/// `g = P(x) + Q(y)` when `g` has no mixed terms.
fn separable_parts(g: &BiPoly) -> Option<(UniPoly, UniPoly)> {
    let f = g.field();
    let mut p = Vec::new();
    let mut q = Vec::new();
    for (i, j, c) in g.terms() {
        match (i, j) {
            (_, 0) => p.push((i, c)),
            (0, _) => q.push((j, c)),
            _ => return None,
        }
    }
    let build = |terms: Vec<(usize, Elem)>| {
        let deg = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut v = vec![Elem::ZERO; deg + 1];
        for (e, c) in terms {
            v[e] = c;
        }
        UniPoly::new(f, v)
    };
    Some((build(p), build(q)))
}

fn fiber_count(g: &BiPoly, x: Elem, threshold: u32) -> u64 {
    let fiber = g.eval_x(x);
    if fiber.is_zero() {
        g.field().order() as u64
    } else {
        count_roots_with_threshold(&fiber, threshold).unwrap() as u64
    }
}

/// Affine zeros of `g` over its own field, one fiber per `x`.
pub fn affine_count_fibers(g: &BiPoly, parallel: bool, threshold: u32) -> u64 {
    let xs: Vec<Elem> = g.field().elements().collect();
    if parallel {
        xs.par_chunks(CHUNK).map(|chunk| chunk.iter().map(|&x| fiber_count(g, x, threshold)).sum::<u64>()).sum()
    } else {
        xs.iter().map(|&x| fiber_count(g, x, threshold)).sum()
    }
}

/// Affine zeros of `P(x) + Q(y)` by matching value histograms.
pub fn affine_count_separable(p: &UniPoly, q: &UniPoly) -> u64 {
    let f = p.field();
    let mut hist = vec![0u64; f.order() as usize];
    for x in f.elements() {
        hist[p.eval(x).0 as usize] += 1;
    }
    f.elements().map(|y| hist[f.neg(q.eval(y)).0 as usize]).sum()
}

/// Affine zeros of `g`, using the histogram path when `g` has no mixed terms.
pub fn affine_count(g: &BiPoly, opts: &CountOptions) -> u64 {
    match separable_parts(g) {
        Some((p, q)) => affine_count_separable(&p, &q),
        None => affine_count_fibers(g, opts.parallel, opts.root_scan_threshold),
    }
}

/// Exact `#C(F_{q^n})`, split into `z != 0` and `z = 0`.
pub fn count_points(c: &PlaneCurve, n: u32, opts: &CountOptions) -> Result<PointCount> {
    let ext = level_field(c, n, opts.level_cap)?;
    let emb = embed(c.field(), &ext)?;
    let g = c.affine().embed(&emb);
    let affine = affine_count(&g, opts);
    let infinity = points_at_infinity(c, &ext)?.len() as u64;
    Ok(PointCount { n, q_n: ext.order() as u64, total: affine + infinity, affine, infinity })
}

/// One of the three standard affine charts `{x != 0}`, `{y != 0}`, `{z != 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    X,
    Y,
    Z,
}

impl Chart {
    fn index(self) -> usize {
        match self {
            Chart::X => 0,
            Chart::Y => 1,
            Chart::Z => 2,
        }
    }

    /// The two free coordinates, in order.
    fn free(self) -> [usize; 2] {
        match self {
            Chart::X => [1, 2],
            Chart::Y => [0, 2],
            Chart::Z => [0, 1],
        }
    }
}

fn chart_poly(terms: &[(usize, usize, usize, Elem)], field: &Field, chart: Chart) -> BiPoly {
    let [u, v] = chart.free();
    BiPoly::from_terms(
        field,
        terms.iter().map(|&(i, j, k, c)| {
            let e = [i, j, k];
            (e[u], e[v], c)
        }),
    )
}

/// Points of the chart polynomial `h(u, v)` with the coordinate `which` set
/// to zero.
fn count_on_axis(h: &BiPoly, which: usize) -> u64 {
    let line = if which == 0 { h.eval_x(Elem::ZERO) } else { h.eval_y(Elem::ZERO) };
    if line.is_zero() {
        h.field().order() as u64
    } else {
        count_roots_with_threshold(&line, DEFAULT_ROOT_SCAN_THRESHOLD).unwrap() as u64
    }
}

struct Charts {
    polys: [BiPoly; 3],
    field: Field,
}

impl Charts {
    fn new(c: &PlaneCurve, ext: &Field) -> Result<Charts> {
        let emb = embed(c.field(), ext)?;
        let terms: Vec<_> = c.terms().into_iter().map(|(i, j, k, e)| (i, j, k, emb.apply(e))).collect();
        Ok(Charts { polys: [Chart::X, Chart::Y, Chart::Z].map(|ch| chart_poly(&terms, ext, ch)), field: ext.clone() })
    }

    fn full(&self, ch: Chart) -> u64 {
        affine_count_fibers(&self.polys[ch.index()], false, DEFAULT_ROOT_SCAN_THRESHOLD)
    }

    /// Points of chart `ch` whose coordinate `coord` vanishes.
    fn with_zero(&self, ch: Chart, coord: Chart) -> u64 {
        let pos = ch.free().iter().position(|&c| c == coord.index()).unwrap();
        count_on_axis(&self.polys[ch.index()], pos)
    }

    /// Whether the coordinate point `e_ch` lies on the curve.
    fn vertex(&self, ch: Chart) -> u64 {
        self.polys[ch.index()].eval(Elem::ZERO, Elem::ZERO).is_zero() as u64
    }
}

/// `#C(F_{q^n})` as `U_1 + (U_2 \ U_1) + (U_3 \ (U_1 u U_2))` for the given
/// chart order.
pub fn count_points_by_charts(c: &PlaneCurve, n: u32, order: [Chart; 3], cap: u64) -> Result<u64> {
    let ext = level_field(c, n, cap)?;
    let ch = Charts::new(c, &ext)?;
    let [c1, c2, c3] = order;
    Ok(ch.full(c1) + ch.with_zero(c2, c1) + ch.vertex(c3))
}

/// `#C(F_{q^n})` by inclusion-exclusion over the three charts.
pub fn count_points_inclusion_exclusion(c: &PlaneCurve, n: u32, cap: u64) -> Result<u64> {
    let ext = level_field(c, n, cap)?;
    let ch = Charts::new(c, &ext)?;
    debug_assert_eq!(ch.field, ext);
    let all = [Chart::X, Chart::Y, Chart::Z];
    let singles: i64 = all.iter().map(|&a| ch.full(a) as i64).sum();
    let mut pairs = 0i64;
    for (i, &a) in all.iter().enumerate() {
        for &b in &all[i + 1..] {
            pairs += ch.full(a) as i64 - ch.with_zero(a, b) as i64;
        }
    }
    let z = Chart::Z;
    let triple =
        ch.full(z) as i64 - ch.with_zero(z, Chart::X) as i64 - ch.with_zero(z, Chart::Y) as i64 + ch.vertex(z) as i64;
    Ok((singles - pairs + triple) as u64)
}

/// `floor(2 g q^(n/2))`, computed as `isqrt(4 g^2 q^n)`.
pub fn hasse_weil_ceiling(genus: u64, q_n: u64) -> u64 {
    let v = 4u128 * (genus as u128).pow(2) * q_n as u128;
    v.sqrt() as u64
}

/// `|A|^2 <= 4 g^2 q^n` in exact integers.
pub fn hasse_weil_holds(defect: i64, genus: u64, q_n: u64) -> bool {
    (defect.unsigned_abs() as u128).pow(2) <= 4 * (genus as u128).pow(2) * q_n as u128
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub n: u32,
    pub q_n: u64,
    #[serde(rename = "N")]
    pub points: u64,
    /// `q^n + 1 - N_n`.
    #[serde(rename = "A")]
    pub defect: i64,
    #[serde(rename = "X0")]
    pub affine: Option<u64>,
    #[serde(rename = "X1")]
    pub infinity: Option<u64>,
    pub hw_bound: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub curve: PlaneCurve,
    pub split: bool,
    pub rows: Vec<CountRow>,
}

impl CountTable {
    pub fn genus(&self) -> Option<u64> {
        self.curve.genus()
    }

    /// `N_1, N_2, ...` in level order.
    pub fn counts(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.points).collect()
    }

    /// Levels where the Hasse-Weil inequality fails; empty for singular curves.
    pub fn hasse_weil_violations(&self) -> Vec<u32> {
        let Some(g) = self.genus() else { return Vec::new() };
        self.rows.iter().filter(|r| !hasse_weil_holds(r.defect, g, r.q_n)).map(|r| r.n).collect()
    }
}

/// Counts for `n = 1..=n_max`. `split` records the affine and infinity parts.
pub fn defect_sequence(c: &PlaneCurve, n_max: u32, split: bool, opts: &CountOptions) -> Result<CountTable> {
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let pc = count_points(c, n, opts)?;
        rows.push(CountRow {
            n,
            q_n: pc.q_n,
            points: pc.total,
            defect: pc.q_n as i64 + 1 - pc.total as i64,
            affine: split.then_some(pc.affine),
            infinity: split.then_some(pc.infinity),
            hw_bound: c.genus().map(|g| hasse_weil_ceiling(g, pc.q_n)),
        });
    }
    Ok(CountTable { curve: c.clone(), split, rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthPattern {
    IdenticallyZeroInRange,
    ZeroAtAllPermutingLevels,
    NonzeroStrictlyIncreasing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub n: u32,
    pub defect: i64,
    pub zero: bool,
    pub hw_ceiling: Option<u64>,
    /// Least nonzero `|A(m)|` over `m >= n` in range.
    pub trailing_min_nonzero: Option<u64>,
}

pub const ASYMPTOTIC_NOTE: &str =
    "asymptotic growth of nonzero |A(n)| is not verifiable at finite range; rows are illustration only";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub n_max: u32,
    pub genus: Option<u64>,
    pub rows: Vec<GrowthRow>,
    pub patterns: Vec<GrowthPattern>,
    pub permuting_levels: Option<Vec<u32>>,
    /// Report parameters only: a threshold for `|A(n)|` and a starting level.
    pub threshold_m: Option<u64>,
    pub threshold_n: Option<u32>,
    pub note: &'static str,
}

/// Tabulates the defects of `table`. `permuting_levels`, when given, are the
/// levels at which the underlying polynomial permutes the field.
pub fn growth_report(
    table: &CountTable,
    permuting_levels: Option<&[u32]>,
    threshold_m: Option<u64>,
    threshold_n: Option<u32>,
) -> GrowthReport {
    let genus = table.genus();
    let mut rows: Vec<GrowthRow> = table
        .rows
        .iter()
        .map(|r| GrowthRow {
            n: r.n,
            defect: r.defect,
            zero: r.defect == 0,
            hw_ceiling: genus.map(|g| hasse_weil_ceiling(g, r.q_n)),
            trailing_min_nonzero: None,
        })
        .collect();
    let mut best: Option<u64> = None;
    for row in rows.iter_mut().rev() {
        if row.defect != 0 {
            let a = row.defect.unsigned_abs();
            best = Some(best.map_or(a, |b| b.min(a)));
        }
        row.trailing_min_nonzero = best;
    }
    let mut patterns = Vec::new();
    if !rows.is_empty() && rows.iter().all(|r| r.zero) {
        patterns.push(GrowthPattern::IdenticallyZeroInRange);
    }
    if let Some(levels) = permuting_levels {
        if !levels.is_empty() && levels.iter().all(|&n| rows.iter().any(|r| r.n == n && r.zero)) {
            patterns.push(GrowthPattern::ZeroAtAllPermutingLevels);
        }
    }
    let nonzero: Vec<u64> = rows.iter().filter(|r| !r.zero).map(|r| r.defect.unsigned_abs()).collect();
    if nonzero.len() >= 2 && nonzero.windows(2).all(|w| w[0] < w[1]) {
        patterns.push(GrowthPattern::NonzeroStrictlyIncreasing);
    }
    GrowthReport {
        n_max: table.rows.last().map_or(0, |r| r.n),
        genus,
        rows,
        patterns,
        permuting_levels: permuting_levels.map(<[u32]>::to_vec),
        threshold_m,
        threshold_n,
        note: ASYMPTOTIC_NOTE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    fn curve(p: u64, k: u32, s: &str) -> PlaneCurve {
        PlaneCurve::parse(&gf(p, k), s).unwrap()
    }

    /// Independent projective count: every normalized triple over the field.
    fn brute_count(c: &PlaneCurve, n: u32) -> u64 {
        let ext = c.field().extension(n).unwrap();
        let emb = embed(c.field(), &ext).unwrap();
        let terms: Vec<_> = c.terms().into_iter().map(|(i, j, k, e)| (i, j, k, emb.apply(e))).collect();
        let eval = |x: Elem, y: Elem, z: Elem| {
            terms.iter().fold(Elem::ZERO, |acc, &(i, j, k, e)| {
                let m = ext.mul(ext.mul(ext.pow(x, i as u64), ext.pow(y, j as u64)), ext.pow(z, k as u64));
                ext.add(acc, ext.mul(e, m))
            })
        };
        let mut count = 0;
        for x in ext.elements() {
            for y in ext.elements() {
                count += eval(x, y, Elem::ONE).is_zero() as u64;
            }
            count += eval(x, Elem::ONE, Elem::ZERO).is_zero() as u64;
        }
        count + eval(Elem::ONE, Elem::ZERO, Elem::ZERO).is_zero() as u64
    }

    #[test]
    fn fermat_cubic_over_f4() {
        let c = curve(2, 2, "x^3 + y^3 + z^3");
        let opts = CountOptions::default();
        assert_eq!(count_points(&c, 1, &opts).unwrap().total, 9);
        let t = defect_sequence(&c, 2, false, &opts).unwrap();
        assert_eq!(t.rows[0].defect, -4);
        assert_eq!(t.rows[1].points, brute_count(&c, 2));
        assert_eq!(t.rows[1].defect, 17 - brute_count(&c, 2) as i64);
        assert_eq!(t.rows[0].hw_bound, Some(4));
    }

    #[test]
    fn lines_and_conics() {
        for (p, k) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1)] {
            let line = curve(p, k, "x - y");
            let q = line.field().order() as u64;
            assert_eq!(count_points(&line, 1, &CountOptions::default()).unwrap().total, q + 1);
        }
        let conic = curve(3, 1, "x^2 + y*z");
        let t = defect_sequence(&conic, 5, false, &CountOptions::default()).unwrap();
        assert!(t.rows.iter().all(|r| r.defect == 0));
        let rep = growth_report(&t, None, None, None);
        assert_eq!(rep.patterns, vec![GrowthPattern::IdenticallyZeroInRange]);
    }

    #[test]
    fn counts_match_brute_force() {
        let corpus = [
            (2u64, 1u32, "x^3 + y^3 + z^3", 4u32),
            (2, 2, "x^3 + y^3 + z^3", 2),
            (3, 1, "x^4 + y^4 + z^4", 3),
            (2, 1, "x^3*y + y^3*z + z^3*x", 4),
            (5, 1, "y^2*z - x^3 - x^2*z", 2),
            (7, 1, "x*y*z", 1),
            (3, 1, "x^2 + y*z", 3),
        ];
        for (p, k, s, nmax) in corpus {
            let c = curve(p, k, s);
            for n in 1..=nmax {
                let expected = brute_count(&c, n);
                let pc = count_points(&c, n, &CountOptions::default()).unwrap();
                assert_eq!(pc.total, expected, "{s} over F_{}^{n}", c.field().order());
                assert_eq!(pc.affine + pc.infinity, pc.total);
            }
        }
    }

    #[test]
    fn chart_order_independence() {
        use Chart::*;
        let orders = [[X, Y, Z], [X, Z, Y], [Y, X, Z], [Y, Z, X], [Z, X, Y], [Z, Y, X]];
        for (p, k, s) in [
            (2u64, 2u32, "x^3 + y^3 + z^3"),
            (5, 1, "y^2*z - x^3 - x^2*z"),
            (3, 1, "x*y*z + x^3"),
            (2, 1, "x^3*y + y^3*z + z^3*x"),
        ] {
            let c = curve(p, k, s);
            for n in 1..=2 {
                let main = count_points(&c, n, &CountOptions::default()).unwrap().total;
                assert_eq!(count_points_inclusion_exclusion(&c, n, DEFAULT_COUNT_CAP).unwrap(), main);
                for ord in orders {
                    assert_eq!(count_points_by_charts(&c, n, ord, DEFAULT_COUNT_CAP).unwrap(), main, "{s} {ord:?}");
                }
            }
        }
    }

    #[test]
    fn parallel_serial_and_histogram_agree() {
        for (p, k, s) in
            [(2u64, 2u32, "x^3 + y^3 + z^3"), (3, 2, "x^4 + x*z^3 - y^4 - 2*y^3*z - z^4"), (7, 1, "x^3 + 2*z^3 - y^3")]
        {
            let c = curve(p, k, s);
            let ext = c.field().extension(2).unwrap();
            let g = c.affine().embed(&embed(c.field(), &ext).unwrap());
            let serial = affine_count_fibers(&g, false, 0);
            let parallel = affine_count_fibers(&g, true, u32::MAX);
            let (pp, qq) = separable_parts(&g).unwrap();
            assert_eq!(serial, parallel);
            assert_eq!(serial, affine_count_separable(&pp, &qq));
        }
    }

    #[test]
    fn hasse_weil_integer_bounds() {
        assert_eq!(hasse_weil_ceiling(1, 4), 4);
        assert_eq!(hasse_weil_ceiling(1, 2), 2);
        assert_eq!(hasse_weil_ceiling(3, 3), 10);
        assert!(hasse_weil_holds(-4, 1, 4));
        assert!(!hasse_weil_holds(5, 1, 4));
        assert!(hasse_weil_holds(0, 0, 9));
        assert!(!hasse_weil_holds(1, 0, 9));
        for g in 0..20u64 {
            for qn in 1..2000u64 {
                let c = hasse_weil_ceiling(g, qn);
                assert!(hasse_weil_holds(c as i64, g, qn));
                assert!(!hasse_weil_holds(c as i64 + 1, g, qn));
            }
        }
    }

    #[test]
    fn growth_report_for_fermat_cubic() {
        let c = curve(2, 2, "x^3 + y^3 + z^3");
        let t = defect_sequence(&c, 6, false, &CountOptions::default()).unwrap();
        for r in &t.rows {
            // A(n) = 2 * (-2)^n
            assert_eq!(r.defect, 2 * (-2i64).pow(r.n));
        }
        assert!(t.hasse_weil_violations().is_empty());
        let rep = growth_report(&t, None, Some(3), Some(2));
        assert_eq!(rep.patterns, vec![GrowthPattern::NonzeroStrictlyIncreasing]);
        assert_eq!(rep.rows[0].trailing_min_nonzero, Some(4));
        assert_eq!(rep.note, ASYMPTOTIC_NOTE);
    }

    #[test]
    fn level_cap_is_enforced() {
        let c = curve(2, 2, "x^3 + y^3 + z^3");
        let opts = CountOptions { level_cap: 64, ..CountOptions::default() };
        assert!(count_points(&c, 3, &opts).is_ok());
        assert!(matches!(count_points(&c, 4, &opts), Err(Error::CapExceeded(_))));
    }
}
