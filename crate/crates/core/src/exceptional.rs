//! Permutation and exceptionality tests, the exhaustive scan checking that
//! exceptional degrees are coprime to `q - 1`, and the end-to-end curve
//! pipeline for a single exceptional polynomial.

use num_integer::Integer;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bifactor::{bi_factor, is_abs_irreducible, SplitWitness, Verdict};
use crate::counting::{defect_sequence, growth_report, CountOptions, CountTable, GrowthReport, DEFAULT_COUNT_CAP};
use crate::curves::{construct_auxiliary_curve, CurveSearchTrace, PlaneCurve, SearchOptions};
use crate::error::{Error, Result};
use crate::field::{embed, Elem, Field};
use crate::poly::{diff_quotient, pth_power_test, BiPoly, UniPoly, DEFAULT_SEED};

/// Default number of extension levels recorded per report.
pub const DEFAULT_PERMUTATION_LEVELS: u32 = 6;
/// Default ceiling on candidates per scan.
pub const DEFAULT_SCAN_BUDGET: u64 = 5_000_000;
/// Default number of prefilter-rejected candidates re-checked per scan cell.
pub const DEFAULT_AUDIT_SAMPLES: usize = 8;

/// Whether `x -> f(x)` is a bijection on `ctx`, which must contain `f`'s field.
pub fn is_permutation(f: &UniPoly, ctx: &Field) -> Result<bool> {
    let emb = embed(f.field(), ctx)?;
    let fe = f.embed(&emb);
    let mut seen = vec![0u64; (ctx.order() as usize).div_ceil(64)];
    for x in ctx.elements() {
        let v = fe.eval(x).0 as usize;
        let (w, b) = (v / 64, 1u64 << (v % 64));
        if seen[w] & b != 0 {
            return Ok(false);
        }
        seen[w] |= b;
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum NormalizationNote {
    /// `f = g^p` replaced by `g`.
    PthRoot,
    /// The constant term was subtracted.
    ConstantShift { value: String },
    /// Divided by the leading coefficient.
    MonicScaling { value: String },
}

/// Strips `p`-th powers and the constant term. Exceptionality is unchanged by
/// both steps.
pub fn normalize(f: &UniPoly) -> Result<(UniPoly, Vec<NormalizationNote>)> {
    if f.degree().unwrap_or(0) < 1 {
        return Err(Error::InvalidInput(format!("normalization needs degree at least 1, got {}", f.render("x"))));
    }
    let mut notes = Vec::new();
    let mut g = f.clone();
    while let Some(root) = pth_power_test(&g) {
        g = root;
        notes.push(NormalizationNote::PthRoot);
    }
    let c = g.coeff(0);
    if !c.is_zero() {
        g = &g - &UniPoly::constant(g.field(), c);
        notes.push(NormalizationNote::ConstantShift { value: crate::poly::text::render_coeff(g.field(), c) });
    }
    Ok((g, notes))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CohenVerdict {
    Exceptional,
    NotExceptional,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorEvidence {
    pub factor: BiPoly,
    pub multiplicity: u32,
    pub verdict: Verdict,
    /// Least prime-degree extension where the factor splits, with the
    /// factorization found there.
    pub witness: Option<SplitWitness>,
    pub diagonal: bool,
}

impl FactorEvidence {
    pub fn split_degree(&self) -> Option<u32> {
        self.witness.as_ref().map(|w| w.degree)
    }
}

fn is_diagonal(h: &BiPoly) -> bool {
    let f = h.field();
    *h == &BiPoly::x(f) - &BiPoly::y(f)
}

/// Whether a factor `x - y` of the difference quotient rules out
/// exceptionality. Isolated so the multiplicity rule can be changed in one
/// place.
pub fn diagonal_disqualifies(factor: &BiPoly, _multiplicity: u32) -> bool {
    is_diagonal(factor)
}

/// Cohen classification of an already normalized `f`. With `short_circuit`
/// the evidence stops at the first absolutely irreducible factor.
fn classify(f: &UniPoly, short_circuit: bool) -> Result<(CohenVerdict, BiPoly, Vec<FactorEvidence>)> {
    let phi = diff_quotient(f)?;
    let fac = bi_factor(&phi)?;
    let mut evidence = Vec::new();
    let mut verdict = CohenVerdict::Exceptional;
    for (h, m) in fac.factors {
        let diagonal = is_diagonal(&h);
        let (v, witness) = if diagonal {
            (Verdict::AbsolutelyIrreducible, None)
        } else {
            let r = is_abs_irreducible(&h)?;
            (r.verdict, r.witness)
        };
        let disqualifies = if diagonal { diagonal_disqualifies(&h, m) } else { v == Verdict::AbsolutelyIrreducible };
        evidence.push(FactorEvidence { factor: h, multiplicity: m, verdict: v, witness, diagonal });
        if disqualifies {
            verdict = CohenVerdict::NotExceptional;
            if short_circuit {
                break;
            }
        }
    }
    Ok((verdict, phi, evidence))
}

/// Cohen verdict alone, after normalization.
pub fn cohen_verdict(f: &UniPoly) -> Result<CohenVerdict> {
    let (g, _) = normalize(f)?;
    Ok(classify(&g, true)?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LevelVerdict {
    pub n: u32,
    /// `None` when `q^n` is above the level cap.
    pub permutes: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalityReport {
    pub f: UniPoly,
    pub normalized: UniPoly,
    pub notes: Vec<NormalizationNote>,
    pub phi: BiPoly,
    pub evidence: Vec<FactorEvidence>,
    pub verdict: CohenVerdict,
    pub levels: Vec<LevelVerdict>,
    pub gcd_d_q1: u64,
    /// For an exceptional verdict: whether `f` permutes `F_q` itself.
    pub consistent: Option<bool>,
}

#[derive(Clone, Copy, Debug)]
pub struct CohenOptions {
    pub levels: u32,
    pub level_cap: u64,
}

impl Default for CohenOptions {
    fn default() -> Self {
        CohenOptions { levels: DEFAULT_PERMUTATION_LEVELS, level_cap: DEFAULT_COUNT_CAP }
    }
}

/// Permutation verdicts of `f` over `F_{q^n}` for `n = 1..=levels`.
pub fn permutation_levels(f: &UniPoly, levels: u32, cap: u64) -> Result<Vec<LevelVerdict>> {
    let q = f.field().order() as u64;
    (1..=levels)
        .map(|n| {
            let fits = q.checked_pow(n).is_some_and(|qn| qn <= cap);
            let permutes = if fits { Some(is_permutation(f, &f.field().extension(n)?)?) } else { None };
            Ok(LevelVerdict { n, permutes })
        })
        .collect()
}

/// Full exceptionality report: normalization, factor evidence for the
/// difference quotient, and permutation verdicts at the first levels.
pub fn is_exceptional_cohen(f: &UniPoly, opts: &CohenOptions) -> Result<ExceptionalityReport> {
    let (normalized, notes) = normalize(f)?;
    let (verdict, phi, evidence) = classify(&normalized, false)?;
    let levels = permutation_levels(f, opts.levels, opts.level_cap)?;
    let q = f.field().order() as u64;
    let consistent = (verdict == CohenVerdict::Exceptional).then(|| levels.first().and_then(|l| l.permutes)).flatten();
    Ok(ExceptionalityReport {
        f: f.clone(),
        normalized,
        notes,
        phi,
        evidence,
        verdict,
        levels,
        gcd_d_q1: (f.deg0() as u64).gcd(&(q - 1)),
        consistent,
    })
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Exceptionality of `x^d` over `F_q` from arithmetic alone: with `d'` the
/// prime-to-`p` part of `d`, `x^d` is exceptional iff `gcd(d', q^m - 1) = 1`
/// for some `m` up to the order of `q` modulo `d'`.
pub fn monomial_oracle(d: u64, q: u64) -> bool {
    assert!(d >= 1);
    let (p, _) = crate::field::prime_power(q).expect("q is a prime power");
    let mut dp = d;
    while dp.is_multiple_of(p) {
        dp /= p;
    }
    if dp == 1 {
        return true;
    }
    let mut m = 1;
    loop {
        let r = mod_pow(q, m, dp);
        // gcd(d', q^m - 1) = gcd(d', (q^m - 1) mod d')
        if dp.gcd(&((r + dp - 1) % dp)) == 1 {
            return true;
        }
        if r == 1 || m > dp {
            return false;
        }
        m += 1;
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub budget: u64,
    pub audit_samples: usize,
    pub seed: u64,
    /// Largest non-monic candidate count checked at the smallest field.
    pub non_monic_limit: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: DEFAULT_SCAN_BUDGET,
            audit_samples: DEFAULT_AUDIT_SAMPLES,
            seed: DEFAULT_SEED,
            non_monic_limit: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanFind {
    pub q: u64,
    pub d: u64,
    pub poly: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanCell {
    pub q: u64,
    pub d: u64,
    pub candidates: u64,
    pub permutations: u64,
    pub exceptional: u64,
    pub audited: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonMonicCheck {
    pub q: u64,
    pub d: u64,
    pub tested: u64,
    pub mismatches: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanResult {
    pub q_list: Vec<u64>,
    pub d_list: Vec<u64>,
    pub assumption: &'static str,
    pub total_tested: u64,
    pub cells: Vec<ScanCell>,
    pub exceptional: Vec<ScanFind>,
    pub violations: Vec<ScanFind>,
    /// Prefilter-rejected candidates that the full test calls exceptional.
    pub audit_failures: Vec<ScanFind>,
    pub non_monic: Vec<NonMonicCheck>,
    pub partial: bool,
}

impl ScanResult {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
            && self.audit_failures.is_empty()
            && self.non_monic.iter().all(|c| c.mismatches.is_empty())
    }
}

pub const SCAN_ASSUMPTION: &str =
    "candidates are monic with zero constant term; composing with degree-1 maps preserves exceptionality";

/// Monic degree-`d` polynomial with zero constant term and middle
/// coefficients given by the base-`q` digits of `idx`, lowest degree first.
fn candidate(field: &Field, d: usize, mut idx: u64) -> UniPoly {
    let q = field.order() as u64;
    let mut coeffs = vec![Elem::ZERO; d + 1];
    for c in coeffs.iter_mut().take(d).skip(1) {
        *c = Elem((idx % q) as u32);
        idx /= q;
    }
    coeffs[d] = Elem::ONE;
    UniPoly::new(field, coeffs)
}

fn scan_cell(field: &Field, d: usize, opts: &ScanOptions) -> Result<(ScanCell, Vec<ScanFind>, Vec<ScanFind>)> {
    let q = field.order() as u64;
    let total = q.pow(d as u32 - 1);
    let classes: Vec<(u64, bool, Option<CohenVerdict>)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let f = candidate(field, d, idx);
            let perm = is_permutation(&f, field)?;
            let verdict = if perm { Some(cohen_verdict(&f)?) } else { None };
            Ok((idx, perm, verdict))
        })
        .collect::<Result<_>>()?;
    let mut finds = Vec::new();
    let mut rejected = Vec::new();
    let mut perms = 0;
    for &(idx, perm, verdict) in &classes {
        if perm {
            perms += 1;
        } else {
            rejected.push(idx);
        }
        if verdict == Some(CohenVerdict::Exceptional) {
            finds.push(ScanFind { q, d: d as u64, poly: candidate(field, d, idx).render("x") });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (q << 32) ^ d as u64);
    let picks: Vec<u64> = if rejected.len() <= opts.audit_samples {
        rejected.clone()
    } else {
        let mut v: Vec<u64> =
            sample(&mut rng, rejected.len(), opts.audit_samples).into_iter().map(|i| rejected[i]).collect();
        v.sort_unstable();
        v
    };
    let mut audit_failures = Vec::new();
    for &idx in &picks {
        let f = candidate(field, d, idx);
        if cohen_verdict(&f)? == CohenVerdict::Exceptional {
            audit_failures.push(ScanFind { q, d: d as u64, poly: f.render("x") });
        }
    }
    let cell = ScanCell {
        q,
        d: d as u64,
        candidates: total,
        permutations: perms,
        exceptional: finds.len() as u64,
        audited: picks.len() as u64,
    };
    Ok((cell, finds, audit_failures))
}

/// Every polynomial of degree `d` over `F_q` against its monic, zero-constant
/// normalization.
fn non_monic_check(field: &Field, d: usize) -> Result<NonMonicCheck> {
    let q = field.order() as u64;
    let total = (q - 1) * q.pow(d as u32);
    let mismatches: Vec<Option<String>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut coeffs = vec![Elem::ZERO; d + 1];
            for c in coeffs.iter_mut().take(d) {
                *c = Elem((idx % q) as u32);
                idx /= q;
            }
            coeffs[d] = Elem(idx as u32 + 1);
            let f = UniPoly::new(field, coeffs);
            let g = f.monic();
            let g = &g - &UniPoly::constant(field, g.coeff(0));
            let same = cohen_verdict(&f)? == cohen_verdict(&g)?;
            Ok((!same).then(|| f.render("x")))
        })
        .collect::<Result<_>>()?;
    Ok(NonMonicCheck { q, d: d as u64, tested: total, mismatches: mismatches.into_iter().flatten().collect() })
}

/// Exhaustive scan of monic, zero-constant polynomials of each degree in
/// `d_list` over each `F_q` in `q_list`.
pub fn carlitz_wan_scan(q_list: &[u64], d_list: &[u64], opts: &ScanOptions) -> Result<ScanResult> {
    if q_list.is_empty() || d_list.is_empty() {
        return Err(Error::InvalidInput("scan needs at least one q and one d".into()));
    }
    if let Some(&d) = d_list.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidInput(format!("scan degrees start at 2, got {d}")));
    }
    let fields: Vec<Field> = q_list.iter().map(|&q| Field::with_order(q)).collect::<Result<_>>()?;
    let mut result = ScanResult {
        q_list: q_list.to_vec(),
        d_list: d_list.to_vec(),
        assumption: SCAN_ASSUMPTION,
        total_tested: 0,
        cells: Vec::new(),
        exceptional: Vec::new(),
        violations: Vec::new(),
        audit_failures: Vec::new(),
        non_monic: Vec::new(),
        partial: false,
    };
    'cells: for field in &fields {
        let q = field.order() as u64;
        for &d in d_list {
            let size = q.checked_pow(d as u32 - 1).unwrap_or(u64::MAX);
            if result.total_tested.saturating_add(size) > opts.budget {
                result.partial = true;
                break 'cells;
            }
            let (cell, finds, audit) = scan_cell(field, d as usize, opts)?;
            result.total_tested += cell.candidates;
            for find in finds {
                if find.d.gcd(&(q - 1)) != 1 {
                    result.violations.push(find.clone());
                }
                result.exceptional.push(find);
            }
            result.audit_failures.extend(audit);
            result.cells.push(cell);
        }
    }
    let small = fields.iter().min_by_key(|f| f.order()).unwrap();
    let mut ds = d_list.to_vec();
    ds.sort_unstable();
    ds.dedup();
    for d in ds {
        let q = small.order() as u64;
        if (q - 1).saturating_mul(q.saturating_pow(d as u32)) > opts.non_monic_limit {
            break;
        }
        result.non_monic.push(non_monic_check(small, d as usize)?);
    }
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCheck {
    pub n: u32,
    pub q_n: u64,
    pub permutes: bool,
    pub affine: u64,
    pub infinity: u64,
    pub defect: i64,
    pub gcd_d_qn1: u64,
    /// `#X0 = q^n`, `#X1 = gcd(d, q^n - 1)` and `|A| = #X1 - 1 <= d - 1`;
    /// `None` at non-permuting levels, where nothing is asserted.
    pub identities_hold: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineReport {
    pub exceptionality: ExceptionalityReport,
    pub curve_poly: UniPoly,
    pub monic_note: Option<NormalizationNote>,
    pub curve: PlaneCurve,
    pub trace: CurveSearchTrace,
    pub table: CountTable,
    pub levels: Vec<LevelCheck>,
    pub growth: GrowthReport,
}

impl PipelineReport {
    pub fn identities_hold(&self) -> bool {
        self.levels.iter().all(|l| l.identities_hold != Some(false))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PipelineOptions {
    pub cohen: CohenOptions,
    pub search: SearchOptions,
    pub count: CountOptions,
}

/// Normalizes an exceptional `f`, builds its smooth auxiliary curve, counts
/// it to `n_max` and checks the count identities at every permuting level.
pub fn run_pipeline(f: &UniPoly, n_max: u32, opts: &PipelineOptions) -> Result<PipelineReport> {
    if f.degree().unwrap_or(0) < 2 {
        return Err(Error::InvalidInput(format!("pipeline needs degree at least 2, got {}", f.render("x"))));
    }
    let rep = is_exceptional_cohen(f, &opts.cohen)?;
    if rep.verdict != CohenVerdict::Exceptional {
        return Err(Error::InvalidInput(format!(
            "{} is not exceptional over {}; the pipeline runs on exceptional polynomials only",
            f.render("x"),
            f.field()
        )));
    }
    let mut g = rep.normalized.clone();
    if g.deg0() < 2 {
        return Err(Error::InvalidInput(format!(
            "{} normalizes to degree {}; the curve needs degree at least 2",
            f.render("x"),
            g.deg0()
        )));
    }
    let monic_note = (!g.is_monic())
        .then(|| NormalizationNote::MonicScaling { value: crate::poly::text::render_coeff(g.field(), g.lc()) });
    g = g.monic();
    let (curve, trace) = construct_auxiliary_curve(&g, opts.search)?;
    let table = defect_sequence(&curve, n_max, true, &opts.count)?;
    let d = g.deg0() as u64;
    let emb = embed(g.field(), curve.field())?;
    let ge = g.embed(&emb);
    let mut levels = Vec::new();
    for row in &table.rows {
        let ext = curve.field().extension(row.n)?;
        let permutes = is_permutation(&ge, &ext)?;
        let gcd = d.gcd(&(row.q_n - 1));
        let (affine, infinity) = (row.affine.unwrap(), row.infinity.unwrap());
        let identities_hold = permutes.then(|| {
            affine == row.q_n
                && infinity == gcd
                && row.defect.unsigned_abs() == infinity - 1
                && row.defect.unsigned_abs() < d
        });
        levels.push(LevelCheck {
            n: row.n,
            q_n: row.q_n,
            permutes,
            affine,
            infinity,
            defect: row.defect,
            gcd_d_qn1: gcd,
            identities_hold,
        });
    }
    let permuting: Vec<u32> = levels.iter().filter(|l| l.permutes).map(|l| l.n).collect();
    let growth = growth_report(&table, Some(&permuting), None, None);
    Ok(PipelineReport { exceptionality: rep, curve_poly: g, monic_note, curve, trace, table, levels, growth })
}
