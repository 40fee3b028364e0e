//! Serializable views of every result type, the versioned JSON envelope, and
//! CSV export for count tables.
//!
//! Field order in every view is fixed by declaration order, so identical
//! inputs serialize to identical bytes.

use serde::Serialize;

use crate::bifactor::Verdict;
use crate::counting::{CountRow, CountTable, GrowthReport};
use crate::curves::{Certificate, CurveSearchTrace, PlaneCurve, RejectedPair};
use crate::error::{Error, Result};
use crate::exceptional::{
    CohenVerdict, ExceptionalityReport, LevelCheck, LevelVerdict, NormalizationNote, PipelineReport, ScanResult,
};
use crate::field::Field;
use crate::poly::text::render_coeff;
use crate::poly::UniPoly;
use crate::zeta::{WeilNumber, WeilVerification, ZetaData};

pub const SCHEMA: &str = "carlitz-lab/1";

pub const CSV_HEADER: &str = "n,q_n,N,A,X0,X1,hw_bound";

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    kind: &'a str,
    seed: u64,
    data: &'a T,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(kind: &str, seed: u64, data: &T) -> Result<String> {
    let env = Envelope { schema: SCHEMA, kind, seed, data };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| Error::InvalidInput(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn opt(v: Option<u64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

pub fn count_table_csv(rows: &[CountRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            r.q_n,
            r.points,
            r.defect,
            opt(r.affine),
            opt(r.infinity),
            opt(r.hw_bound)
        ));
    }
    out
}

/// `1 + 4*T + 4*T^2` style rendering of an integer polynomial in `T`.
pub fn render_int_poly(coeffs: &[i128]) -> String {
    let mut out = String::new();
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mag = c.unsigned_abs();
        let mono = match k {
            0 => String::new(),
            1 => "T".to_string(),
            _ => format!("T^{k}"),
        };
        let body = match (mag, k) {
            (_, 0) => mag.to_string(),
            (1, _) => mono,
            _ => format!("{mag}*{mono}"),
        };
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0 { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PermcheckView {
    pub field: String,
    pub poly: String,
    pub levels: Vec<LevelVerdict>,
}

impl PermcheckView {
    pub fn new(f: &UniPoly, levels: Vec<LevelVerdict>) -> Self {
        PermcheckView { field: f.field().to_string(), poly: f.render("x"), levels }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorView {
    pub factor: String,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessView {
    pub degree: u32,
    pub field: String,
    pub factors: Vec<FactorView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvidenceView {
    pub factor: String,
    pub multiplicity: u32,
    pub verdict: Verdict,
    pub diagonal: bool,
    pub split_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessView>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalView {
    pub field: String,
    pub f: String,
    pub normalized: String,
    pub notes: Vec<NormalizationNote>,
    pub phi: String,
    pub verdict: CohenVerdict,
    pub evidence: Vec<EvidenceView>,
    pub permutation_levels: Vec<LevelVerdict>,
    pub gcd_d_q1: u64,
    pub consistent: Option<bool>,
}

impl ExceptionalView {
    /// `with_witnesses` adds each split factor's factorization over its
    /// splitting extension.
    pub fn new(r: &ExceptionalityReport, with_witnesses: bool) -> Self {
        let xy = ["x", "y"];
        ExceptionalView {
            field: r.f.field().to_string(),
            f: r.f.render("x"),
            normalized: r.normalized.render("x"),
            notes: r.notes.clone(),
            phi: r.phi.render(xy),
            verdict: r.verdict,
            evidence: r
                .evidence
                .iter()
                .map(|e| EvidenceView {
                    factor: e.factor.render(xy),
                    multiplicity: e.multiplicity,
                    verdict: e.verdict,
                    diagonal: e.diagonal,
                    split_degree: e.split_degree(),
                    witness: with_witnesses
                        .then(|| {
                            e.witness.as_ref().map(|w| WitnessView {
                                degree: w.degree,
                                field: w.field.to_string(),
                                factors: w
                                    .factors
                                    .iter()
                                    .map(|(h, m)| FactorView { factor: h.render(xy), multiplicity: *m })
                                    .collect(),
                            })
                        })
                        .flatten(),
                })
                .collect(),
            permutation_levels: r.levels.clone(),
            gcd_d_q1: r.gcd_d_q1,
            consistent: r.consistent,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateView {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveView {
    pub field: String,
    pub curve: String,
    pub degree: usize,
    pub certificate: CertificateView,
    pub genus: Option<u64>,
}

impl CurveView {
    pub fn new(c: &PlaneCurve) -> Self {
        let certificate = match c.certificate() {
            Certificate::Smooth => {
                CertificateView { status: "smooth", witness: None, witness_field: None, detail: None }
            }
            Certificate::Singular { witness, degree } => CertificateView {
                status: "singular",
                witness: witness.as_ref().map(|w| {
                    let f = &w.field;
                    let [x, y, z] = w.coords.map(|e| render_coeff(f, e));
                    format!("({x}:{y}:{z})")
                }),
                witness_field: witness.as_ref().map(|w| w.field.to_string()),
                detail: witness.is_none().then(|| format!("singular point of degree {degree} beyond the field cap")),
            },
            Certificate::Unknown { reason } => {
                CertificateView { status: "unknown", witness: None, witness_field: None, detail: Some(reason.clone()) }
            }
        };
        CurveView { field: c.field().to_string(), curve: c.render(), degree: c.degree(), certificate, genus: c.genus() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceView {
    pub f: String,
    pub field: String,
    pub a: String,
    pub b: String,
    pub x0: Option<String>,
    pub forbidden_values: Vec<String>,
    pub rejected: Vec<RejectedPair>,
}

impl TraceView {
    pub fn new(t: &CurveSearchTrace) -> Self {
        let f = &t.field;
        TraceView {
            f: t.f.render("x"),
            field: f.to_string(),
            a: render_coeff(f, t.a),
            b: render_coeff(f, t.b),
            x0: t.x0.map(|x| render_coeff(f, x)),
            forbidden_values: t.forbidden_values.iter().map(|&v| render_coeff(f, v)).collect(),
            rejected: t.rejected.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuxiliaryCurveView {
    pub curve: CurveView,
    pub trace: TraceView,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountView {
    pub field: String,
    pub curve: String,
    pub genus: Option<u64>,
    pub split: bool,
    pub rows: Vec<CountRow>,
    pub hasse_weil_violations: Vec<u32>,
}

impl CountView {
    pub fn new(t: &CountTable) -> Self {
        CountView {
            field: t.curve.field().to_string(),
            curve: t.curve.render(),
            genus: t.genus(),
            split: t.split,
            rows: t.rows.clone(),
            hasse_weil_violations: t.hasse_weil_violations(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaView {
    pub field: String,
    pub curve: String,
    pub genus: u64,
    pub counts: Vec<u64>,
    pub p_coeffs: Vec<i128>,
    pub p: String,
    pub weil_numbers: Vec<WeilNumber>,
    pub functional_equation: bool,
    pub max_modulus_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<WeilVerification>,
}

impl ZetaView {
    pub fn new(c: &PlaneCurve, z: &ZetaData, counts: &[u64], verification: Option<WeilVerification>) -> Self {
        ZetaView {
            field: c.field().to_string(),
            curve: c.render(),
            genus: z.genus,
            counts: counts.to_vec(),
            p_coeffs: z.coeffs.clone(),
            p: render_int_poly(&z.coeffs),
            weil_numbers: z.weil_numbers.clone(),
            functional_equation: z.functional_equation,
            max_modulus_deviation: z.max_modulus_deviation,
            verification,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthView {
    pub field: String,
    pub curve: String,
    #[serde(flatten)]
    pub report: GrowthReport,
}

impl GrowthView {
    pub fn new(c: &PlaneCurve, r: &GrowthReport) -> Self {
        GrowthView { field: c.field().to_string(), curve: c.render(), report: r.clone() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineView {
    pub exceptionality: ExceptionalView,
    pub curve_poly: String,
    pub monic_note: Option<NormalizationNote>,
    pub curve: CurveView,
    pub trace: TraceView,
    pub counts: CountView,
    pub levels: Vec<LevelCheck>,
    pub identities_hold: bool,
    pub growth: GrowthReport,
}

impl PipelineView {
    pub fn new(p: &PipelineReport) -> Self {
        PipelineView {
            exceptionality: ExceptionalView::new(&p.exceptionality, false),
            curve_poly: p.curve_poly.render("x"),
            monic_note: p.monic_note.clone(),
            curve: CurveView::new(&p.curve),
            trace: TraceView::new(&p.trace),
            counts: CountView::new(&p.table),
            levels: p.levels.clone(),
            identities_hold: p.identities_hold(),
            growth: p.growth.clone(),
        }
    }
}

pub type ScanView = ScanResult;

/// The field a report string names, for round-trip checks.
pub fn parse_field(s: &str) -> Result<Field> {
    Field::from_spec(s)
}
