//! Plain-text renderings of report views.

use std::fmt::Write;

use carlitz_core::exceptional::{LevelVerdict, ScanResult};
use carlitz_core::report::{
    AuxiliaryCurveView, CountView, CurveView, ExceptionalView, GrowthView, PermcheckView, PipelineView, ZetaView,
};

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn levels(out: &mut String, levels: &[LevelVerdict]) {
    for l in levels {
        let verdict = match l.permutes {
            Some(true) => "permutes",
            Some(false) => "does not permute",
            None => "beyond level cap",
        };
        writeln!(out, "  n={}: {verdict}", l.n).unwrap();
    }
}

pub fn permcheck(v: &PermcheckView) -> String {
    let mut out = format!("f = {} over GF({})\n", v.poly, v.field);
    levels(&mut out, &v.levels);
    out
}

pub fn exceptional(v: &ExceptionalView) -> String {
    let mut out = String::new();
    writeln!(out, "f = {} over GF({})", v.f, v.field).unwrap();
    writeln!(out, "normalized: {}", v.normalized).unwrap();
    writeln!(out, "phi(x, y) = {}", v.phi).unwrap();
    writeln!(out, "verdict: {:?}", v.verdict).unwrap();
    for e in &v.evidence {
        write!(out, "  factor {} (mult {}): {:?}", e.factor, e.multiplicity, e.verdict).unwrap();
        if let Some(k) = e.split_degree {
            write!(out, " over the degree-{k} extension").unwrap();
        }
        if e.diagonal {
            write!(out, ", diagonal").unwrap();
        }
        out.push('\n');
        if let Some(w) = &e.witness {
            for f in &w.factors {
                writeln!(out, "    over GF({}): {} (mult {})", w.field, f.factor, f.multiplicity).unwrap();
            }
        }
    }
    writeln!(out, "gcd(d, q - 1) = {}", v.gcd_d_q1).unwrap();
    writeln!(out, "permutation levels:").unwrap();
    levels(&mut out, &v.permutation_levels);
    out
}

pub fn curve(v: &CurveView) -> String {
    let mut out = format!("C: {} = 0 over GF({}), degree {}\n", v.curve, v.field, v.degree);
    write!(out, "certificate: {}", v.certificate.status).unwrap();
    if let (Some(w), Some(f)) = (&v.certificate.witness, &v.certificate.witness_field) {
        write!(out, " at {w} over GF({f})").unwrap();
    }
    if let Some(d) = &v.certificate.detail {
        write!(out, " ({d})").unwrap();
    }
    writeln!(out, "\ngenus: {}", opt(v.genus)).unwrap();
    out
}

pub fn auxiliary_curve(v: &AuxiliaryCurveView) -> String {
    let t = &v.trace;
    let mut out = curve(&v.curve);
    writeln!(out, "from f = {} with a = {}, b = {} over GF({})", t.f, t.a, t.b, t.field).unwrap();
    writeln!(out, "forbidden values: [{}]", t.forbidden_values.join(", ")).unwrap();
    writeln!(out, "rejected pairs: {}", t.rejected.len()).unwrap();
    out
}

pub fn count(v: &CountView) -> String {
    let mut out = format!("C: {} = 0 over GF({}), genus {}\n", v.curve, v.field, opt(v.genus));
    writeln!(out, "{:>3} {:>10} {:>10} {:>8} {:>10} {:>4} {:>8}", "n", "q^n", "N", "A", "X0", "X1", "bound").unwrap();
    for r in &v.rows {
        writeln!(
            out,
            "{:>3} {:>10} {:>10} {:>8} {:>10} {:>4} {:>8}",
            r.n,
            r.q_n,
            r.points,
            r.defect,
            opt(r.affine),
            opt(r.infinity),
            opt(r.hw_bound)
        )
        .unwrap();
    }
    out
}

pub fn zeta(v: &ZetaView) -> String {
    let mut out = format!("C: {} = 0 over GF({}), genus {}\n", v.curve, v.field, v.genus);
    writeln!(out, "P(T) = {}", v.p).unwrap();
    for w in &v.weil_numbers {
        writeln!(
            out,
            "  alpha = {:+.9} {:+.9}i  |alpha| = {:.9}  (+/- {:.1e}, mult {})",
            w.re, w.im, w.modulus, w.error_bound, w.multiplicity
        )
        .unwrap();
    }
    if let Some(ver) = &v.verification {
        for c in &ver.checks {
            writeln!(out, "  {}: {} ({})", c.name, if c.passed { "ok" } else { "FAILED" }, c.detail).unwrap();
        }
    }
    out
}

pub fn growth(v: &GrowthView) -> String {
    let r = &v.report;
    let mut out = format!("C: {} = 0 over GF({}), genus {}\n", v.curve, v.field, opt(r.genus));
    for row in &r.rows {
        writeln!(out, "{:>3} {:>8} {:>8} {:>8}", row.n, row.defect, opt(row.hw_ceiling), opt(row.trailing_min_nonzero))
            .unwrap();
    }
    writeln!(out, "patterns: {:?}", r.patterns).unwrap();
    writeln!(out, "{}", r.note).unwrap();
    out
}

pub fn growth_csv(v: &GrowthView) -> String {
    let mut out = String::from("n,A,zero,hw_ceiling,trailing_min_nonzero\n");
    for r in &v.report.rows {
        let o = |x: Option<u64>| x.map_or(String::new(), |v| v.to_string());
        writeln!(out, "{},{},{},{},{}", r.n, r.defect, r.zero, o(r.hw_ceiling), o(r.trailing_min_nonzero)).unwrap();
    }
    out
}

pub fn pipeline(v: &PipelineView) -> String {
    let mut out = exceptional(&v.exceptionality);
    writeln!(out, "curve polynomial: {}", v.curve_poly).unwrap();
    out.push_str(&curve(&v.curve));
    out.push_str(&count(&v.counts));
    for l in &v.levels {
        writeln!(
            out,
            "  n={}: permutes={} gcd(d, q^n - 1)={} identities={}",
            l.n,
            l.permutes,
            l.gcd_d_qn1,
            opt(l.identities_hold)
        )
        .unwrap();
    }
    writeln!(out, "identities hold: {}", v.identities_hold).unwrap();
    out
}

pub fn scan(r: &ScanResult) -> String {
    let mut out = format!("q in {:?}, d in {:?}\n{}\n", r.q_list, r.d_list, r.assumption);
    for c in &r.cells {
        writeln!(
            out,
            "  q={:<3} d={:<3} candidates={:<8} permutations={:<6} exceptional={:<5} audited={}",
            c.q, c.d, c.candidates, c.permutations, c.exceptional, c.audited
        )
        .unwrap();
    }
    writeln!(out, "tested: {}", r.total_tested).unwrap();
    writeln!(out, "violations: {}", r.violations.len()).unwrap();
    for v in &r.violations {
        writeln!(out, "  q={} d={}: {}", v.q, v.d, v.poly).unwrap();
    }
    writeln!(out, "audit failures: {}", r.audit_failures.len()).unwrap();
    if r.partial {
        writeln!(out, "PARTIAL: budget exhausted").unwrap();
    }
    out
}
