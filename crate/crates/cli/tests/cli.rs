use std::process::{Command, Output};

use carlitz_core::bifactor::bi_factor;
use carlitz_core::poly::{parse_bi, parse_uni};
use carlitz_core::Field;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_carlitz-lab"));
    for (k, _) in std::env::vars() {
        if k.starts_with("CARLITZ_LAB_") {
            c.env_remove(k);
        }
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn permcheck_cube_over_f2() {
    let out = run(&["permcheck", "--field", "2^1", "--poly", "x^3", "--levels", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["schema"], "carlitz-lab/1");
    assert_eq!(v["kind"], "permcheck");
    let verdicts: Vec<bool> =
        v["data"]["levels"].as_array().unwrap().iter().map(|l| l["permutes"].as_bool().unwrap()).collect();
    assert_eq!(verdicts, [true, false, true]);
}

#[test]
fn scan_small_grid_is_clean() {
    let out = run(&["scan", "--q", "2,3,4,5", "--d", "2..5"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["data"]["violations"], Value::Array(vec![]));
    assert_eq!(v["data"]["audit_failures"], Value::Array(vec![]));
    assert_eq!(v["data"]["partial"], false);
    assert_eq!(v["data"]["cells"].as_array().unwrap().len(), 16);
}

#[test]
fn zeta_of_fermat_cubic_over_f4() {
    let out = run(&["zeta", "--field", "4^1", "--curve", "x^3+y^3+z^3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let coeffs: Vec<i64> = v["data"]["p_coeffs"].as_array().unwrap().iter().map(|c| c.as_i64().unwrap()).collect();
    assert_eq!(coeffs, [1, 4, 4]);
    assert_eq!(v["data"]["p"], "1 + 4*T + 4*T^2");
    assert!(v["data"]["verification"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn count_csv_header_and_rows() {
    let out = run(&["count", "--field", "2", "--curve", "x^3+y^3+z^3", "--nmax", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n,q_n,N,A,X0,X1,hw_bound\n1,2,3,0,2,1,2\n2,4,9,-4,6,3,4\n");
}

#[test]
fn csv_refused_for_non_tabular_reports() {
    let out = run(&["permcheck", "--field", "2", "--poly", "x^3", "--format", "csv"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["permcheck", "--field", "6", "--poly", "x"])), 2);
    assert_eq!(code(&run(&["permcheck", "--field", "2"])), 2);
    let out = run(&["exceptional", "--field", "3", "--poly", "x^3 + 2*x +"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("position 11"), "{err}");
    assert!(err.contains("\n             ^"), "{err}");
    let out = run(&["pipeline", "--field", "3", "--poly", "x^2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn caps_exit_3() {
    let out = run(&["count", "--field", "2", "--curve", "x^3+y^3+z^3", "--nmax", "4", "--level-cap", "8"]);
    assert_eq!(code(&out), 3);
    let out = run(&["scan", "--q", "5", "--d", "5", "--budget", "10"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["data"]["partial"], true);
    let out = bin()
        .args(["count", "--field", "2", "--curve", "x^3+y^3+z^3", "--nmax", "2"])
        .env("CARLITZ_LAB_LEVEL_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
    let out = run(&["permcheck", "--field", "2^5", "--poly", "x^3", "--field-cap", "16"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# cube over F_2\nfield = 2^1\npoly = x^3\nlevels = 2\nseed = 42\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let v = json(&run(&["permcheck", "--config", cfg]));
    assert_eq!(v["seed"], 42);
    assert_eq!(v["data"]["levels"].as_array().unwrap().len(), 2);
    let v = json(&run(&["permcheck", "--config", cfg, "--levels", "4", "--seed", "7"]));
    assert_eq!(v["seed"], 7);
    assert_eq!(v["data"]["levels"].as_array().unwrap().len(), 4);

    let target = dir.path().join("from-config.txt");
    let cfg2 = dir.path().join("out.conf");
    std::fs::write(&cfg2, format!("field = 2\npoly = x^3\nformat = text\noutput = {}\n", target.display())).unwrap();
    let out = run(&["permcheck", "--config", cfg2.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&target).unwrap().starts_with("f = x^3 over GF(2^1)"));
}

#[test]
fn output_is_written_atomically_and_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let args = |p: &str| {
        vec!["pipeline", "--field", "2", "--poly", "x^5", "--nmax", "4", "--seed", "5", "--output"]
            .into_iter()
            .map(String::from)
            .chain([p.to_string()])
            .collect::<Vec<_>>()
    };
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = bin().args(args(p.to_str().unwrap())).output().unwrap();
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["kind"], "pipeline");
    assert_eq!(v["data"]["identities_hold"], true);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn evidence_strings_reparse() {
    let out = run(&["cohen-evidence", "--field", "3", "--poly", "x^3 + x^2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let data = &v["data"];
    assert_eq!(data["verdict"], "not-exceptional");
    let field = Field::from_spec(data["field"].as_str().unwrap()).unwrap();
    let f = parse_uni(&field, data["f"].as_str().unwrap()).unwrap();
    assert_eq!(f.render("x"), "x^3 + x^2");
    let phi = parse_bi(&field, data["phi"].as_str().unwrap()).unwrap();
    let fac = bi_factor(&phi).unwrap();
    let evidence = data["evidence"].as_array().unwrap();
    assert_eq!(evidence.len(), fac.factors.len());
    for e in evidence {
        let h = parse_bi(&field, e["factor"].as_str().unwrap()).unwrap();
        assert!(fac.factors.iter().any(|(g, _)| *g == h));
        if let Some(w) = e.get("witness") {
            let ext = Field::from_spec(w["field"].as_str().unwrap()).unwrap();
            assert_eq!(ext.degree(), field.degree() * e["split_degree"].as_u64().unwrap() as u32);
            for part in w["factors"].as_array().unwrap() {
                parse_bi(&ext, part["factor"].as_str().unwrap()).unwrap();
            }
        }
    }
}

#[test]
fn auxiliary_curve_from_poly() {
    let out = run(&["curve", "--field", "2", "--poly", "x^3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["kind"], "auxiliary-curve");
    assert_eq!(v["data"]["curve"]["curve"], "x^3 + y^3 + z^3");
    assert_eq!(v["data"]["curve"]["certificate"]["status"], "smooth");
    assert_eq!(v["data"]["trace"]["a"], "1");
    assert_eq!(v["data"]["trace"]["b"], "0");
}

#[test]
fn singular_curve_reports_witness() {
    let out = run(&["curve", "--field", "3", "--curve", "x^4 + 2*x^2*z^2 + z^4 - y^2*z^2 + y^4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let cert = &v["data"]["certificate"];
    assert_eq!(cert["status"], "singular");
    assert_eq!(cert["witness_field"], "3^2");
    assert_eq!(v["data"]["genus"], Value::Null);
}

#[test]
fn text_output_is_readable() {
    let out = run(&["growth", "--field", "4", "--curve", "x^3+y^3+z^3", "--nmax", "3", "--format", "text"]);
    assert_eq!(code(&out), 0);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("NonzeroStrictlyIncreasing"), "{s}");
}
