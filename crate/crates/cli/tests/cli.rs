use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn path(rel: &str) -> String {
    root().join(rel).to_string_lossy().into_owned()
}

fn contopo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contopo")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn schema(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(root().join("schemas").join(name)).unwrap()).unwrap()
}

fn assert_valid(schema_name: &str, v: &Value) {
    let s = schema(schema_name);
    let compiled = jsonschema::JSONSchema::compile(&s).unwrap();
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{schema_name}: {msgs:#?}");
}

/// Checks the envelope and, when present, the result against its schema.
fn check(o: &Output, result_schema: &str) -> Value {
    let v = json(o);
    assert_valid("envelope.schema.json", &v);
    assert_eq!(v["exit_code"], code(o));
    if v.get("result").is_some() {
        assert_valid(result_schema, &v["result"]);
    }
    v
}

#[test]
fn audit_exit_codes() {
    let o = contopo(&["audit", "psi-normalizer", "--samples", "1000", "--tol", "1e-9"]);
    assert_eq!(code(&o), 0);
    check(&o, "audit-report.schema.json");
    assert_eq!(code(&contopo(&["audit", "jet-standard"])), 0);
    let o = contopo(&["audit", "neck-involution"]);
    assert_eq!(code(&o), 2);
    let v = check(&o, "audit-report.schema.json");
    assert!(v["result"]["report"]["counterexample"]["point"].is_array());
    assert!(v["result"]["report"]["max_residual"].as_f64().unwrap() > 1e-9);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&contopo(&["audit", "no-such-map"])), 1);
    assert_eq!(code(&contopo(&["audit", "dilation", "--tol", "-1"])), 1);
    assert_eq!(code(&contopo(&["audit", "dilation", "--tol", "0"])), 1);
    assert_eq!(code(&contopo(&["audit", "dilation", "--seed", "-3"])), 1);
    assert_eq!(code(&contopo(&["frobnicate"])), 1);
    assert_eq!(code(&contopo(&["--help"])), 0);
}

#[test]
fn every_audit_runs_and_validates() {
    for name in ["psi-normalizer", "neck-involution", "jet-standard", "sphere-jet", "cotangent-lift", "dilation"] {
        let o = contopo(&["audit", name, "--samples", "50"]);
        let v = check(&o, "audit-report.schema.json");
        assert_eq!(v["result"]["audit"], name);
    }
}

#[test]
fn seed_is_embedded() {
    let o = contopo(&["audit", "dilation", "--samples", "10", "--seed", "18446744073709551615"]);
    assert_eq!(json(&o)["seed"].as_u64(), Some(u64::MAX));
}

#[test]
fn foliation_verdicts_and_exit_codes() {
    let o = contopo(&["foliation", &path("fixtures/round-standard.json")]);
    assert_eq!(code(&o), 0);
    let v = check(&o, "foliation-report.schema.json");
    assert_eq!(v["result"]["verdicts"]["tight"], true);
    assert_eq!(v["result"]["verdicts"]["convex"], true);

    let o = contopo(&["foliation", &path("fixtures/overtwisted-r4.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(check(&o, "foliation-report.schema.json")["result"]["verdicts"]["tight"], false);

    let o = contopo(&["foliation", &path("fixtures/equator-degenerate.json")]);
    assert_eq!(code(&o), 3);
    let v = check(&o, "foliation-report.schema.json");
    assert_eq!(v["result"]["verdicts"]["tight"], "inconclusive");
    assert_eq!(v["result"]["verdicts"]["convex"], false);
}

#[test]
fn foliation_from_surface_and_form() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("surface.json");
    let f = dir.path().join("form.json");
    let t = dir.path().join("transverse.json");
    std::fs::write(&s, r#"{"center": [0, 0, 0], "radius": 1.0}"#).unwrap();
    std::fs::write(&f, r#"{"kind": "standard"}"#).unwrap();
    let fixture: Value = serde_json::from_str(&std::fs::read_to_string(root().join("fixtures/round-standard.json")).unwrap()).unwrap();
    std::fs::write(&t, fixture["transverse"].to_string()).unwrap();
    let o = contopo(&["foliation", "--surface", s.to_str().unwrap(), "--form", f.to_str().unwrap(), "--transverse", t.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = check(&o, "foliation-report.schema.json");
    assert_eq!(v["result"]["verdicts"]["criteria_agree"], true);
}

#[test]
fn malformed_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let o = contopo(&["foliation", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = check(&o, "foliation-report.schema.json");
    assert_eq!(v["error"]["kind"], "schema");
    std::fs::write(&bad, r#"{"name": "x", "surface": {"center": [0, 0, 0], "radius": 1}, "field": {"kind": "nope"}}"#).unwrap();
    assert_eq!(code(&contopo(&["foliation", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&contopo(&["bounds", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&contopo(&["foliation", "/nonexistent/file.json"])), 1);
}

#[test]
fn cover_examples() {
    let o = contopo(&["cover", "--dim", "2", "--scale", "1", "--window", "-6", "6"]);
    assert_eq!(code(&o), 0);
    let v = check(&o, "cover-report.schema.json");
    assert_eq!(v["result"]["min_chebyshev"], "1/2");
    assert_eq!(v["result"]["min_euclidean"], 0.5);

    let o = contopo(&["cover", "--dim", "2", "--window", "-0.5", "0.5"]);
    assert_eq!(code(&o), 1);
    assert_eq!(check(&o, "cover-report.schema.json")["error"]["kind"], "window_too_small");

    let o = contopo(&["cover", "--dim", "3", "--scale", "1/3", "--window", "-1", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(check(&o, "cover-report.schema.json")["result"]["min_chebyshev"], "1/9");
}

#[test]
fn torus_cover_one_torus_and_budget() {
    let o = contopo(&["torus-cover", "--dim", "1", "--charts", &path("fixtures/t1-2charts.json")]);
    assert_eq!(code(&o), 0);
    let v = check(&o, "torus-cover-report.schema.json");
    assert_eq!(v["result"]["families"].as_array().unwrap().len(), 2);
    assert_eq!(v["result"]["coverage"]["fraction"], 1.0);

    // the 4-chart T^2 chain needs ~7e10 cubes
    let o = contopo(&["torus-cover", "--dim", "2", "--charts", &path("fixtures/t2-4charts.json")]);
    assert_eq!(code(&o), 3);
    assert_eq!(check(&o, "torus-cover-report.schema.json")["error"]["kind"], "budget");

    let o = contopo(&["torus-cover", "--dim", "3", "--charts", &path("fixtures/t2-4charts.json")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn bounds_examples() {
    let cases = [("s3-tight", 2, 2), ("torus3", 4, 4), ("s5-overtwisted", 3, 6), ("spherisation-s2", 4, 4)];
    for (name, lo, hi) in cases {
        let o = contopo(&["bounds", &path(&format!("fixtures/bounds/{name}.json"))]);
        assert_eq!(code(&o), 0, "{name}");
        let v = check(&o, "bounds-report.schema.json");
        assert_eq!((v["result"]["C"]["lower"].as_u64(), v["result"]["C"]["upper"].as_u64()), (Some(lo), Some(hi)), "{name}");
        assert!(!v["result"]["C"]["citations"].as_array().unwrap().is_empty());
    }
}

#[test]
fn star_shaped_certificate() {
    let o = contopo(&["star-shaped", &path("fixtures/star-shaped/ball-dilation.json"), "--samples", "16"]);
    assert_eq!(code(&o), 0);
    check(&o, "star-shaped-report.schema.json");
}

#[test]
fn files_are_written_and_inputs_protected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let svg = dir.path().join("portrait.svg");
    let fixture = dir.path().join("fixture.json");
    std::fs::copy(root().join("fixtures/round-standard.json"), &fixture).unwrap();
    let before = std::fs::read(&fixture).unwrap();

    let o = contopo(&["foliation", fixture.to_str().unwrap(), "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_valid("envelope.schema.json", &v);
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert!(doc.starts_with("<svg") && doc.contains(r#"version="1.1""#) && doc.trim_end().ends_with("</svg>"));

    for clash in [
        vec!["foliation", fixture.to_str().unwrap(), "--out", fixture.to_str().unwrap()],
        vec!["foliation", fixture.to_str().unwrap(), "--svg", fixture.to_str().unwrap()],
        vec!["foliation", fixture.to_str().unwrap(), "--out", svg.to_str().unwrap(), "--svg", svg.to_str().unwrap()],
    ] {
        assert_eq!(code(&contopo(&clash)), 1);
    }
    assert_eq!(std::fs::read(&fixture).unwrap(), before);
    // no temporary files left behind
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 3, "{names:?}");
}

#[test]
fn cover_and_torus_svgs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("cover.svg");
    let o = contopo(&["cover", "--dim", "2", "--window", "-2", "2", "--svg", a.to_str().unwrap(), "--outlines"]);
    assert_eq!(code(&o), 0);
    assert!(std::fs::read_to_string(&a).unwrap().contains("<rect"));
    let o = contopo(&["cover", "--dim", "3", "--window", "-2", "2", "--svg", a.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn shipped_inputs_match_input_schemas() {
    let dir = root().join("fixtures");
    let mut n = 0;
    for e in std::fs::read_dir(&dir).unwrap() {
        let p = e.unwrap().path();
        if p.extension().map_or(true, |x| x != "json") {
            continue;
        }
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        let s = if p.to_string_lossy().contains("charts") { "charts.schema.json" } else { "foliation-input.schema.json" };
        assert_valid(s, &v);
        n += 1;
    }
    assert!(n >= 12);
    for e in std::fs::read_dir(dir.join("bounds")).unwrap() {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(e.unwrap().path()).unwrap()).unwrap();
        assert_valid("bounds-descriptor.schema.json", &v);
    }
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("star-shaped/ball-dilation.json")).unwrap()).unwrap();
    assert_valid("star-shaped-input.schema.json", &v);
}
