//! End-to-end checks of the CLI surface: the two input modes agree, every
//! emitted payload re-parses into the same internal value, schemas are
//! strict, and exit codes are machine-readable.

use std::process::Command;
use std::sync::Arc;

use perikos::dto::{ODElemJson, PadicJson, ProjPointJson, WittJson};
use perikos::job::{run, JobSpec};
use perikos_core::parith::{Coeff, WittRing};
use serde_json::{json, Value};

fn run_cli(args: &[&str]) -> (Value, i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_perikos"))
        .args(args)
        .env_remove("PERIKOS_DEFAULT_PREC")
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let doc: Value = serde_json::from_str(&stdout).expect("stdout is one JSON document");
    (doc, out.status.code().unwrap_or(-1), stdout)
}

fn tmpfile(name: &str, contents: &str) -> std::path::PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("perikos-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn flags_and_json_job_agree() {
    let (flag_doc, code, flag_raw) = run_cli(&["kottwitz", "--h", "3", "--d", "1"]);
    assert_eq!(code, 0);
    let job = json!({
        "command": "kottwitz",
        "params": {"h": 3, "d": 1},
    });
    let path = tmpfile("job.json", &serde_json::to_string(&job).unwrap());
    let (json_doc, code2, json_raw) = run_cli(&["--json", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code2, 0);
    assert_eq!(flag_doc["result"], json_doc["result"]);
    assert_eq!(flag_raw, json_raw, "both input modes emit identical documents");
}

#[test]
fn unknown_fields_are_schema_errors() {
    let job = json!({
        "command": "kottwitz",
        "params": {"h": 3, "d": 1, "surprise": true},
    });
    let path = tmpfile("strict.json", &serde_json::to_string(&job).unwrap());
    let (doc, code, _) = run_cli(&["--json", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 4, "unknown field must be a schema error");
    assert_eq!(doc["error"]["kind"], "schema");

    // unknown top-level JobSpec field
    let job = json!({
        "command": "kottwitz",
        "params": {"h": 3, "d": 1},
        "extra": 1,
    });
    let path = tmpfile("strict2.json", &serde_json::to_string(&job).unwrap());
    let (_, code, _) = run_cli(&["--json", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 4);
}

#[test]
fn exit_codes_distinguish_failure_modes() {
    // domain violation: u on the boundary
    let (doc, code, _) = run_cli(&[
        "period-eval", "--h", "2", "--p", "5", "--u", "[2]", "--prec", "5",
    ]);
    assert_eq!(code, 2);
    assert_eq!(doc["error"]["kind"], "domain");

    // schema violation: wrong u length
    let (doc, code, _) = run_cli(&[
        "period-eval", "--h", "3", "--p", "5", "--u", "[5]", "--prec", "5",
    ]);
    assert_eq!(code, 4);
    assert_eq!(doc["error"]["kind"], "schema");

    // precision failure: the determinant is determinate (valuation 4) but
    // the trace is zero at precision 1, below the hull's midpoint height 2
    let job = json!({
        "command": "newton",
        "params": {
            "p": 5,
            "prec": 8,
            "entries": [
                [{"prime": 5, "m": 1, "valuation": 4, "teich_digits": [[1]], "abs_precision": 5}, 25],
                [25, {"prime": 5, "m": 1, "valuation": null, "teich_digits": [], "abs_precision": 1}]
            ]
        }
    });
    let path = tmpfile("indet.json", &serde_json::to_string(&job).unwrap());
    let (doc, code, _) = run_cli(&["--json", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 3, "indeterminate valuation is a precision failure: {doc}");
    assert_eq!(doc["error"]["kind"], "precision");

    // domain failure: invertibility itself cannot be certified when the
    // determinant is indistinguishable from zero
    let job = json!({
        "command": "newton",
        "params": {
            "p": 5,
            "prec": 3,
            "entries": [
                [{"prime": 5, "m": 1, "valuation": null, "teich_digits": [], "abs_precision": 0}, 1],
                [1, {"prime": 5, "m": 1, "valuation": null, "teich_digits": [], "abs_precision": 0}]
            ]
        }
    });
    let path = tmpfile("sing.json", &serde_json::to_string(&job).unwrap());
    let (doc, code, _) = run_cli(&["--json", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 2, "uncertifiable determinant is a domain failure: {doc}");

    // domain: singular matrix
    let (doc, code, _) = run_cli(&["newton", "--p", "5", "--entries", "[[1,1],[1,1]]"]);
    assert_eq!(code, 2, "{doc}");

    // schema: not a prime
    let (_, code, _) = run_cli(&["kappa", "--p", "6", "--log-p", "1", "--log-w", "1"]);
    assert_eq!(code, 4);
}

#[test]
fn period_payload_reparses_into_the_same_point() {
    let (doc, code, _) = run_cli(&[
        "period-eval", "--h", "2", "--p", "5", "--u", "[5]", "--prec", "6",
    ]);
    assert_eq!(code, 0);
    let point: ProjPointJson = serde_json::from_value(doc["result"]["point"].clone()).unwrap();
    assert_eq!(point.h, 2);
    assert_eq!(point.pivot, 0);
    let coords: Vec<_> = point
        .coords
        .iter()
        .map(|c| c.to_core().unwrap())
        .collect();
    assert!(coords[0].is_unit());
    // re-serialize and compare: the JSON form is canonical
    for (orig, c) in point.coords.iter().zip(&coords) {
        let back = PadicJson::from_core(c);
        assert_eq!(
            serde_json::to_value(orig).unwrap(),
            serde_json::to_value(&back).unwrap()
        );
    }
}

#[test]
fn od_product_reparses_and_matches_core() {
    let (doc, code, _) = run_cli(&[
        "od-mul", "--p", "2", "--h", "2", "--prec", "8", "--a", r#"{"coeffs":[0,1]}"#,
        "--b", r#"{"coeffs":[0,1]}"#,
    ]);
    assert_eq!(code, 0);
    let prod: ODElemJson = serde_json::from_value(doc["result"]["product"].clone()).unwrap();
    let ring: Arc<WittRing> = WittRing::new(2, 2, 16).unwrap();
    let core = prod.to_core(&ring, 8).unwrap();
    // Pi * Pi = p
    assert_eq!(core.coeffs()[0].valuation(), Some(1));
    assert!(core.coeffs()[1].is_zero());
    let digits = core.coeffs()[0].teich_digits();
    assert!(!digits.is_empty());

    // a full Witt coefficient round-trips through its JSON document
    let w = WittJson::from_core(&core.coeffs()[0]);
    let back = w.to_core(&ring).unwrap();
    assert_eq!(back, core.coeffs()[0].clone());
}

#[test]
fn seed_flag_overrides_job_document() {
    let job = json!({
        "command": "commute-check",
        "params": {"p": 2, "h": 2, "trials": 10},
        "seed": 3,
    });
    let path = tmpfile("seed.json", &serde_json::to_string(&job).unwrap());
    let (doc, code, _) = run_cli(&["--json", path.to_str().unwrap(), "--seed", "99"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    assert_eq!(doc["provenance"]["seed"], 99);
    assert_eq!(doc["result"]["all_commute"], true);
}

#[test]
fn default_prec_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_perikos"))
        .args(["period-eval", "--h", "2", "--u", "[0]"])
        .env("PERIKOS_DEFAULT_PREC", "5,6,20")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(doc["provenance"]["target_precision"], 6);
    // and a malformed block is a schema error
    let out = Command::new(env!("CARGO_BIN_EXE_perikos"))
        .args(["period-eval", "--h", "2", "--u", "[0]"])
        .env("PERIKOS_DEFAULT_PREC", "nonsense")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn run_is_usable_as_a_library() {
    let job = JobSpec {
        command: "bundles".into(),
        params: json!({"h": 2}),
        seed: None,
        prec: None,
    };
    let (doc, code) = run(&job);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["count"], 2);
}
