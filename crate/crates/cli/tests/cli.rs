use std::process::Command;

use serde_json::Value;

fn venlab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_venlab")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn theta_3_verifies() {
    let (code, out, _) = venlab(&["theta", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[verified] theta-3"));
}

#[test]
fn stable_at_v_verifies() {
    let (code, out, _) = venlab(&["check-stable", "--q", "v"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["theta", "3", "--bad-flag"][..],
        &["theta"],
        &["theta", "three"],
        &["frobnicate"],
        &[],
        &["eval", "y + + z"],
        &["eval", "y", "--at", "y=1/0"],
        &["eval", "y*z", "--at", "y=1"],
        &["check-stable", "--q", "z"],
        &["check-stable", "--q", "x"],
        &["check-coordinate", "--q2", "V"],
        &["lemma-ideal", "--h", "x*Y"],
        &["print", "nagata", "3"],
        &["print", "theta"],
        &["theta", "3", "--max-iter", "-1"],
    ] {
        let (code, _, err) = venlab(args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.contains("panicked"), "{args:?}: {err}");
    }
}

#[test]
fn failed_checks_exit_1() {
    // integrality of the conjugate in cusp part (2) fails
    let (code, out, _) = venlab(&["cusp", "--q", "V"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("FAIL (2) conjugate integral in x"));
}

#[test]
fn parse_error_reports_offset() {
    let (_, _, err) = venlab(&["eval", "y + + z"]);
    assert!(err.contains("offset 4"), "{err}");
}

#[test]
fn eval_and_print() {
    assert_eq!(venlab(&["eval", "p - (y*u + z^2)"]).1, "0\n");
    assert_eq!(venlab(&["eval", "y + x*z", "--at", "x=2,y=1/3,z=-1"]).1, "-5/3\n");
    assert_eq!(venlab(&["print", "f", "1"]).1, "x*y^2*u + x*y*z^2 + x^2*z + y\n");
}

#[test]
fn json_schema() {
    let dir = std::env::temp_dir().join(format!("venlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let (code, _, _) = venlab(&["alpha", "1", "--seed", "7", "--json", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let certs = v.as_array().unwrap();
    assert_eq!(certs.len(), 2);
    for c in certs {
        assert!(c["claim_id"].is_string());
        assert_eq!(c["status"], "verified");
        assert!(c["terms_truncated"].is_boolean());
        assert!(c["ms"].is_u64());
        for ch in c["checks"].as_array().unwrap() {
            assert!(ch["name"].is_string());
            assert!(ch["pass"].is_boolean());
            assert!(ch.get("witness").is_none_or(Value::is_string));
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn seed_flag_is_accepted() {
    let a = venlab(&["phi", "2", "--seed", "1"]);
    let b = venlab(&["phi", "2", "--seed", "2"]);
    assert_eq!((a.0, b.0), (0, 0));
}

#[test]
fn leading_minus_in_values() {
    assert_eq!(venlab(&["check-stable", "--q", "-w"]).0, 0);
    assert_eq!(venlab(&["eval", "-y + z"]).1, "z - y\n");
}
