use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn sullivan(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sullivan")).args(args).output().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json, String::from_utf8_lossy(&out.stderr).into_owned())
}

fn scratch(name: &str, text: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn cohomology_of_a_file() {
    let p = scratch("s4.sul", "algebra S4 { gen w4 : 4; gen w7 : 7; d w7 = w4^2; }\n");
    let (code, v, _) = sullivan(&["cohomology", &p, "--degree", "0..8"]);
    assert_eq!(code, 0);
    let dims: Vec<u64> = v["degrees"].as_array().unwrap().iter().map(|d| d["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![1, 0, 0, 0, 1, 0, 0, 0, 0]);
}

#[test]
fn syntax_errors_exit_2_with_position() {
    let p = scratch("bad.sul", "algebra A {\n  gen w4 : 4; gen w7 : 7;\n  d w7 = w4^2 + ;\n}\n");
    let (code, v, err) = sullivan(&["cohomology", &p, "--degree", "4"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["line"], 3);
    assert_eq!(v["error"]["column"], 17);
    assert!(err.contains("line 3, column 17"), "{err}");
}

#[test]
fn undeclared_generator_exits_2() {
    let p = scratch(
        "v9.sul",
        "algebra Y { gen w4 : 4; }\nalgebra X { gen v2 : 2; }\nmorphism f : Y -> X { w4 = v9; }\n",
    );
    let (code, v, _) = sullivan(&["evsub", "--map", &p, "--degree", "4"]);
    assert_eq!(code, 2);
    assert!(v["error"]["message"].as_str().unwrap().contains("unknown generator `v9`"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(sullivan(&["classify", "--builtin", "nope", "--degrees", "2"]).0, 2);
    assert_eq!(sullivan(&["classify", "--degrees", "2"]).0, 2);
    assert_eq!(sullivan(&["frobnicate"]).0, 2);
    assert_eq!(sullivan(&["lift", "--builtin", "ex3.4", "--class", "w7=1"]).0, 2);
    let (code, v, _) = sullivan(&["corpus"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"].as_array().unwrap().len(), 11);
}

#[test]
fn built_certificates_verify_from_their_text() {
    let (code, v, _) = sullivan(&["build", "--builtin", "ex2.3-even", "--class", "w4=c"]);
    assert_eq!(code, 0);
    let p = scratch("built.sul", v["document"].as_str().unwrap());
    let (code, v, _) = sullivan(&["verify", "--certificate", &p]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    let (_, v, _) = sullivan(&["section", "--ks", &p]);
    assert_eq!(v["exists"], true);
    let (_, v, _) = sullivan(&["trivial", "--ks", &p]);
    assert_eq!(v["trivial"], true);
}

#[test]
fn tampered_certificates_fail_verification() {
    let text = "algebra S4 { gen w4 : 4; gen w7 : 7; d w7 = w4^2; }
morphism id : S4 -> S4 { w4 = w4; w7 = w7; }
certificate C for id over sphere 4 { a w4 = c; theta w7 = -2*c*w4; F w4 = w4 + 2*c*x; }
";
    let p = scratch("tampered.sul", text);
    let (code, v, _) = sullivan(&["verify", "--certificate", &p]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], false);
}
