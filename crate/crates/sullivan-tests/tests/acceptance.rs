//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::{props, small_matrix, two_stage};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use serde_json::Value;

const RUN_LIMIT: Duration = Duration::from_secs(5);
const CASES: u32 = 256;

#[derive(Default)]
struct Gate {
    problems: Vec<String>,
}

impl Gate {
    fn cli(&mut self, args: &[&str]) -> Value {
        let start = Instant::now();
        let out = sullivan::cli::run(std::iter::once("sullivan").chain(args.iter().copied()));
        let took = start.elapsed();
        if took > RUN_LIMIT {
            self.fail(format!("`{}` took {:.1}s", args.join(" "), took.as_secs_f64()));
        }
        if out.code != 0 {
            self.fail(format!("`{}` exited with {}: {}", args.join(" "), out.code, out.stderr.trim()));
        }
        out.json()
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.problems.push(msg.into());
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(msg());
        }
    }

    fn eq(&mut self, v: &Value, ptr: &str, want: Value) {
        let got = v.pointer(ptr).cloned().unwrap_or(Value::Null);
        if got != want {
            self.fail(format!("{ptr}: expected {want}, got {got}"));
        }
    }

    fn has_evidence(&mut self, report: &Value, subgroup: &str, tag_or_kind: &str) {
        let found = report["evidence"].as_array().into_iter().flatten().any(|e| {
            e["subgroup"] == subgroup
                && (e["tag"] == tag_or_kind || e["kind"] == tag_or_kind)
                && e["verified"] == true
        });
        self.check(found, || format!("no verified `{tag_or_kind}` evidence for {subgroup} in degree {}", report["n"]));
    }
}

fn scratch(name: &str, text: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn report(v: &Value, n: u32) -> Value {
    v["reports"]
        .as_array()
        .into_iter()
        .flatten()
        .find(|r| r["n"] == n)
        .cloned()
        .unwrap_or(Value::Null)
}

fn s(text: &str) -> Value {
    Value::String(text.into())
}

/// Extension with decomposable differential over two S^2 models.
fn criterion_1(g: &mut Gate) {
    let v = g.cli(&["evsub", "--builtin", "ex2.2", "--degree", "2"]);
    g.eq(&v, "/dim", 0.into());
    let v = g.cli(&["classify", "--builtin", "ex2.2", "--degrees", "2..2"]);
    let r = report(&v, 2);
    g.eq(&r, "/G/dim", 0.into());
    g.eq(&r, "/gcal/kind", s("exact"));
    g.eq(&r, "/gcal/dim", 2.into());
    g.eq(&r, "/pi_rank", 2.into());
    g.has_evidence(&r, "gcal", "surjective-on-homotopy");
}

/// Builder on the identity of a sphere model, odd and even.
fn criterion_2(g: &mut Gate) {
    let cases: [(&str, &str, &[(&str, &str)], &[(&str, &str)]); 2] = [
        ("ex2.3-odd", "w3=c", &[("w3", "0"), ("x", "0")], &[("w3", "w3 + c*x")]),
        (
            "ex2.3-even",
            "w4=c",
            &[("w4", "0"), ("w7", "w4^2 + 2*c*w4*x"), ("x", "0")],
            &[("w4", "w4 + c*x"), ("w7", "w7")],
        ),
    ];
    for (key, class, differential, lift) in cases {
        let v = g.cli(&["build", "--builtin", key, "--class", class]);
        for (gen, want) in differential {
            g.eq(&v, &format!("/differential/{gen}"), s(want));
        }
        for (gen, want) in lift {
            g.eq(&v, &format!("/lift/{gen}"), s(want));
        }
        g.eq(&v, "/verified", true.into());
        let doc = scratch(&format!("accept-{key}.sul"), v["document"].as_str().unwrap_or(""));
        let v = g.cli(&["verify", "--certificate", &doc]);
        g.eq(&v, "/passed", true.into());
        for c in ["c=0", "c=1", "c=-3", "c=2/5"] {
            let v = g.cli(&["section", "--ks", &doc, "--param", c]);
            g.eq(&v, "/exists", true.into());
            let v = g.cli(&["trivial", "--ks", &doc, "--param", c]);
            g.eq(&v, "/trivial", true.into());
        }
    }
}

/// Evaluation subgroup detected by an explicit derivation cocycle.
fn criterion_3(g: &mut Gate) {
    let v = g.cli(&["evsub", "--builtin", "ex2.4", "--degree", "4"]);
    g.eq(&v, "/dim", 1.into());
    g.eq(&v, "/basis", serde_json::json!(["w4*"]));
    let cocycle = v["cocycles"][0].as_str().unwrap_or("");
    g.check(
        cocycle == "(w4, 1) + 2*(w7, v3)" || cocycle == "(w4, 1) - 2*(w7, v3)",
        || format!("unexpected cocycle {cocycle:?}"),
    );
    let v = g.cli(&["classify", "--builtin", "ex2.4", "--degrees", "4..4"]);
    let r = report(&v, 4);
    g.eq(&r, "/G/dim", 1.into());
    g.eq(&r, "/gcal/kind", s("exact"));
    g.eq(&r, "/gcal/dim", 1.into());
    let v = g.cli(&["classify", "--builtin", "ex2.4-product", "--degrees", "4..4"]);
    let r = report(&v, 4);
    g.eq(&r, "/G/dim", 1.into());
    g.eq(&r, "/gcal/kind", s("exact"));
    g.eq(&r, "/gcal/dim", 2.into());
}

/// Generator projection: relaxed subgroup full in every odd degree.
fn criterion_4(g: &mut Gate) {
    for n in ["3", "7"] {
        let v = g.cli(&["evsub", "--builtin", "ex2.5", "--degree", n]);
        g.eq(&v, "/dim", 0.into());
    }
    let v = g.cli(&["classify", "--builtin", "ex2.5", "--degrees", "3..9"]);
    for n in [3u32, 5, 7, 9] {
        let r = report(&v, n);
        g.eq(&r, "/gcal/kind", s("exact"));
        g.eq(&r, "/gcal/dim", r["pi_rank"].clone());
        g.check(r["pi_rank"] == 1, || format!("π_{n} has rank {}", r["pi_rank"]));
        let class = format!("w{n}=1");
        let built = g.cli(&["build", "--builtin", "ex2.5", "--class", &class]);
        let doc = scratch(&format!("accept-ex2.5-w{n}.sul"), built["document"].as_str().unwrap_or(""));
        let checked = g.cli(&["verify", "--certificate", &doc]);
        if checked["passed"] != true {
            let failures = built["gates"][0]["failures"].clone();
            g.fail(format!("builder certificate for w{n}* fails verify: {failures}"));
        }
    }
}

/// No fibrations over S^6 with fiber S^3 x S^3; the product lift is obstructed.
fn criterion_5(g: &mut Gate) {
    let v = g.cli(&["derhom", "--builtin", "ex2.6", "--degree", "5"]);
    g.eq(&v, "/dim", 0.into());
    let v = g.cli(&["lift", "--builtin", "ex2.6", "--class", "w6=c"]);
    g.eq(&v, "/outcome", s("obstructed"));
    g.eq(&v, "/witness/degree", 12.into());
    g.eq(&v, "/witness/residual", s("2*c*u3*v3*x"));
    g.eq(&v, "/verified", true.into());
    for (c, residual) in [("1", "2*u3*v3*x"), ("-1", "-2*u3*v3*x"), ("3", "6*u3*v3*x"), ("1/2", "u3*v3*x")] {
        let v = g.cli(&["lift", "--builtin", "ex2.6", "--class", &format!("w6={c}")]);
        g.eq(&v, "/outcome", s("obstructed"));
        g.eq(&v, "/witness/residual", s(residual));
        g.eq(&v, "/verified", true.into());
    }
    // the residual represents the nonzero top class of the total space
    let v = g.cli(&["cohomology", "--builtin", "ex2.6-total", "--degree", "12..12"]);
    g.eq(&v, "/degrees/0/dim", 1.into());
    g.eq(&v, "/degrees/0/representatives", serde_json::json!(["u3*v3*x"]));
    let v = g.cli(&["classify", "--builtin", "ex2.6", "--degrees", "6..6"]);
    let r = report(&v, 6);
    g.eq(&r, "/G/dim", 0.into());
    for sub in ["gcal", "tcal", "scal"] {
        g.eq(&r, &format!("/{sub}/kind"), s("exact"));
        g.eq(&r, &format!("/{sub}/dim"), 0.into());
    }
    g.has_evidence(&r, "scal", "fiber-below-degree");
    g.has_evidence(&r, "scal", "no-fibrations-over-sphere");
}

fn twisted_pipeline(g: &mut Gate, key: &str, differential: (&str, &str), lift: &[(&str, &str)]) {
    let v = g.cli(&["rho", "--builtin", key, "--sphere", "4", "--cap", "14"]);
    g.eq(&v, "/zero", true.into());
    let v = g.cli(&["lift", "--builtin", key, "--class", "w4=c"]);
    g.eq(&v, "/outcome", s("found"));
    g.eq(&v, &format!("/differential/{}", differential.0), s(differential.1));
    for (gen, want) in lift {
        g.eq(&v, &format!("/lift/{gen}"), s(want));
    }
    g.eq(&v, "/verified", true.into());
    for c in ["c=1", "c=-2", "c=1/3"] {
        let v = g.cli(&["trivial", "--builtin", key, "--param", c]);
        g.eq(&v, "/trivial", false.into());
        let v = g.cli(&["tncz", "--builtin", key, "--param", c]);
        g.eq(&v, "/tncz", true.into());
    }
    let v = g.cli(&["trivial", "--builtin", key, "--param", "c=0"]);
    g.eq(&v, "/trivial", true.into());
    let v = g.cli(&["lift", "--builtin", key, "--twist-name", "P", "--class", "w4=c"]);
    g.eq(&v, "/outcome", s("obstructed"));
    g.eq(&v, "/verified", true.into());
    let v = g.cli(&["classify", "--builtin", key, "--degrees", "4..4"]);
    let r = report(&v, 4);
    g.eq(&r, "/gcal/kind", s("exact"));
    g.eq(&r, "/gcal/dim", 0.into());
    g.eq(&r, "/tcal/kind", s("exact"));
    g.eq(&r, "/tcal/dim", 1.into());
}

/// Twisted fibration over S^4 with fiber CP^3.
fn criterion_6(g: &mut Gate) {
    twisted_pipeline(g, "ex3.4", ("w7", "v2^4 + 2*c*v2^2*x"), &[("w4", "v2^2 + c*x"), ("w7", "w7")]);
}

/// Twisted fibration over S^4 with fiber CP^2.
fn criterion_7(g: &mut Gate) {
    twisted_pipeline(g, "ex3.5", ("v5", "v2^3 + 2*c*v2*x"), &[("w4", "v2^2 + c*x"), ("w7", "v2*v5")]);
}

/// Fiber inclusion of the free loop fibration of S^2.
fn criterion_8(g: &mut Gate) {
    let v = g.cli(&["rho", "--builtin", "ex3.6", "--sphere", "2", "--cap", "6"]);
    g.eq(&v, "/zero", false.into());
    let hit = v["classes"].as_array().into_iter().flatten().any(|c| {
        c["derivation"] == "(yb, xb)" && c["maps"].as_array().is_some_and(|m| m.contains(&s("[yb] -> [xb]")))
    });
    g.check(hit, || "ρ does not send [yb] to [xb] on (yb, xb)".into());
    for c in ["c=1", "c=-3", "c=1/2"] {
        let v = g.cli(&["tncz", "--builtin", "ex3.6", "--param", c, "--cap", "6"]);
        g.eq(&v, "/tncz", false.into());
        g.eq(&v, "/cohomology/2/total", 1.into());
    }
    let v = g.cli(&["tncz", "--builtin", "ex3.6", "--param", "c=0", "--cap", "6"]);
    g.eq(&v, "/tncz", true.into());
    g.eq(&v, "/cohomology/2/total", 2.into());
    let v = g.cli(&["lift", "--builtin", "ex3.6", "--twist-name", "P", "--class", "x=1"]);
    g.eq(&v, "/outcome", s("obstructed"));
    let v = g.cli(&["classify", "--builtin", "ex3.6", "--degrees", "2..2"]);
    let r = report(&v, 2);
    g.eq(&r, "/tcal/kind", s("exact"));
    g.eq(&r, "/tcal/dim", 0.into());
    g.eq(&r, "/scal/kind", s("lower_bound"));
    g.check(r["scal"]["dim"].as_u64().unwrap_or(0) > 0, || "𝒮_2 is zero".into());
    g.has_evidence(&r, "scal", "certificate");
}

fn property<S: Strategy>(g: &mut Gate, name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>)
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    if let Err(e) = runner.run(&strategy, test) {
        g.fail(format!("{name}: {e}"));
    }
}

/// Property suites over random small instances.
fn criterion_9(g: &mut Gate) {
    property(g, "d∘d = 0", two_stage(), |s| props::differential_squares_to_zero(&s));
    property(g, "δ∘δ = 0", two_stage(), |s| props::boundary_of_boundary_vanishes(&s));
    property(g, "Koszul double swap", (two_stage(), prop::collection::vec(0usize..5, 6)), |(s, p)| {
        props::koszul_double_swap(&s, &p)
    });
    property(g, "rank-nullity", small_matrix(), |m| props::rank_nullity(&m));
    property(g, "rref idempotent", small_matrix(), |m| props::rref_is_idempotent(&m));
    property(g, "dense/sparse elimination", small_matrix(), |m| props::dense_and_sparse_elimination_agree(&m));
    property(g, "Künneth", (two_stage(), two_stage()), |(a, b)| props::kunneth(&a, &b));
    property(
        g,
        "builder outputs pass all gates",
        (two_stage(), prop::collection::vec(any::<bool>(), 3), 0usize..8, -3i64..=3),
        |(s, kill, pick, c)| props::builder_gates(&s, &kill, pick, c, true),
    );
    property(g, "classify chain", (two_stage(), prop::collection::vec(any::<bool>(), 3)), |(s, kill)| {
        props::classify_reports_respect_the_chain(&s, &kill)
    });
}

/// Gottlieb groups of spheres from the derivation complex.
fn criterion_10(g: &mut Gate) {
    for n in [3u32, 5, 7] {
        let doc = scratch(&format!("accept-s{n}.sul"), &format!("algebra S{n} {{\n  gen w{n} : {n};\n}}\n"));
        let v = g.cli(&["gottlieb", &doc, "--degree", &n.to_string()]);
        g.eq(&v, "/dim", 1.into());
    }
    for n in [2u32, 4] {
        let m = 2 * n - 1;
        let doc = scratch(
            &format!("accept-s{n}.sul"),
            &format!("algebra S{n} {{\n  gen w{n} : {n};\n  gen w{m} : {m};\n  d w{m} = w{n}^2;\n}}\n"),
        );
        let v = g.cli(&["gottlieb", &doc, "--degree", &n.to_string()]);
        g.eq(&v, "/dim", 0.into());
        let v = g.cli(&["gottlieb", &doc, "--degree", &m.to_string()]);
        g.eq(&v, "/dim", 1.into());
    }
}

fn main() {
    let criteria: [fn(&mut Gate); 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut failed = Vec::new();
    for (i, criterion) in criteria.iter().enumerate() {
        let mut g = Gate::default();
        criterion(&mut g);
        if g.problems.is_empty() {
            println!("criterion {}: PASS", i + 1);
        } else {
            println!("criterion {}: FAIL", i + 1);
            for p in &g.problems {
                println!("    {p}");
            }
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: {} of 10 criteria failed: {failed:?}", failed.len());
        std::process::exit(1);
    }
    println!("acceptance: all 10 criteria pass");
}
