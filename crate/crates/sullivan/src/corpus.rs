//! Built-in worked examples with expected report fragments.
//!
//! Each entry is one document. Commands run against an entry with
//! `--builtin KEY`; blocks a command needs are picked from `defaults` unless
//! `--name` says otherwise.

/// One expected fact about a command's JSON output.
#[derive(Clone, Copy, Debug)]
pub enum Expect {
    /// The value at the JSON pointer equals the JSON literal.
    Equals(&'static str, &'static str),
    /// The array at the pointer has an element containing every field of the
    /// JSON object literal.
    Contains(&'static str, &'static str),
}

#[derive(Clone, Copy, Debug)]
pub struct Check {
    /// Command line without the program name and `--builtin KEY`.
    pub args: &'static [&'static str],
    pub expect: &'static [Expect],
    /// The expected values are those stated for the worked example but the
    /// computation disagrees; such checks only run in the acceptance gate.
    pub contested: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub key: &'static str,
    pub title: &'static str,
    pub document: &'static str,
    /// (role, block name) with roles `model`, `map`, `ks`, `twist`, `certificate`.
    pub defaults: &'static [(&'static str, &'static str)],
    pub checks: &'static [Check],
}

impl Entry {
    pub fn default_for(&self, role: &str) -> Option<&'static str> {
        self.defaults.iter().find(|(r, _)| *r == role).map(|(_, n)| *n)
    }
}

use Expect::{Contains, Equals};

const fn check(args: &'static [&'static str], expect: &'static [Expect]) -> Check {
    Check {
        args,
        expect,
        contested: false,
    }
}

const fn contested(args: &'static [&'static str], expect: &'static [Expect]) -> Check {
    Check {
        args,
        expect,
        contested: true,
    }
}

pub const ENTRIES: &[Entry] = &[
    Entry {
        key: "ex2.2",
        title: "extension with decomposable differential over a product of two S^2 models",
        document: "algebra Y {
  gen w1 : 2;
  gen w2 : 2;
  gen w3 : 3;
  gen w4 : 3;
  d w3 = w1^2;
  d w4 = w2^2;
}

ks E over Y fiber (v : 3) {
  D v = w1*w2;
}
",
        defaults: &[("model", "Y"), ("map", "E"), ("ks", "E")],
        checks: &[
            check(&["evsub", "--degree", "2"], &[Equals("/dim", "0")]),
            check(
                &["classify", "--degrees", "2..2"],
                &[
                    Equals("/reports/0/G/dim", "0"),
                    Equals("/reports/0/gcal/kind", "\"exact\""),
                    Equals("/reports/0/gcal/dim", "2"),
                    Contains(
                        "/reports/0/evidence",
                        r#"{"tag": "surjective-on-homotopy", "subgroup": "gcal", "verified": true}"#,
                    ),
                ],
            ),
        ],
    },
    Entry {
        key: "ex2.3-odd",
        title: "identity of the S^3 model",
        document: "algebra S3 {
  gen w3 : 3;
}

morphism id : S3 -> S3 {
  w3 = w3;
}
",
        defaults: &[("model", "S3"), ("map", "id")],
        checks: &[check(
            &["build", "--class", "w3=c"],
            &[
                Equals("/differential/w3", "\"0\""),
                Equals("/differential/x", "\"0\""),
                Equals("/lift/w3", "\"w3 + c*x\""),
                Equals("/verified", "true"),
            ],
        )],
    },
    Entry {
        key: "ex2.3-even",
        title: "identity of the S^4 model",
        document: "algebra S4 {
  gen w4 : 4;
  gen w7 : 7;
  d w7 = w4^2;
}

morphism id : S4 -> S4 {
  w4 = w4;
  w7 = w7;
}
",
        defaults: &[("model", "S4"), ("map", "id")],
        checks: &[check(
            &["build", "--class", "w4=c"],
            &[
                Equals("/differential/w4", "\"0\""),
                Equals("/differential/w7", "\"w4^2 + 2*c*w4*x\""),
                Equals("/lift/w4", "\"w4 + c*x\""),
                Equals("/lift/w7", "\"w7\""),
                Equals("/verified", "true"),
            ],
        )],
    },
    Entry {
        key: "ex2.4",
        title: "Hopf fibration S^3 -> S^7 -> S^4",
        document: "algebra S4 {
  gen w4 : 4;
  gen w7 : 7;
  d w7 = w4^2;
}

ks E over S4 fiber (v3) {
  D v3 = w4;
}
",
        defaults: &[("model", "S4"), ("map", "E"), ("ks", "E")],
        checks: &[
            check(
                &["evsub", "--degree", "4"],
                &[Equals("/dim", "1"), Equals("/basis", r#"["w4*"]"#)],
            ),
            check(
                &["classify", "--degrees", "4..4"],
                &[
                    Equals("/reports/0/G/dim", "1"),
                    Equals("/reports/0/gcal/kind", "\"exact\""),
                    Equals("/reports/0/gcal/dim", "1"),
                ],
            ),
        ],
    },
    Entry {
        key: "ex2.4-product",
        title: "Hopf fibration times the trivial fibration over S^4",
        document: "algebra Y {
  gen w4 : 4;
  gen w7 : 7;
  gen u4 : 4;
  gen u7 : 7;
  d w7 = w4^2;
  d u7 = u4^2;
}

ks E over Y fiber (v3) {
  D v3 = w4;
}
",
        defaults: &[("model", "Y"), ("map", "E"), ("ks", "E")],
        checks: &[check(
            &["classify", "--degrees", "4..4"],
            &[
                Equals("/reports/0/G/dim", "1"),
                Equals("/reports/0/gcal/kind", "\"exact\""),
                Equals("/reports/0/gcal/dim", "2"),
            ],
        )],
    },
    Entry {
        key: "ex2.5",
        title: "generator projection killing w5",
        document: "algebra Y {
  gen w3 : 3;
  gen w5 : 5;
  gen w7 : 7;
  gen w9 : 9;
  d w7 = w3*w5;
  d w9 = w3*w7;
}

algebra X {
  gen w3 : 3;
  gen w7 : 7;
  gen w9 : 9;
  d w9 = w3*w7;
}

morphism p : Y -> X {
  w3 = w3;
  w5 = 0;
  w7 = w7;
  w9 = w9;
}
",
        defaults: &[("model", "Y"), ("map", "p")],
        checks: &[
            check(&["evsub", "--degree", "3"], &[Equals("/dim", "0")]),
            check(&["evsub", "--degree", "7"], &[Equals("/dim", "0")]),
            check(
                &["classify", "--degrees", "3..9"],
                &[
                    Equals("/reports/0/n", "3"),
                    Equals("/reports/0/gcal/kind", "\"exact\""),
                    Equals("/reports/0/gcal/dim", "1"),
                    Equals("/reports/4/n", "7"),
                    Equals("/reports/4/gcal/dim", "1"),
                    Equals("/reports/6/n", "9"),
                    Equals("/reports/6/gcal/dim", "1"),
                ],
            ),
            contested(
                &["classify", "--degrees", "5..5"],
                &[Equals("/reports/0/gcal/kind", "\"exact\""), Equals("/reports/0/gcal/dim", "1")],
            ),
        ],
    },
    Entry {
        key: "ex2.6",
        title: "map S^3 x S^3 -> S^6 collapsing onto the top cell",
        document: "algebra Y {
  gen w6 : 6;
  gen w11 : 11;
  d w11 = w6^2;
}

algebra X {
  gen u3 : 3;
  gen v3 : 3;
}

morphism f : Y -> X {
  w6 = u3*v3;
  w11 = 0;
}

twist P over sphere 6 on X {
}
",
        defaults: &[("model", "X"), ("map", "f"), ("twist", "P")],
        checks: &[
            check(&["derhom", "--degree", "5"], &[Equals("/dim", "0")]),
            check(
                &["lift", "--class", "w6=c"],
                &[
                    Equals("/outcome", "\"obstructed\""),
                    Equals("/at", r#"{"c": "1"}"#),
                    Equals("/witness/generator", "\"w11\""),
                    Equals("/witness/degree", "12"),
                    Equals("/witness/residual", "\"2*c*u3*v3*x\""),
                    Equals("/verified", "true"),
                ],
            ),
            check(
                &["classify", "--degrees", "6..6"],
                &[
                    Equals("/reports/0/G/dim", "0"),
                    Equals("/reports/0/gcal/dim", "0"),
                    Equals("/reports/0/tcal/dim", "0"),
                    Equals("/reports/0/scal/dim", "0"),
                    Equals("/reports/0/scal/kind", "\"exact\""),
                    Contains("/reports/0/evidence", r#"{"tag": "fiber-below-degree", "verified": true}"#),
                    Contains("/reports/0/evidence", r#"{"tag": "no-fibrations-over-sphere", "verified": true}"#),
                ],
            ),
        ],
    },
    Entry {
        key: "ex2.6-total",
        title: "total space of the product fibration over S^6 with fiber S^3 x S^3",
        document: "algebra E {
  gen u3 : 3;
  gen v3 : 3;
  gen x : 6 trunc;
}
",
        defaults: &[("model", "E")],
        checks: &[check(
            &["cohomology", "--degree", "12..12"],
            &[Equals("/degrees/0/dim", "1"), Equals("/degrees/0/representatives", r#"["u3*v3*x"]"#)],
        )],
    },
    Entry {
        key: "ex3.4",
        title: "map CP^3 -> S^4 and the twisted extension over S^4",
        document: "algebra S4 {
  gen w4 : 4;
  gen w7 : 7;
  d w7 = w4^2;
}

algebra CP3 {
  gen v2 : 2;
  gen w7 : 7;
  d w7 = v2^4;
}

morphism f : S4 -> CP3 {
  w4 = v2^2;
  w7 = w7;
}

twist T over sphere 4 on CP3 {
  theta w7 = -2*c*v2^2;
}

twist P over sphere 4 on CP3 {
}
",
        defaults: &[("model", "CP3"), ("map", "f"), ("twist", "T"), ("ks", "T")],
        checks: &[
            check(&["rho", "--sphere", "4", "--cap", "14"], &[Equals("/zero", "true")]),
            check(
                &["lift", "--class", "w4=c"],
                &[
                    Equals("/outcome", "\"found\""),
                    Equals("/differential/w7", "\"v2^4 + 2*c*v2^2*x\""),
                    Equals("/lift/w4", "\"v2^2 + c*x\""),
                    Equals("/lift/w7", "\"w7\""),
                    Equals("/verified", "true"),
                ],
            ),
            check(
                &["lift", "--twist-name", "P", "--class", "w4=c"],
                &[Equals("/outcome", "\"obstructed\""), Equals("/verified", "true")],
            ),
            check(&["trivial", "--param", "c=1"], &[Equals("/trivial", "false")]),
            check(&["tncz", "--param", "c=1"], &[Equals("/tncz", "true")]),
            check(
                &["classify", "--degrees", "4..4"],
                &[
                    Equals("/reports/0/G/dim", "0"),
                    Equals("/reports/0/gcal/kind", "\"exact\""),
                    Equals("/reports/0/gcal/dim", "0"),
                    Equals("/reports/0/tcal/kind", "\"exact\""),
                    Equals("/reports/0/tcal/dim", "1"),
                ],
            ),
        ],
    },
    Entry {
        key: "ex3.5",
        title: "map CP^2 -> S^4 collapsing the 2-cell",
        document: "algebra S4 {
  gen w4 : 4;
  gen w7 : 7;
  d w7 = w4^2;
}

algebra CP2 {
  gen v2 : 2;
  gen v5 : 5;
  d v5 = v2^3;
}

morphism f : S4 -> CP2 {
  w4 = v2^2;
  w7 = v2*v5;
}

twist T over sphere 4 on CP2 {
  theta v5 = -2*c*v2;
}

twist P over sphere 4 on CP2 {
}
",
        defaults: &[("model", "CP2"), ("map", "f"), ("twist", "T"), ("ks", "T")],
        checks: &[
            check(
                &["lift", "--class", "w4=c"],
                &[
                    Equals("/outcome", "\"found\""),
                    Equals("/differential/v5", "\"v2^3 + 2*c*v2*x\""),
                    Equals("/lift/w4", "\"v2^2 + c*x\""),
                    Equals("/lift/w7", "\"v2*v5\""),
                    Equals("/verified", "true"),
                ],
            ),
            check(
                &["lift", "--twist-name", "P", "--class", "w4=c"],
                &[Equals("/outcome", "\"obstructed\"")],
            ),
            check(
                &["classify", "--degrees", "4..4"],
                &[
                    Equals("/reports/0/gcal/kind", "\"exact\""),
                    Equals("/reports/0/gcal/dim", "0"),
                    Equals("/reports/0/tcal/dim", "1"),
                ],
            ),
        ],
    },
    Entry {
        key: "ex3.6",
        title: "free loop fibration of S^2 and its fiber inclusion",
        document: "algebra LS2 {
  gen x : 2;
  gen y : 3;
  gen xb : 1;
  gen yb : 2;
  d y = x^2;
  d yb = 2*x*xb;
}

algebra OS2 {
  gen xb : 1;
  gen yb : 2;
}

morphism i : LS2 -> OS2 {
  x = 0;
  y = 0;
  xb = xb;
  yb = yb;
}

twist T over sphere 2 on OS2 {
  theta yb = -c*xb;
}

twist P over sphere 2 on OS2 {
}
",
        defaults: &[("model", "OS2"), ("map", "i"), ("twist", "T"), ("ks", "T")],
        checks: &[
            check(
                &["rho", "--sphere", "2", "--cap", "6"],
                &[
                    Equals("/zero", "false"),
                    Equals("/classes/1/derivation", "\"(yb, xb)\""),
                    Contains("/classes/1/maps", "\"[yb] -> [xb]\""),
                ],
            ),
            check(
                &["tncz", "--param", "c=1", "--cap", "6"],
                &[Equals("/tncz", "false"), Equals("/cohomology/2/total", "1")],
            ),
            check(
                &["tncz", "--param", "c=0", "--cap", "6"],
                &[Equals("/tncz", "true"), Equals("/cohomology/2/total", "2")],
            ),
            check(
                &["lift", "--twist-name", "P", "--class", "x=1"],
                &[Equals("/outcome", "\"obstructed\"")],
            ),
            contested(
                &["classify", "--degrees", "2..2"],
                &[
                    Equals("/reports/0/tcal/kind", "\"exact\""),
                    Equals("/reports/0/tcal/dim", "0"),
                    Equals("/reports/0/scal/kind", "\"lower_bound\""),
                ],
            ),
        ],
    },
];

pub fn entry(key: &str) -> Option<&'static Entry> {
    ENTRIES.iter().find(|e| e.key == key)
}

pub fn keys() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.key).collect()
}

impl Expect {
    /// Check one fragment against a command's JSON output.
    pub fn check(&self, out: &serde_json::Value) -> Result<(), String> {
        let parse = |lit: &str| -> Result<serde_json::Value, String> {
            serde_json::from_str(lit).map_err(|e| format!("bad expected literal `{lit}`: {e}"))
        };
        match *self {
            Expect::Equals(ptr, lit) => {
                let want = parse(lit)?;
                match out.pointer(ptr) {
                    Some(got) if *got == want => Ok(()),
                    Some(got) => Err(format!("{ptr}: expected {want}, found {got}")),
                    None => Err(format!("{ptr}: missing (expected {want})")),
                }
            }
            Expect::Contains(ptr, lit) => {
                let want = parse(lit)?;
                let Some(items) = out.pointer(ptr).and_then(|v| v.as_array()) else {
                    return Err(format!("{ptr}: not an array"));
                };
                let matches = |item: &serde_json::Value| match (&want, item) {
                    (serde_json::Value::Object(w), serde_json::Value::Object(i)) => {
                        w.iter().all(|(k, v)| i.get(k) == Some(v))
                    }
                    _ => *item == want,
                };
                if items.iter().any(matches) {
                    Ok(())
                } else {
                    Err(format!("{ptr}: no element matches {want}"))
                }
            }
        }
    }
}

impl Check {
    /// Arguments for `cli::run`, including the program name and `--builtin`.
    pub fn command_line(&self, key: &str) -> Vec<String> {
        let mut v = vec!["sullivan".to_string()];
        v.extend(self.args.iter().map(|s| s.to_string()));
        v.push("--builtin".to_string());
        v.push(key.to_string());
        v
    }
}
