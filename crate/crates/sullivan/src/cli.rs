//! The `sullivan` command line: every subcommand prints one JSON object.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};
use sullivan_core::affine::{Affine, LinearFamily};
use sullivan_core::derivations::DerivationComplex;
use sullivan_core::fibrations::{build_trivial_fibration, classifying_class, find_section_over_sphere, rho};
use sullivan_core::lift::{solve_lift, LiftCertificate, LiftOptions, LiftOutcome, LiftProblem, Obstruction};
use sullivan_core::linalg::Subspace;
use sullivan_core::reports::{classify, ClassifyOptions, MapModel, SubgroupStatus, Verdict};
use sullivan_core::{gottlieb_group, Cdga, KsExtension, Monomial, Morphism, Q};

use crate::corpus::{self, Entry};
use crate::dsl::{self, CertField, Document, Expr, Item};
use crate::error::{CliError, CliResult};
use crate::model::{self, Block, Params, ResolvedTwist, Workspace};

#[derive(Parser, Debug)]
#[command(name = "sullivan", version, about = "Exact computations on Sullivan models")]
pub struct Cli {
    /// Use a built-in example instead of a document file.
    #[arg(long, global = true)]
    pub builtin: Option<String>,
    /// Block to use when the document has several candidates.
    #[arg(long, global = true)]
    pub name: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cohomology of an algebra (or of the total space of a `ks` block).
    Cohomology {
        model: Option<PathBuf>,
        #[arg(long, value_parser = parse_range)]
        degree: (u32, u32),
    },
    /// Gottlieb group of a minimal algebra.
    Gottlieb {
        model: Option<PathBuf>,
        #[arg(long)]
        degree: u32,
    },
    /// Evaluation subgroup of a morphism or of a KS-extension's base inclusion.
    Evsub {
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        degree: u32,
    },
    /// Homology of the derivation complex of an algebra.
    Derhom {
        model: Option<PathBuf>,
        #[arg(long)]
        degree: u32,
    },
    /// The map H^k(X) -> H^{k-n+1}(X) of every class in H_{n-1}(Der X).
    Rho {
        model: Option<PathBuf>,
        #[arg(long)]
        sphere: u32,
        #[arg(long)]
        cap: u32,
    },
    /// Whether an extension over a sphere is tncz.
    Tncz {
        #[arg(long)]
        twist: Option<PathBuf>,
        #[arg(long)]
        cap: Option<u32>,
        /// Parameter value, e.g. `c=1`; unset parameters are 1.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Classifying class of an extension over a sphere.
    Trivial {
        #[arg(long)]
        ks: Option<PathBuf>,
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// A retraction of an extension over a sphere onto the sphere.
    Section {
        #[arg(long)]
        ks: Option<PathBuf>,
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Trivial fibration with section and lift through a generator projection.
    Build {
        #[arg(long)]
        projection: Option<PathBuf>,
        /// `gen=value`, value a rational or a one-letter parameter expression.
        #[arg(long = "class")]
        class: Vec<String>,
    },
    /// Solve the lifting problem over a given twist.
    Lift {
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        twist: Option<PathBuf>,
        #[arg(long)]
        twist_name: Option<String>,
        #[arg(long = "class")]
        class: Vec<String>,
        #[arg(long, default_value_t = 2)]
        max_params: usize,
    },
    /// Re-check a lift certificate.
    Verify {
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Relaxed evaluation, tncz and sectional subgroups of a map.
    Classify {
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, value_parser = parse_range)]
        degrees: (u32, u32),
        #[arg(long)]
        cap: Option<u32>,
    },
    /// List the built-in examples.
    Corpus,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b),
        None => (s, s),
    };
    let a: u32 = a.trim().parse().map_err(|_| format!("bad degree `{a}`"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad degree `{b}`"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

/// Exit code and output streams of one invocation.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or(Value::Null)
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(&cli) {
        Ok(v) => Outcome {
            code: 0,
            stdout: render(&v),
            stderr: String::new(),
        },
        Err(e) => {
            let mut err = json!({ "message": e.to_string(), "exit_code": e.exit_code() });
            if let CliError::Syntax(d) = &e {
                err["line"] = json!(d.pos.line);
                err["column"] = json!(d.pos.col);
            }
            if let CliError::Resolve { pos, .. } = &e {
                err["line"] = json!(pos.line);
                err["column"] = json!(pos.col);
            }
            Outcome {
                code: e.exit_code(),
                stdout: render(&json!({ "error": err })),
                stderr: format!("error: {e}\n"),
            }
        }
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- inputs

struct Loaded {
    doc: Document,
    ws: Workspace,
    entry: Option<&'static Entry>,
    origin: String,
}

fn load(path: Option<&PathBuf>, builtin: Option<&str>) -> CliResult<Loaded> {
    match (path, builtin) {
        (Some(_), Some(_)) => Err(CliError::usage("give either a document path or --builtin, not both")),
        (None, None) => Err(CliError::usage("a document path or --builtin KEY is required")),
        (None, Some(key)) => {
            let entry = corpus::entry(key).ok_or_else(|| {
                CliError::usage(format!("unknown built-in `{key}` (known: {})", corpus::keys().join(", ")))
            })?;
            let (doc, ws) = model::load(entry.document)?;
            Ok(Loaded {
                doc,
                ws,
                entry: Some(entry),
                origin: format!("builtin:{key}"),
            })
        }
        (Some(p), None) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            let (doc, ws) = model::load(&text)?;
            Ok(Loaded {
                doc,
                ws,
                entry: None,
                origin: p.display().to_string(),
            })
        }
    }
}

impl Loaded {
    fn pick(&self, role: &str, kinds: &[&str], name: Option<&str>) -> CliResult<(&str, &Block)> {
        let accept = |n: &str| -> CliResult<Option<(&str, &Block)>> {
            match self.ws.blocks.iter().find(|(k, _)| k == n) {
                Some((k, b)) if kinds.contains(&b.kind()) => Ok(Some((k.as_str(), b))),
                Some((_, b)) => Err(CliError::usage(format!(
                    "`{n}` is a {} block; expected {}",
                    b.kind(),
                    kinds.join(" or ")
                ))),
                None => Ok(None),
            }
        };
        if let Some(n) = name {
            return accept(n)?.ok_or_else(|| CliError::usage(format!("no block named `{n}`")));
        }
        if let Some(n) = self.entry.and_then(|e| e.default_for(role)) {
            if let Some(found) = accept(n)? {
                return Ok(found);
            }
        }
        let candidates: Vec<&(String, Block)> =
            self.ws.blocks.iter().filter(|(_, b)| kinds.contains(&b.kind())).collect();
        match candidates.as_slice() {
            [(n, b)] => Ok((n.as_str(), b)),
            [] => Err(CliError::usage(format!("{} has no {} block", self.origin, kinds.join(" or ")))),
            many => Err(CliError::usage(format!(
                "{} has several candidates ({}); choose one with --name",
                self.origin,
                many.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    fn model(&self, name: Option<&str>) -> CliResult<(String, Cdga)> {
        let (n, b) = self.pick("model", &["algebra", "ks"], name)?;
        let a = match b {
            Block::Algebra(a) => a.clone(),
            Block::Ks(k) => k.total().clone(),
            _ => unreachable!("filtered by kind"),
        };
        Ok((n.to_string(), a))
    }

    fn map_model(&self, name: Option<&str>) -> CliResult<(String, MapModel)> {
        let (n, b) = self.pick("map", &["morphism", "ks"], name)?;
        let m = match b {
            Block::Morphism(m) => MapModel::from_morphism(m.clone()),
            Block::Ks(k) => MapModel::from_ks(k.clone()),
            _ => unreachable!("filtered by kind"),
        };
        Ok((n.to_string(), m))
    }

    fn morphism(&self, name: Option<&str>) -> CliResult<(String, Morphism)> {
        let (n, b) = self.pick("map", &["morphism", "ks"], name)?;
        let m = match b {
            Block::Morphism(m) => m.clone(),
            Block::Ks(k) => k.inclusion(),
            _ => unreachable!("filtered by kind"),
        };
        Ok((n.to_string(), m))
    }

    fn twist(&self, name: Option<&str>) -> CliResult<(String, ResolvedTwist)> {
        let (n, b) = self.pick("twist", &["twist"], name)?;
        let Block::Twist(t) = b else { unreachable!("filtered by kind") };
        Ok((n.to_string(), t.clone()))
    }

    /// A `ks` block, or the extension given by a twist or a certificate.
    fn extension(&self, name: Option<&str>) -> CliResult<(String, ExtensionSource)> {
        let (n, b) = self.pick("ks", &["ks", "twist", "certificate"], name)?;
        Ok((
            n.to_string(),
            match b {
                Block::Ks(k) => ExtensionSource::Fixed(k.clone()),
                Block::Twist(t) => ExtensionSource::Twist(t.clone()),
                Block::Certificate(c) => ExtensionSource::Twist(ResolvedTwist {
                    n: c.n,
                    on: String::new(),
                    fiber: c.map.target().clone(),
                    xname: Some(c.xname().to_string()),
                    params: c.params.clone(),
                    values: c.twist.clone(),
                }),
                _ => unreachable!("filtered by kind"),
            },
        ))
    }
}

enum ExtensionSource {
    Fixed(KsExtension),
    Twist(ResolvedTwist),
}

impl ExtensionSource {
    /// Concrete extensions to examine: the given parameter values, or 0 and
    /// every unit vector. Both properties checked on samples (a zero
    /// classifying class, a solvable section system) are affine conditions on
    /// the parameters, so the unit samples decide them everywhere.
    fn samples(&self, given: &BTreeMap<String, Q>) -> CliResult<Vec<(Value, KsExtension)>> {
        match self {
            ExtensionSource::Fixed(k) => {
                if let Some(p) = given.keys().next() {
                    return Err(CliError::usage(format!("`{p}` is not a parameter of this extension")));
                }
                Ok(vec![(json!({}), k.clone())])
            }
            ExtensionSource::Twist(t) => {
                check_params(&t.params, given)?;
                let points: Vec<Vec<Q>> = if !given.is_empty() || t.params.is_empty() {
                    vec![t.params.iter().map(|p| given.get(p).cloned().unwrap_or_else(Q::one)).collect()]
                } else {
                    let k = t.params.len();
                    let mut pts = vec![vec![Q::zero(); k]];
                    for j in 0..k {
                        let mut e = vec![Q::zero(); k];
                        e[j] = Q::one();
                        pts.push(e);
                    }
                    pts
                };
                points
                    .into_iter()
                    .map(|p| Ok((param_json(&t.params, &p), t.extension(&p)?)))
                    .collect()
            }
        }
    }
}

fn check_params(known: &[String], given: &BTreeMap<String, Q>) -> CliResult<()> {
    for p in given.keys() {
        if !known.contains(p) {
            return Err(CliError::usage(format!(
                "`{p}` is not a parameter (parameters: {})",
                if known.is_empty() { "none".to_string() } else { known.join(", ") }
            )));
        }
    }
    Ok(())
}

fn param_json(names: &[String], values: &[Q]) -> Value {
    let m: Map<String, Value> = names
        .iter()
        .zip(values)
        .map(|(n, v)| (n.clone(), json!(v.to_string())))
        .collect();
    Value::Object(m)
}

/// Value of a parameter-free scalar expression.
fn scalar(e: &Expr) -> Option<Q> {
    Some(match e {
        Expr::Num(q) => q.clone(),
        Expr::Var(..) => return None,
        Expr::Neg(a) => -scalar(a)?,
        Expr::Add(a, b) => scalar(a)? + scalar(b)?,
        Expr::Sub(a, b) => scalar(a)? - scalar(b)?,
        Expr::Mul(a, b) => scalar(a)? * scalar(b)?,
        Expr::Pow(a, k) => {
            let base = scalar(a)?;
            (0..*k).fold(Q::one(), |acc, _| acc * &base)
        }
    })
}

fn parse_params(items: &[String]) -> CliResult<BTreeMap<String, Q>> {
    let mut out = BTreeMap::new();
    for it in items {
        let (k, v) = it
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("expected NAME=VALUE, found `{it}`")))?;
        let e = dsl::parse_expr(v)?;
        let q = scalar(&e).ok_or_else(|| CliError::usage(format!("`{v}` is not a rational number")))?;
        out.insert(k.trim().to_string(), q);
    }
    Ok(out)
}

/// `--class gen=value` arguments as affine coordinates on the degree-n
/// generators of `source`.
fn parse_class(source: &Cdga, n: u32, items: &[String], params: &mut Params) -> CliResult<Vec<Affine>> {
    let a = source.algebra();
    let gens = a.generators_of_degree(n);
    let mut class = vec![Affine::constant(Q::zero()); gens.len()];
    for it in items {
        let (g, v) = it
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("expected GEN=VALUE, found `{it}`")))?;
        let g = g.trim();
        let i = a
            .index_of(g)
            .map_err(|_| CliError::usage(format!("`{g}` is not a generator of the source")))?;
        let slot = gens
            .iter()
            .position(|&k| k == i)
            .ok_or_else(|| CliError::usage(format!("`{g}` does not have degree {n}")))?;
        class[slot] = model::eval_scalar(a, &dsl::parse_expr(v)?, params)?;
    }
    Ok(class)
}

// ---------------------------------------------------------------- commands

fn execute(cli: &Cli) -> CliResult<Value> {
    let b = cli.builtin.as_deref();
    let name = cli.name.as_deref();
    match &cli.command {
        Command::Cohomology { model, degree } => {
            let l = load(model.as_ref(), b)?;
            let (n, a) = l.model(name)?;
            let degrees: Vec<Value> = (degree.0..=degree.1)
                .map(|k| {
                    let h = a.cohomology(k);
                    json!({
                        "degree": k,
                        "dim": h.dim(),
                        "representatives": h.representatives.iter().map(|p| a.algebra().format(p)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(json!({ "command": "cohomology", "model": n, "degrees": degrees }))
        }
        Command::Gottlieb { model, degree } => {
            let l = load(model.as_ref(), b)?;
            let (n, a) = l.model(name)?;
            let g = gottlieb_group(&a, *degree)?;
            let mut out = evaluation_json(&DerivationComplex::endomorphisms(&a), *degree)?;
            out["dim"] = json!(g.dim());
            out["command"] = json!("gottlieb");
            out["model"] = json!(n);
            Ok(out)
        }
        Command::Evsub { map, degree } => {
            let l = load(map.as_ref(), b)?;
            let (n, m) = l.map_model(name)?;
            let mut out = evaluation_json(&DerivationComplex::new(m.map()), *degree)?;
            out["command"] = json!("evsub");
            out["map"] = json!(n);
            Ok(out)
        }
        Command::Derhom { model, degree } => {
            let l = load(model.as_ref(), b)?;
            let (n, a) = l.model(name)?;
            a.require_minimal("derivation homology")?;
            let c = DerivationComplex::endomorphisms(&a);
            let h = c.homology(*degree)?;
            Ok(json!({
                "command": "derhom",
                "model": n,
                "degree": degree,
                "dim": h.dim(),
                "chains": h.basis.dim(),
                "cycles": h.cycles.dim(),
                "boundaries": h.boundaries.dim(),
                "classes": h.classes.iter().map(|t| c.format(t)).collect::<Vec<_>>(),
            }))
        }
        Command::Rho { model, sphere, cap } => {
            let l = load(model.as_ref(), b)?;
            let (n, a) = l.model(name)?;
            rho_json(&n, &a, *sphere, *cap)
        }
        Command::Tncz { twist, cap, params } => {
            let l = load(twist.as_ref(), b)?;
            let (n, t) = l.twist(name)?;
            let given = parse_params(params)?;
            check_params(&t.params, &given)?;
            let values: Vec<Q> = t.params.iter().map(|p| given.get(p).cloned().unwrap_or_else(Q::one)).collect();
            let ks = t.extension(&values)?;
            let cap = cap.unwrap_or_else(|| sullivan_core::reports::default_cap(t.fiber.algebra(), t.n));
            let verdict = sullivan_core::fibrations::is_tncz(&ks, cap)?;
            let x = ks.fiber();
            let dims: Vec<Value> = (0..=cap)
                .map(|k| {
                    let f = x.cohomology(k).dim();
                    let below = if k >= t.n { x.cohomology(k - t.n).dim() } else { 0 };
                    json!({ "degree": k, "total": ks.total().cohomology(k).dim(), "fiber": f, "product": f + below })
                })
                .collect();
            Ok(json!({
                "command": "tncz",
                "twist": n,
                "n": t.n,
                "cap": cap,
                "params": param_json(&t.params, &values),
                "tncz": verdict,
                "cohomology": dims,
            }))
        }
        Command::Trivial { ks, params } => {
            let l = load(ks.as_ref(), b)?;
            let (n, src) = l.extension(name)?;
            let mut samples = Vec::new();
            let mut all = true;
            for (p, ks) in src.samples(&parse_params(params)?)? {
                let cc = classifying_class(&ks)?;
                all &= cc.is_zero();
                samples.push(json!({
                    "params": p,
                    "twist": cc.complex.format(&cc.theta),
                    "homology_dim": cc.homology.dim(),
                    "class": cc.coordinates.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                    "trivial": cc.is_zero(),
                }));
            }
            Ok(json!({ "command": "trivial", "ks": n, "trivial": all, "samples": samples }))
        }
        Command::Section { ks, params } => {
            let l = load(ks.as_ref(), b)?;
            let (n, src) = l.extension(name)?;
            let mut samples = Vec::new();
            let mut all = true;
            for (p, ks) in src.samples(&parse_params(params)?)? {
                let r = find_section_over_sphere(&ks)?;
                all &= r.is_some();
                let images = r.map(|r| {
                    let ta = ks.total().algebra();
                    let sa = ks.base().algebra();
                    let m: Map<String, Value> = (0..ta.arity())
                        .map(|i| (ta.generator(i).name.clone(), json!(sa.format(r.image(i)))))
                        .collect();
                    Value::Object(m)
                });
                samples.push(json!({ "params": p, "exists": images.is_some(), "section": images }));
            }
            Ok(json!({ "command": "section", "ks": n, "exists": all, "samples": samples }))
        }
        Command::Build { projection, class } => {
            let l = load(projection.as_ref(), b)?;
            build(&l, name, class)
        }
        Command::Lift {
            map,
            twist,
            twist_name,
            class,
            max_params,
        } => {
            let l = load(map.as_ref(), b)?;
            let lt = match twist {
                Some(p) => Some(load(Some(p), None)?),
                None => None,
            };
            lift(&l, lt.as_ref().unwrap_or(&l), name, twist_name.as_deref(), class, *max_params)
        }
        Command::Verify { certificate } => {
            let l = load(certificate.as_ref(), b)?;
            let (n, blk) = l.pick("certificate", &["certificate"], name)?;
            let Block::Certificate(c) = blk else { unreachable!("filtered by kind") };
            let mut out = verify_json(c)?;
            out["command"] = json!("verify");
            out["certificate"] = json!(n);
            Ok(out)
        }
        Command::Classify { map, degrees, cap } => {
            let l = load(map.as_ref(), b)?;
            let (n, m) = l.map_model(name)?;
            let ds: Vec<u32> = (degrees.0..=degrees.1).collect();
            let reports = classify(&m, &ds, ClassifyOptions { cap: *cap })?;
            Ok(json!({
                "command": "classify",
                "map": n,
                "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
            }))
        }
        Command::Corpus => Ok(json!({
            "command": "corpus",
            "entries": corpus::ENTRIES.iter().map(|e| json!({ "key": e.key, "title": e.title })).collect::<Vec<_>>(),
        })),
    }
}

/// `G_n` with one δ-cocycle per basis vector as a witness.
fn evaluation_json(c: &DerivationComplex, n: u32) -> CliResult<Value> {
    let g = c.evaluation_subgroup(n)?;
    let basis = c.basis(n);
    let one = Monomial::one(c.target().algebra().arity());
    let coords: Vec<usize> = c
        .source_generators_of_degree(n)
        .iter()
        .map(|&i| basis.index_of(i, &one).expect("(g,1) is a basis symbol"))
        .collect();
    let mut seen = Subspace::zero(coords.len());
    let mut witnesses = Vec::new();
    for z in c.cycles(n).basis() {
        let image: Vec<Q> = coords.iter().map(|&k| z[k].clone()).collect();
        if image.iter().all(Zero::is_zero) || seen.contains(&image) {
            continue;
        }
        seen = seen.sum(&Subspace::span(coords.len(), &[image]));
        witnesses.push(c.format(&c.from_coordinates(&basis, &z)));
    }
    Ok(json!({
        "degree": n,
        "dim": g.dim(),
        "generators": g.generators,
        "basis": g.basis_strings(),
        "cocycles": witnesses,
    }))
}

fn class_term(coeff: &Q, rep: &str) -> (bool, String) {
    let abs = if coeff < &Q::zero() { -coeff.clone() } else { coeff.clone() };
    let body = if abs.is_one() { format!("[{rep}]") } else { format!("{abs}*[{rep}]") };
    (coeff < &Q::zero(), body)
}

fn rho_json(name: &str, a: &Cdga, n: u32, cap: u32) -> CliResult<Value> {
    let r = rho(a, n, cap)?;
    let complex = DerivationComplex::endomorphisms(a);
    let alg = a.algebra();
    let mut classes = Vec::new();
    for (theta, blocks) in r.homology.classes.iter().zip(&r.blocks) {
        let mut maps = Vec::new();
        for blk in blocks {
            if blk.matrix.is_zero() {
                continue;
            }
            let src = a.cohomology(blk.k);
            let dst = a.cohomology(blk.k + 1 - n);
            let rows = blk.matrix.to_rows();
            for (j, w) in src.representatives.iter().enumerate() {
                let mut s = String::new();
                for (i, u) in dst.representatives.iter().enumerate() {
                    let c = &rows[i][j];
                    if c.is_zero() {
                        continue;
                    }
                    let (neg, body) = class_term(c, &alg.format(u));
                    if s.is_empty() {
                        if neg {
                            s.push('-');
                        }
                    } else {
                        s.push_str(if neg { " - " } else { " + " });
                    }
                    s.push_str(&body);
                }
                if !s.is_empty() {
                    maps.push(format!("[{}] -> {s}", alg.format(w)));
                }
            }
        }
        classes.push(json!({ "derivation": complex.format(theta), "maps": maps }));
    }
    Ok(json!({
        "command": "rho",
        "model": name,
        "n": n,
        "cap": cap,
        "homology_dim": r.homology.dim(),
        "zero": r.is_zero(),
        "classes": classes,
    }))
}

fn verdict_json(v: &Verdict, gens: &[String]) -> Value {
    let mut out = json!({ "kind": v.kind() });
    if let Some(s) = v.space() {
        out["dim"] = json!(s.dim());
        out["basis"] = json!(SubgroupStatus::basis_strings(s, gens));
    }
    out
}

pub fn report_json(r: &SubgroupStatus) -> Value {
    json!({
        "n": r.n,
        "pi_rank": r.pi_rank,
        "generators": r.generators,
        "G": { "dim": r.g.dim(), "basis": SubgroupStatus::basis_strings(&r.g, &r.generators) },
        "gcal": verdict_json(&r.gcal, &r.generators),
        "tcal": verdict_json(&r.tcal, &r.generators),
        "scal": verdict_json(&r.scal, &r.generators),
        "evidence": r.evidence.iter().map(|e| json!({
            "kind": e.kind.as_str(),
            "tag": e.tag,
            "subgroup": e.subgroup,
            "detail": e.detail,
            "verified": e.verified,
        })).collect::<Vec<_>>(),
    })
}

/// Named images of a list of families.
fn family_map(names: impl Iterator<Item = String>, fams: &[LinearFamily], fmt: impl Fn(&LinearFamily) -> String) -> Value {
    let m: Map<String, Value> = names.zip(fams).map(|(n, f)| (n, json!(fmt(f)))).collect();
    Value::Object(m)
}

fn certificate_parts(c: &LiftCertificate) -> Value {
    let xa = c.map.target().algebra();
    let ya = c.map.source().algebra();
    let sa = c.sphere.algebra();
    let pn = |k: usize| c.param_name(k);
    let gens_n = ya.generators_of_degree(c.n);
    let class: Map<String, Value> = gens_n
        .iter()
        .zip(&c.class)
        .map(|(&g, a)| (ya.generator(g).name.clone(), json!(a.format(&pn))))
        .collect();
    json!({
        "n": c.n,
        "params": c.params,
        "class": Value::Object(class),
        "twist": family_map(xa.generators().iter().map(|g| g.name.clone()), &c.twist, |f| f.format(xa, &pn)),
        "differential": family_map(c.total.generators().iter().map(|g| g.name.clone()), &c.differential, |f| c.format_total(f)),
        "lift": family_map(ya.generators().iter().map(|g| g.name.clone()), &c.lift, |f| c.format_total(f)),
        "section": family_map(c.total.generators().iter().map(|g| g.name.clone()), &c.section, |f| f.format(sa, &pn)),
    })
}

fn verify_json(c: &LiftCertificate) -> CliResult<Value> {
    let check = c.verify()?;
    let samples: Vec<Value> = check
        .samples
        .iter()
        .map(|(p, d)| json!({ "params": param_json(&c.params, p), "passed": d.passed(), "failures": d.failures }))
        .collect();
    Ok(json!({
        "passed": check.passed(),
        "symbolic_failures": check.symbolic_failures,
        "samples": samples,
    }))
}

/// Items a block depends on, in document order, followed by the block.
fn dependencies(doc: &Document, name: &str) -> Vec<Item> {
    fn item_name(it: &Item) -> Option<&str> {
        match it {
            Item::Algebra(a) => Some(&a.name),
            Item::Morphism(m) => Some(&m.name),
            Item::Ks(k) => Some(&k.name),
            Item::Twist(t) => t.name.as_deref(),
            Item::Certificate(c) => Some(&c.name),
        }
    }
    fn refs(it: &Item) -> Vec<&str> {
        match it {
            Item::Algebra(_) => vec![],
            Item::Morphism(m) => vec![&m.source, &m.target],
            Item::Ks(k) => vec![&k.base],
            Item::Twist(t) => vec![&t.on],
            Item::Certificate(c) => vec![&c.map],
        }
    }
    let mut need = vec![name.to_string()];
    let mut i = 0;
    while i < need.len() {
        if let Some(it) = doc.items.iter().find(|it| item_name(it) == Some(need[i].as_str())) {
            for r in refs(it) {
                if !need.iter().any(|n| n == r) {
                    need.push(r.to_string());
                }
            }
        }
        i += 1;
    }
    doc.items
        .iter()
        .filter(|it| item_name(it).is_some_and(|n| need.iter().any(|k| k == n)))
        .cloned()
        .collect()
}

/// DSL text of a certificate for the morphism `map_name` of `doc`.
fn certificate_document(doc: &Document, map_name: &str, cert_name: &str, c: &LiftCertificate) -> CliResult<String> {
    let xa = c.map.target().algebra();
    let ya = c.map.source().algebra();
    let sa = c.sphere.algebra();
    let pn = |k: usize| c.param_name(k);
    let mut entries = Vec::new();
    let mut push = |field: CertField, name: &str, text: String| -> CliResult<()> {
        entries.push((
            field,
            dsl::Assign {
                name: name.to_string(),
                expr: dsl::parse_expr(&text)?,
                pos: Default::default(),
            },
        ));
        Ok(())
    };
    for (&g, a) in ya.generators_of_degree(c.n).iter().zip(&c.class) {
        push(CertField::Class, &ya.generator(g).name, a.format(&pn))?;
    }
    for (g, t) in xa.generators().iter().zip(&c.twist) {
        if !t.is_zero() {
            push(CertField::Theta, &g.name, t.format(xa, &pn))?;
        }
    }
    for (g, f) in ya.generators().iter().zip(&c.lift) {
        push(CertField::Lift, &g.name, c.format_total(f))?;
    }
    for (g, s) in c.total.generators().iter().zip(&c.section) {
        if !s.is_zero() {
            push(CertField::Section, &g.name, s.format(sa, &pn))?;
        }
    }
    let mut items = dependencies(doc, map_name);
    items.push(Item::Certificate(dsl::CertificateDecl {
        name: cert_name.to_string(),
        map: map_name.to_string(),
        n: c.n,
        xname: Some(c.xname().to_string()),
        entries,
        pos: Default::default(),
    }));
    let text = Document { items }.to_string();
    // the emitted text must load back to the same certificate
    let (_, ws) = model::load(&text)?;
    match ws.get(cert_name) {
        Some(Block::Certificate(back)) if back.lift == c.lift && back.twist == c.twist => Ok(text),
        _ => Err(sullivan_core::Error::Inconsistent("certificate text does not reload to the same lift".into()).into()),
    }
}

fn build(l: &Loaded, name: Option<&str>, class_args: &[String]) -> CliResult<Value> {
    let (pname, b) = l.pick("map", &["morphism"], name)?;
    let Block::Morphism(p) = b else { unreachable!("filtered by kind") };
    let n = match class_args.first().and_then(|c| c.split_once('=')) {
        Some((g, _)) => {
            let a = p.source().algebra();
            let i = a
                .index_of(g.trim())
                .map_err(|_| CliError::usage(format!("`{g}` is not a generator of the source")))?;
            a.degree_of(i)
        }
        None => return Err(CliError::usage("build needs at least one --class gen=value")),
    };
    let mut params = Params::open();
    let class = parse_class(p.source(), n, class_args, &mut params)?;
    let names = params.names().to_vec();
    // the construction is linear in the class: evaluate at the constant part
    // and at each parameter direction, then interpolate
    let empty = BTreeMap::new();
    let a0: Vec<Q> = class.iter().map(|a| a.eval(&empty)).collect();
    let mut points = vec![a0.clone()];
    for j in 0..names.len() {
        points.push(class.iter().map(|a| a.constant.clone() + a.coeffs.get(&j).cloned().unwrap_or_default()).collect());
    }
    let built = points
        .iter()
        .map(|a| build_trivial_fibration(p, n, a))
        .collect::<sullivan_core::Result<Vec<_>>>()?;
    let base = &built[0];
    let combine = |get: &dyn Fn(&sullivan_core::fibrations::TrivialFibration) -> Vec<sullivan_core::Polynomial>| {
        let v0 = get(base);
        let mut fams: Vec<LinearFamily> = v0.iter().cloned().map(LinearFamily::fixed).collect();
        for (j, b) in built[1..].iter().enumerate() {
            for (f, (pj, p0)) in fams.iter_mut().zip(get(b).iter().zip(&v0)) {
                f.add_unknown_term(j, &(pj - p0), &Q::one());
            }
        }
        fams
    };
    let twist = combine(&|t| t.twist.values.clone());
    let lift_images = combine(&|t| t.lift_images.clone());
    let total = base.extension.total().algebra().clone();
    let xname = base.extension.base().algebra().generator(0).name.clone();
    let section: Vec<LinearFamily> = (0..total.arity())
        .map(|i| LinearFamily::fixed(base.section.image(i).clone()))
        .collect();
    let cert = LiftCertificate::new(
        p.clone(),
        n,
        Some(xname),
        names.clone(),
        class,
        twist,
        lift_images,
        section,
    )?;
    let verification = verify_json(&cert)?;
    let gates: Vec<Value> = points
        .iter()
        .zip(&built)
        .map(|(a, t)| {
            let g = &t.gates;
            json!({
                "class": a.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                "passed": g.passed(),
                "differential_squares_to_zero": g.differential_squares_to_zero,
                "lift_is_chain_map": g.lift_is_chain_map,
                "fiber_composite": g.fiber_composite,
                "section_composite": g.section_composite,
                "classifying_class_zero": g.classifying_class_zero,
                "section_found": g.section_found,
                "failures": g.failures,
            })
        })
        .collect();
    let mut out = certificate_parts(&cert);
    out["command"] = json!("build");
    out["projection"] = json!(pname);
    out["gates"] = json!(gates);
    out["verified"] = verification["passed"].clone();
    out["verification"] = verification;
    out["document"] = json!(certificate_document(&l.doc, pname, "C", &cert)?);
    Ok(out)
}

fn obstruction_json(o: &Obstruction) -> Value {
    let achievable = o.achievable.as_ref().map(|(p0, span)| {
        json!({
            "point": param_json(&o.params, p0),
            "directions": span.basis().iter().map(|v| param_json(&o.params, v)).collect::<Vec<_>>(),
        })
    });
    let witness = o.cohomology.as_ref().map(|w| {
        json!({
            "generator": w.generator,
            "degree": w.degree,
            "boundary": w.boundary,
            "residual": w.residual,
            "class": w.class.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        })
    });
    json!({
        "outcome": "obstructed",
        "achievable": achievable,
        "at": param_json(&o.params, &o.at),
        "generator": o.generator,
        "degree": o.degree,
        "certificate_equations": o.certificate.support(),
        "witness": witness,
        "verified": o.verify(),
    })
}

fn lift(
    l: &Loaded,
    lt: &Loaded,
    name: Option<&str>,
    twist_name: Option<&str>,
    class_args: &[String],
    max_params: usize,
) -> CliResult<Value> {
    let (mname, map) = l.morphism(name)?;
    let (tname, t) = lt.twist(twist_name)?;
    if map.target().algebra() != t.fiber.algebra() {
        return Err(CliError::usage(format!("twist `{tname}` is not on the target of `{mname}`")));
    }
    let mut params = Params::from_names(t.params.clone());
    let class = parse_class(map.source(), t.n, class_args, &mut params)?;
    let problem = LiftProblem {
        map,
        n: t.n,
        params: params.names().to_vec(),
        class,
        twist: t.values.clone(),
        twist_family: Vec::new(),
        xname: t.xname.clone(),
    };
    let outcome = solve_lift(
        &problem,
        LiftOptions {
            max_parameters: max_params,
        },
    )?;
    let mut out = match outcome {
        LiftOutcome::Found(c) => {
            let mut v = certificate_parts(&c);
            let check = verify_json(&c)?;
            v["outcome"] = json!("found");
            v["verified"] = check["passed"].clone();
            v["verification"] = check;
            if matches!(l.ws.get(&mname), Some(Block::Morphism(_))) {
                v["document"] = json!(certificate_document(&l.doc, &mname, "C", &c)?);
            }
            v
        }
        LiftOutcome::Obstructed(o) => obstruction_json(&o),
        LiftOutcome::Undetermined { reason } => json!({ "outcome": "undetermined", "reason": reason }),
    };
    out["command"] = json!("lift");
    out["map"] = json!(mname);
    out["twist_block"] = json!(tname);
    Ok(out)
}
