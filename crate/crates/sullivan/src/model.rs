//! Resolution of parsed documents into core objects.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use sullivan_core::affine::{self, Affine, LinearFamily};
use sullivan_core::derivations::Derivation;
use sullivan_core::fibrations::{sphere_base, sphere_generator_name, sphere_total_algebra, twist_to_extension};
use sullivan_core::lift::LiftCertificate;
use sullivan_core::{Cdga, FreeCga, Generator, KsExtension, Morphism, Polynomial, Q};

use crate::dsl::{AlgebraStmt, Assign, CertField, CertificateDecl, Document, Expr, Item, KsDecl, Pos, TwistDecl};
use crate::error::{CliError, CliResult};

/// Names of single-letter parameters in the order they first appear.
#[derive(Clone, Debug, Default)]
pub struct Params {
    names: Vec<String>,
    open: bool,
}

impl Params {
    pub fn open() -> Self {
        Params {
            names: Vec::new(),
            open: true,
        }
    }

    pub fn closed() -> Self {
        Params::default()
    }

    pub fn from_names(names: Vec<String>) -> Self {
        Params { names, open: true }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn index(&mut self, name: &str) -> Option<usize> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return Some(i);
        }
        if self.open && name.chars().count() == 1 {
            self.names.push(name.to_string());
            return Some(self.names.len() - 1);
        }
        None
    }
}

/// Evaluate an expression in `alg`; names that are not generators become
/// parameters when `params` allows it.
pub fn eval(alg: &FreeCga, expr: &Expr, params: &mut Params) -> CliResult<LinearFamily> {
    Ok(match expr {
        Expr::Num(q) => LinearFamily::fixed(alg.constant(q.clone())),
        Expr::Var(name, pos) => match alg.index_of(name) {
            Ok(i) => LinearFamily::fixed(alg.gen(i)),
            Err(_) => match params.index(name) {
                Some(k) => LinearFamily::unknown(alg.ambient(), k, alg.one()),
                None => {
                    let extra = if params.open {
                        " (parameters are single letters)"
                    } else {
                        ""
                    };
                    return Err(CliError::resolve(*pos, format!("unknown generator `{name}`{extra}")));
                }
            },
        },
        Expr::Neg(e) => eval(alg, e, params)?.scale(&-Q::one()),
        Expr::Add(a, b) => eval(alg, a, params)?.plus(&eval(alg, b, params)?),
        Expr::Sub(a, b) => eval(alg, a, params)?.minus(&eval(alg, b, params)?),
        Expr::Mul(a, b) => {
            let (l, r) = (eval(alg, a, params)?, eval(alg, b, params)?);
            affine::mul(alg, &l, &r).map_err(|e| CliError::resolve(first_pos(expr), e.to_string()))?
        }
        Expr::Pow(b, k) => {
            let base = eval(alg, b, params)?;
            let mut acc = LinearFamily::fixed(alg.one());
            for _ in 0..*k {
                acc = affine::mul(alg, &acc, &base).map_err(|e| CliError::resolve(first_pos(expr), e.to_string()))?;
            }
            acc
        }
    })
}

fn first_pos(e: &Expr) -> Pos {
    match e {
        Expr::Var(_, p) => *p,
        Expr::Num(_) => Pos::default(),
        Expr::Neg(a) | Expr::Pow(a, _) => first_pos(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            let p = first_pos(a);
            if p.line == 0 {
                first_pos(b)
            } else {
                p
            }
        }
    }
}

/// Evaluate an expression that may not mention parameters.
pub fn eval_fixed(alg: &FreeCga, expr: &Expr) -> CliResult<Polynomial> {
    Ok(eval(alg, expr, &mut Params::closed())?.constant)
}

/// Evaluate a scalar expression affine in the parameters.
pub fn eval_scalar(alg: &FreeCga, expr: &Expr, params: &mut Params) -> CliResult<Affine> {
    let fam = eval(alg, expr, params)?;
    let one = sullivan_core::Monomial::one(alg.arity());
    let scalar = |p: &Polynomial| p.terms().all(|(m, _)| m.is_one());
    if !scalar(&fam.constant) || !fam.coeffs.values().all(scalar) {
        return Err(CliError::resolve(first_pos(expr), "expected a rational number or parameter expression"));
    }
    Ok(fam.coefficient(&one))
}

fn check_degree(alg: &FreeCga, p: &Polynomial, expected: i64, what: &str, pos: Pos) -> CliResult<()> {
    match alg.homogeneous_degree(p) {
        Ok(Some(d)) if i64::from(d) != expected => Err(CliError::resolve(
            pos,
            format!("{what} has degree {d}, expected {expected}"),
        )),
        Ok(_) => Ok(()),
        Err(e) => Err(CliError::resolve(pos, format!("{what}: {e}"))),
    }
}

fn check_family_degree(alg: &FreeCga, f: &LinearFamily, expected: i64, what: &str, pos: Pos) -> CliResult<()> {
    check_degree(alg, &f.constant, expected, what, pos)?;
    for p in f.coeffs.values() {
        check_degree(alg, p, expected, what, pos)?;
    }
    Ok(())
}

/// A twist θ ∈ Der_{n-1}(X), affine in its parameters.
#[derive(Clone, Debug)]
pub struct ResolvedTwist {
    pub n: u32,
    pub on: String,
    pub fiber: Cdga,
    pub xname: Option<String>,
    pub params: Vec<String>,
    pub values: Vec<LinearFamily>,
}

impl ResolvedTwist {
    pub fn at(&self, values: &[Q]) -> Derivation {
        let m: BTreeMap<usize, Q> = values.iter().cloned().enumerate().collect();
        Derivation {
            degree: self.n - 1,
            values: self.values.iter().map(|v| v.instantiate(&m)).collect(),
        }
    }

    pub fn extension(&self, values: &[Q]) -> CliResult<KsExtension> {
        Ok(twist_to_extension(&self.fiber, self.n, &self.at(values), self.xname.as_deref())?)
    }
}

#[derive(Clone, Debug)]
pub enum Block {
    Algebra(Cdga),
    Morphism(Morphism),
    Ks(KsExtension),
    Twist(ResolvedTwist),
    Certificate(Box<LiftCertificate>),
}

impl Block {
    pub fn kind(&self) -> &'static str {
        match self {
            Block::Algebra(_) => "algebra",
            Block::Morphism(_) => "morphism",
            Block::Ks(_) => "ks",
            Block::Twist(_) => "twist",
            Block::Certificate(_) => "certificate",
        }
    }
}

/// All blocks of a document, by name, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub blocks: Vec<(String, Block)>,
}

impl Workspace {
    pub fn get(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|(n, _)| n == name).map(|(_, b)| b)
    }

    fn algebra(&self, name: &str, pos: Pos) -> CliResult<&Cdga> {
        match self.get(name) {
            Some(Block::Algebra(a)) => Ok(a),
            Some(Block::Ks(k)) => Ok(k.total()),
            _ => Err(CliError::resolve(pos, format!("no algebra named `{name}`"))),
        }
    }

    fn morphism(&self, name: &str, pos: Pos) -> CliResult<&Morphism> {
        match self.get(name) {
            Some(Block::Morphism(m)) => Ok(m),
            _ => Err(CliError::resolve(pos, format!("no morphism named `{name}`"))),
        }
    }

    fn insert(&mut self, name: String, block: Block, pos: Pos) -> CliResult<()> {
        if self.get(&name).is_some() {
            return Err(CliError::resolve(pos, format!("`{name}` is declared twice")));
        }
        self.blocks.push((name, block));
        Ok(())
    }

    /// Names of blocks of one kind.
    pub fn names_of(&self, kind: &str) -> Vec<&str> {
        self.blocks
            .iter()
            .filter(|(_, b)| b.kind() == kind)
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

/// Resolve every block; later blocks may refer to earlier ones.
pub fn resolve(doc: &Document) -> CliResult<Workspace> {
    let mut ws = Workspace::default();
    let mut unnamed = 0usize;
    for item in &doc.items {
        match item {
            Item::Algebra(a) => {
                let mut gens: Vec<Generator> = Vec::new();
                let mut ds: Vec<&Assign> = Vec::new();
                for s in &a.stmts {
                    match s {
                        AlgebraStmt::Gen { name, degree, trunc, pos } => {
                            if gens.iter().any(|g| &g.name == name) {
                                return Err(CliError::resolve(*pos, format!("generator `{name}` is declared twice")));
                            }
                            gens.push(if *trunc {
                                Generator::truncated(name.clone(), *degree)
                            } else {
                                Generator::new(name.clone(), *degree)
                            });
                        }
                        AlgebraStmt::Trunc { name, pos } => {
                            let g = gens
                                .iter_mut()
                                .find(|g| &g.name == name)
                                .ok_or_else(|| CliError::resolve(*pos, format!("unknown generator `{name}`")))?;
                            *g = Generator::truncated(name.clone(), g.degree);
                        }
                        AlgebraStmt::D(d) => ds.push(d),
                    }
                }
                let alg = FreeCga::new(gens).map_err(|e| CliError::resolve(a.pos, e.to_string()))?;
                let mut d = vec![alg.zero(); alg.arity()];
                for s in ds {
                    let i = alg
                        .index_of(&s.name)
                        .map_err(|_| CliError::resolve(s.pos, format!("unknown generator `{}`", s.name)))?;
                    let p = eval_fixed(&alg, &s.expr)?;
                    check_degree(&alg, &p, i64::from(alg.degree_of(i)) + 1, &format!("d {}", s.name), s.pos)?;
                    d[i] = p;
                }
                let cdga = Cdga::new(alg, d).map_err(|e| CliError::resolve(a.pos, e.to_string()))?;
                ws.insert(a.name.clone(), Block::Algebra(cdga), a.pos)?;
            }
            Item::Morphism(m) => {
                let source = ws.algebra(&m.source, m.pos)?.clone();
                let target = ws.algebra(&m.target, m.pos)?.clone();
                let (sa, ta) = (source.algebra(), target.algebra());
                let mut images = vec![ta.zero(); sa.arity()];
                for a in &m.images {
                    let i = sa
                        .index_of(&a.name)
                        .map_err(|_| CliError::resolve(a.pos, format!("`{}` is not a generator of {}", a.name, m.source)))?;
                    let p = eval_fixed(ta, &a.expr)?;
                    check_degree(ta, &p, i64::from(sa.degree_of(i)), &format!("image of {}", a.name), a.pos)?;
                    images[i] = p;
                }
                let mor = Morphism::new(source, target, images).map_err(|e| CliError::resolve(m.pos, e.to_string()))?;
                ws.insert(m.name.clone(), Block::Morphism(mor), m.pos)?;
            }
            Item::Ks(k) => {
                let ks = resolve_ks(&ws, k)?;
                ws.insert(k.name.clone(), Block::Ks(ks), k.pos)?;
            }
            Item::Twist(t) => {
                let name = t.name.clone().unwrap_or_else(|| {
                    unnamed += 1;
                    if unnamed == 1 {
                        "twist".to_string()
                    } else {
                        format!("twist{unnamed}")
                    }
                });
                let tw = resolve_twist(&ws, t)?;
                ws.insert(name, Block::Twist(tw), t.pos)?;
            }
            Item::Certificate(c) => {
                let cert = resolve_certificate(&ws, c)?;
                ws.insert(c.name.clone(), Block::Certificate(Box::new(cert)), c.pos)?;
            }
        }
    }
    Ok(ws)
}

/// Degree of the first term of an expression, from generator degrees.
fn expr_degree(e: &Expr, deg: &dyn Fn(&str) -> Option<u32>) -> Option<u32> {
    match e {
        Expr::Num(q) => (!q.is_zero()).then_some(0),
        Expr::Var(v, _) => deg(v),
        Expr::Neg(a) => expr_degree(a, deg),
        Expr::Pow(a, k) => expr_degree(a, deg).map(|d| d * k),
        Expr::Add(a, b) | Expr::Sub(a, b) => expr_degree(a, deg).or_else(|| expr_degree(b, deg)),
        Expr::Mul(a, b) => Some(expr_degree(a, deg)? + expr_degree(b, deg)?),
    }
}

fn resolve_ks(ws: &Workspace, k: &KsDecl) -> CliResult<KsExtension> {
    let base = ws.algebra(&k.base, k.pos)?.clone();
    let mut fiber: Vec<Generator> = Vec::new();
    for g in &k.fiber {
        let degree = match g.degree {
            Some(d) => d,
            None => {
                let d = k.d.iter().find(|a| a.name == g.name).ok_or_else(|| {
                    CliError::resolve(g.pos, format!("`{}` needs a degree (no D given)", g.name))
                })?;
                let ba = base.algebra();
                let known = |v: &str| {
                    ba.index_of(v)
                        .ok()
                        .map(|i| ba.degree_of(i))
                        .or_else(|| fiber.iter().find(|f| f.name == v).map(|f| f.degree))
                };
                match expr_degree(&d.expr, &known) {
                    Some(e) if e >= 2 => e - 1,
                    _ => return Err(CliError::resolve(g.pos, format!("cannot infer the degree of `{}`", g.name))),
                }
            }
        };
        fiber.push(Generator::new(g.name.clone(), degree));
    }
    let total = KsExtension::total_algebra(&base, &fiber).map_err(|e| CliError::resolve(k.pos, e.to_string()))?;
    let nb = base.algebra().arity();
    let mut d = vec![total.zero(); fiber.len()];
    for a in &k.d {
        let i = fiber
            .iter()
            .position(|f| f.name == a.name)
            .ok_or_else(|| CliError::resolve(a.pos, format!("`{}` is not a fiber generator", a.name)))?;
        let p = eval_fixed(&total, &a.expr)?;
        check_degree(&total, &p, i64::from(total.degree_of(nb + i)) + 1, &format!("D {}", a.name), a.pos)?;
        d[i] = p;
    }
    KsExtension::new(base, fiber, d).map_err(|e| CliError::resolve(k.pos, e.to_string()))
}

fn resolve_twist(ws: &Workspace, t: &TwistDecl) -> CliResult<ResolvedTwist> {
    let fiber = ws.algebra(&t.on, t.pos)?.clone();
    if t.n < 2 {
        return Err(CliError::resolve(t.pos, "twists need a sphere of dimension at least 2"));
    }
    let xa = fiber.algebra();
    let mut params = Params::open();
    let mut values = vec![LinearFamily::zero(xa.ambient()); xa.arity()];
    for a in &t.theta {
        let i = xa
            .index_of(&a.name)
            .map_err(|_| CliError::resolve(a.pos, format!("`{}` is not a generator of {}", a.name, t.on)))?;
        let f = eval(xa, &a.expr, &mut params)?;
        let expected = i64::from(xa.degree_of(i)) - i64::from(t.n) + 1;
        check_family_degree(xa, &f, expected, &format!("theta {}", a.name), a.pos)?;
        values[i] = f;
    }
    if let Some(x) = &t.xname {
        if xa.index_of(x).is_ok() {
            return Err(CliError::resolve(t.pos, format!("sphere generator `{x}` clashes with a generator of {}", t.on)));
        }
    }
    Ok(ResolvedTwist {
        n: t.n,
        on: t.on.clone(),
        fiber,
        xname: t.xname.clone(),
        params: params.names().to_vec(),
        values,
    })
}

fn resolve_certificate(ws: &Workspace, c: &CertificateDecl) -> CliResult<LiftCertificate> {
    let map = ws.morphism(&c.map, c.pos)?.clone();
    let n = c.n;
    if n < 2 {
        return Err(CliError::resolve(c.pos, "certificates need a sphere of dimension at least 2"));
    }
    let ya = map.source().algebra().clone();
    let xa = map.target().algebra().clone();
    let xname = c.xname.clone().unwrap_or_else(|| sphere_generator_name(&xa));
    let total = sphere_total_algebra(&xa, n, &xname).map_err(|e| CliError::resolve(c.pos, e.to_string()))?;
    let sphere = sphere_base(n, &xname)?;
    let sa = sphere.algebra();
    let k = xa.arity();
    let positions: Vec<usize> = (0..k).collect();
    let deg_n = ya.generators_of_degree(n);

    let mut params = Params::open();
    let mut class = vec![Affine::constant(Q::zero()); deg_n.len()];
    let mut twist = vec![LinearFamily::zero(xa.ambient()); k];
    let mut lift: Vec<LinearFamily> = (0..ya.arity())
        .map(|i| LinearFamily::fixed(xa.embed(map.image(i), &total, &positions)))
        .collect();
    let mut section: Vec<LinearFamily> = (0..total.arity())
        .map(|i| LinearFamily::fixed(if i == k { sa.gen(0) } else { sa.zero() }))
        .collect();
    for (field, a) in &c.entries {
        let unknown = |what: &str| CliError::resolve(a.pos, format!("`{}` is not a generator of {what}", a.name));
        match field {
            CertField::Class => {
                let i = ya.index_of(&a.name).map_err(|_| unknown("the source"))?;
                let slot = deg_n
                    .iter()
                    .position(|&g| g == i)
                    .ok_or_else(|| CliError::resolve(a.pos, format!("`{}` does not have degree {n}", a.name)))?;
                class[slot] = eval_scalar(&ya, &a.expr, &mut params)?;
            }
            CertField::Theta => {
                let i = xa.index_of(&a.name).map_err(|_| unknown("the target"))?;
                let f = eval(&xa, &a.expr, &mut params)?;
                let expected = i64::from(xa.degree_of(i)) - i64::from(n) + 1;
                check_family_degree(&xa, &f, expected, &format!("theta {}", a.name), a.pos)?;
                twist[i] = f;
            }
            CertField::Lift => {
                let i = ya.index_of(&a.name).map_err(|_| unknown("the source"))?;
                let f = eval(&total, &a.expr, &mut params)?;
                check_family_degree(&total, &f, i64::from(ya.degree_of(i)), &format!("F {}", a.name), a.pos)?;
                lift[i] = f;
            }
            CertField::Section => {
                let i = total.index_of(&a.name).map_err(|_| unknown("the total space"))?;
                let f = eval(sa, &a.expr, &mut params)?;
                check_family_degree(sa, &f, i64::from(total.degree_of(i)), &format!("r {}", a.name), a.pos)?;
                section[i] = f;
            }
        }
    }
    LiftCertificate::new(
        map,
        n,
        Some(xname),
        params.names().to_vec(),
        class,
        twist,
        lift,
        section,
    )
    .map_err(|e| CliError::resolve(c.pos, e.to_string()))
}

/// Parse and resolve in one step.
pub fn load(text: &str) -> CliResult<(Document, Workspace)> {
    let doc = crate::dsl::parse(text)?;
    let ws = resolve(&doc)?;
    Ok((doc, ws))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOPF: &str = "algebra S4 { gen w4 : 4; gen w7 : 7; d w7 = w4^2; }\nks E over S4 fiber (v3) { D v3 = w4; }";

    #[test]
    fn hopf_resolves_with_inferred_degree() {
        let (_, ws) = load(HOPF).unwrap();
        let Some(Block::Ks(ks)) = ws.get("E") else { panic!() };
        assert_eq!(ks.fiber().algebra().degree_of(0), 3);
        assert_eq!(ks.total().algebra().format(ks.total().differential_of(2)), "w4");
    }

    #[test]
    fn undeclared_generator_is_reported_with_position() {
        let text = "algebra Y { gen w4 : 4; }\nalgebra X { gen v2 : 2; }\nmorphism f : Y -> X {\n  w4 = v9^2;\n}";
        let err = load(text).unwrap_err();
        let CliError::Resolve { pos, message } = err else { panic!("{err:?}") };
        assert_eq!((pos.line, pos.col), (4, 8));
        assert!(message.contains("v9"));
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let err = load("algebra A { gen w4 : 4; gen w7 : 7; d w7 = w4; }").unwrap_err();
        assert!(err.to_string().contains("degree 4, expected 8"), "{err}");
    }

    #[test]
    fn parameters_only_in_twists() {
        assert!(load("algebra A { gen v : 2; gen w : 3; d w = c*v^2; }").is_err());
        let (_, ws) = load("algebra A { gen v2 : 2; gen w7 : 7; d w7 = v2^4; }\ntwist over sphere 4 on A { theta w7 = -2*c*v2^2; }")
            .unwrap();
        let Some(Block::Twist(t)) = ws.get("twist") else { panic!() };
        assert_eq!(t.params, vec!["c".to_string()]);
        let ks = t.extension(&[Q::one()]).unwrap();
        let ta = ks.total().algebra();
        assert_eq!(ta.format(ks.total().differential_of(1)), "v2^4 + 2*v2^2*x");
    }
}
