//! Text format for algebras, maps, extensions, twists and lift certificates.
//!
//! ```text
//! algebra S4 { gen w4 : 4; gen w7 : 7; d w7 = w4^2; }
//! algebra CP3 { gen v2 : 2; gen w7 : 7; d w7 = v2^4; }
//! morphism f : S4 -> CP3 { w4 = v2^2; w7 = w7; }
//! ks E over S4 fiber (v3 : 3) { D v3 = w4; }
//! twist T over sphere 4 on CP3 { theta w7 = -2*c*v2^2; }
//! certificate C for f over sphere 4 gen x { a w4 = c; theta w7 = -2*c*v2^2; F w4 = v2^2 + c*x; }
//! ```
//!
//! Comments run from `#` to the end of the line.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use sullivan_core::Q;

/// Source position, 1-based. Positions never take part in equality, so a
/// reparsed document compares equal to the original.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {}, column {}: {message}", pos.line, pos.col)]
pub struct Diagnostic {
    pub pos: Pos,
    pub message: String,
}

impl Diagnostic {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Q),
    Var(String, Pos),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(q) if !q.is_integer() || q.is_negative() => 2,
            Expr::Num(_) | Expr::Var(..) => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.prec() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(q) => write!(f, "{q}")?,
            Expr::Var(v, _) => f.write_str(v)?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write(f, 3)?;
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write(f, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                b.write(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.write(f, 2)?;
                f.write_str("*")?;
                b.write(f, 3)?;
            }
            Expr::Pow(b, k) => {
                b.write(f, 5)?;
                write!(f, "^{k}")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// `name = expr` with the position of the name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assign {
    pub name: String,
    pub expr: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraStmt {
    Gen { name: String, degree: u32, trunc: bool, pos: Pos },
    Trunc { name: String, pos: Pos },
    D(Assign),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDecl {
    pub name: String,
    pub stmts: Vec<AlgebraStmt>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub images: Vec<Assign>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberGen {
    pub name: String,
    pub degree: Option<u32>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KsDecl {
    pub name: String,
    pub base: String,
    pub fiber: Vec<FiberGen>,
    pub d: Vec<Assign>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistDecl {
    pub name: Option<String>,
    pub n: u32,
    pub on: String,
    pub xname: Option<String>,
    pub theta: Vec<Assign>,
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertField {
    Class,
    Theta,
    Lift,
    Section,
}

impl CertField {
    fn keyword(self) -> &'static str {
        match self {
            CertField::Class => "a",
            CertField::Theta => "theta",
            CertField::Lift => "F",
            CertField::Section => "r",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateDecl {
    pub name: String,
    pub map: String,
    pub n: u32,
    pub xname: Option<String>,
    pub entries: Vec<(CertField, Assign)>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Algebra(AlgebraDecl),
    Morphism(MorphismDecl),
    Ks(KsDecl),
    Twist(TwistDecl),
    Certificate(CertificateDecl),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub items: Vec<Item>,
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Arrow, pos));
            i += 2;
            col += 2;
            continue;
        }
        if "{}():;=+-*^/,".contains(c) {
            out.push((Tok::Sym(c), pos));
            i += 1;
            col += 1;
            continue;
        }
        return Err(Diagnostic::new(pos, format!("unexpected character `{c}`")));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

// ---------------------------------------------------------------- parser

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        Err(Diagnostic::new(self.pos(), format!("expected {wanted}, found {}", self.peek())))
    }

    fn sym(&mut self, c: char) -> PResult<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{c}`"))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let p = self.pos();
                self.bump();
                Ok((s, p))
            }
            _ => self.unexpected("a name"),
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn small_int(&mut self, what: &str) -> PResult<u32> {
        match self.peek().clone() {
            Tok::Int(n) => {
                let p = self.pos();
                self.bump();
                u32::try_from(n).map_err(|_| Diagnostic::new(p, format!("{what} is too large")))
            }
            _ => self.unexpected(what),
        }
    }

    fn document(&mut self) -> PResult<Document> {
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            let pos = self.pos();
            let (kw, _) = self.ident()?;
            let item = match kw.as_str() {
                "algebra" => Item::Algebra(self.algebra(pos)?),
                "morphism" => Item::Morphism(self.morphism(pos)?),
                "ks" => Item::Ks(self.ks(pos)?),
                "twist" => Item::Twist(self.twist(pos)?),
                "certificate" => Item::Certificate(self.certificate(pos)?),
                _ => {
                    return Err(Diagnostic::new(
                        pos,
                        format!("expected `algebra`, `morphism`, `ks`, `twist` or `certificate`, found `{kw}`"),
                    ))
                }
            };
            items.push(item);
        }
        Ok(Document { items })
    }

    fn assign(&mut self) -> PResult<Assign> {
        let (name, pos) = self.ident()?;
        self.sym('=')?;
        let expr = self.expr()?;
        self.sym(';')?;
        Ok(Assign { name, expr, pos })
    }

    fn algebra(&mut self, pos: Pos) -> PResult<AlgebraDecl> {
        let (name, _) = self.ident()?;
        self.sym('{')?;
        let mut stmts = Vec::new();
        while !self.eat_sym('}') {
            let p = self.pos();
            let (kw, _) = self.ident()?;
            match kw.as_str() {
                "gen" => {
                    let (g, gp) = self.ident()?;
                    self.sym(':')?;
                    let degree = self.small_int("a degree")?;
                    let trunc = if self.is_kw("trunc") {
                        self.bump();
                        true
                    } else {
                        false
                    };
                    self.sym(';')?;
                    stmts.push(AlgebraStmt::Gen {
                        name: g,
                        degree,
                        trunc,
                        pos: gp,
                    });
                }
                "trunc" => {
                    let (g, gp) = self.ident()?;
                    if let Tok::Int(_) = self.peek() {
                        let ip = self.pos();
                        if self.small_int("a power")? != 2 {
                            return Err(Diagnostic::new(ip, "only square-zero truncation (power 2) is supported"));
                        }
                    }
                    self.sym(';')?;
                    stmts.push(AlgebraStmt::Trunc { name: g, pos: gp });
                }
                "d" => stmts.push(AlgebraStmt::D(self.assign()?)),
                _ => return Err(Diagnostic::new(p, format!("expected `gen`, `d` or `trunc`, found `{kw}`"))),
            }
        }
        Ok(AlgebraDecl { name, stmts, pos })
    }

    fn morphism(&mut self, pos: Pos) -> PResult<MorphismDecl> {
        let (name, _) = self.ident()?;
        self.sym(':')?;
        let (source, _) = self.ident()?;
        if *self.peek() != Tok::Arrow {
            return self.unexpected("`->`");
        }
        self.bump();
        let (target, _) = self.ident()?;
        self.sym('{')?;
        let mut images = Vec::new();
        while !self.eat_sym('}') {
            images.push(self.assign()?);
        }
        Ok(MorphismDecl {
            name,
            source,
            target,
            images,
            pos,
        })
    }

    fn ks(&mut self, pos: Pos) -> PResult<KsDecl> {
        let (name, _) = self.ident()?;
        self.kw("over")?;
        let (base, _) = self.ident()?;
        self.kw("fiber")?;
        self.sym('(')?;
        let mut fiber = Vec::new();
        loop {
            let (g, gp) = self.ident()?;
            let degree = if self.eat_sym(':') {
                Some(self.small_int("a degree")?)
            } else {
                None
            };
            fiber.push(FiberGen {
                name: g,
                degree,
                pos: gp,
            });
            if !self.eat_sym(',') {
                break;
            }
        }
        self.sym(')')?;
        self.sym('{')?;
        let mut d = Vec::new();
        while !self.eat_sym('}') {
            self.kw("D")?;
            d.push(self.assign()?);
        }
        Ok(KsDecl {
            name,
            base,
            fiber,
            d,
            pos,
        })
    }

    fn sphere_header(&mut self) -> PResult<u32> {
        self.kw("over")?;
        self.kw("sphere")?;
        self.small_int("a sphere dimension")
    }

    fn gen_name(&mut self) -> PResult<Option<String>> {
        if self.is_kw("gen") {
            self.bump();
            Ok(Some(self.ident()?.0))
        } else {
            Ok(None)
        }
    }

    fn twist(&mut self, pos: Pos) -> PResult<TwistDecl> {
        let name = if self.is_kw("over") { None } else { Some(self.ident()?.0) };
        let n = self.sphere_header()?;
        self.kw("on")?;
        let (on, _) = self.ident()?;
        let xname = self.gen_name()?;
        self.sym('{')?;
        let mut theta = Vec::new();
        while !self.eat_sym('}') {
            self.kw("theta")?;
            theta.push(self.assign()?);
        }
        Ok(TwistDecl {
            name,
            n,
            on,
            xname,
            theta,
            pos,
        })
    }

    fn certificate(&mut self, pos: Pos) -> PResult<CertificateDecl> {
        let (name, _) = self.ident()?;
        self.kw("for")?;
        let (map, _) = self.ident()?;
        let n = self.sphere_header()?;
        let xname = self.gen_name()?;
        self.sym('{')?;
        let mut entries = Vec::new();
        while !self.eat_sym('}') {
            let p = self.pos();
            let (kw, _) = self.ident()?;
            let field = match kw.as_str() {
                "a" => CertField::Class,
                "theta" => CertField::Theta,
                "F" => CertField::Lift,
                "r" => CertField::Section,
                _ => return Err(Diagnostic::new(p, format!("expected `a`, `theta`, `F` or `r`, found `{kw}`"))),
            };
            entries.push((field, self.assign()?));
        }
        Ok(CertificateDecl {
            name,
            map,
            n,
            xname,
            entries,
            pos,
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_sym('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while self.eat_sym('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat_sym('^') {
            let k = self.small_int("an exponent")?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if self.eat_sym('/') {
                    let dpos = self.pos();
                    let Tok::Int(d) = self.peek().clone() else {
                        return self.unexpected("a denominator");
                    };
                    self.bump();
                    if d == BigInt::from(0) {
                        return Err(Diagnostic::new(dpos, "zero denominator"));
                    }
                    Ok(Expr::Num(Q::new(n, d)))
                } else {
                    Ok(Expr::Num(Q::from_integer(n)))
                }
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::Var(s, pos))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.sym(')')?;
                Ok(e)
            }
            _ => self.unexpected("a number, a name or `(`"),
        }
    }
}

pub fn parse(text: &str) -> Result<Document, Diagnostic> {
    let toks = lex(text)?;
    Parser { toks, at: 0 }.document()
}

/// Parse a single expression, e.g. a command-line class value.
pub fn parse_expr(text: &str) -> Result<Expr, Diagnostic> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.unexpected("end of expression");
    }
    Ok(e)
}

// ---------------------------------------------------------------- printer

fn write_assigns(f: &mut fmt::Formatter<'_>, prefix: &str, items: &[Assign]) -> fmt::Result {
    for a in items {
        writeln!(f, "  {prefix}{} = {};", a.name, a.expr)?;
    }
    Ok(())
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match item {
                Item::Algebra(a) => {
                    writeln!(f, "algebra {} {{", a.name)?;
                    for s in &a.stmts {
                        match s {
                            AlgebraStmt::Gen { name, degree, trunc, .. } => {
                                writeln!(f, "  gen {name} : {degree}{};", if *trunc { " trunc" } else { "" })?
                            }
                            AlgebraStmt::Trunc { name, .. } => writeln!(f, "  trunc {name};")?,
                            AlgebraStmt::D(a) => writeln!(f, "  d {} = {};", a.name, a.expr)?,
                        }
                    }
                    writeln!(f, "}}")?;
                }
                Item::Morphism(m) => {
                    writeln!(f, "morphism {} : {} -> {} {{", m.name, m.source, m.target)?;
                    write_assigns(f, "", &m.images)?;
                    writeln!(f, "}}")?;
                }
                Item::Ks(k) => {
                    let fiber: Vec<String> = k
                        .fiber
                        .iter()
                        .map(|g| match g.degree {
                            Some(d) => format!("{} : {d}", g.name),
                            None => g.name.clone(),
                        })
                        .collect();
                    writeln!(f, "ks {} over {} fiber ({}) {{", k.name, k.base, fiber.join(", "))?;
                    write_assigns(f, "D ", &k.d)?;
                    writeln!(f, "}}")?;
                }
                Item::Twist(t) => {
                    f.write_str("twist ")?;
                    if let Some(n) = &t.name {
                        write!(f, "{n} ")?;
                    }
                    write!(f, "over sphere {} on {}", t.n, t.on)?;
                    if let Some(x) = &t.xname {
                        write!(f, " gen {x}")?;
                    }
                    writeln!(f, " {{")?;
                    write_assigns(f, "theta ", &t.theta)?;
                    writeln!(f, "}}")?;
                }
                Item::Certificate(c) => {
                    write!(f, "certificate {} for {} over sphere {}", c.name, c.map, c.n)?;
                    if let Some(x) = &c.xname {
                        write!(f, " gen {x}")?;
                    }
                    writeln!(f, " {{")?;
                    for (field, a) in &c.entries {
                        writeln!(f, "  {} {} = {};", field.keyword(), a.name, a.expr)?;
                    }
                    writeln!(f, "}}")?;
                }
            }
        }
        Ok(())
    }
}

/// A rational as the DSL writes it.
pub fn rational(q: &Q) -> Expr {
    if q.is_negative() {
        Expr::Neg(Box::new(Expr::Num(-q.clone())))
    } else {
        Expr::Num(q.clone())
    }
}

/// True for the integer 1.
pub fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Num(q) if q.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_round_trip() {
        let text = "algebra S4 { gen w4 : 4; gen w7 : 7; d w7 = w4^2; }\nks E over S4 fiber (v3) { D v3 = w4; }";
        let doc = parse(text).unwrap();
        let printed = doc.to_string();
        assert_eq!(parse(&printed).unwrap(), doc);
        assert!(printed.contains("d w7 = w4^2;"));
    }

    #[test]
    fn expression_shapes_survive_printing() {
        for s in ["-2*c*v2^2", "a - (b - c)", "(a*b)^2", "a*(b*c)", "1/2*x + -y", "-(a + b)*c", "2^3"] {
            let e = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{s} printed as {e}");
        }
        assert_eq!(parse_expr("v2^4 + 2*c*v2^2*x").unwrap().to_string(), "v2^4 + 2*c*v2^2*x");
    }

    #[test]
    fn trailing_operator_diagnostic() {
        let err = parse("algebra A {\n  gen w4 : 4; gen w7 : 7;\n  d w7 = w4^2 + ;\n}").unwrap_err();
        assert_eq!((err.pos.line, err.pos.col), (3, 17));
        assert!(err.message.contains("expected a number"));
    }

    #[test]
    fn rationals_and_comments() {
        let doc = parse("# header\nalgebra A { gen u : 2; d u = 0; } # tail").unwrap();
        assert_eq!(doc.items.len(), 1);
        let e = parse_expr("3/6*u").unwrap();
        assert_eq!(e.to_string(), "1/2*u");
        assert!(parse_expr("1/0").is_err());
    }
}
