//! Suite language: parameter declarations, algebra presentations and check
//! blocks over a small noncommutative expression grammar.
//!
//! ```text
//! suite   := decl*
//! decl    := param | algebra | check
//! param   := "param" IDENT ("=" RATIONAL)?
//! algebra := "algebra" IDENT "{" "generators" IDENT+ ("relation" expr "=" expr)* "}"
//! check   := "check" IDENT "{" (IDENT "=" value)* "}"
//! value   := expr ("," expr)*
//! expr    := "-"? term (("+" | "-") term)*
//! term    := factor ("*" factor)*
//! factor  := primary ("^" "-"? INT)?
//! primary := RATIONAL | IDENT | "(" expr ")"
//!          | "qc(" expr "," expr "," "-"? INT ")" | "c(" expr "," expr ")"
//! ```
//!
//! `#` starts a line comment. `qc(a, b, n)` is `q^n a b - q^-n b a`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::coeff::{params, CoeffError, Rational, Scalar, Var};
use crate::ring::Ring;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ast {
    /// Signed terms; a single negated term is unary minus.
    Sum(Vec<(bool, Ast)>),
    Product(Vec<Ast>),
    Power(Box<Ast>, i32),
    ScalarLiteral(Rational),
    GeneratorRef(String),
    QComm(Box<Ast>, Box<Ast>, i32),
    Comm(Box<Ast>, Box<Ast>),
    /// Output only; suite files have no tensor syntax.
    Tensor(Vec<Ast>),
}

impl Ast {
    pub fn r(name: &str) -> Ast {
        Ast::GeneratorRef(name.to_string())
    }

    pub fn int(n: i64) -> Ast {
        Ast::ScalarLiteral(Rational::from_integer(n.into()))
    }

    /// Identifiers referenced anywhere in the tree.
    pub fn refs(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs(&self, out: &mut BTreeSet<String>) {
        match self {
            Ast::Sum(ts) => ts.iter().for_each(|(_, t)| t.collect_refs(out)),
            Ast::Product(fs) | Ast::Tensor(fs) => fs.iter().for_each(|f| f.collect_refs(out)),
            Ast::Power(b, _) => b.collect_refs(out),
            Ast::ScalarLiteral(_) => {}
            Ast::GeneratorRef(n) => {
                out.insert(n.clone());
            }
            Ast::QComm(a, b, _) | Ast::Comm(a, b) => {
                a.collect_refs(out);
                b.collect_refs(out);
            }
        }
    }

    /// Renames identifiers; `f` returns `None` to keep a name.
    pub fn rename(&self, f: &dyn Fn(&str) -> Option<String>) -> Ast {
        let bx = |a: &Ast| Box::new(a.rename(f));
        match self {
            Ast::Sum(ts) => Ast::Sum(ts.iter().map(|(n, t)| (*n, t.rename(f))).collect()),
            Ast::Product(fs) => Ast::Product(fs.iter().map(|x| x.rename(f)).collect()),
            Ast::Tensor(fs) => Ast::Tensor(fs.iter().map(|x| x.rename(f)).collect()),
            Ast::Power(b, n) => Ast::Power(bx(b), *n),
            Ast::ScalarLiteral(r) => Ast::ScalarLiteral(r.clone()),
            Ast::GeneratorRef(n) => Ast::GeneratorRef(f(n).unwrap_or_else(|| n.clone())),
            Ast::QComm(a, b, n) => Ast::QComm(bx(a), bx(b), *n),
            Ast::Comm(a, b) => Ast::Comm(bx(a), bx(b)),
        }
    }

    fn is_atomic(&self) -> bool {
        match self {
            Ast::GeneratorRef(_) | Ast::QComm(..) | Ast::Comm(..) => true,
            Ast::ScalarLiteral(r) => r.is_integer(),
            _ => false,
        }
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text; `parse_expr(format(a)) == a`.
pub fn format(a: &Ast) -> String {
    match a {
        Ast::Sum(ts) => {
            let mut s = String::new();
            for (i, (neg, t)) in ts.iter().enumerate() {
                let body = match t {
                    Ast::Sum(_) => format!("({})", format(t)),
                    _ => format_operand(t),
                };
                match (i, neg) {
                    (0, false) => s.push_str(&body),
                    (0, true) => {
                        s.push('-');
                        s.push_str(&body);
                    }
                    (_, false) => {
                        s.push_str(" + ");
                        s.push_str(&body);
                    }
                    (_, true) => {
                        s.push_str(" - ");
                        s.push_str(&body);
                    }
                }
            }
            s
        }
        Ast::Product(fs) => fs
            .iter()
            .map(|f| match f {
                Ast::Sum(_) | Ast::Product(_) | Ast::Tensor(_) => format!("({})", format(f)),
                _ => format_operand(f),
            })
            .collect::<Vec<_>>()
            .join(" * "),
        Ast::Power(b, n) => {
            if b.is_atomic() {
                format!("{}^{}", format_operand(b), n)
            } else {
                format!("({})^{}", format(b), n)
            }
        }
        Ast::ScalarLiteral(r) => fmt_rational(r),
        Ast::GeneratorRef(n) => n.clone(),
        Ast::QComm(a, b, n) => format!("qc({}, {}, {})", format(a), format(b), n),
        Ast::Comm(a, b) => format!("c({}, {})", format(a), format(b)),
        Ast::Tensor(fs) => fs
            .iter()
            .map(|f| match f {
                Ast::Sum(_) | Ast::Tensor(_) => format!("({})", format(f)),
                _ => format(f),
            })
            .collect::<Vec<_>>()
            .join(" (x) "),
    }
}

/// Negative literals are bracketed wherever a sign would be read as an operator.
fn format_operand(a: &Ast) -> String {
    match a {
        Ast::ScalarLiteral(r) if r.is_negative() => format!("({})", fmt_rational(r)),
        _ => format(a),
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}", line = span.line, col = span.col)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Rat(Rational),
    Sym(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Rat(r) => format!("number `{}`", fmt_rational(r)),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    start: usize,
    end: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\''
}

fn line_col(src: &str, pos: usize) -> (usize, usize) {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn span(src: &str, start: usize, end: usize) -> SourceSpan {
    let (line, col) = line_col(src, start);
    SourceSpan { start, end, line, col }
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let cs: Vec<(usize, char)> = src.char_indices().collect();
    let at = |i: usize| cs.get(i).map_or(src.len(), |p| p.0);
    let mut i = 0;
    while i < cs.len() {
        let (pos, c) = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            while i < cs.len() && cs[i].1 != '\n' {
                i += 1;
            }
        } else if is_ident_start(c) {
            let mut j = i;
            while j < cs.len() && is_ident_char(cs[j].1) {
                j += 1;
            }
            out.push(Token { tok: Tok::Ident(src[pos..at(j)].to_string()), start: pos, end: at(j) });
            i = j;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < cs.len() && cs[j].1.is_ascii_digit() {
                j += 1;
            }
            let num = &src[pos..at(j)];
            let bad = |e: usize| ParseError {
                span: span(src, pos, e),
                message: format!("number `{}` out of range", &src[pos..e]),
                expected: BTreeSet::new(),
            };
            if j + 1 < cs.len() && cs[j].1 == '/' && cs[j + 1].1.is_ascii_digit() {
                let mut k = j + 1;
                while k < cs.len() && cs[k].1.is_ascii_digit() {
                    k += 1;
                }
                let n: num_bigint::BigInt = num.parse().map_err(|_| bad(at(k)))?;
                let d: num_bigint::BigInt = src[at(j + 1)..at(k)].parse().map_err(|_| bad(at(k)))?;
                if d.is_zero() {
                    return Err(ParseError {
                        span: span(src, pos, at(k)),
                        message: "zero denominator".into(),
                        expected: BTreeSet::new(),
                    });
                }
                out.push(Token { tok: Tok::Rat(Rational::new(n, d)), start: pos, end: at(k) });
                i = k;
            } else {
                let n: i64 = num.parse().map_err(|_| bad(at(j)))?;
                out.push(Token { tok: Tok::Int(n), start: pos, end: at(j) });
                i = j;
            }
        } else if "{}(),=+-*^".contains(c) {
            out.push(Token { tok: Tok::Sym(c), start: pos, end: pos + c.len_utf8() });
            i += 1;
        } else {
            return Err(ParseError {
                span: span(src, pos, pos + c.len_utf8()),
                message: format!("unexpected character `{c}`"),
                expected: BTreeSet::new(),
            });
        }
    }
    out.push(Token { tok: Tok::Eof, start: src.len(), end: src.len() });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDecl {
    pub name: String,
    pub value: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraDecl {
    pub name: String,
    pub generators: Vec<String>,
    pub relations: Vec<(Ast, Ast)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckDecl {
    pub id: String,
    pub entries: Vec<(String, Vec<Ast>)>,
}

impl CheckDecl {
    pub fn get(&self, key: &str) -> Option<&[Ast]> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_slice())
    }

    /// Single identifier value.
    pub fn ident(&self, key: &str) -> Option<&str> {
        match self.get(key) {
            Some([Ast::GeneratorRef(s)]) => Some(s),
            _ => None,
        }
    }

    /// Single integer value.
    pub fn integer(&self, key: &str) -> Option<i64> {
        match self.get(key) {
            Some([Ast::ScalarLiteral(r)]) if r.is_integer() => r.numer().try_into().ok(),
            _ => None,
        }
    }

    /// Single expression value.
    pub fn expr(&self, key: &str) -> Option<&Ast> {
        match self.get(key) {
            Some([a]) => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Suite {
    pub params: Vec<ParamDecl>,
    pub algebras: Vec<AlgebraDecl>,
    pub checks: Vec<CheckDecl>,
}

impl Suite {
    pub fn algebra(&self, name: &str) -> Option<&AlgebraDecl> {
        self.algebras.iter().find(|a| a.name == name)
    }
}

/// Names every suite may reference without declaring them.
pub const BUILTIN_PARAMS: [&str; 11] = ["q", "zeta", "kp", "km", "ep", "em", "pt", "rho", "rho_t", "rhot_t", "rho_d"];

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    /// Names allowed in expressions; `None` disables resolution.
    scope: Option<BTreeSet<String>>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        Ok(Parser { src, toks: lex(src)?, pos: 0, scope: None })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        let exp: BTreeSet<String> = expected.iter().map(|s| s.to_string()).collect();
        let list = exp.iter().cloned().collect::<Vec<_>>().join(", ");
        ParseError {
            span: span(self.src, t.start, t.end),
            message: format!("expected one of {{{}}}, found {}", list, t.tok.describe()),
            expected: exp,
        }
    }

    fn sym(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&[&c.to_string()]))
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == k => {
                self.bump();
                Ok(())
            }
            _ => Err(self.err(&[k])),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.err(&["identifier"])),
        }
    }

    fn signed_int(&mut self) -> Result<i32, ParseError> {
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Int(n) => {
                let t = self.bump();
                let v = if neg { -n } else { n };
                i32::try_from(v).map_err(|_| ParseError {
                    span: span(self.src, t.start, t.end),
                    message: "exponent out of range".into(),
                    expected: BTreeSet::new(),
                })
            }
            _ => Err(self.err(&["integer"])),
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut terms = Vec::new();
        let lead_neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        terms.push((lead_neg, self.term()?));
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    terms.push((false, self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    terms.push((true, self.term()?));
                }
                _ => break,
            }
        }
        if terms.len() == 1 && !terms[0].0 {
            Ok(terms.pop().unwrap().1)
        } else {
            Ok(Ast::Sum(terms))
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut fs = vec![self.factor()?];
        while *self.peek() == Tok::Sym('*') {
            self.bump();
            fs.push(self.factor()?);
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { Ast::Product(fs) })
    }

    fn factor(&mut self) -> Result<Ast, ParseError> {
        let p = self.primary()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let n = self.signed_int()?;
            return Ok(Ast::Power(Box::new(p), n));
        }
        Ok(p)
    }

    fn primary(&mut self) -> Result<Ast, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Ast::int(n))
            }
            Tok::Rat(r) => {
                self.bump();
                Ok(Ast::ScalarLiteral(r))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) if name == "qc" && *self.peek2() == Tok::Sym('(') => {
                self.bump();
                self.bump();
                let a = self.expr()?;
                self.sym(',')?;
                let b = self.expr()?;
                self.sym(',')?;
                let n = self.signed_int()?;
                self.sym(')')?;
                Ok(Ast::QComm(Box::new(a), Box::new(b), n))
            }
            Tok::Ident(name) if name == "c" && *self.peek2() == Tok::Sym('(') => {
                self.bump();
                self.bump();
                let a = self.expr()?;
                self.sym(',')?;
                let b = self.expr()?;
                self.sym(')')?;
                Ok(Ast::Comm(Box::new(a), Box::new(b)))
            }
            Tok::Ident(name) => {
                if let Some(scope) = &self.scope {
                    if !scope.contains(&name) {
                        let t = &self.toks[self.pos];
                        return Err(ParseError {
                            span: span(self.src, t.start, t.end),
                            message: format!("unknown identifier `{name}`"),
                            expected: ["generator or parameter".to_string()].into(),
                        });
                    }
                }
                self.bump();
                Ok(Ast::GeneratorRef(name))
            }
            _ => Err(self.err(&["(", "c(", "identifier", "number", "qc("])),
        }
    }

    fn suite(&mut self) -> Result<Suite, ParseError> {
        let mut suite = Suite::default();
        let mut declared: BTreeSet<String> = BUILTIN_PARAMS.iter().map(|s| s.to_string()).collect();
        loop {
            match self.peek().clone() {
                Tok::Eof => return Ok(suite),
                Tok::Ident(k) if k == "param" => {
                    self.bump();
                    let name = self.ident()?;
                    let value = if *self.peek() == Tok::Sym('=') {
                        self.bump();
                        let neg = if *self.peek() == Tok::Sym('-') {
                            self.bump();
                            true
                        } else {
                            false
                        };
                        let r = match self.peek().clone() {
                            Tok::Int(n) => Rational::from_integer(n.into()),
                            Tok::Rat(r) => r,
                            _ => return Err(self.err(&["number"])),
                        };
                        self.bump();
                        Some(if neg { -r } else { r })
                    } else {
                        None
                    };
                    declared.insert(name.clone());
                    suite.params.push(ParamDecl { name, value });
                }
                Tok::Ident(k) if k == "algebra" => {
                    self.bump();
                    let name = self.ident()?;
                    self.sym('{')?;
                    self.keyword("generators")?;
                    let mut generators = vec![self.ident()?];
                    while let Tok::Ident(g) = self.peek().clone() {
                        if g == "relation" {
                            break;
                        }
                        self.bump();
                        generators.push(g);
                    }
                    let mut scope = declared.clone();
                    scope.extend(generators.iter().cloned());
                    self.scope = Some(scope);
                    let mut relations = Vec::new();
                    loop {
                        match self.peek() {
                            Tok::Sym('}') => {
                                self.bump();
                                break;
                            }
                            Tok::Ident(r) if r == "relation" => {
                                self.bump();
                                let l = self.expr()?;
                                self.sym('=')?;
                                let r = self.expr()?;
                                relations.push((l, r));
                            }
                            _ => return Err(self.err(&["relation", "}"])),
                        }
                    }
                    self.scope = None;
                    suite.algebras.push(AlgebraDecl { name, generators, relations });
                }
                Tok::Ident(k) if k == "check" => {
                    self.bump();
                    let id = self.ident()?;
                    self.sym('{')?;
                    let mut entries = Vec::new();
                    loop {
                        match self.peek().clone() {
                            Tok::Sym('}') => {
                                self.bump();
                                break;
                            }
                            Tok::Ident(key) => {
                                self.bump();
                                self.sym('=')?;
                                let mut vals = vec![self.expr()?];
                                while *self.peek() == Tok::Sym(',') {
                                    self.bump();
                                    vals.push(self.expr()?);
                                }
                                entries.push((key, vals));
                            }
                            _ => return Err(self.err(&["identifier", "}"])),
                        }
                    }
                    suite.checks.push(CheckDecl { id, entries });
                }
                _ => return Err(self.err(&["algebra", "check", "param"])),
            }
        }
    }
}

pub fn parse_suite(src: &str) -> Result<Suite, ParseError> {
    Parser::new(src)?.suite()
}

/// Parses one expression; the whole input must be consumed.
pub fn parse_expr(src: &str) -> Result<Ast, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err(&["+", "-", "*", "^", "end of input"]));
    }
    Ok(e)
}

/// Canonical suite text.
pub fn format_suite(s: &Suite) -> String {
    let mut out = String::new();
    for p in &s.params {
        match &p.value {
            Some(v) => out.push_str(&format!("param {} = {}\n", p.name, fmt_rational(v))),
            None => out.push_str(&format!("param {}\n", p.name)),
        }
    }
    for a in &s.algebras {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&format!("algebra {} {{\n  generators {}\n", a.name, a.generators.join(" ")));
        for (l, r) in &a.relations {
            out.push_str(&format!("  relation {} = {}\n", format(l), format(r)));
        }
        out.push_str("}\n");
    }
    for c in &s.checks {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&format!("check {} {{\n", c.id));
        for (k, vs) in &c.entries {
            out.push_str(&format!("  {} = {}\n", k, vs.iter().map(format).collect::<Vec<_>>().join(", ")));
        }
        out.push_str("}\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound identifier `{0}`")]
    Unbound(String),
    #[error("no inverse for `{0}`")]
    NotInvertible(String),
    #[error("tensor expressions cannot be evaluated")]
    Tensor,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value<R> {
    Scalar(Scalar),
    Elem(R),
}

impl<R: Ring> Value<R> {
    pub fn into_elem(self, unit: &R) -> R {
        match self {
            Value::Scalar(s) => unit.one_like().scale(&s),
            Value::Elem(r) => r,
        }
    }

    fn add(self, o: Value<R>, neg: bool) -> Value<R> {
        match (self, o) {
            (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(if neg { a - b } else { a + b }),
            (Value::Elem(a), Value::Elem(b)) => Value::Elem(if neg { a.sub(&b) } else { a.add(&b) }),
            (Value::Scalar(a), Value::Elem(b)) => {
                let a = b.one_like().scale(&a);
                Value::Elem(if neg { a.sub(&b) } else { a.add(&b) })
            }
            (Value::Elem(a), Value::Scalar(b)) => {
                let b = a.one_like().scale(&b);
                Value::Elem(if neg { a.sub(&b) } else { a.add(&b) })
            }
        }
    }

    fn mul(self, o: Value<R>) -> Value<R> {
        match (self, o) {
            (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a * b),
            (Value::Elem(a), Value::Elem(b)) => Value::Elem(a.mul(&b)),
            (Value::Scalar(a), Value::Elem(b)) | (Value::Elem(b), Value::Scalar(a)) => Value::Elem(b.scale(&a)),
        }
    }

    fn neg(self) -> Value<R> {
        match self {
            Value::Scalar(a) => Value::Scalar(-a),
            Value::Elem(a) => Value::Elem(a.neg()),
        }
    }

    fn qcomm(self, o: Value<R>, n: i32) -> Value<R> {
        match (self, o) {
            (Value::Elem(a), Value::Elem(b)) => Value::Elem(a.qcomm(&b, n)),
            (a, b) => {
                // With a scalar operand: (q^n - q^-n) a b.
                let k = if n == 0 { Scalar::zero() } else { params::qdiff(n) };
                a.mul(b).mul(Value::Scalar(k))
            }
        }
    }
}

/// Identifier bindings for evaluation.
#[derive(Debug, Clone)]
pub struct Env<R> {
    bindings: HashMap<String, Value<R>>,
}

impl<R: Ring> Default for Env<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Ring> Env<R> {
    /// Environment with the built-in parameters bound symbolically.
    pub fn new() -> Self {
        let mut e = Env { bindings: HashMap::new() };
        for v in Var::ALL {
            e.bind_scalar(v.name(), Scalar::var(v));
        }
        e.bind_scalar("rho", params::rho());
        e.bind_scalar("rho_t", params::rho_t());
        e.bind_scalar("rhot_t", params::rhot_t());
        e.bind_scalar("rho_d", params::rho_d());
        e
    }

    pub fn bind_scalar(&mut self, name: &str, s: Scalar) -> &mut Self {
        self.bindings.insert(name.to_string(), Value::Scalar(s));
        self
    }

    pub fn bind(&mut self, name: &str, x: R) -> &mut Self {
        self.bindings.insert(name.to_string(), Value::Elem(x));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value<R>> {
        self.bindings.get(name)
    }

    /// Applies suite `param` declarations; those without a value become free
    /// only if already bound.
    pub fn declare(&mut self, ps: &[ParamDecl]) -> &mut Self {
        for p in ps {
            if let Some(v) = &p.value {
                self.bind_scalar(&p.name, Scalar::rational(v.clone()));
            }
        }
        self
    }

    pub fn eval(&self, a: &Ast) -> Result<Value<R>, EvalError> {
        Ok(match a {
            Ast::Sum(ts) => {
                let mut acc: Option<Value<R>> = None;
                for (neg, t) in ts {
                    let v = self.eval(t)?;
                    acc = Some(match acc {
                        None if *neg => v.neg(),
                        None => v,
                        Some(a) => a.add(v, *neg),
                    });
                }
                acc.unwrap_or(Value::Scalar(Scalar::zero()))
            }
            Ast::Product(fs) => {
                let mut acc = Value::Scalar(Scalar::one());
                for f in fs {
                    acc = acc.mul(self.eval(f)?);
                }
                acc
            }
            Ast::Power(b, n) => match self.eval(b)? {
                Value::Scalar(s) => Value::Scalar(s.pow(*n)?),
                Value::Elem(x) => {
                    let base = if *n < 0 {
                        x.try_inverse().ok_or_else(|| EvalError::NotInvertible(format(b)))?
                    } else {
                        x.clone()
                    };
                    let mut acc = x.one_like();
                    for _ in 0..n.unsigned_abs() {
                        acc = acc.mul(&base);
                    }
                    Value::Elem(acc)
                }
            },
            Ast::ScalarLiteral(r) => Value::Scalar(Scalar::rational(r.clone())),
            Ast::GeneratorRef(n) => self.bindings.get(n).cloned().ok_or_else(|| EvalError::Unbound(n.clone()))?,
            Ast::QComm(x, y, n) => self.eval(x)?.qcomm(self.eval(y)?, *n),
            Ast::Comm(x, y) => self.eval(x)?.qcomm(self.eval(y)?, 0),
            Ast::Tensor(_) => return Err(EvalError::Tensor),
        })
    }

    /// Evaluates to an element, promoting scalars via `unit`.
    pub fn eval_elem(&self, a: &Ast, unit: &R) -> Result<R, EvalError> {
        Ok(self.eval(a)?.into_elem(unit))
    }
}

/// Positive rational literal as used in generated ASTs.
pub fn literal(r: Rational) -> Ast {
    if r.is_negative() {
        Ast::Sum(vec![(true, Ast::ScalarLiteral(-r))])
    } else {
        Ast::ScalarLiteral(r)
    }
}

/// `1` as an AST.
pub fn one() -> Ast {
    Ast::ScalarLiteral(Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::gens::*;
    use crate::qalgebra::FreeElement;

    #[test]
    fn dolan_grady_relation_parses() {
        let s = parse_suite(
            "algebra qOnsager {\n generators W0 W1 Gamma\n relation qc(W0, qc(W0, qc(W0, W1, 1), -1), 0) = rho * c(W0, W1)\n}",
        )
        .unwrap();
        let a = &s.algebras[0];
        let w0 = || Box::new(Ast::r("W0"));
        let inner = Ast::QComm(w0(), Box::new(Ast::r("W1")), 1);
        let mid = Ast::QComm(w0(), Box::new(inner), -1);
        assert_eq!(a.relations[0].0, Ast::QComm(w0(), Box::new(mid), 0));
        assert_eq!(a.relations[0].1, Ast::Product(vec![Ast::r("rho"), Ast::Comm(w0(), Box::new(Ast::r("W1")))]));
    }

    #[test]
    fn param_binding() {
        let s = parse_suite("param kp = 0\nparam x\nparam y = -3/6").unwrap();
        assert_eq!(s.params[0], ParamDecl { name: "kp".into(), value: Some(Rational::zero()) });
        assert_eq!(s.params[1].value, None);
        assert_eq!(s.params[2].value, Some(Rational::new((-1).into(), 2.into())));
    }

    #[test]
    fn missing_comma_reports_expected_set() {
        let src = "algebra A {\n generators W0 W1\n relation qc(W0 W1) = 0\n}";
        let e = parse_suite(src).unwrap_err();
        assert_eq!(e.expected, BTreeSet::from([",".to_string()]));
        assert_eq!(&src[e.span.start..e.span.end], "W1");
        assert_eq!((e.span.line, e.span.col), (3, 17));
    }

    #[test]
    fn unknown_generator_is_rejected() {
        let e = parse_suite("algebra A {\n generators a\n relation a * b = 0\n}").unwrap_err();
        assert!(e.message.contains("`b`"));
    }

    #[test]
    fn comments_and_checks() {
        let s = parse_suite("# header\ncheck sym.generic.W0 { # trailing\n case = generic\n sites = 3, 4\n}\n").unwrap();
        let c = &s.checks[0];
        assert_eq!(c.id, "sym.generic.W0");
        assert_eq!(c.ident("case"), Some("generic"));
        assert_eq!(c.get("sites").unwrap().len(), 2);
    }

    #[test]
    fn format_examples() {
        let a = parse_expr("-(a+b)*c^-2 - qc(x, y, -1) + 1/2*q^2").unwrap();
        assert_eq!(format(&a), "-(a + b) * c^-2 - qc(x, y, -1) + 1/2 * q^2");
        let b = parse_expr("(a*b)*c").unwrap();
        assert_eq!(format(&b), "(a * b) * c");
        assert_eq!(parse_expr(&format(&b)).unwrap(), b);
    }

    #[test]
    fn trailing_garbage() {
        let e = parse_expr("a b").unwrap_err();
        assert_eq!(e.span.start, 2);
    }

    #[test]
    fn eval_free_level() {
        let mut env: Env<FreeElement> = Env::new();
        env.bind("e1", e1()).bind("e0", e0());
        let v = env.eval_elem(&parse_expr("qc(e1, e0, 1) - 2").unwrap(), &FreeElement::one()).unwrap();
        assert_eq!(v, &qcomm(&e1(), &e0(), 1) - &s(Scalar::int(2)));
    }

    #[test]
    fn eval_scalar_level() {
        let env: Env<FreeElement> = Env::new();
        let v = env.eval(&parse_expr("(q + q^-1)^2 * kp * km - rho").unwrap()).unwrap();
        assert_eq!(v, Value::Scalar(Scalar::zero()));
        assert!(matches!(env.eval(&parse_expr("zz").unwrap()), Err(EvalError::Unbound(_))));
    }

    #[test]
    fn negative_power_uses_inverse() {
        let mut env: Env<FreeElement> = Env::new();
        env.bind("t", t0());
        let v = env.eval_elem(&parse_expr("t^-2 * t^2").unwrap(), &FreeElement::one()).unwrap();
        // Free level: no cancellation of t0' t0.
        assert_eq!(v, &(&t0inv() * &t0inv()) * &(&t0() * &t0()));
        env.bind("e", e0());
        assert!(matches!(env.eval(&parse_expr("e^-1").unwrap()), Err(EvalError::NotInvertible(_))));
    }
}
