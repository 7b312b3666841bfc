//! The four coideal algebras: presentations, coactions, counits and images in
//! the quantum affine algebra, the descendant generators, reductions at
//! special boundary couplings, and the classical automorphisms.
//!
//! All tables are compiled-in suite texts under `suites/`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::coeff::{params, Assignment, CoeffError, Rational, Scalar, Var};
use crate::dsl::{self, AlgebraDecl, Ast, Env, EvalError, Suite};
use crate::qalgebra::{fmt_coeff_term, gens, AlgebraError, Alphabet, FreeElement, Letter, Word};
use crate::repmat::BoundaryParams;
use crate::ring::Ring;

pub const PRESENTATIONS_SUITE: &str = include_str!("../suites/presentations.suite");
pub const TABLES_SUITE: &str = include_str!("../suites/tables.suite");
pub const SPECIALIZATIONS_SUITE: &str = include_str!("../suites/specializations.suite");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoidealError {
    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),
    #[error("`{name}` is not a generator of {algebra}")]
    UnknownGenerator { algebra: String, name: String },
    #[error("no descendant named `{0}`")]
    NoSuchDescendant(String),
    #[error("expression does not vanish to order {order} in {var}")]
    NotDivisible { var: Var, order: u32 },
    #[error("missing table entry `{0}`")]
    Table(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Coeff(CoeffError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<CoeffError> for CoidealError {
    fn from(e: CoeffError) -> Self {
        match e {
            CoeffError::NotDivisible(var, order) => CoidealError::NotDivisible { var, order },
            e => CoidealError::Coeff(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algebra {
    QOnsager,
    Triangular,
    Augmented,
    Gl2Inv,
}

impl Algebra {
    pub const ALL: [Algebra; 4] = [Algebra::QOnsager, Algebra::Triangular, Algebra::Augmented, Algebra::Gl2Inv];

    pub fn name(self) -> &'static str {
        match self {
            Algebra::QOnsager => "qOnsager",
            Algebra::Triangular => "triangular",
            Algebra::Augmented => "augmented",
            Algebra::Gl2Inv => "gl2inv",
        }
    }

    pub fn from_name(s: &str) -> Option<Algebra> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }

    pub fn generators(self) -> &'static [&'static str] {
        match self {
            Algebra::QOnsager => &["W0", "W1", "Gamma"],
            Algebra::Triangular => &["T0", "T1", "Pt1", "Gamma"],
            Algebra::Augmented => &["K0", "K1", "Z1", "Zt1", "Gamma"],
            Algebra::Gl2Inv => &["e", "f", "qh", "qhinv", "X", "Y", "Yt", "Gamma"],
        }
    }

    pub fn generator(self, name: &str) -> Result<OGenerator, CoidealError> {
        OGenerator::new(self, name)
    }

    pub fn all_generators(self) -> Vec<OGenerator> {
        self.generators().iter().map(|n| OGenerator { algebra: self, name: n }).collect()
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A generator of one of the four algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OGenerator {
    pub algebra: Algebra,
    pub name: &'static str,
}

impl OGenerator {
    pub fn new(algebra: Algebra, name: &str) -> Result<Self, CoidealError> {
        algebra
            .generators()
            .iter()
            .find(|g| **g == name)
            .map(|g| OGenerator { algebra, name: g })
            .ok_or_else(|| CoidealError::UnknownGenerator { algebra: algebra.name().into(), name: name.into() })
    }
}

impl fmt::Display for OGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.algebra, self.name)
    }
}

/// Which reading of a table entry to use: as printed, or with a repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Printed,
    Amended,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Printed => "printed",
            Variant::Amended => "amended",
        }
    }
}

/// Ordering of the `e`-bracket in the `k-` part of the image of `Pt1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EOrdering {
    /// `[e1, e0]_q`
    AsPrinted,
    /// `[e0, e1]_q`
    Swapped,
}

impl EOrdering {
    pub fn name(self) -> &'static str {
        match self {
            EOrdering::AsPrinted => "e1e0",
            EOrdering::Swapped => "e0e1",
        }
    }
}

/// Free noncommutative polynomial in abstract generator names.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AbsElement {
    terms: BTreeMap<Vec<String>, Scalar>,
}

impl AbsElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(Scalar::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        let mut r = Self::zero();
        r.add_term(Vec::new(), s);
        r
    }

    pub fn gen(name: &str) -> Self {
        let mut r = Self::zero();
        r.add_term(vec![name.to_string()], Scalar::one());
        r
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<String>, &Scalar)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    fn add_term(&mut self, w: Vec<String>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w).or_insert_with(Scalar::zero);
        *e = &*e + &c;
        if e.is_zero() {
            let k: Vec<Vec<String>> = self.terms.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).collect();
            for k in k {
                self.terms.remove(&k);
            }
        }
    }

    /// Algebra map determined by generator images.
    pub fn eval<R: Ring, E>(&self, unit: &R, f: &dyn Fn(&str) -> Result<R, E>) -> Result<R, E> {
        let mut cache: HashMap<&str, R> = HashMap::new();
        let mut out = unit.one_like().scale(&Scalar::zero());
        for (w, c) in &self.terms {
            let mut acc = unit.one_like().scale(c);
            for g in w {
                if !cache.contains_key(g.as_str()) {
                    cache.insert(g, f(g)?);
                }
                acc = acc.mul(&cache[g.as_str()]);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Evaluates with scalar generator values.
    pub fn eval_scalar(&self, f: &dyn Fn(&str) -> Option<Scalar>) -> Result<Scalar, CoidealError> {
        let mut out = Scalar::zero();
        for (w, c) in &self.terms {
            let mut acc = c.clone();
            for g in w {
                let v = f(g).ok_or_else(|| CoidealError::Table(format!("counit.{g}")))?;
                acc = &acc * &v;
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| fmt_coeff_term(c, &word_text(w))).collect();
        parts.join(" + ")
    }
}

fn word_text(w: &[String]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.join(" ")
    }
}

impl fmt::Display for AbsElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Ring for AbsElement {
    fn one_like(&self) -> Self {
        AbsElement::one()
    }
    fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.clone());
        }
        r
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Scalar::int(-1)))
    }
    fn mul(&self, o: &Self) -> Self {
        let mut r = AbsElement::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let mut w = a.clone();
                w.extend(b.iter().cloned());
                r.add_term(w, x * y);
            }
        }
        r
    }
    fn scale(&self, s: &Scalar) -> Self {
        let mut r = AbsElement::zero();
        for (w, c) in &self.terms {
            r.add_term(w.clone(), c * s);
        }
        r
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn try_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (w, c) = self.terms.iter().next()?;
        let inv: Option<Vec<String>> = w
            .iter()
            .rev()
            .map(|g| match g.as_str() {
                "qh" => Some("qhinv".to_string()),
                "qhinv" => Some("qh".to_string()),
                _ => None,
            })
            .collect();
        let mut r = AbsElement::zero();
        r.add_term(inv?, c.recip().ok()?);
        Some(r)
    }
}

/// Element of `U (x) A` with `A` one of the abstract algebras.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MixedTensor {
    terms: BTreeMap<(Word, Vec<String>), Scalar>,
}

impl MixedTensor {
    /// `Σ u_i (x) a_i`.
    pub fn from_pairs(pairs: &[(FreeElement, AbsElement)]) -> Self {
        let mut t = MixedTensor::default();
        for (u, a) in pairs {
            for (w, c) in u.terms() {
                for (g, d) in a.terms() {
                    t.add_term(w.clone(), g.clone(), c * d);
                }
            }
        }
        t
    }

    fn add_term(&mut self, w: Word, g: Vec<String>, c: Scalar) {
        let key = (w, g);
        let e = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Vec<String>, &Scalar)> {
        self.terms.iter().map(|((w, g), c)| (w, g, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest word length in the abstract slot.
    pub fn abstract_degree(&self) -> usize {
        self.terms.keys().map(|(_, g)| g.len()).max().unwrap_or(0)
    }

    /// Each term as a pair of single-word elements.
    pub fn pairs(&self) -> Vec<(FreeElement, AbsElement)> {
        self.terms
            .iter()
            .map(|((w, g), c)| {
                let mut a = AbsElement::zero();
                a.add_term(g.clone(), Scalar::one());
                (FreeElement::word(w.clone(), c.clone()), a)
            })
            .collect()
    }

    /// `(id x E)`, multiplied out.
    pub fn counit_abstract(&self, algebra: Algebra) -> Result<FreeElement, CoidealError> {
        let mut out = FreeElement::zero();
        for ((w, g), c) in &self.terms {
            let mut s = c.clone();
            for x in g {
                s = &s * &counit_value(OGenerator::new(algebra, x)?)?;
            }
            out = &out + &FreeElement::word(w.clone(), s);
        }
        Ok(out)
    }

    /// `(E x id)`.
    pub fn counit_u(&self) -> AbsElement {
        let mut out = AbsElement::zero();
        for ((w, g), c) in &self.terms {
            let e = crate::qalgebra::counit(&FreeElement::word(w.clone(), Scalar::one()));
            out.add_term(g.clone(), c * &e);
        }
        out
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((w, g), c)| fmt_coeff_term(c, &format!("{} (x) {}", w, word_text(g))))
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for MixedTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

struct Tables {
    presentations: Suite,
    data: Suite,
    specializations: Suite,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| Tables {
        presentations: dsl::parse_suite(PRESENTATIONS_SUITE).expect("built-in presentations parse"),
        data: dsl::parse_suite(TABLES_SUITE).expect("built-in tables parse"),
        specializations: dsl::parse_suite(SPECIALIZATIONS_SUITE).expect("built-in specializations parse"),
    })
}

fn data_check(id: &str) -> Result<&'static dsl::CheckDecl, CoidealError> {
    tables().data.checks.iter().find(|c| c.id == id).ok_or_else(|| CoidealError::Table(id.into()))
}

fn data_expr(id: &str, key: &str) -> Result<&'static Ast, CoidealError> {
    data_check(id)?.expr(key).ok_or_else(|| CoidealError::Table(format!("{id}.{key}")))
}

/// Environment over the quantum alphabet with `qcent = t0 t1`.
pub fn u_env() -> Env<FreeElement> {
    let mut env = Env::new();
    for l in Letter::QUANTUM {
        env.bind(l.name(), FreeElement::letter(l));
    }
    env.bind("qcent", FreeElement::qc());
    env
}

/// Environment binding every generator of `algebra` abstractly.
pub fn abstract_env(algebra: Algebra) -> Env<AbsElement> {
    let mut env = Env::new();
    for g in algebra.generators() {
        env.bind(g, AbsElement::gen(g));
    }
    env
}

/// Environment binding each generator to its image.
pub fn image_env(algebra: Algebra) -> Result<Env<FreeElement>, CoidealError> {
    let mut env = u_env();
    for g in algebra.all_generators() {
        env.bind(g.name, psi_image(g)?);
    }
    Ok(env)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub lhs: Ast,
    pub rhs: Ast,
}

impl Relation {
    /// `lhs - rhs`.
    pub fn residual_ast(&self) -> Ast {
        Ast::Sum(vec![(false, self.lhs.clone()), (true, self.rhs.clone())])
    }
}

/// Defining relations of one algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub algebra: Algebra,
    pub variant: Variant,
    pub generators: Vec<String>,
    pub relations: Vec<Relation>,
    pub params: Vec<(String, Scalar)>,
}

pub fn presentation(algebra: Algebra, variant: Variant) -> Presentation {
    let t = tables();
    let amended = format!("{}.amended", algebra.name());
    let decl = match variant {
        Variant::Amended => t.presentations.algebra(&amended),
        Variant::Printed => None,
    }
    .or_else(|| t.presentations.algebra(algebra.name()))
    .expect("every algebra has a built-in presentation");
    Presentation {
        algebra,
        variant,
        generators: decl.generators.clone(),
        relations: decl.relations.iter().map(|(l, r)| Relation { lhs: l.clone(), rhs: r.clone() }).collect(),
        params: vec![
            ("rho".into(), params::rho()),
            ("rho_t".into(), params::rho_t()),
            ("rhot_t".into(), params::rhot_t()),
            ("rho_d".into(), params::rho_d()),
        ],
    }
}

impl Presentation {
    pub fn decl(&self) -> AlgebraDecl {
        AlgebraDecl {
            name: self.algebra.name().into(),
            generators: self.generators.clone(),
            relations: self.relations.iter().map(|r| (r.lhs.clone(), r.rhs.clone())).collect(),
        }
    }

    /// The presentation as suite text.
    pub fn to_suite_text(&self) -> String {
        dsl::format_suite(&Suite { params: Vec::new(), algebras: vec![self.decl()], checks: Vec::new() })
    }

    /// `lhs - rhs` for every relation, generators replaced by `image`.
    pub fn residuals<R: Ring>(&self, unit: &R, image: &dyn Fn(&str) -> R) -> Result<Vec<R>, CoidealError> {
        let mut env: Env<R> = Env::new();
        for (n, s) in &self.params {
            env.bind_scalar(n, s.clone());
        }
        for g in &self.generators {
            env.bind(g, image(g));
        }
        self.relations.iter().map(|r| Ok(env.eval_elem(&r.residual_ast(), unit)?)).collect()
    }

    /// Residuals with each generator replaced by its counit value.
    pub fn counit_residuals(&self) -> Result<Vec<Scalar>, CoidealError> {
        let mut env: Env<AbsElement> = Env::new();
        for (n, s) in &self.params {
            env.bind_scalar(n, s.clone());
        }
        for g in self.algebra.all_generators() {
            env.bind_scalar(g.name, counit_value(g)?);
        }
        self.relations
            .iter()
            .map(|r| match env.eval(&r.residual_ast())? {
                dsl::Value::Scalar(s) => Ok(s),
                dsl::Value::Elem(e) => Ok(e.eval_scalar(&|_| None)?),
            })
            .collect()
    }
}

/// Image of a generator in the quantum affine algebra.
pub fn psi_image(g: OGenerator) -> Result<FreeElement, CoidealError> {
    let ast = data_expr(&format!("psi.{g}"), "image")?;
    Ok(u_env().eval_elem(ast, &FreeElement::one())?)
}

/// Image of `Pt1` with a chosen bracket ordering.
pub fn pt1_image(ordering: EOrdering) -> Result<FreeElement, CoidealError> {
    let key = match ordering {
        EOrdering::AsPrinted => "image",
        EOrdering::Swapped => "swapped",
    };
    Ok(u_env().eval_elem(data_expr("psi.triangular.Pt1", key)?, &FreeElement::one())?)
}

pub fn counit_value(g: OGenerator) -> Result<Scalar, CoidealError> {
    let ast = data_expr(&format!("counit.{}", g.algebra), g.name)?;
    match Env::<FreeElement>::new().eval(ast)? {
        dsl::Value::Scalar(s) => Ok(s),
        dsl::Value::Elem(_) => Err(CoidealError::Table(format!("counit.{g}"))),
    }
}

/// Coaction `δ(g)` as a sum of `u (x) a`.
pub fn coaction_image(g: OGenerator, variant: Variant) -> Result<MixedTensor, CoidealError> {
    let base = format!("coaction.{g}");
    let amended = format!("{base}.amended");
    let c = match variant {
        Variant::Amended => data_check(&amended).or_else(|_| data_check(&base))?,
        Variant::Printed => data_check(&base)?,
    };
    let us = c.get("u").ok_or_else(|| CoidealError::Table(format!("{base}.u")))?;
    let as_ = c.get("a").ok_or_else(|| CoidealError::Table(format!("{base}.a")))?;
    if us.len() != as_.len() {
        return Err(CoidealError::Table(base));
    }
    let ue = u_env();
    let ae = abstract_env(g.algebra);
    let mut pairs = Vec::new();
    for (u, a) in us.iter().zip(as_) {
        pairs.push((ue.eval_elem(u, &FreeElement::one())?, ae.eval_elem(a, &AbsElement::one())?));
    }
    Ok(MixedTensor::from_pairs(&pairs))
}

/// Text export of the image, counit and coaction tables of one algebra.
pub fn export_tables(algebra: Algebra, variant: Variant) -> Result<String, CoidealError> {
    let mut out = String::new();
    for g in algebra.all_generators() {
        out.push_str(&format!("psi({}) = {}\n", g.name, psi_image(g)?));
        out.push_str(&format!("counit({}) = {}\n", g.name, counit_value(g)?));
        out.push_str(&format!("delta({}) = {}\n", g.name, coaction_image(g, variant)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Descendant {
    W0,
    W1,
    G1,
    Gt1,
    Wm1,
    W2,
    G2,
    Gt2,
}

impl Descendant {
    pub const ALL: [Descendant; 8] = [
        Descendant::W0,
        Descendant::W1,
        Descendant::G1,
        Descendant::Gt1,
        Descendant::Wm1,
        Descendant::W2,
        Descendant::G2,
        Descendant::Gt2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Descendant::W0 => "W0",
            Descendant::W1 => "W1",
            Descendant::G1 => "G1",
            Descendant::Gt1 => "Gt1",
            Descendant::Wm1 => "Wm1",
            Descendant::W2 => "W2",
            Descendant::G2 => "G2",
            Descendant::Gt2 => "Gt2",
        }
    }

    pub fn from_name(s: &str) -> Result<Descendant, CoidealError> {
        Self::ALL.into_iter().find(|d| d.name() == s).ok_or_else(|| CoidealError::NoSuchDescendant(s.into()))
    }

    /// Image under the swap map.
    pub fn partner(self) -> Descendant {
        match self {
            Descendant::W0 => Descendant::W1,
            Descendant::W1 => Descendant::W0,
            Descendant::G1 => Descendant::Gt1,
            Descendant::Gt1 => Descendant::G1,
            Descendant::Wm1 => Descendant::W2,
            Descendant::W2 => Descendant::Wm1,
            Descendant::G2 => Descendant::Gt2,
            Descendant::Gt2 => Descendant::G2,
        }
    }

    fn base(self) -> (Descendant, bool) {
        match self {
            Descendant::Gt1 | Descendant::W2 | Descendant::Gt2 | Descendant::W1 => (self.partner(), true),
            _ => (self, false),
        }
    }

    /// Chevalley forms of `G2`, `Gt2` only hold to leading order in `kp, km`.
    pub fn leading_only(self) -> bool {
        matches!(self, Descendant::G2 | Descendant::Gt2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Chevalley,
    Polynomial,
}

/// Factor `constant * kp^kp * km^km` multiplied into a form.
#[derive(Debug, Clone, PartialEq)]
pub struct Clearing {
    pub constant: Scalar,
    pub kp: u32,
    pub km: u32,
}

impl Clearing {
    pub fn none() -> Self {
        Clearing { constant: Scalar::one(), kp: 0, km: 0 }
    }

    pub fn scalar(&self) -> Scalar {
        let k = &Scalar::var(Var::Kp).pow(self.kp as i32).unwrap() * &Scalar::var(Var::Km).pow(self.km as i32).unwrap();
        &self.constant * &k
    }

    pub fn exponent(&self, v: Var) -> u32 {
        match v {
            Var::Kp => self.kp,
            Var::Km => self.km,
            _ => 0,
        }
    }

    /// Splits off the powers of `kp` and `km` common to every term.
    pub fn from_scalar(s: &Scalar) -> Result<Clearing, CoidealError> {
        let exp = |v: Var| -> u32 {
            let es: Vec<i32> = s.num().terms().map(|(m, _)| m.exp(v) - s.den().min_monomial().exp(v)).collect();
            if !es.is_empty() && es.iter().all(|e| *e == es[0] && *e > 0) && !s.den().depends_on(v) {
                es[0] as u32
            } else {
                0
            }
        };
        let (kp, km) = (exp(Var::Kp), exp(Var::Km));
        let c = Clearing { constant: Scalar::one(), kp, km };
        let constant = s.checked_div(&c.scalar())?;
        Ok(Clearing { constant, kp, km })
    }
}

/// A descendant in one form, with the factor it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct DescendantForm {
    pub element: FreeElement,
    pub clearing: Clearing,
    pub leading_only: bool,
}

const SWAP_VARS: [(Var, Var); 2] = [(Var::Kp, Var::Km), (Var::Ep, Var::Em)];

fn swap_name(n: &str) -> Option<String> {
    Some(
        match n {
            "W0" => "W1",
            "W1" => "W0",
            "kp" => "km",
            "km" => "kp",
            "ep" => "em",
            "em" => "ep",
            _ => return None,
        }
        .to_string(),
    )
}

/// Polynomial in `W0, W1, gamma` and the clearing factor it carries.
pub fn polynomial_ast(d: Descendant, variant: Variant) -> Result<(Ast, Clearing), CoidealError> {
    let (base, swapped) = d.base();
    let (ast, clearing) = match base {
        Descendant::W0 => (Ast::r("W0"), Clearing::none()),
        _ => {
            let id = format!("polynomial.{}", base.name());
            let c = match variant {
                Variant::Amended => data_check(&format!("{id}.amended")).or_else(|_| data_check(&id))?,
                Variant::Printed => data_check(&id)?,
            };
            let form = c.expr("form").ok_or_else(|| CoidealError::Table(format!("{id}.form")))?;
            let clear = c.expr("clear").ok_or_else(|| CoidealError::Table(format!("{id}.clear")))?;
            let s = match Env::<FreeElement>::new().eval(clear)? {
                dsl::Value::Scalar(s) => s,
                dsl::Value::Elem(_) => return Err(CoidealError::Table(format!("{id}.clear"))),
            };
            (form.clone(), Clearing::from_scalar(&s)?)
        }
    };
    if swapped {
        Ok((ast.rename(&swap_name), clearing))
    } else {
        Ok((ast, clearing))
    }
}

/// Evaluates the polynomial form in any ring.
pub fn eval_polynomial<R: Ring>(
    d: Descendant,
    variant: Variant,
    w0: &R,
    w1: &R,
    gamma: &R,
) -> Result<(R, Clearing), CoidealError> {
    let (ast, clearing) = polynomial_ast(d, variant)?;
    let mut env: Env<R> = Env::new();
    env.bind("W0", w0.clone()).bind("W1", w1.clone()).bind("gamma", gamma.clone());
    Ok((env.eval_elem(&ast, w0)?, clearing))
}

fn chevalley_base(d: Descendant, variant: Variant) -> Result<FreeElement, CoidealError> {
    if d == Descendant::W0 {
        return psi_image(OGenerator::new(Algebra::QOnsager, "W0")?);
    }
    let id = format!("chevalley.{}", d.name());
    let c = match variant {
        Variant::Amended => data_check(&format!("{id}.amended")).or_else(|_| data_check(&id))?,
        Variant::Printed => data_check(&id)?,
    };
    let form = c.expr("form").ok_or_else(|| CoidealError::Table(format!("{id}.form")))?;
    Ok(u_env().eval_elem(form, &FreeElement::one())?)
}

pub fn descendant(d: Descendant, form: Form, variant: Variant) -> Result<DescendantForm, CoidealError> {
    match form {
        Form::Polynomial => {
            let w0 = psi_image(OGenerator::new(Algebra::QOnsager, "W0")?)?;
            let w1 = psi_image(OGenerator::new(Algebra::QOnsager, "W1")?)?;
            let (element, clearing) = eval_polynomial(d, variant, &w0, &w1, &FreeElement::qc())?;
            Ok(DescendantForm { element, clearing, leading_only: false })
        }
        Form::Chevalley => {
            let (base, swapped) = d.base();
            let x = chevalley_base(base, variant)?;
            let element = if swapped { swap_map(&x) } else { x };
            Ok(DescendantForm { element, clearing: Clearing::none(), leading_only: d.leading_only() })
        }
    }
}

fn swap_letter(l: Letter) -> Letter {
    use Letter::*;
    match l {
        E0 => E1,
        E1 => E0,
        F0 => F1,
        F1 => F0,
        T0 => T1,
        T1 => T0,
        T0inv => T1inv,
        T1inv => T0inv,
        E0c => E1c,
        E1c => E0c,
        F0c => F1c,
        F1c => F0c,
        H0c => H1c,
        H1c => H0c,
    }
}

/// Exchanges node labels 0 and 1 and the `+`/`-` couplings.
pub fn swap_map(x: &FreeElement) -> FreeElement {
    x.map_letters(|l| FreeElement::letter(swap_letter(l)))
        .map_scalars(|s| Ok(s.swap_vars(&SWAP_VARS)))
        .expect("variable swap cannot fail")
}

/// Boundary coupling regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    Generic,
    /// `kp -> 0`
    Triangular,
    /// `kp, km -> 0`
    Diagonal,
    /// `ep = 1, em = 0` with `kp, km` kept.
    SpecialA,
    /// `kp, km -> 0, ep = 1, em = 0`.
    SpecialB,
}

impl Case {
    pub const ALL: [Case; 5] = [Case::Generic, Case::Triangular, Case::Diagonal, Case::SpecialA, Case::SpecialB];

    pub fn name(self) -> &'static str {
        match self {
            Case::Generic => "generic",
            Case::Triangular => "triangular",
            Case::Diagonal => "diagonal",
            Case::SpecialA => "special-A",
            Case::SpecialB => "special-B",
        }
    }

    pub fn from_name(s: &str) -> Option<Case> {
        Self::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }

    pub fn algebra(self) -> Algebra {
        match self {
            Case::Generic => Algebra::QOnsager,
            Case::Triangular => Algebra::Triangular,
            Case::Diagonal => Algebra::Augmented,
            Case::SpecialA | Case::SpecialB => Algebra::Gl2Inv,
        }
    }

    /// Couplings sent to zero.
    pub fn limit_vars(self) -> &'static [Var] {
        match self {
            Case::Generic | Case::SpecialA => &[],
            Case::Triangular => &[Var::Kp],
            Case::Diagonal | Case::SpecialB => &[Var::Kp, Var::Km],
        }
    }

    /// Fixed coupling values.
    pub fn values(self) -> Assignment {
        match self {
            Case::SpecialA | Case::SpecialB => Assignment::new().with(Var::Ep, Rational::from_integer(1.into())).with(Var::Em, Rational::from_integer(0.into())),
            _ => Assignment::new(),
        }
    }

    /// Boundary couplings of the Hamiltonian in this regime.
    pub fn boundary(self) -> BoundaryParams {
        let mut p = BoundaryParams::symbolic();
        for v in self.limit_vars() {
            match v {
                Var::Kp => p.kp = Scalar::zero(),
                Var::Km => p.km = Scalar::zero(),
                _ => {}
            }
        }
        p.substitute(&self.values()).expect("substituting constants cannot fail")
    }

    /// Key of the reduction table for this regime.
    pub fn table_key(self) -> Option<&'static str> {
        match self {
            Case::Generic => None,
            Case::Triangular => Some("triangular"),
            Case::Diagonal => Some("diagonal"),
            Case::SpecialA | Case::SpecialB => Some("special"),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Substitution plus `v -> 0` limits realizing a boundary regime.
#[derive(Debug, Clone, PartialEq)]
pub struct Limit {
    pub vars: Vec<Var>,
    pub values: Assignment,
}

impl Limit {
    pub fn for_case(case: Case) -> Limit {
        Limit { vars: case.limit_vars().to_vec(), values: case.values() }
    }

    pub fn with_value(mut self, v: Var, r: Rational) -> Limit {
        self.values.set(v, r);
        self
    }

    /// `lim s / (clearing * divide)`: fixed values first, then each limit
    /// variable, then exact division by the remaining factors.
    pub fn apply(&self, s: &Scalar, clearing: &Clearing, divide: Option<Var>) -> Result<Scalar, CoidealError> {
        let mut s = s.substitute(&self.values)?;
        let order = |v: Var| clearing.exponent(v) + u32::from(divide == Some(v));
        for &v in &self.vars {
            s = s.divide_limit(v, order(v))?;
        }
        for v in [Var::Kp, Var::Km] {
            let n = order(v);
            if n > 0 && !self.vars.contains(&v) {
                s = s.checked_div(&Scalar::var(v).pow(n as i32)?)?;
            }
        }
        Ok(s.checked_div(&clearing.constant)?)
    }

    pub fn apply_elem(&self, x: &FreeElement, clearing: &Clearing, divide: Option<Var>) -> Result<FreeElement, CoidealError> {
        let mut out = FreeElement::zero();
        for (w, c) in x.terms() {
            out = &out + &FreeElement::word(w.clone(), self.apply(c, clearing, divide)?);
        }
        Ok(out)
    }
}

/// Reduces an element to the regime `case`.
pub fn specialize(x: &FreeElement, case: Case) -> Result<FreeElement, CoidealError> {
    Limit::for_case(case).apply_elem(x, &Clearing::none(), None)
}

/// One reduction identity: `lim lhs / divide = target`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecEntry {
    pub id: String,
    pub case_key: String,
    pub lhs: Descendant,
    pub divide: Option<Var>,
    pub target: Ast,
}

impl SpecEntry {
    pub fn algebra(&self) -> Algebra {
        match self.case_key.as_str() {
            "triangular" => Algebra::Triangular,
            "diagonal" => Algebra::Augmented,
            _ => Algebra::Gl2Inv,
        }
    }

    /// Target with generators replaced by their images.
    pub fn target_image(&self) -> Result<FreeElement, CoidealError> {
        Ok(image_env(self.algebra())?.eval_elem(&self.target, &FreeElement::one())?)
    }
}

/// The reduction identities of a regime; `Amended` swaps in repaired entries.
pub fn specialization_table(case: Case, variant: Variant) -> Result<Vec<SpecEntry>, CoidealError> {
    let Some(key) = case.table_key() else {
        return Ok(Vec::new());
    };
    let checks = &tables().specializations.checks;
    let mut out = Vec::new();
    for c in checks.iter().filter(|c| c.ident("case") == Some(key) && !c.id.ends_with(".amended")) {
        let amended = format!("{}.amended", c.id);
        let c = match variant {
            Variant::Amended => checks.iter().find(|x| x.id == amended).unwrap_or(c),
            Variant::Printed => c,
        };
        let lhs = Descendant::from_name(c.ident("lhs").ok_or_else(|| CoidealError::Table(format!("{}.lhs", c.id)))?)?;
        let divide = match c.ident("divide") {
            None => None,
            Some(v) => Some(Var::from_name(v).ok_or_else(|| CoidealError::Table(format!("{}.divide", c.id)))?),
        };
        let target = c.expr("target").ok_or_else(|| CoidealError::Table(format!("{}.target", c.id)))?.clone();
        out.push(SpecEntry { id: c.id.clone(), case_key: key.into(), lhs, divide, target });
    }
    Ok(out)
}

/// Automorphisms of the classical loop algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Automorphism {
    /// `e_i <-> f_i`, `h_i -> -h_i`.
    Theta,
    /// Composed with the diagram flip.
    ThetaD,
    /// Composed with the braid-group automorphism; fixes node 0.
    ThetaI,
}

impl Automorphism {
    pub const ALL: [Automorphism; 3] = [Automorphism::Theta, Automorphism::ThetaD, Automorphism::ThetaI];

    pub fn name(self) -> &'static str {
        match self {
            Automorphism::Theta => "theta",
            Automorphism::ThetaD => "theta_d",
            Automorphism::ThetaI => "theta_i",
        }
    }

    pub fn from_name(s: &str) -> Option<Automorphism> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }

    /// Image of a single classical letter.
    pub fn letter_image(self, l: Letter) -> Result<FreeElement, CoidealError> {
        use Letter::*;
        if l.alphabet() != Alphabet::Classical {
            return Err(AlgebraError::AlphabetMismatch.into());
        }
        let x = |l: Letter| FreeElement::letter(l);
        let neg = |l: Letter| FreeElement::letter(l).scale(&Scalar::int(-1));
        let half = Scalar::frac(1, 2);
        Ok(match self {
            Automorphism::Theta => match l {
                E0c => x(F0c),
                E1c => x(F1c),
                F0c => x(E0c),
                F1c => x(E1c),
                H0c => neg(H0c),
                _ => neg(H1c),
            },
            Automorphism::ThetaD => match l {
                E0c => x(F1c),
                E1c => x(F0c),
                F0c => x(E1c),
                F1c => x(E0c),
                H0c => neg(H1c),
                _ => neg(H0c),
            },
            Automorphism::ThetaI => match l {
                F1c => gens::comm(&gens::comm(&x(E1c), &x(E0c)), &x(E0c)).scale(&half),
                E1c => gens::comm(&gens::comm(&x(F1c), &x(F0c)), &x(F0c)).scale(&half),
                H1c => &neg(H1c) - &x(H0c).scale(&Scalar::int(2)),
                other => x(other),
            },
        })
    }
}

/// Applies an automorphism multiplicatively to a classical element.
pub fn classical_automorphism(a: Automorphism, x: &FreeElement) -> Result<FreeElement, CoidealError> {
    if x.alphabet() == Some(Alphabet::Quantum) {
        return Err(AlgebraError::AlphabetMismatch.into());
    }
    let mut imgs = HashMap::new();
    for l in Letter::CLASSICAL {
        imgs.insert(l, a.letter_image(l)?);
    }
    Ok(x.map_letters(|l| imgs[&l].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmat::Chain;

    fn g(a: Algebra, n: &str) -> OGenerator {
        OGenerator::new(a, n).unwrap()
    }

    #[test]
    fn generator_lists() {
        assert_eq!(Algebra::Gl2Inv.generators().len(), 8);
        assert!(OGenerator::new(Algebra::QOnsager, "K0").is_err());
        assert_eq!(g(Algebra::Augmented, "Zt1").to_string(), "augmented.Zt1");
    }

    #[test]
    fn presentations_reference_declared_names() {
        for a in Algebra::ALL {
            for v in [Variant::Printed, Variant::Amended] {
                let p = presentation(a, v);
                assert_eq!(p.generators, a.generators().iter().map(|s| s.to_string()).collect::<Vec<_>>());
                for r in &p.relations {
                    for id in r.residual_ast().refs() {
                        assert!(p.generators.contains(&id) || dsl::BUILTIN_PARAMS.contains(&id.as_str()), "{id}");
                    }
                }
            }
        }
        assert_eq!(presentation(Algebra::QOnsager, Variant::Printed).relations.len(), 4);
        assert_eq!(presentation(Algebra::Augmented, Variant::Printed).relations.len(), 12);
    }

    #[test]
    fn psi_examples() {
        let k0 = psi_image(g(Algebra::Augmented, "K0")).unwrap();
        assert_eq!(k0, gens::t1().scale(&params::ep()));
        let gam = psi_image(g(Algebra::Augmented, "Gamma")).unwrap();
        assert_eq!(gam, FreeElement::qc().scale(&(&params::em() * &params::ep())));
        let x = psi_image(g(Algebra::Gl2Inv, "X")).unwrap();
        let want = &gens::qcomm(&gens::e1(), &gens::e0(), 1) - &(&gens::qcomm(&gens::f1(), &gens::f0(), -1) * &gens::qc());
        assert_eq!(x, want);
    }

    #[test]
    fn coaction_examples() {
        let d = coaction_image(g(Algebra::QOnsager, "Gamma"), Variant::Printed).unwrap();
        assert_eq!(d.to_text(), "t0 t1 (x) Gamma");
        let d = coaction_image(g(Algebra::Gl2Inv, "qh"), Variant::Printed).unwrap();
        assert_eq!(d.to_text(), "t0 (x) qh");
        let y = coaction_image(g(Algebra::Gl2Inv, "Yt"), Variant::Printed).unwrap();
        assert_eq!(y.abstract_degree(), 3);
    }

    #[test]
    fn psi_is_counit_of_coaction() {
        for a in Algebra::ALL {
            for x in a.all_generators() {
                let psi = psi_image(x).unwrap();
                let amended = coaction_image(x, Variant::Amended).unwrap().counit_abstract(a).unwrap();
                assert_eq!(amended, psi, "{x}");
                let printed = coaction_image(x, Variant::Printed).unwrap().counit_abstract(a).unwrap();
                assert_eq!(printed == psi, x.name != "Pt1", "{x}");
            }
        }
    }

    #[test]
    fn counit_on_u_slot_recovers_generator() {
        for a in Algebra::ALL {
            for x in a.all_generators() {
                let d = coaction_image(x, Variant::Amended).unwrap();
                assert_eq!(d.counit_u(), AbsElement::gen(x.name), "{x}");
            }
        }
    }

    #[test]
    fn counit_is_a_character() {
        for a in Algebra::ALL {
            let printed = presentation(a, Variant::Printed).counit_residuals().unwrap();
            let amended = presentation(a, Variant::Amended).counit_residuals().unwrap();
            assert!(amended.iter().all(|s| s.is_zero()), "{a}");
            let bad: Vec<usize> = printed.iter().enumerate().filter(|(_, s)| !s.is_zero()).map(|(i, _)| i).collect();
            if a == Algebra::Augmented {
                assert_eq!(bad, vec![0, 1]);
            } else {
                assert!(bad.is_empty(), "{a}");
            }
        }
    }

    #[test]
    fn swap_map_is_an_involution() {
        for d in Descendant::ALL {
            for v in [Variant::Printed, Variant::Amended] {
                let x = descendant(d, Form::Chevalley, v).unwrap().element;
                assert_eq!(swap_map(&swap_map(&x)), x, "{d:?}");
            }
        }
        let w0 = psi_image(g(Algebra::QOnsager, "W0")).unwrap();
        let w1 = psi_image(g(Algebra::QOnsager, "W1")).unwrap();
        assert_eq!(swap_map(&w0), w1);
    }

    fn form_residual(ch: &Chain, d: Descendant, v: Variant) -> crate::repmat::SparseMatrix {
        let w = |n| ch.eval(&psi_image(g(Algebra::QOnsager, n)).unwrap()).unwrap();
        let (p, cl) = eval_polynomial(d, v, &w("W0"), &w("W1"), &ch.eval(&FreeElement::qc()).unwrap()).unwrap();
        let c = ch.eval(&descendant(d, Form::Chevalley, v).unwrap().element).unwrap();
        if d.leading_only() {
            let divide = if d == Descendant::G2 { Var::Km } else { Var::Kp };
            let lim = Limit { vars: vec![Var::Kp, Var::Km], values: Assignment::new() };
            let lp = p.map_scalars(|s| lim.apply(s, &cl, Some(divide)).map_err(|_| CoeffError::DivisionByZero));
            let lc = c.map_scalars(|s| lim.apply(s, &Clearing::none(), Some(divide)).map_err(|_| CoeffError::DivisionByZero));
            match (lp, lc) {
                (Ok(a), Ok(b)) => a.try_sub(&b).unwrap(),
                _ => crate::repmat::SparseMatrix::identity(ch.dim()),
            }
        } else {
            c.scale(&cl.scalar()).try_sub(&p).unwrap()
        }
    }

    #[test]
    fn printed_and_amended_expansions() {
        let ch = Chain::new(2).unwrap();
        for d in [Descendant::G1, Descendant::Gt1, Descendant::Wm1, Descendant::W2, Descendant::G2, Descendant::Gt2] {
            assert!(!form_residual(&ch, d, Variant::Printed).is_zero(), "{d:?}");
            assert!(form_residual(&ch, d, Variant::Amended).is_zero(), "{d:?}");
        }
    }

    #[test]
    fn amended_expansions_on_three_sites() {
        let ch = Chain::new(3).unwrap();
        for d in [Descendant::G1, Descendant::Wm1, Descendant::G2] {
            assert!(form_residual(&ch, d, Variant::Amended).is_zero(), "{d:?}");
        }
    }

    #[test]
    fn clearing_factors() {
        let (_, c) = polynomial_ast(Descendant::Wm1, Variant::Printed).unwrap();
        assert_eq!((c.kp, c.km), (1, 1));
        assert_eq!(c.constant, &params::qsum(1) * &params::qsum(1));
        let (_, c) = polynomial_ast(Descendant::Gt2, Variant::Printed).unwrap();
        assert_eq!(c.scalar(), &params::rho() * &params::qsum(2));
    }

    #[test]
    fn polynomial_partner_swaps_w() {
        let (a, _) = polynomial_ast(Descendant::Gt1, Variant::Printed).unwrap();
        assert!(dsl::format(&a).starts_with("qc(W0, W1, 1)"));
    }

    #[test]
    fn limits() {
        let s = &(&params::kp() * &params::em()) + &(&params::kp() * &params::kp());
        let l = Limit::for_case(Case::Triangular);
        assert_eq!(l.apply(&s, &Clearing::none(), Some(Var::Kp)).unwrap(), params::em());
        assert!(matches!(l.apply(&params::em(), &Clearing::none(), Some(Var::Kp)), Err(CoidealError::NotDivisible { .. })));
        let l = Limit::for_case(Case::SpecialB);
        assert_eq!(l.apply(&s, &Clearing::none(), Some(Var::Kp)).unwrap(), Scalar::zero());
        let l = Limit::for_case(Case::SpecialA);
        assert_eq!(l.apply(&s, &Clearing::none(), Some(Var::Kp)).unwrap(), params::kp());
    }

    #[test]
    fn specialize_is_idempotent() {
        let w0 = psi_image(g(Algebra::QOnsager, "W0")).unwrap();
        for c in Case::ALL {
            let once = specialize(&w0, c).unwrap();
            assert_eq!(specialize(&once, c).unwrap(), once);
        }
        let t0 = psi_image(g(Algebra::Triangular, "T0")).unwrap();
        assert_eq!(specialize(&w0, Case::Triangular).unwrap(), t0);
    }

    #[test]
    fn specialization_tables() {
        assert_eq!(specialization_table(Case::Triangular, Variant::Printed).unwrap().len(), 3);
        assert_eq!(specialization_table(Case::Diagonal, Variant::Printed).unwrap().len(), 4);
        let sp = specialization_table(Case::SpecialB, Variant::Amended).unwrap();
        assert_eq!(sp.len(), 8);
        assert!(sp.iter().any(|e| e.id == "spec.special.G2.amended"));
        let z = specialization_table(Case::Diagonal, Variant::Printed).unwrap();
        let g1 = z.iter().find(|e| e.lhs == Descendant::G1).unwrap();
        assert_eq!(g1.target_image().unwrap(), psi_image(g(Algebra::Augmented, "Z1")).unwrap());
    }

    #[test]
    fn classical_tables() {
        let th = |a, l| Automorphism::letter_image(a, l).unwrap();
        assert_eq!(th(Automorphism::Theta, Letter::E1c), FreeElement::letter(Letter::F1c));
        assert_eq!(th(Automorphism::ThetaD, Letter::H0c), FreeElement::letter(Letter::H1c).scale(&Scalar::int(-1)));
        let e = FreeElement::letter;
        let want = gens::comm(&gens::comm(&e(Letter::E1c), &e(Letter::E0c)), &e(Letter::E0c)).scale(&Scalar::frac(1, 2));
        assert_eq!(th(Automorphism::ThetaI, Letter::F1c), want);
        assert!(matches!(
            classical_automorphism(Automorphism::Theta, &gens::e0()),
            Err(CoidealError::Algebra(AlgebraError::AlphabetMismatch))
        ));
        for a in [Automorphism::Theta, Automorphism::ThetaD] {
            for l in Letter::CLASSICAL {
                let x = FreeElement::letter(l);
                assert_eq!(classical_automorphism(a, &classical_automorphism(a, &x).unwrap()).unwrap(), x);
            }
        }
    }
}
