//! Check catalog, runner and reports.
//!
//! A check passes when every residual it computes is identically zero in the
//! chosen finite representations (symbolic mode) or at one random rational
//! point (generic mode). Representation-level passes are necessary, not
//! sufficient, for the abstract statements.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::coeff::{params, Assignment, CoeffError, Rational, Scalar, Var};
use crate::coideal::{
    self, abstract_env, coaction_image, counit_value, eval_polynomial, image_env, presentation, psi_image, pt1_image,
    specialization_table, u_env, Algebra, Automorphism, Case, Clearing, CoidealError, Descendant, EOrdering, Form,
    Limit, OGenerator, SpecEntry, Variant,
};
use crate::dsl::{self, Ast, Env, EvalError, ParseError, Suite};
use crate::qalgebra::{antipode, coproduct, counit, AlgebraError, FreeElement, Letter, TensorElement};
use crate::repmat::{
    far_end_anchored, hamiltonian, local_gamma_identity, pauli, spin_reversal_conjugate, string_depth, support,
    BoundaryParams, Chain, ChainOperator, RepError, SparseMatrix,
};
use crate::ring::Ring;

pub const UQ_SUITE: &str = include_str!("../suites/uq.suite");
pub const CLASSICAL_SUITE: &str = include_str!("../suites/classical.suite");
pub const ALL_SUITE: &str = include_str!("../suites/all.suite");
pub const OPEN_SUITE: &str = include_str!("../suites/open-questions.suite");
pub const CONTROLS_SUITE: &str = include_str!("../suites/negative-controls.suite");

/// Largest chain handled without `allow_large`.
pub const SYMBOLIC_MAX_SITES: usize = 6;
pub const GENERIC_MAX_SITES: usize = 12;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("check `{id}`: {message}")]
    BadCheck { id: String, message: String },
    #[error("{0} sites exceeds the {1}-site limit for this mode")]
    FeasibilityExceeded(usize, usize),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Coideal(#[from] CoidealError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Coeff(CoeffError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<CoeffError> for VerifyError {
    fn from(e: CoeffError) -> Self {
        VerifyError::Coeff(e)
    }
}

impl VerifyError {
    fn is_singular(&self) -> bool {
        matches!(
            self,
            VerifyError::Coeff(CoeffError::EvaluationSingular | CoeffError::DivisionByZero)
                | VerifyError::Rep(RepError::Coeff(CoeffError::EvaluationSingular | CoeffError::DivisionByZero))
                | VerifyError::Rep(RepError::BoundarySingular)
                | VerifyError::Coideal(CoidealError::Coeff(CoeffError::EvaluationSingular | CoeffError::DivisionByZero))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Generic,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Symbolic => "symbolic",
            Mode::Generic => "generic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// Which builtin suite a catalog entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    /// Identities the harness establishes.
    Core,
    /// Printed readings the harness refutes, and alternative readings.
    Open,
    /// Perturbed identities that must fail.
    Control,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::Core => "core",
            Tier::Open => "open",
            Tier::Control => "control",
        }
    }

    pub fn from_name(s: &str) -> Option<Tier> {
        [Tier::Core, Tier::Open, Tier::Control].into_iter().find(|t| t.name() == s)
    }
}

/// How a check uses the site count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sites {
    /// Free-algebra or scalar check.
    None,
    /// Fixed layout independent of the requested count.
    Fixed(usize),
    Chain { default: usize, min: usize },
}

/// Exact value expected for a symmetry residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closed {
    None,
    Zero,
    /// `±1/2 (q - q^-1)(kp σ+ - km σ-)` on site `N`.
    FarEnd(i8),
}

#[derive(Debug, Clone)]
pub enum Job {
    UqRelation { suite_alg: &'static str, k: usize },
    Coassociativity,
    CounitAxiom,
    Antipode,
    CoidealPsi { gen: OGenerator, variant: Variant },
    CoidealCounit { gen: OGenerator, variant: Variant },
    CoidealCoassoc { gen: OGenerator, variant: Variant, slots: (usize, usize) },
    CoidealControl,
    Relation { alg: Algebra, k: usize, variant: Variant },
    RelationControl,
    CounitCharacter { alg: Algebra, variant: Variant },
    BoundaryBracket,
    LocalGamma,
    SpinReversal { control: bool },
    Symmetry { case: Case, gen: OGenerator, ordering: EOrdering, closed: Closed, strict: bool },
    SymmetryControl,
    Descendant { d: Descendant, variant: Variant },
    DescendantControl,
    Specialization { entry: SpecEntry, case: Case, variant: Variant, pt_symbolic: bool, ordering: EOrdering },
    SpecializationControl,
    ClassicalRelations { auto: Automorphism, control: bool },
    ClassicalInvolution { auto: Automorphism },
    ClassicalThetaI,
    DslRoundtrip,
    DslSpans,
    DslControl,
    /// `lhs = rhs` over the quantum letters, in the chain representation.
    Identity { lhs: Ast, rhs: Ast, params: Vec<dsl::ParamDecl> },
    /// `lhs = rhs` over an algebra's generators, through the image map.
    SuiteRelation { alg: Algebra, lhs: Ast, rhs: Ast, params: Vec<dsl::ParamDecl> },
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub anchor: String,
    pub tier: Tier,
    pub sites: Sites,
    pub case: Option<Case>,
    pub job: Job,
    pub options: Vec<(String, String)>,
}

impl CatalogEntry {
    fn new(id: impl Into<String>, anchor: impl Into<String>, tier: Tier, sites: Sites, job: Job) -> Self {
        CatalogEntry { id: id.into(), anchor: anchor.into(), tier, sites, case: None, job, options: Vec::new() }
    }

    fn with_case(mut self, c: Case) -> Self {
        self.case = Some(c);
        self
    }

    fn opt(mut self, k: &str, v: &str) -> Self {
        self.options.push((k.into(), v.into()));
        self
    }

    /// Variables left symbolic in generic mode.
    fn kept_vars(&self) -> Vec<Var> {
        match &self.job {
            Job::Specialization { case, pt_symbolic, .. } => {
                let mut v: Vec<Var> = case.limit_vars().to_vec();
                v.extend(case.values().iter().map(|(x, _)| x));
                if !pt_symbolic {
                    v.push(Var::Pt);
                }
                v
            }
            Job::Symmetry { case, .. } => {
                let mut v: Vec<Var> = case.limit_vars().to_vec();
                v.extend(case.values().iter().map(|(x, _)| x));
                v
            }
            Job::Descendant { d, .. } if d.leading_only() => vec![Var::Kp, Var::Km],
            _ => Vec::new(),
        }
    }
}

fn uq_relation_count(name: &str) -> usize {
    dsl::parse_suite(UQ_SUITE).expect("built-in suite parses").algebra(name).map_or(0, |a| a.relations.len())
}

fn classical_relations() -> Vec<coideal::Relation> {
    let s = dsl::parse_suite(CLASSICAL_SUITE).expect("built-in suite parses");
    s.algebras[0].relations.iter().map(|(l, r)| coideal::Relation { lhs: l.clone(), rhs: r.clone() }).collect()
}

fn alg_anchor(a: Algebra) -> &'static str {
    match a {
        Algebra::QOnsager => "q-Onsager algebra: q-Dolan-Grady relations and central Gamma",
        Algebra::Triangular => "triangular q-Onsager algebra relations",
        Algebra::Augmented => "augmented q-Onsager algebra relations",
        Algebra::Gl2Inv => "gl2-invariant q-Onsager algebra relations",
    }
}

/// Generators whose bracket with the Hamiltonian carries a Cartan string
/// into the bulk, so strict two-site support fails.
fn string_anchored(case: Case, gen: &str) -> bool {
    match case {
        Case::Triangular => gen == "Pt1",
        Case::Diagonal => matches!(gen, "Z1" | "Zt1"),
        Case::SpecialA => gen != "Gamma",
        Case::SpecialB => matches!(gen, "f" | "X" | "Y" | "Yt"),
        Case::Generic => false,
    }
}

/// The full catalog, sorted by id.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    let chain = |d, m| Sites::Chain { default: d, min: m };

    for k in 1..=uq_relation_count("uq") {
        out.push(CatalogEntry::new(
            format!("hopf.uq.{k:02}"),
            "quantum affine algebra: Cartan, [e,f] and q-Serre relations",
            Tier::Core,
            chain(2, 1),
            Job::UqRelation { suite_alg: "uq", k },
        ));
    }
    out.push(CatalogEntry::new(
        "hopf.uq.control",
        "q-Serre relation with a deformed inner bracket",
        Tier::Control,
        chain(2, 1),
        Job::UqRelation { suite_alg: "uq.control", k: 1 },
    ));
    out.push(CatalogEntry::new("hopf.coassociativity", "coproduct is coassociative on generators", Tier::Core, Sites::None, Job::Coassociativity));
    out.push(CatalogEntry::new("hopf.counit", "counit axiom on generators", Tier::Core, Sites::None, Job::CounitAxiom));
    out.push(CatalogEntry::new("hopf.antipode", "antipode axiom m(S x id)D = E 1", Tier::Core, chain(2, 1), Job::Antipode));

    for alg in Algebra::ALL {
        for gen in alg.all_generators() {
            let base = format!("coideal.{}.{}", alg, gen.name);
            let printed_differs = coaction_image(gen, Variant::Printed).ok() != coaction_image(gen, Variant::Amended).ok();
            for (variant, suffix, tier) in [(Variant::Amended, "", Tier::Core), (Variant::Printed, ".printed", Tier::Open)] {
                if variant == Variant::Printed && !printed_differs {
                    continue;
                }
                out.push(CatalogEntry::new(
                    format!("{base}.psi{suffix}"),
                    "image map equals counit applied to the coaction",
                    tier,
                    Sites::None,
                    Job::CoidealPsi { gen, variant },
                ));
                out.push(CatalogEntry::new(
                    format!("{base}.counit{suffix}"),
                    "comodule counit axiom (E x id) delta = id",
                    tier,
                    Sites::None,
                    Job::CoidealCounit { gen, variant },
                ));
                for slots in [(2, 1), (1, 2)] {
                    out.push(CatalogEntry::new(
                        format!("{base}.coassoc-{}{}{suffix}", slots.0, slots.1),
                        "comodule coassociativity (D x id) delta = (id x delta) delta",
                        tier,
                        Sites::Fixed(slots.0 + slots.1 + 1),
                        Job::CoidealCoassoc { gen, variant, slots },
                    ));
                }
            }
        }
        let printed = presentation(alg, Variant::Printed);
        let amended = presentation(alg, Variant::Amended);
        for k in 1..=amended.relations.len() {
            out.push(CatalogEntry::new(
                format!("rel.{alg}.{k:02}"),
                alg_anchor(alg),
                Tier::Core,
                chain(2, 1),
                Job::Relation { alg, k, variant: Variant::Amended },
            ));
            if printed.relations.get(k - 1) != amended.relations.get(k - 1) {
                out.push(CatalogEntry::new(
                    format!("rel.{alg}.{k:02}.printed"),
                    alg_anchor(alg),
                    Tier::Open,
                    chain(3, 1),
                    Job::Relation { alg, k, variant: Variant::Printed },
                ));
            }
        }
        out.push(CatalogEntry::new(
            format!("rel.{alg}.counit"),
            "counit values respect the defining relations",
            Tier::Core,
            Sites::None,
            Job::CounitCharacter { alg, variant: Variant::Amended },
        ));
        if printed != amended {
            out.push(CatalogEntry::new(
                format!("rel.{alg}.counit.printed"),
                "counit values respect the defining relations",
                Tier::Open,
                Sites::None,
                Job::CounitCharacter { alg, variant: Variant::Printed },
            ));
        }
    }
    out.push(CatalogEntry::new("rel.control", "q-Dolan-Grady relation with rho doubled", Tier::Control, chain(2, 1), Job::RelationControl));
    out.push(CatalogEntry::new(
        "coideal.control",
        "coaction of W0 with the Cartan factor on the wrong node",
        Tier::Control,
        Sites::Fixed(4),
        Job::CoidealControl,
    ));

    out.push(CatalogEntry::new(
        "chain.boundary-bracket",
        "boundary term bracket with W0: Cartan string times (kp s+ - km s-)",
        Tier::Core,
        chain(3, 2),
        Job::BoundaryBracket,
    ));
    out.push(CatalogEntry::new(
        "chain.local-gamma",
        "local bulk bracket identity and its diagonal lemmas",
        Tier::Core,
        chain(3, 2),
        Job::LocalGamma,
    ));
    out.push(CatalogEntry::new(
        "chain.spin-reversal",
        "spin reversal exchanges the boundary couplings",
        Tier::Core,
        chain(3, 2),
        Job::SpinReversal { control: false },
    ));
    out.push(CatalogEntry::new(
        "chain.control",
        "spin reversal without exchanging couplings",
        Tier::Control,
        chain(3, 2),
        Job::SpinReversal { control: true },
    ));

    for case in Case::ALL {
        for gen in case.algebra().all_generators() {
            let closed = match (case, gen.name) {
                (Case::Generic, "W0") => Closed::FarEnd(1),
                (Case::Generic, "W1") => Closed::FarEnd(-1),
                (Case::Diagonal, "K0" | "K1") => Closed::Zero,
                _ => Closed::None,
            };
            let tier = if string_anchored(case, gen.name) { Tier::Open } else { Tier::Core };
            let ordering = EOrdering::AsPrinted;
            out.push(
                CatalogEntry::new(
                    format!("sym.{}.{}", case, gen.name),
                    "Hamiltonian commutes with the generator up to the far chain end",
                    tier,
                    chain(3, 3),
                    Job::Symmetry { case, gen, ordering, closed, strict: true },
                )
                .with_case(case),
            );
            if string_anchored(case, gen.name) {
                out.push(
                    CatalogEntry::new(
                        format!("sym.{}.{}.anchored", case, gen.name),
                        "bracket with the Hamiltonian vanishes after tracing out the far end",
                        Tier::Open,
                        chain(3, 3),
                        Job::Symmetry { case, gen, ordering, closed, strict: false },
                    )
                    .with_case(case),
                );
            }
        }
    }
    let pt1 = OGenerator::new(Algebra::Triangular, "Pt1").expect("declared");
    out.push(
        CatalogEntry::new(
            "sym.triangular.Pt1.e0e1",
            "Hamiltonian bracket of Pt1 with the e-bracket reversed",
            Tier::Open,
            chain(3, 3),
            Job::Symmetry { case: Case::Triangular, gen: pt1, ordering: EOrdering::Swapped, closed: Closed::None, strict: true },
        )
        .with_case(Case::Triangular),
    );
    let w1 = OGenerator::new(Algebra::QOnsager, "W1").expect("declared");
    out.push(
        CatalogEntry::new(
            "sym.generic.W1.plus-sign",
            "bracket of W1 with the Hamiltonian equal to +1/2 (q-q^-1)(kp s+ - km s-) at the far end",
            Tier::Open,
            chain(3, 3),
            Job::Symmetry { case: Case::Generic, gen: w1, ordering: EOrdering::AsPrinted, closed: Closed::FarEnd(1), strict: true },
        )
        .with_case(Case::Generic),
    );
    let w0 = OGenerator::new(Algebra::QOnsager, "W0").expect("declared");
    let _ = w0;
    out.push(
        CatalogEntry::new(
            "sym.control",
            "W0 against the Hamiltonian with exchanged couplings",
            Tier::Control,
            chain(3, 3),
            Job::SymmetryControl,
        )
        .with_case(Case::Generic),
    );

    for d in [Descendant::G1, Descendant::Gt1, Descendant::Wm1, Descendant::W2, Descendant::G2, Descendant::Gt2] {
        let anchor = if d.leading_only() {
            "descendant: expansion equals the polynomial form to leading order in kp, km"
        } else {
            "descendant: expansion equals the polynomial form"
        };
        out.push(CatalogEntry::new(format!("desc.{}", d.name()), anchor, Tier::Core, chain(2, 2), Job::Descendant { d, variant: Variant::Amended }));
        out.push(CatalogEntry::new(
            format!("desc.{}.printed", d.name()),
            anchor,
            Tier::Open,
            chain(2, 2),
            Job::Descendant { d, variant: Variant::Printed },
        ));
    }
    out.push(CatalogEntry::new("desc.control", "G1 expansion with ep and em exchanged", Tier::Control, chain(2, 2), Job::DescendantControl));

    for case in [Case::Triangular, Case::Diagonal, Case::SpecialB, Case::SpecialA] {
        let printed = specialization_table(case, Variant::Printed).unwrap_or_default();
        let amended = specialization_table(case, Variant::Amended).unwrap_or_default();
        for e in &amended {
            let stem = e.id.trim_start_matches("spec.").trim_end_matches(".amended");
            let stem = stem.split_once('.').map_or(stem, |(_, r)| r);
            let id = format!("spec.{}.{}", case, stem);
            let tier = if case == Case::SpecialA { Tier::Open } else { Tier::Core };
            let anchor = format!("reduction at {} boundary couplings", case);
            let job = |entry: &SpecEntry, variant, pt_symbolic, ordering| Job::Specialization {
                entry: entry.clone(),
                case,
                variant,
                pt_symbolic,
                ordering,
            };
            out.push(
                CatalogEntry::new(id.clone(), anchor.clone(), tier, chain(2, 1), job(e, Variant::Amended, false, EOrdering::AsPrinted))
                    .with_case(case),
            );
            if let Some(p) = printed.iter().find(|p| p.lhs == e.lhs && p.divide == e.divide) {
                if p.target != e.target || case == Case::SpecialA {
                    if case != Case::SpecialA {
                        out.push(
                            CatalogEntry::new(
                                format!("{id}.printed"),
                                anchor.clone(),
                                Tier::Open,
                                chain(2, 1),
                                job(p, Variant::Printed, false, EOrdering::AsPrinted),
                            )
                            .with_case(case),
                        );
                    }
                }
            }
            if e.lhs == Descendant::Gt1 && case == Case::Triangular {
                out.push(
                    CatalogEntry::new(
                        format!("{id}.e0e1"),
                        anchor.clone(),
                        Tier::Open,
                        chain(2, 1),
                        job(e, Variant::Amended, false, EOrdering::Swapped),
                    )
                    .with_case(case)
                    .opt("ordering", "e0e1"),
                );
                out.push(
                    CatalogEntry::new(format!("{id}.pt-symbolic"), anchor.clone(), Tier::Open, chain(2, 1), job(e, Variant::Amended, true, EOrdering::AsPrinted))
                        .with_case(case)
                        .opt("pt", "symbolic"),
                );
            }
        }
    }
    out.push(CatalogEntry::new(
        "spec.control",
        "diagonal reduction of W0 compared with the image of K1",
        Tier::Control,
        chain(2, 1),
        Job::SpecializationControl,
    ));

    for auto in Automorphism::ALL {
        out.push(CatalogEntry::new(
            format!("classical.{}.relations", auto.name()),
            "classical limit: automorphism respects the loop algebra relations",
            Tier::Core,
            chain(2, 1),
            Job::ClassicalRelations { auto, control: false },
        ));
        if auto != Automorphism::ThetaI {
            out.push(CatalogEntry::new(
                format!("classical.{}.involution", auto.name()),
                "classical limit: automorphism squares to the identity",
                Tier::Core,
                Sites::None,
                Job::ClassicalInvolution { auto },
            ));
        }
    }
    out.push(CatalogEntry::new(
        "classical.theta_i.h1",
        "classical limit: theta_i(h1) = -h1 - 2 h0 equals [theta_i(e1), theta_i(f1)]",
        Tier::Core,
        chain(2, 1),
        Job::ClassicalThetaI,
    ));
    out.push(CatalogEntry::new(
        "classical.control",
        "Chevalley involution without the sign on h",
        Tier::Control,
        chain(2, 1),
        Job::ClassicalRelations { auto: Automorphism::Theta, control: true },
    ));

    out.push(CatalogEntry::new("dsl.roundtrip", "suite language: parse . format . parse = parse", Tier::Core, Sites::None, Job::DslRoundtrip));
    out.push(CatalogEntry::new("dsl.spans", "suite language: error spans lie inside the input", Tier::Core, Sites::None, Job::DslSpans));
    out.push(CatalogEntry::new("dsl.control", "malformed q-commutator accepted", Tier::Control, Sites::None, Job::DslControl));

    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// Compiled-in suite texts by name.
pub fn builtin_suite(name: &str) -> Option<&'static str> {
    match name {
        "builtin:all" => Some(ALL_SUITE),
        "builtin:open-questions" => Some(OPEN_SUITE),
        "builtin:negative-controls" => Some(CONTROLS_SUITE),
        _ => None,
    }
}

pub const BUILTIN_SUITES: [&str; 3] = ["builtin:all", "builtin:open-questions", "builtin:negative-controls"];

/// Every compiled-in suite text, for round-trip testing.
pub fn builtin_sources() -> Vec<(&'static str, &'static str)> {
    vec![
        ("presentations", coideal::PRESENTATIONS_SUITE),
        ("tables", coideal::TABLES_SUITE),
        ("specializations", coideal::SPECIALIZATIONS_SUITE),
        ("uq", UQ_SUITE),
        ("classical", CLASSICAL_SUITE),
        ("all", ALL_SUITE),
        ("open-questions", OPEN_SUITE),
        ("negative-controls", CONTROLS_SUITE),
    ]
}

/// Turns suite check blocks into catalog entries.
///
/// A block selects catalog entries with `tier = core|open|control` and/or
/// `prefix = <id prefix>`, or names one catalog id. Blocks with
/// `kind = identity` or `kind = relation` define new checks. `sites = n`
/// sets the default site count of every entry the block yields. Algebra blocks
/// named after a built-in algebra are checked relation by relation.
pub fn resolve_suite(s: &Suite) -> Result<Vec<CatalogEntry>, VerifyError> {
    let cat = catalog();
    let mut out: Vec<CatalogEntry> = Vec::new();
    let bad = |id: &str, m: &str| VerifyError::BadCheck { id: id.into(), message: m.into() };
    for c in &s.checks {
        let mut picked: Vec<CatalogEntry> = Vec::new();
        match c.ident("kind") {
            Some("identity") => {
                let lhs = c.expr("lhs").ok_or_else(|| bad(&c.id, "missing lhs"))?.clone();
                let rhs = c.expr("rhs").ok_or_else(|| bad(&c.id, "missing rhs"))?.clone();
                picked.push(CatalogEntry::new(
                    c.id.clone(),
                    "suite-defined identity",
                    Tier::Core,
                    Sites::Chain { default: 2, min: 1 },
                    Job::Identity { lhs, rhs, params: s.params.clone() },
                ));
            }
            Some("relation") => {
                let an = c.ident("algebra").ok_or_else(|| bad(&c.id, "missing algebra"))?;
                let alg = Algebra::from_name(an).ok_or_else(|| bad(&c.id, "unknown algebra"))?;
                let lhs = c.expr("lhs").ok_or_else(|| bad(&c.id, "missing lhs"))?.clone();
                let rhs = c.expr("rhs").ok_or_else(|| bad(&c.id, "missing rhs"))?.clone();
                picked.push(CatalogEntry::new(
                    c.id.clone(),
                    alg_anchor(alg),
                    Tier::Core,
                    Sites::Chain { default: 2, min: 1 },
                    Job::SuiteRelation { alg, lhs, rhs, params: s.params.clone() },
                ));
            }
            Some(k) => return Err(bad(&c.id, &format!("unknown kind `{k}`"))),
            None => {
                let tier = match c.ident("tier") {
                    Some(t) => Some(Tier::from_name(t).ok_or_else(|| bad(&c.id, "unknown tier"))?),
                    None => None,
                };
                let prefix = c.ident("prefix");
                if tier.is_none() && prefix.is_none() {
                    let e = cat.iter().find(|e| e.id == c.id).ok_or_else(|| VerifyError::UnknownCheck(c.id.clone()))?;
                    picked.push(e.clone());
                } else {
                    picked.extend(
                        cat.iter()
                            .filter(|e| tier.map_or(true, |t| e.tier == t) && prefix.map_or(true, |p| e.id.starts_with(p)))
                            .cloned(),
                    );
                }
            }
        }
        if let Some(n) = c.integer("sites") {
            let n = usize::try_from(n).map_err(|_| bad(&c.id, "sites must be positive"))?;
            for e in &mut picked {
                if let Sites::Chain { min, .. } = e.sites {
                    e.sites = Sites::Chain { default: n, min };
                }
            }
        }
        out.extend(picked);
    }
    for a in &s.algebras {
        let base = a.name.split('.').next().unwrap_or("");
        if let Some(alg) = Algebra::from_name(base) {
            for (k, (lhs, rhs)) in a.relations.iter().enumerate() {
                out.push(CatalogEntry::new(
                    format!("{}.{:02}", a.name, k + 1),
                    alg_anchor(alg),
                    Tier::Core,
                    Sites::Chain { default: 2, min: 1 },
                    Job::SuiteRelation { alg, lhs: lhs.clone(), rhs: rhs.clone(), params: s.params.clone() },
                ));
            }
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|e| seen.insert(e.id.clone()));
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

/// Options shared by every check of a run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: Option<u64>,
    /// Overrides each check's default site count.
    pub sites: Option<usize>,
    /// Restricts case-specific checks to one boundary case.
    pub case: Option<Case>,
    pub allow_large: bool,
    /// When false, `millis` is written as 0 so reports are byte-stable.
    pub timings: bool,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { mode: Mode::Symbolic, seed: None, sites: None, case: None, allow_large: false, timings: true, threads: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstEntry {
    pub at: String,
    pub row: Option<usize>,
    pub col: Option<usize>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Residual {
    pub nonzero: usize,
    pub first: Option<FirstEntry>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub paper_ref: String,
    pub params: Map<String, Value>,
    pub status: Status,
    pub residual: Residual,
    pub support_observed: Option<Vec<usize>>,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    /// 0 when every check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let seed = self.seed.map_or("-".to_string(), |s| s.to_string());
        let mut out = format!("suite {} mode {} seed {}\n", self.suite, self.mode.name(), seed);
        for c in &self.checks {
            let n = c.params.get("sites").and_then(|v| v.as_u64()).map_or("-".to_string(), |n| n.to_string());
            let mut line = format!("{} {} N={} mode={}", c.id, c.status.name().to_uppercase(), n, self.mode.name());
            if let Some(s) = &c.support_observed {
                let s: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                line.push_str(&format!(" support={{{}}}", s.join(",")));
            }
            if c.status != Status::Pass {
                if let Some(f) = &c.residual.first {
                    match (f.row, f.col) {
                        (Some(r), Some(col)) => line.push_str(&format!(" first={}[{},{}]={}", f.at, r, col, f.value)),
                        _ => line.push_str(&format!(" first={}: {}", f.at, f.value)),
                    }
                }
                if let Some(n) = &c.residual.note {
                    line.push_str(&format!(" note=\"{n}\""));
                }
            }
            line.push_str(&format!(" -- {}\n", c.paper_ref));
            out.push_str(&line);
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Default)]
struct Acc {
    /// Sampled point; symbolic constants left in a residual are evaluated here.
    point: Assignment,
    nonzero: usize,
    first: Option<FirstEntry>,
    notes: Vec<String>,
}

impl Acc {
    fn matrix(&mut self, at: &str, m: &SparseMatrix) {
        let owned;
        let m = if self.point.is_empty() {
            m
        } else {
            match m.substitute(&self.point) {
                Ok(x) => {
                    owned = x;
                    &owned
                }
                Err(e) => return self.fail(at, &e.to_string()),
            }
        };
        let n = m.nnz();
        if n == 0 {
            return;
        }
        self.nonzero += n;
        if self.first.is_none() {
            let (r, c, v) = m.first_nonzero().expect("nonzero matrix");
            self.first = Some(FirstEntry { at: at.into(), row: Some(r), col: Some(c), value: v.to_canonical() });
        }
    }

    fn free(&mut self, at: &str, x: &FreeElement) {
        if x.is_empty() {
            return;
        }
        self.nonzero += x.len();
        if self.first.is_none() {
            let (w, c) = x.terms().next().expect("nonzero element");
            self.first = Some(FirstEntry { at: format!("{at}: {w}"), row: None, col: None, value: c.to_canonical() });
        }
    }

    fn scalar(&mut self, at: &str, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        self.nonzero += 1;
        if self.first.is_none() {
            self.first = Some(FirstEntry { at: at.into(), row: None, col: None, value: s.to_canonical() });
        }
    }

    fn fail(&mut self, at: &str, msg: &str) {
        self.nonzero += 1;
        if self.first.is_none() {
            self.first = Some(FirstEntry { at: at.into(), row: None, col: None, value: msg.into() });
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

#[derive(Default)]
struct Outcome {
    acc: Acc,
    support: Option<BTreeSet<usize>>,
    extra: Vec<(String, Value)>,
}

impl Outcome {
    fn from_acc(acc: Acc) -> Self {
        Outcome { acc, ..Default::default() }
    }
}

/// Evaluation context: the sampled point (empty in symbolic mode).
struct Ctx {
    point: Assignment,
}

impl Ctx {
    fn chain(&self, n: usize) -> Result<Chain, VerifyError> {
        Ok(Chain::build(n, Scalar::one(), self.point.clone())?)
    }

    fn zeta_chain(&self, n: usize) -> Result<Chain, VerifyError> {
        Ok(Chain::build(n, Scalar::var(Var::Zeta), self.point.clone())?)
    }

    fn boundary(&self, p: &BoundaryParams) -> Result<BoundaryParams, VerifyError> {
        Ok(p.substitute(&self.point)?)
    }

    fn mat(&self, m: &SparseMatrix) -> Result<SparseMatrix, VerifyError> {
        Ok(m.substitute(&self.point)?)
    }
}

fn fnv(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn sample_point(seed: u64, id: &str, attempt: u32, kept: &[Var]) -> Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv(id) ^ u64::from(attempt).wrapping_mul(0x9e3779b97f4a7c15));
    let full = Assignment::random_point(&mut rng);
    let mut a = Assignment::new();
    for (v, r) in full.iter() {
        if !kept.contains(&v) {
            a.set(v, r.clone());
        }
    }
    a
}

fn resolve_sites(e: &CatalogEntry, cfg: &RunConfig) -> Result<Option<usize>, VerifyError> {
    let n = match e.sites {
        Sites::None => return Ok(None),
        Sites::Fixed(n) => n,
        Sites::Chain { default, min } => {
            // Checks that need a longer chain run at their minimum.
            cfg.sites.unwrap_or(default).max(min)
        }
    };
    let limit = match cfg.mode {
        Mode::Symbolic => SYMBOLIC_MAX_SITES,
        Mode::Generic => GENERIC_MAX_SITES,
    };
    if n > limit && !cfg.allow_large {
        return Err(VerifyError::FeasibilityExceeded(n, limit));
    }
    Ok(Some(n))
}

/// Runs one check.
pub fn run_check(e: &CatalogEntry, cfg: &RunConfig) -> CheckResult {
    let start = Instant::now();
    let mut params = Map::new();
    let sites = resolve_sites(e, cfg);
    let resolved = sites.as_ref().ok().copied().flatten();
    params.insert("sites".into(), resolved.map_or(Value::Null, |n| json!(n)));
    if let (Some(r), Some(n)) = (cfg.sites, resolved) {
        if r != n && matches!(e.sites, Sites::Chain { .. }) {
            params.insert("sites_requested".into(), json!(r));
        }
    }
    params.insert("mode".into(), json!(cfg.mode.name()));
    if let Some(c) = e.case {
        params.insert("case".into(), json!(c.name()));
    }
    for (k, v) in &e.options {
        params.insert(k.clone(), json!(v));
    }
    let variant = match &e.job {
        Job::CoidealPsi { variant, .. }
        | Job::CoidealCounit { variant, .. }
        | Job::CoidealCoassoc { variant, .. }
        | Job::Relation { variant, .. }
        | Job::CounitCharacter { variant, .. }
        | Job::Descendant { variant, .. }
        | Job::Specialization { variant, .. } => Some(*variant),
        _ => None,
    };
    if let Some(v) = variant {
        params.insert("variant".into(), json!(v.name()));
    }

    let result = sites.and_then(|n| {
        let kept = e.kept_vars();
        let mut attempt = 0;
        loop {
            let point = match (cfg.mode, cfg.seed) {
                (Mode::Generic, Some(seed)) => sample_point(seed, &e.id, attempt, &kept),
                (Mode::Generic, None) => sample_point(0, &e.id, attempt, &kept),
                _ => Assignment::new(),
            };
            let ctx = Ctx { point: point.clone() };
            match run_job(&e.job, n.unwrap_or(0), &ctx) {
                Err(err) if cfg.mode == Mode::Generic && err.is_singular() && attempt < 16 => attempt += 1,
                r => break r.map(|o| (o, point)),
            }
        }
    });

    let (status, residual, support_observed) = match result {
        Ok((o, point)) => {
            if cfg.mode == Mode::Generic {
                params.insert("point".into(), json!(point.to_string()));
            }
            for (k, v) in o.extra {
                params.insert(k, v);
            }
            let status = if o.acc.nonzero == 0 { Status::Pass } else { Status::Fail };
            let note = if o.acc.notes.is_empty() { None } else { Some(o.acc.notes.join("; ")) };
            (
                status,
                Residual { nonzero: o.acc.nonzero, first: o.acc.first, note },
                o.support.map(|s| s.into_iter().collect()),
            )
        }
        Err(err) => (Status::Error, Residual { nonzero: 0, first: None, note: Some(err.to_string()) }, None),
    };
    let millis = if cfg.timings { start.elapsed().as_millis() as u64 } else { 0 };
    CheckResult { id: e.id.clone(), paper_ref: e.anchor.clone(), params, status, residual, support_observed, millis }
}

fn case_matches(e: &CatalogEntry, cfg: &RunConfig) -> bool {
    match (cfg.case, e.case) {
        (Some(want), Some(have)) => want == have,
        _ => true,
    }
}

/// Runs entries on a bounded worker pool; results are sorted by id.
pub fn run_entries(entries: &[CatalogEntry], cfg: &RunConfig) -> Vec<CheckResult> {
    let selected: Vec<&CatalogEntry> = entries.iter().filter(|e| case_matches(e, cfg)).collect();
    let threads = if cfg.threads > 0 {
        cfg.threads
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
    .min(selected.len().max(1));
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(selected.len()));
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(e) = selected.get(i) else { break };
                let r = run_check(e, cfg);
                results.lock().expect("no worker panics while holding the lock").push(r);
            });
        }
    });
    let mut out = results.into_inner().expect("workers finished");
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// Parses a suite text, resolves it and runs it.
pub fn run_suite_text(name: &str, text: &str, cfg: &RunConfig) -> Result<Report, VerifyError> {
    let suite = dsl::parse_suite(text)?;
    let entries = resolve_suite(&suite)?;
    Ok(Report {
        suite: name.into(),
        mode: cfg.mode,
        seed: if cfg.mode == Mode::Generic { cfg.seed } else { None },
        checks: run_entries(&entries, cfg),
    })
}

fn w_images(ctx: &Ctx, ch: &Chain) -> Result<(SparseMatrix, SparseMatrix, SparseMatrix), VerifyError> {
    let _ = ctx;
    let w0 = ch.eval(&psi_image(OGenerator::new(Algebra::QOnsager, "W0")?)?)?;
    let w1 = ch.eval(&psi_image(OGenerator::new(Algebra::QOnsager, "W1")?)?)?;
    let g = ch.eval(&FreeElement::qc())?;
    Ok((w0, w1, g))
}

fn kpm(p: &BoundaryParams) -> SparseMatrix {
    pauli::sp().scale(&p.kp).try_sub(&pauli::sm().scale(&p.km)).expect("2x2")
}

fn half_qdiff() -> Scalar {
    &params::qdiff(1) * &Scalar::frac(1, 2)
}

fn letter_matrix_env(ch: &Chain) -> Env<SparseMatrix> {
    let mut env = Env::new();
    for (k, v) in ch.point().iter() {
        env.bind_scalar(k.name(), Scalar::rational(v.clone()));
    }
    for l in Letter::QUANTUM.iter().chain(Letter::CLASSICAL.iter()) {
        env.bind(l.name(), ch.letter(*l).clone());
    }
    env.bind("qcent", ch.letter(Letter::T0).mul(ch.letter(Letter::T1)));
    env
}

fn point_env<R: Ring>(ctx: &Ctx, extra: &[dsl::ParamDecl]) -> Env<R> {
    let mut env = Env::new();
    for (k, v) in ctx.point.iter() {
        env.bind_scalar(k.name(), Scalar::rational(v.clone()));
    }
    env.declare(extra);
    env
}

fn generator_matrices(
    alg: Algebra,
    ch: &Chain,
    ordering: EOrdering,
) -> Result<HashMap<&'static str, SparseMatrix>, VerifyError> {
    let mut m = HashMap::new();
    for g in alg.all_generators() {
        let x = if g.name == "Pt1" { pt1_image(ordering)? } else { psi_image(g)? };
        m.insert(g.name, ch.eval(&x)?);
    }
    Ok(m)
}

fn run_job(job: &Job, n: usize, ctx: &Ctx) -> Result<Outcome, VerifyError> {
    let mut acc = Acc { point: ctx.point.clone(), ..Default::default() };
    match job {
        Job::UqRelation { suite_alg, k } => {
            let s = dsl::parse_suite(UQ_SUITE)?;
            let a = s.algebra(suite_alg).ok_or_else(|| VerifyError::UnknownCheck((*suite_alg).into()))?;
            let (lhs, rhs) = &a.relations[k - 1];
            let ch = ctx.zeta_chain(n)?;
            let env = letter_matrix_env(&ch);
            let unit = ch.identity();
            let r = env.eval_elem(lhs, &unit)?.try_sub(&env.eval_elem(rhs, &unit)?)?;
            acc.matrix(&format!("{} = {}", dsl::format(lhs), dsl::format(rhs)), &ch.specialize(&r)?);
        }
        Job::Coassociativity => {
            for l in Letter::QUANTUM {
                let t = coproduct(&FreeElement::letter(l), 2, false)?;
                let a = t.expand_slot(0);
                let b = t.expand_slot(1);
                if a != b {
                    acc.fail(l.name(), &format!("{} vs {}", a, b));
                }
            }
        }
        Job::CounitAxiom => {
            for l in Letter::QUANTUM {
                let x = FreeElement::letter(l);
                let t = coproduct(&x, 2, false)?;
                for k in 0..2 {
                    let r = t.counit_slot(k).multiply_out();
                    acc.free(&format!("{} slot {}", l.name(), k + 1), &(&r - &x));
                }
            }
        }
        Job::Antipode => {
            let ch = ctx.chain(n)?;
            let mut samples: Vec<FreeElement> = Letter::QUANTUM.iter().map(|l| FreeElement::letter(*l)).collect();
            samples.push(FreeElement::from_letters(&[Letter::E0, Letter::F1]));
            samples.push(FreeElement::from_letters(&[Letter::T0, Letter::E1, Letter::F1]));
            for x in &samples {
                let t = coproduct(x, 2, false)?;
                let e = counit(x);
                for left in [true, false] {
                    let mut m = FreeElement::zero();
                    for (slots, c) in t.terms() {
                        let a = FreeElement::word(slots[0].clone(), c.clone());
                        let b = FreeElement::word(slots[1].clone(), Scalar::one());
                        m = &m + &if left { &antipode(&a) * &b } else { &a * &antipode(&b) };
                    }
                    let r = ch.eval(&m)?.try_sub(&ch.identity().scale(&e))?;
                    acc.matrix(&format!("S on {} of D({})", if left { "left" } else { "right" }, x), &r);
                }
            }
        }
        Job::CoidealPsi { gen, variant } => {
            let r = coaction_image(*gen, *variant)?.counit_abstract(gen.algebra)?;
            acc.free("(id x E) delta - psi", &(&r - &psi_image(*gen)?));
        }
        Job::CoidealCounit { gen, variant } => {
            let r = coaction_image(*gen, *variant)?.counit_u();
            let d = r.sub(&coideal::AbsElement::gen(gen.name));
            for (w, c) in d.terms() {
                acc.scalar(&format!("(E x id) delta - {}: {}", gen.name, w.join(" ")), c);
            }
        }
        Job::CoidealCoassoc { gen, variant, slots } => {
            let r = coassoc_residual(ctx, *gen, *variant, *slots, None)?;
            acc.matrix("(D x id) delta - (id x delta) delta", &r);
            acc.note(format!("U slots on {} and {} sites, abstract slot on 1 site", slots.0, slots.1));
        }
        Job::CoidealControl => {
            let gen = OGenerator::new(Algebra::QOnsager, "W0")?;
            let r = coassoc_residual(ctx, gen, Variant::Amended, (2, 1), Some(Letter::T0))?;
            acc.matrix("perturbed coaction", &r);
        }
        Job::Relation { alg, k, variant } => {
            let p = presentation(*alg, *variant);
            let ch = ctx.chain(n)?;
            let imgs = generator_matrices(*alg, &ch, EOrdering::AsPrinted)?;
            let mut env: Env<SparseMatrix> = point_env(ctx, &[]);
            for (name, s) in &p.params {
                env.bind_scalar(name, s.substitute(&ctx.point)?);
            }
            for g in &p.generators {
                env.bind(g, imgs[g.as_str()].clone());
            }
            let rel = &p.relations[k - 1];
            let r = ch.specialize(&env.eval_elem(&rel.residual_ast(), &ch.identity())?)?;
            acc.matrix(&format!("{} = {}", dsl::format(&rel.lhs), dsl::format(&rel.rhs)), &r);
        }
        Job::RelationControl => {
            let p = presentation(Algebra::QOnsager, Variant::Amended);
            let ch = ctx.chain(n)?;
            let imgs = generator_matrices(Algebra::QOnsager, &ch, EOrdering::AsPrinted)?;
            let mut env: Env<SparseMatrix> = point_env(ctx, &[]);
            env.bind_scalar("rho", (&params::rho() * &Scalar::int(2)).substitute(&ctx.point)?);
            for g in &p.generators {
                env.bind(g, imgs[g.as_str()].clone());
            }
            let r = ch.specialize(&env.eval_elem(&p.relations[0].residual_ast(), &ch.identity())?)?;
            acc.matrix("q-Dolan-Grady with 2 rho", &r);
        }
        Job::CounitCharacter { alg, variant } => {
            let p = presentation(*alg, *variant);
            for (k, s) in p.counit_residuals()?.iter().enumerate() {
                acc.scalar(&format!("relation {}", k + 1), s);
            }
        }
        Job::BoundaryBracket => {
            let ch = ctx.chain(n)?;
            let p = ctx.boundary(&BoundaryParams::symbolic())?;
            let (w0, _, _) = w_images(ctx, &ch)?;
            let hb = crate::repmat::boundary_term(n, &p)?.matrix;
            let lhs = hb.commutator(&w0)?;
            let mut fs = vec![ctx.mat(&pauli::qs3())?; n - 1];
            fs.push(kpm(&p));
            let rhs = SparseMatrix::kron_all(&fs).scale(&ch.scalar(&half_qdiff())?);
            acc.matrix("[h_B, W0] - closed form", &lhs.try_sub(&rhs)?);
        }
        Job::LocalGamma => {
            let ch = ctx.chain(n)?;
            let (w0, _, _) = w_images(ctx, &ch)?;
            if !ctx.point.is_empty() {
                acc.note("local identity evaluated symbolically; W0 specialized");
            }
            let w0s = crate::repmat::chain_operator(&psi_image(OGenerator::new(Algebra::QOnsager, "W0")?)?, n, &Scalar::one())?;
            let _ = w0;
            for b in local_gamma_identity(n, &BoundaryParams::symbolic(), &w0s.matrix)? {
                if b == 0 {
                    acc.fail("diagonal lemmas", "lemma fails");
                } else {
                    acc.fail(&format!("bond ({}, {})", b + 1, b), "local identity fails");
                }
            }
        }
        Job::SpinReversal { control } => {
            let p = ctx.boundary(&BoundaryParams::symbolic())?;
            let h = hamiltonian(n, &p)?;
            let want = if *control { h.matrix.clone() } else { hamiltonian(n, &p.reversed())?.matrix };
            acc.matrix("nu H nu - H(reversed)", &spin_reversal_conjugate(&h).matrix.try_sub(&want)?);
        }
        Job::Symmetry { case, gen, ordering, closed, strict } => {
            let ch = ctx.chain(n)?;
            let p = ctx.boundary(&case.boundary())?;
            let h = hamiltonian(n, &p)?;
            let h = ChainOperator::new(ctx.mat(&h.matrix)?, n, "H");
            let x = if gen.name == "Pt1" { pt1_image(*ordering)? } else { psi_image(*gen)? };
            let x = Limit::for_case(*case).apply_elem(&x, &Clearing::none(), None)?;
            let xm = ch.eval(&x)?;
            let r = h.commutator(&ChainOperator::new(xm, n, gen.to_string()))?;
            let sup = support(&r);
            let bulk: Vec<usize> = sup.iter().copied().filter(|&j| j + 2 <= n).collect();
            let depth = string_depth(&r);
            let anchored = far_end_anchored(&r);
            let mut o = Outcome::default();
            o.extra.push(("string_depth".into(), json!(depth)));
            o.extra.push(("far_end_anchored".into(), json!(anchored)));
            if *strict {
                if !bulk.is_empty() {
                    acc.fail("support", &format!("acts on bulk sites {:?}", bulk));
                }
            } else if !anchored {
                acc.matrix("trace over site N of [H, X]", &crate::repmat::partial_trace_top(&r, 1));
            }
            match closed {
                Closed::None => {}
                Closed::Zero => acc.matrix("[H, X]", &r.matrix),
                Closed::FarEnd(sign) => {
                    let mut fs = vec![kpm(&p)];
                    fs.extend(vec![pauli::id(); n - 1]);
                    let c = ch.scalar(&(&half_qdiff() * &Scalar::int(i64::from(*sign))))?;
                    let want = SparseMatrix::kron_all(&fs).scale(&c);
                    acc.matrix("[H, X] - closed form", &r.matrix.try_sub(&want)?);
                }
            }
            o.support = Some(sup);
            o.acc = acc;
            return Ok(o);
        }
        Job::SymmetryControl => {
            let ch = ctx.chain(n)?;
            let p = ctx.boundary(&BoundaryParams::symbolic().reversed())?;
            let h = hamiltonian(n, &p)?;
            let h = ChainOperator::new(ctx.mat(&h.matrix)?, n, "H");
            let (w0, _, _) = w_images(ctx, &ch)?;
            let r = h.commutator(&ChainOperator::new(w0, n, "W0"))?;
            let sup = support(&r);
            for j in sup.iter().filter(|&&j| j + 2 <= n) {
                acc.fail("support", &format!("acts on site {j}"));
            }
            let mut o = Outcome::from_acc(acc);
            o.support = Some(sup);
            return Ok(o);
        }
        Job::Descendant { d, variant } => {
            let ch = ctx.chain(n)?;
            descendant_residual(&ch, *d, *variant, false, &mut acc)?;
        }
        Job::DescendantControl => {
            let ch = ctx.chain(n)?;
            descendant_residual(&ch, Descendant::G1, Variant::Amended, true, &mut acc)?;
        }
        Job::Specialization { entry, case, variant, pt_symbolic, ordering } => {
            let ch = ctx.chain(n)?;
            specialization_residual(ctx, &ch, entry, *case, *variant, *pt_symbolic, *ordering, None, &mut acc)?;
        }
        Job::SpecializationControl => {
            let ch = ctx.chain(n)?;
            let table = specialization_table(Case::Diagonal, Variant::Amended)?;
            let e = table.iter().find(|e| e.lhs == Descendant::W0).ok_or_else(|| VerifyError::UnknownCheck("W0".into()))?;
            let k1 = psi_image(OGenerator::new(Algebra::Augmented, "K1")?)?;
            specialization_residual(ctx, &ch, e, Case::Diagonal, Variant::Amended, false, EOrdering::AsPrinted, Some(k1), &mut acc)?;
        }
        Job::ClassicalRelations { auto, control } => {
            let ch = ctx.chain(n)?;
            let mut env: Env<SparseMatrix> = Env::new();
            for l in Letter::CLASSICAL {
                let mut img = auto.letter_image(l)?;
                if *control && matches!(l, Letter::H0c | Letter::H1c) {
                    img = img.scale(&Scalar::int(-1));
                }
                env.bind(l.name(), ch.eval(&img)?);
            }
            for (k, r) in classical_relations().iter().enumerate() {
                let m = ch.specialize(&env.eval_elem(&r.residual_ast(), &ch.identity())?)?;
                acc.matrix(&format!("relation {}: {} = {}", k + 1, dsl::format(&r.lhs), dsl::format(&r.rhs)), &m);
            }
        }
        Job::ClassicalInvolution { auto } => {
            for l in Letter::CLASSICAL {
                let x = FreeElement::letter(l);
                let twice = coideal::classical_automorphism(*auto, &coideal::classical_automorphism(*auto, &x)?)?;
                acc.free(&format!("{0}({0}({1})) - {1}", auto.name(), l.name()), &(&twice - &x));
            }
        }
        Job::ClassicalThetaI => {
            let ch = ctx.chain(n)?;
            let a = Automorphism::ThetaI;
            let e = ch.eval(&a.letter_image(Letter::E1c)?)?;
            let f = ch.eval(&a.letter_image(Letter::F1c)?)?;
            let h = ch.eval(&a.letter_image(Letter::H1c)?)?;
            acc.matrix("[theta_i(e1), theta_i(f1)] - theta_i(h1)", &e.commutator(&f)?.try_sub(&h)?);
        }
        Job::DslRoundtrip => {
            for (name, text) in builtin_sources() {
                let a = dsl::parse_suite(text)?;
                let b = dsl::parse_suite(&dsl::format_suite(&a))?;
                if a != b {
                    acc.fail(name, "format does not round-trip");
                }
            }
        }
        Job::DslSpans => {
            for bad in DSL_BAD_INPUTS {
                match dsl::parse_suite(bad) {
                    Ok(_) => acc.fail(bad, "accepted"),
                    Err(e) => {
                        if e.span.start > e.span.end || e.span.end > bad.len() {
                            acc.fail(bad, "span outside input");
                        }
                        if e.expected.is_empty() {
                            acc.fail(bad, "no expected-token set");
                        }
                    }
                }
            }
        }
        Job::DslControl => {
            if dsl::parse_suite("algebra a {\n  generators W0 W1\n  relation qc(W0 W1) = 0\n}\n").is_err() {
                acc.fail("qc(W0 W1)", "rejected");
            }
        }
        Job::Identity { lhs, rhs, params } => {
            let ch = ctx.chain(n)?;
            let mut env = letter_matrix_env(&ch);
            env.declare(params);
            let unit = ch.identity();
            let r = env.eval_elem(lhs, &unit)?.try_sub(&env.eval_elem(rhs, &unit)?)?;
            acc.matrix(&format!("{} = {}", dsl::format(lhs), dsl::format(rhs)), &ch.specialize(&r)?);
        }
        Job::SuiteRelation { alg, lhs, rhs, params } => {
            let ch = ctx.chain(n)?;
            let imgs = generator_matrices(*alg, &ch, EOrdering::AsPrinted)?;
            let mut env: Env<SparseMatrix> = point_env(ctx, params);
            for g in alg.generators() {
                env.bind(g, imgs[g].clone());
            }
            let unit = ch.identity();
            let r = env.eval_elem(lhs, &unit)?.try_sub(&env.eval_elem(rhs, &unit)?)?;
            acc.matrix(&format!("{} = {}", dsl::format(lhs), dsl::format(rhs)), &ch.specialize(&r)?);
        }
    }
    Ok(Outcome::from_acc(acc))
}

/// Inputs every parser must reject with an in-bounds span.
pub const DSL_BAD_INPUTS: [&str; 8] = [
    "algebra a {\n  generators W0 W1\n  relation qc(W0 W1) = 0\n}\n",
    "algebra a { generators W0 relation W0 = }",
    "param",
    "check x { a = 1 +",
    "algebra a { generators X relation Y = 0 }",
    "check x { a = qc(1, 2) }",
    "check x { a = 2 ^ }",
    "check x { a = (1 }",
];

fn coassoc_residual(
    ctx: &Ctx,
    gen: OGenerator,
    variant: Variant,
    slots: (usize, usize),
    perturb: Option<Letter>,
) -> Result<SparseMatrix, VerifyError> {
    let alg = gen.algebra;
    let (a, b) = slots;
    let cha = ctx.chain(a)?;
    let chb = ctx.chain(b)?;
    let chab = ctx.chain(a + b)?;
    let ch1 = ctx.chain(1)?;
    let coaction = |g: OGenerator| -> Result<Vec<(FreeElement, coideal::AbsElement)>, VerifyError> {
        let mut pairs = coaction_image(g, variant)?.pairs();
        if let Some(l) = perturb {
            for (u, _) in pairs.iter_mut() {
                *u = u.map_letters(|x| FreeElement::letter(if x == Letter::T1 { l } else { x }));
            }
        }
        Ok(pairs)
    };
    let mut psi1: HashMap<&str, SparseMatrix> = HashMap::new();
    let mut delta: HashMap<&str, SparseMatrix> = HashMap::new();
    for g in alg.all_generators() {
        psi1.insert(g.name, ch1.eval(&psi_image(g)?)?);
    }
    for g in alg.all_generators() {
        let mut m = SparseMatrix::zero(1 << (b + 1));
        for (u, x) in coaction(g)? {
            let am = x.eval(&ch1.identity(), &|s: &str| -> Result<SparseMatrix, VerifyError> {
                psi1.get(s).cloned().ok_or_else(|| VerifyError::UnknownCheck(s.into()))
            })?;
            m = m.try_add(&chb.eval(&u)?.kron(&am))?;
        }
        delta.insert(g.name, m);
    }
    let mut lhs = SparseMatrix::zero(1 << (a + b + 1));
    let mut rhs = SparseMatrix::zero(1 << (a + b + 1));
    for (u, x) in coaction(gen)? {
        let am = x.eval(&ch1.identity(), &|s: &str| -> Result<SparseMatrix, VerifyError> {
            psi1.get(s).cloned().ok_or_else(|| VerifyError::UnknownCheck(s.into()))
        })?;
        lhs = lhs.try_add(&chab.eval(&u)?.kron(&am))?;
        let dm = x.eval(&SparseMatrix::identity(1 << (b + 1)), &|s: &str| -> Result<SparseMatrix, VerifyError> {
            delta.get(s).cloned().ok_or_else(|| VerifyError::UnknownCheck(s.into()))
        })?;
        rhs = rhs.try_add(&cha.eval(&u)?.kron(&dm))?;
    }
    Ok(lhs.try_sub(&rhs)?)
}

fn descendant_residual(ch: &Chain, d: Descendant, variant: Variant, control: bool, acc: &mut Acc) -> Result<(), VerifyError> {
    let w = |n: &str| -> Result<SparseMatrix, VerifyError> { Ok(ch.eval(&psi_image(OGenerator::new(Algebra::QOnsager, n)?)?)?) };
    let (p, cl) = eval_polynomial(d, variant, &w("W0")?, &w("W1")?, &ch.eval(&FreeElement::qc())?)?;
    let p = ch.specialize(&p)?;
    let mut chev = coideal::descendant(d, Form::Chevalley, variant)?.element;
    if control {
        chev = chev.map_scalars(|s| Ok(s.swap_vars(&[(Var::Ep, Var::Em)])))?;
    }
    let c = ch.eval(&chev)?;
    if d.leading_only() {
        let divide = if d == Descendant::G2 { Var::Km } else { Var::Kp };
        let lim = Limit { vars: vec![Var::Kp, Var::Km], values: Assignment::new() };
        let lp = limit_matrix(&lim, &p, &cl, Some(divide));
        let lc = limit_matrix(&lim, &c, &Clearing::none(), Some(divide));
        match (lp, lc) {
            (Ok(a), Ok(b)) => acc.matrix("leading order: polynomial - expansion", &a.try_sub(&b)?),
            (Err(e), _) => acc.fail("polynomial form", &e.to_string()),
            (_, Err(e)) => acc.fail("expansion", &e.to_string()),
        }
    } else {
        let s = ch.scalar(&cl.scalar())?;
        acc.matrix("clearing * expansion - polynomial", &c.scale(&s).try_sub(&p)?);
    }
    Ok(())
}

fn limit_matrix(lim: &Limit, m: &SparseMatrix, cl: &Clearing, divide: Option<Var>) -> Result<SparseMatrix, CoidealError> {
    let mut err = None;
    let r = m.map_scalars(|s| match lim.apply(s, cl, divide) {
        Ok(v) => Ok(v),
        Err(CoidealError::NotDivisible { var, order }) => Err(CoeffError::NotDivisible(var, order)),
        Err(CoidealError::Coeff(e)) => Err(e),
        Err(_) => Err(CoeffError::DivisionByZero),
    });
    if let Err(e) = &r {
        err = Some(CoidealError::from(e.clone()));
    }
    match err {
        Some(e) => Err(e),
        None => Ok(r.expect("checked")),
    }
}

#[allow(clippy::too_many_arguments)]
fn specialization_residual(
    ctx: &Ctx,
    ch: &Chain,
    entry: &SpecEntry,
    case: Case,
    variant: Variant,
    pt_symbolic: bool,
    ordering: EOrdering,
    target_override: Option<FreeElement>,
    acc: &mut Acc,
) -> Result<(), VerifyError> {
    let _ = ctx;
    let (w0, w1, g) = w_images(ctx, ch)?;
    let (lhs, cl) = eval_polynomial(entry.lhs, variant, &w0, &w1, &g)?;
    let lhs = ch.specialize(&lhs)?;
    let mut lim = Limit::for_case(case);
    if !pt_symbolic {
        lim = lim.with_value(Var::Pt, Rational::from_integer(0.into()));
    }
    let target = match target_override {
        Some(t) => t,
        None => {
            let mut env = image_env(entry.algebra())?;
            if entry.algebra() == Algebra::Triangular {
                env.bind("Pt1", pt1_image(ordering)?);
            }
            env.eval_elem(&entry.target, &FreeElement::one())?
        }
    };
    let tm = ch.eval(&lim.apply_elem(&target, &Clearing::none(), None)?)?;
    match limit_matrix(&lim, &lhs, &cl, entry.divide) {
        Ok(l) => acc.matrix("reduced descendant - target", &l.try_sub(&tm)?),
        Err(e) => acc.fail("reduction", &e.to_string()),
    }
    Ok(())
}

/// Labels accepted by [`emit_operator`].
pub fn emit_labels() -> Vec<String> {
    let mut v = vec!["hamiltonian".to_string(), "boundary".to_string()];
    for alg in Algebra::ALL {
        for g in alg.generators() {
            v.push(format!("psi.{alg}.{g}"));
        }
    }
    for d in Descendant::ALL {
        v.push(format!("desc.{}", d.name()));
    }
    for l in Letter::QUANTUM {
        v.push(format!("letter.{}", l.name()));
    }
    v
}

/// Chain operator for a label: `psi.<gen>`, `psi.<algebra>.<gen>`,
/// `desc.<name>`, `letter.<l>`, `hamiltonian`, `boundary`, or `expr:<text>`.
pub fn emit_operator(label: &str, n: usize) -> Result<ChainOperator, VerifyError> {
    let ch = Chain::new(n)?;
    if let Some(text) = label.strip_prefix("expr:") {
        let ast = dsl::parse_expr(text)?;
        let x = u_env().eval_elem(&ast, &FreeElement::one())?;
        return Ok(ch.operator(&x, label)?);
    }
    if label == "hamiltonian" {
        return Ok(hamiltonian(n, &BoundaryParams::symbolic())?);
    }
    if label == "boundary" {
        return Ok(crate::repmat::boundary_term(n, &BoundaryParams::symbolic())?);
    }
    if let Some(l) = label.strip_prefix("letter.") {
        let l = Letter::from_name(l).ok_or_else(|| VerifyError::UnknownCheck(label.into()))?;
        return Ok(ChainOperator::new(ch.letter(l).clone(), n, label));
    }
    if let Some(d) = label.strip_prefix("desc.") {
        let d = Descendant::from_name(d)?;
        let x = coideal::descendant(d, Form::Chevalley, Variant::Amended)?.element;
        return Ok(ch.operator(&x, label)?);
    }
    if let Some(rest) = label.strip_prefix("psi.") {
        let gen = match rest.split_once('.') {
            Some((a, g)) => OGenerator::new(Algebra::from_name(a).ok_or_else(|| VerifyError::UnknownCheck(label.into()))?, g)?,
            None => Algebra::ALL
                .iter()
                .find_map(|a| OGenerator::new(*a, rest).ok())
                .ok_or_else(|| VerifyError::UnknownCheck(label.into()))?,
        };
        return Ok(ch.operator(&psi_image(gen)?, label)?);
    }
    Err(VerifyError::UnknownCheck(label.into()))
}

/// Abstract-slot environment, re-exported for suite tooling.
pub fn algebra_env(alg: Algebra) -> Env<coideal::AbsElement> {
    abstract_env(alg)
}

/// Counit of a generator, re-exported for suite tooling.
pub fn generator_counit(g: OGenerator) -> Result<Scalar, VerifyError> {
    Ok(counit_value(g)?)
}

#[allow(dead_code)]
fn tensor_text(t: &TensorElement) -> String {
    t.to_text()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig { timings: false, ..Default::default() }
    }

    fn entry(id: &str) -> CatalogEntry {
        catalog().into_iter().find(|e| e.id == id).unwrap_or_else(|| panic!("{id}"))
    }

    #[test]
    fn catalog_ids_unique_and_sorted() {
        let c = catalog();
        let ids: Vec<&str> = c.iter().map(|e| e.id.as_str()).collect();
        let mut s = ids.clone();
        s.sort();
        s.dedup();
        assert_eq!(ids, s);
        for family in ["hopf", "coideal", "rel", "chain", "sym", "desc", "spec", "classical", "dsl"] {
            assert!(c.iter().any(|e| e.id.starts_with(family) && e.tier == Tier::Control), "{family}");
        }
    }

    #[test]
    fn serre_passes_and_control_fails() {
        assert_eq!(run_check(&entry("hopf.uq.18"), &cfg()).status, Status::Pass);
        assert_eq!(run_check(&entry("hopf.uq.control"), &cfg()).status, Status::Fail);
    }

    #[test]
    fn generic_mode_is_deterministic() {
        let c = RunConfig { mode: Mode::Generic, seed: Some(7), ..cfg() };
        let e = entry("rel.qOnsager.01");
        let a = run_check(&e, &c);
        assert_eq!(a.status, Status::Pass);
        assert_eq!(a, run_check(&e, &c));
    }

    #[test]
    fn generic_symmetry_closed_forms() {
        let r = run_check(&entry("sym.generic.W0"), &cfg());
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.support_observed, Some(vec![3]));
        assert_eq!(run_check(&entry("sym.generic.W1"), &cfg()).status, Status::Pass);
        assert_eq!(run_check(&entry("sym.generic.W1.plus-sign"), &cfg()).status, Status::Fail);
    }

    #[test]
    fn report_text_and_exit_code() {
        let r = Report { suite: "s".into(), mode: Mode::Symbolic, seed: None, checks: vec![] };
        assert_eq!(r.to_text(), "suite s mode symbolic seed -\n");
        assert_eq!(r.exit_code(), 0);
        let c = run_check(&entry("rel.control"), &cfg());
        let r = Report { checks: vec![c], ..r };
        assert_eq!(r.exit_code(), 1);
        assert!(r.to_text().contains("FAIL"));
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn feasibility_bound() {
        let c = RunConfig { sites: Some(7), ..cfg() };
        let r = run_check(&entry("rel.qOnsager.01"), &c);
        assert_eq!(r.status, Status::Error);
    }

    #[test]
    fn suite_defined_checks() {
        let text = "param kp = 0\ncheck my.id { kind = identity  lhs = t0 * t0'  rhs = 1 }\n\
                    check my.rel { kind = relation  algebra = triangular  lhs = qc(T1, T0, -1)  rhs = rhot_t * Gamma }\n";
        let r = run_suite_text("t", text, &cfg()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn emit_round_trips() {
        let op = emit_operator("psi.W0", 2).unwrap();
        let back = ChainOperator::from_json(&op.to_json()).unwrap();
        assert_eq!(back.matrix, op.matrix);
        assert!(emit_operator("psi.nothing", 2).is_err());
    }
}
