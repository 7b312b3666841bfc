//! Evaluation representation, chain operators, the open XXZ Hamiltonian and
//! operator-support analysis, all over exact [`Scalar`] entries.
//!
//! Chain convention: site `j` is bit `j-1` of a basis index, so site 1 is the
//! least significant bit. In a Kronecker product the leftmost factor is the
//! most significant, hence tensor slot 1 is site `N` and slot `N` is site 1.
//! Local basis index 0 is spin up (`σ3 = +1`).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{params, Assignment, CoeffError, Scalar, Var};
use crate::qalgebra::{coproduct, classical_coproduct, Alphabet, FreeElement, Letter};
use crate::ring::Ring;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("evaluation parameter must be nonzero")]
    InvalidEvaluationPoint,
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("ep + em vanishes identically")]
    BoundarySingular,
    #[error("a chain needs at least {0} sites")]
    TooFewSites(usize),
    #[error("cannot parse matrix: {0}")]
    Parse(String),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Algebra(#[from] crate::qalgebra::AlgebraError),
}

/// Sparse square matrix, row-major, no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<BTreeMap<usize, Scalar>>,
}

impl SparseMatrix {
    pub fn zero(dim: usize) -> Self {
        SparseMatrix { dim, rows: vec![BTreeMap::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.rows[i].insert(i, Scalar::one());
        }
        m
    }

    pub fn diagonal(d: Vec<Scalar>) -> Self {
        let mut m = Self::zero(d.len());
        for (i, x) in d.into_iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// 2×2 matrix from row-major entries.
    pub fn two(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Self {
        let mut m = Self::zero(2);
        m.set(0, 0, a);
        m.set(0, 1, b);
        m.set(1, 0, c);
        m.set(1, 1, d);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.rows[r].get(&c).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, x: Scalar) {
        assert!(r < self.dim && c < self.dim, "index out of range");
        if x.is_zero() {
            self.rows[r].remove(&c);
        } else {
            self.rows[r].insert(c, x);
        }
    }

    fn add_at(&mut self, r: usize, c: usize, x: &Scalar) {
        if x.is_zero() {
            return;
        }
        let row = &mut self.rows[r];
        match row.get_mut(&c) {
            Some(v) => {
                *v = &*v + x;
                if v.is_zero() {
                    row.remove(&c);
                }
            }
            None => {
                row.insert(c, x.clone());
            }
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn first_nonzero(&self) -> Option<(usize, usize, &Scalar)> {
        self.entries().next()
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(r, c, _)| r == c)
    }

    fn check_dim(&self, o: &SparseMatrix) -> Result<(), RepError> {
        if self.dim != o.dim {
            Err(RepError::DimMismatch(self.dim, o.dim))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, o: &SparseMatrix) -> Result<SparseMatrix, RepError> {
        self.check_dim(o)?;
        let mut m = self.clone();
        for (r, c, v) in o.entries() {
            m.add_at(r, c, v);
        }
        Ok(m)
    }

    pub fn try_sub(&self, o: &SparseMatrix) -> Result<SparseMatrix, RepError> {
        self.check_dim(o)?;
        let mut m = self.clone();
        for (r, c, v) in o.entries() {
            m.add_at(r, c, &-v);
        }
        Ok(m)
    }

    pub fn try_mul(&self, o: &SparseMatrix) -> Result<SparseMatrix, RepError> {
        self.check_dim(o)?;
        let mut m = SparseMatrix::zero(self.dim);
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, a) in row {
                for (c, b) in &o.rows[*k] {
                    let p = a * b;
                    match acc.get_mut(c) {
                        Some(v) => *v = &*v + &p,
                        None => {
                            acc.insert(*c, p);
                        }
                    }
                }
            }
            acc.retain(|_, v| !v.is_zero());
            m.rows[r] = acc;
        }
        Ok(m)
    }

    pub fn scale(&self, s: &Scalar) -> SparseMatrix {
        if s.is_zero() {
            return SparseMatrix::zero(self.dim);
        }
        let mut m = self.clone();
        for row in m.rows.iter_mut() {
            for v in row.values_mut() {
                *v = &*v * s;
            }
        }
        m
    }

    /// `self ⊗ o` with `self` on the most significant index bits.
    pub fn kron(&self, o: &SparseMatrix) -> SparseMatrix {
        let d = self.dim * o.dim;
        let mut m = SparseMatrix::zero(d);
        for (r1, c1, a) in self.entries() {
            for (r2, c2, b) in o.entries() {
                m.set(r1 * o.dim + r2, c1 * o.dim + c2, a * b);
            }
        }
        m
    }

    pub fn kron_all(ms: &[SparseMatrix]) -> SparseMatrix {
        ms.iter().fold(SparseMatrix::identity(1), |a, b| a.kron(b))
    }

    pub fn commutator(&self, o: &SparseMatrix) -> Result<SparseMatrix, RepError> {
        self.try_mul(o)?.try_sub(&o.try_mul(self)?)
    }

    pub fn map_scalars<F: Fn(&Scalar) -> Result<Scalar, CoeffError>>(&self, f: F) -> Result<SparseMatrix, CoeffError> {
        let mut m = SparseMatrix::zero(self.dim);
        for (r, c, v) in self.entries() {
            m.set(r, c, f(v)?);
        }
        Ok(m)
    }

    pub fn substitute(&self, a: &Assignment) -> Result<SparseMatrix, CoeffError> {
        if a.is_empty() {
            return Ok(self.clone());
        }
        self.map_scalars(|x| x.substitute(a))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut m = SparseMatrix::zero(self.dim);
        for (r, c, v) in self.entries() {
            m.set(c, r, v.clone());
        }
        m
    }

    pub fn to_coordinate_text(&self) -> String {
        let mut s = format!("dim {}\n", self.dim);
        for (r, c, v) in self.entries() {
            s.push_str(&format!("{} {} {}\n", r, c, v.to_canonical()));
        }
        s
    }

    pub fn from_coordinate_text(text: &str) -> Result<SparseMatrix, RepError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines.next().ok_or_else(|| RepError::Parse("empty input".into()))?;
        let dim: usize = head
            .strip_prefix("dim ")
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| RepError::Parse(format!("bad header `{head}`")))?;
        let mut m = SparseMatrix::zero(dim);
        for line in lines {
            let mut it = line.splitn(3, ' ');
            let bad = || RepError::Parse(format!("bad entry `{line}`"));
            let r: usize = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            let c: usize = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
            let v = Scalar::parse(it.next().ok_or_else(bad)?)?;
            if r >= dim || c >= dim {
                return Err(bad());
            }
            m.set(r, c, v);
        }
        Ok(m)
    }
}

impl Ring for SparseMatrix {
    fn one_like(&self) -> Self {
        SparseMatrix::identity(self.dim)
    }
    fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("dimension mismatch")
    }
    fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("dimension mismatch")
    }
    fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("dimension mismatch")
    }
    fn scale(&self, s: &Scalar) -> Self {
        SparseMatrix::scale(self, s)
    }
    fn is_zero(&self) -> bool {
        SparseMatrix::is_zero(self)
    }
    fn try_inverse(&self) -> Option<Self> {
        if !self.is_diagonal() {
            return None;
        }
        let mut m = SparseMatrix::zero(self.dim);
        for i in 0..self.dim {
            m.set(i, i, self.get(i, i).recip().ok()?);
        }
        Some(m)
    }
}

/// Pauli-type 2×2 building blocks.
pub mod pauli {
    use super::*;

    pub fn id() -> SparseMatrix {
        SparseMatrix::identity(2)
    }
    pub fn sp() -> SparseMatrix {
        SparseMatrix::two(Scalar::zero(), Scalar::one(), Scalar::zero(), Scalar::zero())
    }
    pub fn sm() -> SparseMatrix {
        SparseMatrix::two(Scalar::zero(), Scalar::zero(), Scalar::one(), Scalar::zero())
    }
    pub fn s3() -> SparseMatrix {
        SparseMatrix::diagonal(vec![Scalar::one(), Scalar::int(-1)])
    }
    pub fn sx() -> SparseMatrix {
        SparseMatrix::two(Scalar::zero(), Scalar::one(), Scalar::one(), Scalar::zero())
    }
    /// `q^{σ3}`
    pub fn qs3() -> SparseMatrix {
        SparseMatrix::diagonal(vec![Scalar::qpow(1), Scalar::qpow(-1)])
    }
    /// `q^{-σ3}`
    pub fn qs3inv() -> SparseMatrix {
        SparseMatrix::diagonal(vec![Scalar::qpow(-1), Scalar::qpow(1)])
    }
}

/// `π_ζ` on a single letter.
pub fn eval_letter(l: Letter, zeta: &Scalar) -> Result<SparseMatrix, RepError> {
    use pauli::*;
    let zi = zeta.recip().map_err(|_| RepError::InvalidEvaluationPoint)?;
    Ok(match l {
        Letter::E1 | Letter::E1c => sp().scale(zeta),
        Letter::E0 | Letter::E0c => sm().scale(zeta),
        Letter::F1 | Letter::F1c => sm().scale(&zi),
        Letter::F0 | Letter::F0c => sp().scale(&zi),
        Letter::T1 | Letter::T0inv => qs3(),
        Letter::T0 | Letter::T1inv => qs3inv(),
        Letter::H1c => s3(),
        Letter::H0c => s3().scale(&Scalar::int(-1)),
    })
}

/// `π_ζ(x)` as a 2×2 matrix.
pub fn eval_rep(x: &FreeElement, zeta: &Scalar) -> Result<SparseMatrix, RepError> {
    if zeta.is_zero() {
        return Err(RepError::InvalidEvaluationPoint);
    }
    let mut m = SparseMatrix::zero(2);
    for (w, c) in x.terms() {
        let mut acc = SparseMatrix::identity(2).scale(c);
        for &l in w.letters() {
            acc = acc.try_mul(&eval_letter(l, zeta)?)?;
        }
        m = m.try_add(&acc)?;
    }
    Ok(m)
}

/// Operator `a` on site `j` of an `n`-site chain.
pub fn site_op(a: &SparseMatrix, j: usize, n: usize) -> SparseMatrix {
    assert!(j >= 1 && j <= n);
    let mut fs = vec![pauli::id(); n];
    fs[n - j] = a.clone();
    SparseMatrix::kron_all(&fs)
}

/// `a` on site `i+1` and `b` on site `i`.
pub fn bond_op(a: &SparseMatrix, b: &SparseMatrix, i: usize, n: usize) -> SparseMatrix {
    assert!(i >= 1 && i < n);
    let mut fs = vec![pauli::id(); n];
    fs[n - i - 1] = a.clone();
    fs[n - i] = b.clone();
    SparseMatrix::kron_all(&fs)
}

/// Image of an element on a chain, with its construction label.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOperator {
    pub matrix: SparseMatrix,
    pub sites: usize,
    pub provenance: String,
}

impl ChainOperator {
    pub fn new(matrix: SparseMatrix, sites: usize, provenance: impl Into<String>) -> Self {
        assert_eq!(matrix.dim(), 1 << sites);
        ChainOperator { matrix, sites, provenance: provenance.into() }
    }

    pub fn commutator(&self, o: &ChainOperator) -> Result<ChainOperator, RepError> {
        let m = self.matrix.commutator(&o.matrix)?;
        Ok(ChainOperator::new(m, self.sites, format!("[{}, {}]", self.provenance, o.provenance)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<MatrixEntry> = self
            .matrix
            .entries()
            .map(|(r, c, v)| MatrixEntry { row: r, col: c, value: v.to_canonical() })
            .collect();
        serde_json::to_value(MatrixFile { label: self.provenance.clone(), sites: self.sites, dim: self.matrix.dim(), entries })
            .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<ChainOperator, RepError> {
        let f: MatrixFile = serde_json::from_value(v.clone()).map_err(|e| RepError::Parse(e.to_string()))?;
        if f.dim != 1 << f.sites {
            return Err(RepError::Parse(format!("dim {} does not match {} sites", f.dim, f.sites)));
        }
        let mut m = SparseMatrix::zero(f.dim);
        for e in f.entries {
            if e.row >= f.dim || e.col >= f.dim {
                return Err(RepError::Parse(format!("entry ({}, {}) out of range", e.row, e.col)));
            }
            m.set(e.row, e.col, Scalar::parse(&e.value)?);
        }
        Ok(ChainOperator::new(m, f.sites, f.label))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixEntry {
    row: usize,
    col: usize,
    value: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    label: String,
    sites: usize,
    dim: usize,
    entries: Vec<MatrixEntry>,
}

/// Chain of `n` sites with cached letter images; optionally specialized at a point.
#[derive(Debug, Clone)]
pub struct Chain {
    n: usize,
    point: Assignment,
    letters: HashMap<Letter, SparseMatrix>,
}

impl Chain {
    /// Symbolic chain with evaluation parameter `ζ = 1`.
    pub fn new(n: usize) -> Result<Chain, RepError> {
        Self::build(n, Scalar::one(), Assignment::new())
    }

    /// Symbolic chain with a formal evaluation parameter.
    pub fn with_zeta(n: usize) -> Result<Chain, RepError> {
        Self::build(n, Scalar::var(Var::Zeta), Assignment::new())
    }

    pub fn build(n: usize, zeta: Scalar, point: Assignment) -> Result<Chain, RepError> {
        if n == 0 {
            return Err(RepError::TooFewSites(1));
        }
        let zeta = zeta.substitute(&point)?;
        let mut letters = HashMap::new();
        for l in Letter::QUANTUM.iter().chain(Letter::CLASSICAL.iter()) {
            let m = letter_chain(*l, n, &zeta)?.substitute(&point)?;
            letters.insert(*l, m);
        }
        Ok(Chain { n, point, letters })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn point(&self) -> &Assignment {
        &self.point
    }

    pub fn identity(&self) -> SparseMatrix {
        SparseMatrix::identity(self.dim())
    }

    pub fn letter(&self, l: Letter) -> &SparseMatrix {
        &self.letters[&l]
    }

    /// Applies the chain's evaluation point to a scalar.
    pub fn scalar(&self, s: &Scalar) -> Result<Scalar, CoeffError> {
        s.substitute(&self.point)
    }

    /// Applies the chain's evaluation point to a symbolic matrix.
    pub fn specialize(&self, m: &SparseMatrix) -> Result<SparseMatrix, CoeffError> {
        m.substitute(&self.point)
    }

    pub fn eval(&self, x: &FreeElement) -> Result<SparseMatrix, RepError> {
        let mut out = SparseMatrix::zero(self.dim());
        let mut cache: HashMap<&[Letter], SparseMatrix> = HashMap::new();
        for (w, c) in x.terms() {
            let ls = w.letters();
            let c = self.scalar(c)?;
            if c.is_zero() {
                continue;
            }
            let m = word_matrix(self, ls, &mut cache)?;
            out = out.try_add(&m.scale(&c))?;
        }
        Ok(out)
    }

    pub fn operator(&self, x: &FreeElement, label: &str) -> Result<ChainOperator, RepError> {
        Ok(ChainOperator::new(self.eval(x)?, self.n, label))
    }
}

fn word_matrix<'a>(
    ch: &Chain,
    ls: &'a [Letter],
    cache: &mut HashMap<&'a [Letter], SparseMatrix>,
) -> Result<SparseMatrix, RepError> {
    if ls.is_empty() {
        return Ok(ch.identity());
    }
    if let Some(m) = cache.get(ls) {
        return Ok(m.clone());
    }
    let head = word_matrix(ch, &ls[..ls.len() - 1], cache)?;
    let m = head.try_mul(ch.letter(ls[ls.len() - 1]))?;
    cache.insert(ls, m.clone());
    Ok(m)
}

/// Closed form of the iterated coproduct of one letter on `n` sites.
fn letter_chain(l: Letter, n: usize, zeta: &Scalar) -> Result<SparseMatrix, RepError> {
    let loc = eval_letter(l, zeta)?;
    if l.is_grouplike() {
        return Ok(SparseMatrix::kron_all(&vec![loc; n]));
    }
    let id = pauli::id();
    let mut m = SparseMatrix::zero(1 << n);
    for s in 0..n {
        let fs: Vec<SparseMatrix> = (0..n)
            .map(|u| {
                if u == s {
                    return Ok(loc.clone());
                }
                Ok(match l {
                    Letter::E0 | Letter::E1 if u < s => eval_letter(if l.node() == 0 { Letter::T0 } else { Letter::T1 }, zeta)?,
                    Letter::F0 | Letter::F1 if u > s => {
                        eval_letter(if l.node() == 0 { Letter::T0inv } else { Letter::T1inv }, zeta)?
                    }
                    _ => id.clone(),
                })
            })
            .collect::<Result<_, RepError>>()?;
        m = m.try_add(&SparseMatrix::kron_all(&fs))?;
    }
    Ok(m)
}

/// `π_ζ^{⊗n} ∘ Δ^{(n-1)}(x)` with default `ζ = 1`.
pub fn chain_operator(x: &FreeElement, n: usize, zeta: &Scalar) -> Result<ChainOperator, RepError> {
    let ch = Chain::build(n, zeta.clone(), Assignment::new())?;
    ch.operator(x, &x.to_text())
}

/// Same as [`chain_operator`] but built literally: expand the coproduct at the
/// free level, evaluate every slot, and assemble Kronecker products.
pub fn chain_operator_literal(x: &FreeElement, n: usize, zeta: &Scalar) -> Result<ChainOperator, RepError> {
    if n == 1 {
        return Ok(ChainOperator::new(eval_rep(x, zeta)?, 1, x.to_text()));
    }
    let t = match x.alphabet() {
        Some(Alphabet::Classical) => classical_coproduct(x, n)?,
        _ => coproduct(x, n, false)?,
    };
    let mut m = SparseMatrix::zero(1 << n);
    for (slots, c) in t.terms() {
        let fs: Vec<SparseMatrix> =
            slots.iter().map(|w| eval_rep(&FreeElement::word(w.clone(), Scalar::one()), zeta)).collect::<Result<_, _>>()?;
        m = m.try_add(&SparseMatrix::kron_all(&fs).scale(c))?;
    }
    Ok(ChainOperator::new(m, n, x.to_text()))
}

/// Boundary couplings of the Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryParams {
    pub kp: Scalar,
    pub km: Scalar,
    pub ep: Scalar,
    pub em: Scalar,
}

impl BoundaryParams {
    pub fn symbolic() -> Self {
        BoundaryParams { kp: params::kp(), km: params::km(), ep: params::ep(), em: params::em() }
    }

    /// Exchanges the roles of `+` and `-`.
    pub fn reversed(&self) -> Self {
        BoundaryParams { kp: self.km.clone(), km: self.kp.clone(), ep: self.em.clone(), em: self.ep.clone() }
    }

    pub fn substitute(&self, a: &Assignment) -> Result<Self, CoeffError> {
        Ok(BoundaryParams {
            kp: self.kp.substitute(a)?,
            km: self.km.substitute(a)?,
            ep: self.ep.substitute(a)?,
            em: self.em.substitute(a)?,
        })
    }
}

impl fmt::Display for BoundaryParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kp={}, km={}, ep={}, em={}", self.kp, self.km, self.ep, self.em)
    }
}

/// `h_B` as a 2×2 matrix.
pub fn boundary_density(p: &BoundaryParams) -> Result<SparseMatrix, RepError> {
    let s = &p.ep + &p.em;
    if s.is_zero() {
        return Err(RepError::BoundarySingular);
    }
    let inv = s.recip()?;
    let c3 = &(&(&params::qdiff(1) * &Scalar::frac(-1, 4)) * &(&p.ep - &p.em)) * &inv;
    let diag = pauli::s3().scale(&c3);
    let off = pauli::sp().scale(&p.kp).try_add(&pauli::sm().scale(&p.km))?.scale(&-&inv);
    diag.try_add(&off)
}

/// Bulk density `2(σ+σ- + σ-σ+) + Δ σ3σ3` on sites `(i+1, i)`, without the `-1/2`.
pub fn bulk_density(i: usize, n: usize) -> SparseMatrix {
    use pauli::*;
    let hop = bond_op(&sp(), &sm(), i, n).try_add(&bond_op(&sm(), &sp(), i, n)).unwrap();
    hop.scale(&Scalar::int(2)).try_add(&bond_op(&s3(), &s3(), i, n).scale(&params::delta_aniso())).unwrap()
}

/// `h_B` acting on site 1 of an `n`-site chain.
pub fn boundary_term(n: usize, p: &BoundaryParams) -> Result<ChainOperator, RepError> {
    Ok(ChainOperator::new(site_op(&boundary_density(p)?, 1, n), n, "h_B"))
}

/// `H_N = -1/2 Σ h_i + h_B`.
pub fn hamiltonian(n: usize, p: &BoundaryParams) -> Result<ChainOperator, RepError> {
    if n < 2 {
        return Err(RepError::TooFewSites(2));
    }
    let mut h = boundary_term(n, p)?.matrix;
    let half = Scalar::frac(-1, 2);
    for i in 1..n {
        h = h.try_add(&bulk_density(i, n).scale(&half))?;
    }
    Ok(ChainOperator::new(h, n, format!("H_{n}")))
}

/// Conjugation by `σx` on every site.
pub fn spin_reversal_conjugate(a: &ChainOperator) -> ChainOperator {
    let mask = a.matrix.dim() - 1;
    let mut m = SparseMatrix::zero(a.matrix.dim());
    for (r, c, v) in a.matrix.entries() {
        m.set(r ^ mask, c ^ mask, v.clone());
    }
    ChainOperator::new(m, a.sites, format!("nu {} nu", a.provenance))
}

/// Sites on which `a` acts nontrivially: site `j` is absent iff `a` equals its
/// normalized partial trace over `j` tensored back with the identity.
pub fn support(a: &ChainOperator) -> BTreeSet<usize> {
    (1..=a.sites).filter(|&j| !trivial_on(&a.matrix, j)).collect()
}

fn trivial_on(m: &SparseMatrix, j: usize) -> bool {
    let b = 1usize << (j - 1);
    m.entries().all(|(r, c, v)| (r ^ c) & b == 0 && m.get(r ^ b, c ^ b) == *v)
}

/// Partial trace over the `k` highest sites.
pub fn partial_trace_top(a: &ChainOperator, k: usize) -> SparseMatrix {
    let low = a.sites - k;
    let d = 1usize << low;
    let mut m = SparseMatrix::zero(d);
    for (r, c, v) in a.matrix.entries() {
        if r >> low == c >> low {
            m.add_at(r & (d - 1), c & (d - 1), v);
        }
    }
    m
}

/// True when the partial trace over the far end (site `N`) vanishes.
pub fn far_end_anchored(a: &ChainOperator) -> bool {
    partial_trace_top(a, 1).is_zero()
}

/// Smallest `k` such that `a = Σ L_t ⊗ D_t` with `L_t` on the top `k` sites and
/// every `D_t` diagonal and a function of the Hamming weight of the low sites.
pub fn string_depth(a: &ChainOperator) -> usize {
    'depth: for k in 0..=a.sites {
        let low = a.sites - k;
        let mask = (1usize << low) - 1;
        let mut seen: HashMap<(usize, usize, u32), &Scalar> = HashMap::new();
        for (r, c, v) in a.matrix.entries() {
            if r & mask != c & mask {
                continue 'depth;
            }
            let key = (r >> low, c >> low, (r & mask).count_ones());
            match seen.get(&key) {
                Some(w) if *w != v => continue 'depth,
                _ => {
                    seen.insert(key, v);
                }
            }
        }
        // Missing entries are zeros: every populated (high, weight) class must be full.
        let mut counts: HashMap<(usize, usize, u32), usize> = HashMap::new();
        for (r, c, _) in a.matrix.entries() {
            *counts.entry((r >> low, c >> low, (r & mask).count_ones())).or_default() += 1;
        }
        for ((_, _, w), cnt) in counts {
            if cnt != binomial(low, w as usize) {
                continue 'depth;
            }
        }
        return k;
    }
    a.sites
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Two-site operator `Γ_{i+1,i}` of the local bracket identity.
pub fn local_gamma(p: &BoundaryParams) -> Result<SparseMatrix, RepError> {
    use pauli::*;
    let a = sp().scale(&(&p.kp * &Scalar::int(2))).try_sub(&sm().scale(&(&p.km * &Scalar::int(2))))?;
    let delta = id().scale(&params::delta_aniso());
    let left = delta.try_sub(&qs3())?.try_mul(&s3())?;
    let right = qs3().scale(&params::delta_aniso()).try_sub(&id())?.try_mul(&s3())?;
    Ok(a.kron(&left).try_add(&right.kron(&a))?)
}

/// Checks `[h_i, W0] = q^{σ3}-string ⊗ Γ_{i+1,i} ⊗ I` for every bond of an
/// `n`-site chain, plus the two diagonal simplification lemmas. Returns the
/// bonds that fail.
pub fn local_gamma_identity(n: usize, p: &BoundaryParams, w0: &SparseMatrix) -> Result<Vec<usize>, RepError> {
    use pauli::*;
    let half = &params::qdiff(1) * &Scalar::frac(1, 2);
    let delta = id().scale(&params::delta_aniso());
    let lemma1 = delta.try_sub(&qs3())?.try_mul(&s3())? == id().scale(&-&half);
    let lemma2 = qs3().scale(&params::delta_aniso()).try_sub(&id())?.try_mul(&s3())? == qs3().scale(&half);
    let gamma = local_gamma(p)?;
    let mut bad = Vec::new();
    if !(lemma1 && lemma2) {
        bad.push(0);
    }
    for i in 1..n {
        let lhs = bulk_density(i, n).commutator(w0)?;
        let above = n - i - 1;
        let below = i - 1;
        let mut fs = vec![qs3(); above];
        fs.push(gamma.clone());
        let rhs = SparseMatrix::kron_all(&fs).kron(&SparseMatrix::identity(1 << below));
        if lhs != rhs {
            bad.push(i);
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;
    use crate::qalgebra::gens::*;
    use crate::qalgebra::{antipode, counit};

    fn zeta() -> Scalar {
        Scalar::var(Var::Zeta)
    }

    #[test]
    fn eval_examples() {
        let m = eval_rep(&e1(), &zeta()).unwrap();
        assert_eq!(m, SparseMatrix::two(Scalar::zero(), zeta(), Scalar::zero(), Scalar::zero()));
        assert_eq!(eval_rep(&qc(), &zeta()).unwrap(), SparseMatrix::identity(2));
        let rel = &comm(&e1(), &f1()) - &(&t1() - &t1inv()).scale(&params::qdiff(1).recip().unwrap());
        assert!(eval_rep(&rel, &zeta()).unwrap().is_zero());
        assert_eq!(eval_rep(&e1(), &Scalar::zero()), Err(RepError::InvalidEvaluationPoint));
    }

    #[test]
    fn chain_routes_agree() {
        let x = &(&(&e1() * &f0()) + &(&t1() * &e0())) + &(&f1() * &(&t0inv() * &e1()));
        for n in 1..=3 {
            let fast = chain_operator(&x, n, &zeta()).unwrap();
            let lit = chain_operator_literal(&x, n, &zeta()).unwrap();
            assert_eq!(fast.matrix, lit.matrix, "n={n}");
        }
    }

    #[test]
    fn grouplike_chain() {
        let m = chain_operator(&t1(), 3, &Scalar::one()).unwrap().matrix;
        assert_eq!(m, SparseMatrix::kron_all(&[pauli::qs3(), pauli::qs3(), pauli::qs3()]));
        for n in 1..=4 {
            assert_eq!(chain_operator(&qc(), n, &zeta()).unwrap().matrix, SparseMatrix::identity(1 << n));
        }
    }

    #[test]
    fn e0_chain_oracle() {
        // Σ_j (q^{-σ3})^{⊗(3-j)} ⊗ σ- ⊗ I^{⊗(j-1)}, built directly.
        let n = 3;
        let mut oracle = SparseMatrix::zero(8);
        for j in 1..=n {
            let mut fs = vec![pauli::qs3inv(); n - j];
            fs.push(pauli::sm());
            fs.extend(vec![pauli::id(); j - 1]);
            oracle = oracle.try_add(&SparseMatrix::kron_all(&fs)).unwrap();
        }
        assert_eq!(chain_operator(&e0(), n, &Scalar::one()).unwrap().matrix, oracle);
    }

    #[test]
    fn site_one_is_least_significant() {
        let m = site_op(&pauli::sp(), 1, 3);
        assert_eq!(m.get(0b000, 0b001), Scalar::one());
        let m = site_op(&pauli::sp(), 3, 3);
        assert_eq!(m.get(0b000, 0b100), Scalar::one());
    }

    #[test]
    fn antipode_axiom_n1() {
        // m∘(S⊗id)∘Δ(e1) = E(e1)·1 = 0, computed on 2×2 matrices.
        let d = coproduct(&e1(), 2, false).unwrap();
        let mut m = SparseMatrix::zero(2);
        for (slots, c) in d.terms() {
            let a = eval_rep(&antipode(&FreeElement::word(slots[0].clone(), Scalar::one())), &zeta()).unwrap();
            let b = eval_rep(&FreeElement::word(slots[1].clone(), Scalar::one()), &zeta()).unwrap();
            m = m.try_add(&a.try_mul(&b).unwrap().scale(c)).unwrap();
        }
        assert!(m.is_zero());
        assert!(counit(&e1()).is_zero());
    }

    #[test]
    fn hamiltonian_n2_dense_oracle() {
        let p = BoundaryParams::symbolic();
        let h = hamiltonian(2, &p).unwrap().matrix;
        let d = params::delta_aniso();
        let s = &p.ep + &p.em;
        let b3 = (&(&params::qdiff(1) * &Scalar::frac(-1, 4)) * &(&p.ep - &p.em)).checked_div(&s).unwrap();
        let kp = p.kp.checked_div(&s).unwrap();
        let km = p.km.checked_div(&s).unwrap();
        let half_d = &d * &Scalar::frac(-1, 2);
        // basis |s2 s1>, index = 2*b2 + b1, b=0 is up.
        let mut o = SparseMatrix::zero(4);
        o.set(0, 0, &half_d + &b3);
        o.set(1, 1, &(-&half_d) - &b3);
        o.set(2, 2, &(-&half_d) + &b3);
        o.set(3, 3, &half_d - &b3);
        o.set(1, 2, Scalar::int(-1));
        o.set(2, 1, Scalar::int(-1));
        o.set(0, 1, -&kp);
        o.set(2, 3, -&kp);
        o.set(1, 0, -&km);
        o.set(3, 2, -&km);
        assert_eq!(h, o);
    }

    #[test]
    fn boundary_singular() {
        let mut p = BoundaryParams::symbolic();
        p.em = -&p.ep;
        assert_eq!(hamiltonian(2, &p).unwrap_err(), RepError::BoundarySingular);
    }

    #[test]
    fn special_boundary_density() {
        let p = BoundaryParams::symbolic()
            .substitute(&Assignment::new().with(Var::Ep, int(1)).with(Var::Em, int(0)).with(Var::Kp, int(0)).with(Var::Km, int(0)))
            .unwrap();
        let h = boundary_density(&p).unwrap();
        assert_eq!(h, pauli::s3().scale(&(&params::qdiff(1) * &Scalar::frac(-1, 4))));
    }

    #[test]
    fn support_examples() {
        let id = ChainOperator::new(SparseMatrix::identity(8), 3, "I");
        assert!(support(&id).is_empty());
        let hb = boundary_term(3, &BoundaryParams::symbolic()).unwrap();
        assert_eq!(support(&hb), BTreeSet::from([1]));
        let two = ChainOperator::new(bond_op(&pauli::sp(), &pauli::s3(), 2, 4), 4, "x");
        assert_eq!(support(&two), BTreeSet::from([2, 3]));
    }

    #[test]
    fn spin_reversal_is_involution() {
        let h = hamiltonian(3, &BoundaryParams::symbolic()).unwrap();
        let back = spin_reversal_conjugate(&spin_reversal_conjugate(&h));
        assert_eq!(back.matrix, h.matrix);
    }

    #[test]
    fn coordinate_text_roundtrip() {
        let h = hamiltonian(2, &BoundaryParams::symbolic()).unwrap();
        let t = h.matrix.to_coordinate_text();
        assert_eq!(SparseMatrix::from_coordinate_text(&t).unwrap(), h.matrix);
        let j = h.to_json();
        assert_eq!(ChainOperator::from_json(&j).unwrap(), h);
    }

    #[test]
    fn depth_and_anchoring_of_strings() {
        let a = ChainOperator::new(SparseMatrix::kron_all(&[pauli::sp(), pauli::qs3(), pauli::qs3()]), 3, "x");
        assert_eq!(string_depth(&a), 1);
        assert!(far_end_anchored(&a));
        let b = ChainOperator::new(site_op(&pauli::sp(), 1, 3), 3, "y");
        assert_eq!(string_depth(&b), 3);
    }

    fn psi_w0() -> FreeElement {
        let p = |v| FreeElement::scalar(Scalar::var(v));
        &(&(&p(Var::Kp) * &e1()) + &(&(&p(Var::Km) * &f1()) * &t1()).scale(&Scalar::qpow(-1))) + &(&p(Var::Ep) * &t1())
    }

    fn kpm(p: &BoundaryParams) -> SparseMatrix {
        pauli::sp().scale(&p.kp).try_sub(&pauli::sm().scale(&p.km)).unwrap()
    }

    #[test]
    fn w0_chain_n2() {
        let p = BoundaryParams::symbolic();
        let a = pauli::sp().scale(&p.kp).try_add(&pauli::sm().scale(&p.km)).unwrap();
        let o = pauli::qs3()
            .kron(&a)
            .try_add(&a.kron(&pauli::id()))
            .unwrap()
            .try_add(&pauli::qs3().kron(&pauli::qs3()).scale(&p.ep))
            .unwrap();
        assert_eq!(chain_operator(&psi_w0(), 2, &Scalar::one()).unwrap().matrix, o);
    }

    #[test]
    fn boundary_bracket_closed_form() {
        let p = BoundaryParams::symbolic();
        for n in 2..=4 {
            let w0 = chain_operator(&psi_w0(), n, &Scalar::one()).unwrap();
            let lhs = boundary_term(n, &p).unwrap().commutator(&w0).unwrap().matrix;
            let mut fs = vec![pauli::qs3(); n - 1];
            fs.push(kpm(&p));
            let rhs = SparseMatrix::kron_all(&fs).scale(&(&params::qdiff(1) * &Scalar::frac(1, 2)));
            assert_eq!(lhs, rhs, "n={n}");
        }
    }

    #[test]
    fn hamiltonian_w0_residual_at_far_end() {
        let p = BoundaryParams::symbolic();
        for n in 2..=4 {
            let w0 = chain_operator(&psi_w0(), n, &Scalar::one()).unwrap();
            let r = hamiltonian(n, &p).unwrap().commutator(&w0).unwrap();
            assert_eq!(support(&r), BTreeSet::from([n]));
            let mut fs = vec![kpm(&p)];
            fs.extend(vec![pauli::id(); n - 1]);
            let closed = SparseMatrix::kron_all(&fs).scale(&(&params::qdiff(1) * &Scalar::frac(1, 2)));
            assert_eq!(r.matrix, closed, "n={n}");
        }
    }

    #[test]
    fn local_gamma_holds() {
        let p = BoundaryParams::symbolic();
        for n in 3..=4 {
            let w0 = chain_operator(&psi_w0(), n, &Scalar::one()).unwrap().matrix;
            assert!(local_gamma_identity(n, &p, &w0).unwrap().is_empty());
        }
    }

    #[test]
    fn spin_reversal_swaps_boundary() {
        let p = BoundaryParams::symbolic();
        for n in 2..=3 {
            let h = hamiltonian(n, &p).unwrap();
            assert_eq!(spin_reversal_conjugate(&h).matrix, hamiltonian(n, &p.reversed()).unwrap().matrix);
        }
    }

    #[test]
    fn diagonal_k0_commutes() {
        let p = BoundaryParams::symbolic()
            .substitute(&Assignment::new().with(Var::Kp, int(0)).with(Var::Km, int(0)))
            .unwrap();
        for n in 2..=3 {
            let k0 = chain_operator(&(&FreeElement::scalar(params::ep()) * &t1()), n, &Scalar::one()).unwrap();
            assert!(hamiltonian(n, &p).unwrap().commutator(&k0).unwrap().matrix.is_zero());
        }
    }
}
