//! Free algebra over the Chevalley alphabet of the quantum affine algebra,
//! with coproduct, counit, antipode and q-commutators. No rewriting is done:
//! identities that need the defining relations are checked in representations.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::coeff::{CoeffError, Scalar};
use crate::ring::Ring;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("quantum and classical letters cannot be mixed")]
    AlphabetMismatch,
    #[error("coproduct needs at least two slots")]
    TooFewSlots,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    E0,
    E1,
    F0,
    F1,
    /// `q^{h0}`
    T0,
    T0inv,
    /// `q^{h1}`
    T1,
    T1inv,
    E0c,
    E1c,
    F0c,
    F1c,
    H0c,
    H1c,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    Quantum,
    Classical,
}

impl Letter {
    pub const QUANTUM: [Letter; 8] =
        [Letter::E0, Letter::E1, Letter::F0, Letter::F1, Letter::T0, Letter::T0inv, Letter::T1, Letter::T1inv];
    pub const CLASSICAL: [Letter; 6] = [Letter::E0c, Letter::E1c, Letter::F0c, Letter::F1c, Letter::H0c, Letter::H1c];

    pub fn alphabet(self) -> Alphabet {
        use Letter::*;
        match self {
            E0c | E1c | F0c | F1c | H0c | H1c => Alphabet::Classical,
            _ => Alphabet::Quantum,
        }
    }

    pub fn name(self) -> &'static str {
        use Letter::*;
        match self {
            E0 => "e0",
            E1 => "e1",
            F0 => "f0",
            F1 => "f1",
            T0 => "t0",
            T0inv => "t0'",
            T1 => "t1",
            T1inv => "t1'",
            E0c => "e0c",
            E1c => "e1c",
            F0c => "f0c",
            F1c => "f1c",
            H0c => "h0c",
            H1c => "h1c",
        }
    }

    pub fn from_name(s: &str) -> Option<Letter> {
        Letter::QUANTUM.iter().chain(Letter::CLASSICAL.iter()).copied().find(|l| l.name() == s)
    }

    /// Node index 0 or 1.
    pub fn node(self) -> usize {
        use Letter::*;
        match self {
            E0 | F0 | T0 | T0inv | E0c | F0c | H0c => 0,
            _ => 1,
        }
    }

    pub fn is_grouplike(self) -> bool {
        matches!(self, Letter::T0 | Letter::T0inv | Letter::T1 | Letter::T1inv)
    }

    pub fn inverse(self) -> Option<Letter> {
        use Letter::*;
        match self {
            T0 => Some(T0inv),
            T0inv => Some(T0),
            T1 => Some(T1inv),
            T1inv => Some(T1),
            _ => None,
        }
    }

    fn cartan(node: usize) -> Letter {
        if node == 0 {
            Letter::T0
        } else {
            Letter::T1
        }
    }

    fn cartan_inv(node: usize) -> Letter {
        if node == 0 {
            Letter::T0inv
        } else {
            Letter::T1inv
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }

    pub fn alphabet(&self) -> Option<Alphabet> {
        self.0.first().map(|l| l.alphabet())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<&str> = self.0.iter().map(|l| l.name()).collect();
        f.write_str(&parts.join(" "))
    }
}

pub(crate) fn fmt_coeff_term(c: &Scalar, body: &str) -> String {
    if c.is_one() {
        body.to_string()
    } else if body == "1" {
        format!("({})", c)
    } else {
        format!("({}) {}", c, body)
    }
}

fn mode_of<'a, I: Iterator<Item = &'a Word>>(words: I) -> Option<Alphabet> {
    words.filter_map(|w| w.alphabet()).next()
}

/// Noncommutative polynomial with [`Scalar`] coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeElement {
    terms: BTreeMap<Word, Scalar>,
}

impl FreeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::word(Word::unit(), Scalar::one())
    }

    pub fn scalar(s: Scalar) -> Self {
        Self::word(Word::unit(), s)
    }

    pub fn letter(l: Letter) -> Self {
        Self::word(Word(vec![l]), Scalar::one())
    }

    pub fn word(w: Word, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        FreeElement { terms }
    }

    pub fn from_letters(ls: &[Letter]) -> Self {
        Self::word(Word(ls.to_vec()), Scalar::one())
    }

    /// `q^{a0 h0 + a1 h1}` as the canonical word `T0^a0 T1^a1`.
    pub fn cartan(a0: i32, a1: i32) -> Self {
        let mut v = Vec::new();
        let l0 = if a0 >= 0 { Letter::T0 } else { Letter::T0inv };
        let l1 = if a1 >= 0 { Letter::T1 } else { Letter::T1inv };
        v.extend(std::iter::repeat(l0).take(a0.unsigned_abs() as usize));
        v.extend(std::iter::repeat(l1).take(a1.unsigned_abs() as usize));
        Self::from_letters(&v)
    }

    /// `q^c = T0 T1`.
    pub fn qc() -> Self {
        Self::cartan(1, 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn alphabet(&self) -> Option<Alphabet> {
        mode_of(self.terms.keys())
    }

    fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    fn check(&self, o: &FreeElement) -> Result<(), AlgebraError> {
        match (self.alphabet(), o.alphabet()) {
            (Some(a), Some(b)) if a != b => Err(AlgebraError::AlphabetMismatch),
            _ => Ok(()),
        }
    }

    pub fn try_add(&self, o: &FreeElement) -> Result<FreeElement, AlgebraError> {
        self.check(o)?;
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn try_sub(&self, o: &FreeElement) -> Result<FreeElement, AlgebraError> {
        self.try_add(&o.scale(&Scalar::int(-1)))
    }

    pub fn try_mul(&self, o: &FreeElement) -> Result<FreeElement, AlgebraError> {
        self.check(o)?;
        let mut r = FreeElement::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                r.add_term(w1.concat(w2), c1 * c2);
            }
        }
        Ok(r)
    }

    pub fn scale(&self, s: &Scalar) -> FreeElement {
        if s.is_zero() {
            return FreeElement::zero();
        }
        FreeElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), c * s)).collect() }
    }

    pub fn pow(&self, n: u32) -> FreeElement {
        let mut acc = FreeElement::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn try_qcomm(&self, o: &FreeElement, n: i32) -> Result<FreeElement, AlgebraError> {
        self.check(o)?;
        Ok(Ring::qcomm(self, o, n))
    }

    /// Algebra homomorphism determined by letter images.
    pub fn map_letters<F: Fn(Letter) -> FreeElement>(&self, f: F) -> FreeElement {
        let mut r = FreeElement::zero();
        for (w, c) in &self.terms {
            let mut acc = FreeElement::scalar(c.clone());
            for &l in w.letters() {
                acc = &acc * &f(l);
            }
            r = &r + &acc;
        }
        r
    }

    pub fn map_scalars<F: Fn(&Scalar) -> Result<Scalar, CoeffError>>(&self, f: F) -> Result<FreeElement, CoeffError> {
        let mut r = FreeElement::zero();
        for (w, c) in &self.terms {
            r.add_term(w.clone(), f(c)?);
        }
        Ok(r)
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| fmt_coeff_term(c, &w.to_string())).collect();
        parts.join(" + ")
    }
}

impl fmt::Display for FreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl From<Letter> for FreeElement {
    fn from(l: Letter) -> Self {
        FreeElement::letter(l)
    }
}

impl Ring for FreeElement {
    fn one_like(&self) -> Self {
        FreeElement::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, s: &Scalar) -> Self {
        FreeElement::scale(self, s)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn try_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (w, c) = self.terms.iter().next().unwrap();
        let inv: Option<Vec<Letter>> = w.letters().iter().rev().map(|l| l.inverse()).collect();
        Some(FreeElement::word(Word(inv?), c.recip().ok()?))
    }
}

impl<'a> std::ops::Add<&'a FreeElement> for &'a FreeElement {
    type Output = FreeElement;
    fn add(self, o: &FreeElement) -> FreeElement {
        self.try_add(o).expect("alphabet mismatch")
    }
}

impl<'a> std::ops::Sub<&'a FreeElement> for &'a FreeElement {
    type Output = FreeElement;
    fn sub(self, o: &FreeElement) -> FreeElement {
        self.try_sub(o).expect("alphabet mismatch")
    }
}

impl<'a> std::ops::Mul<&'a FreeElement> for &'a FreeElement {
    type Output = FreeElement;
    fn mul(self, o: &FreeElement) -> FreeElement {
        self.try_mul(o).expect("alphabet mismatch")
    }
}

impl std::ops::Neg for &FreeElement {
    type Output = FreeElement;
    fn neg(self) -> FreeElement {
        self.scale(&Scalar::int(-1))
    }
}

impl std::ops::Add for FreeElement {
    type Output = FreeElement;
    fn add(self, o: FreeElement) -> FreeElement {
        &self + &o
    }
}

impl std::ops::Sub for FreeElement {
    type Output = FreeElement;
    fn sub(self, o: FreeElement) -> FreeElement {
        &self - &o
    }
}

impl std::ops::Mul for FreeElement {
    type Output = FreeElement;
    fn mul(self, o: FreeElement) -> FreeElement {
        &self * &o
    }
}

impl std::ops::Neg for FreeElement {
    type Output = FreeElement;
    fn neg(self) -> FreeElement {
        -&self
    }
}

impl std::ops::Mul<FreeElement> for Scalar {
    type Output = FreeElement;
    fn mul(self, o: FreeElement) -> FreeElement {
        o.scale(&self)
    }
}

impl std::ops::Mul<&FreeElement> for &Scalar {
    type Output = FreeElement;
    fn mul(self, o: &FreeElement) -> FreeElement {
        o.scale(self)
    }
}

/// Chevalley letters as elements.
pub mod gens {
    use super::*;

    pub fn e0() -> FreeElement {
        Letter::E0.into()
    }
    pub fn e1() -> FreeElement {
        Letter::E1.into()
    }
    pub fn f0() -> FreeElement {
        Letter::F0.into()
    }
    pub fn f1() -> FreeElement {
        Letter::F1.into()
    }
    pub fn t0() -> FreeElement {
        Letter::T0.into()
    }
    pub fn t1() -> FreeElement {
        Letter::T1.into()
    }
    pub fn t0inv() -> FreeElement {
        Letter::T0inv.into()
    }
    pub fn t1inv() -> FreeElement {
        Letter::T1inv.into()
    }
    pub fn qc() -> FreeElement {
        FreeElement::qc()
    }
    pub fn qcomm(a: &FreeElement, b: &FreeElement, n: i32) -> FreeElement {
        Ring::qcomm(a, b, n)
    }
    pub fn comm(a: &FreeElement, b: &FreeElement) -> FreeElement {
        Ring::comm(a, b)
    }
    pub fn s(x: Scalar) -> FreeElement {
        FreeElement::scalar(x)
    }
}

/// Scalar-weighted sum of word tuples of fixed arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorElement {
    arity: usize,
    terms: BTreeMap<Vec<Word>, Scalar>,
}

impl TensorElement {
    pub fn zero(arity: usize) -> Self {
        assert!(arity >= 1);
        TensorElement { arity, terms: BTreeMap::new() }
    }

    pub fn pure(slots: Vec<Word>, c: Scalar) -> Self {
        let mut t = TensorElement::zero(slots.len());
        t.add_term(slots, c);
        t
    }

    pub fn from_element(x: &FreeElement) -> Self {
        let mut t = TensorElement::zero(1);
        for (w, c) in x.terms() {
            t.add_term(vec![w.clone()], c.clone());
        }
        t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Word>, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, slots: Vec<Word>, c: Scalar) {
        assert_eq!(slots.len(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&slots) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&slots);
                }
            }
            None => {
                self.terms.insert(slots, c);
            }
        }
    }

    pub fn add(&self, o: &TensorElement) -> TensorElement {
        assert_eq!(self.arity, o.arity);
        let mut r = self.clone();
        for (s, c) in &o.terms {
            r.add_term(s.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, s: &Scalar) -> TensorElement {
        let mut r = TensorElement::zero(self.arity);
        for (w, c) in &self.terms {
            r.add_term(w.clone(), c * s);
        }
        r
    }

    /// Slotwise product.
    pub fn mul(&self, o: &TensorElement) -> TensorElement {
        assert_eq!(self.arity, o.arity);
        let mut r = TensorElement::zero(self.arity);
        for (s1, c1) in &self.terms {
            for (s2, c2) in &o.terms {
                let slots = s1.iter().zip(s2.iter()).map(|(a, b)| a.concat(b)).collect();
                r.add_term(slots, c1 * c2);
            }
        }
        r
    }

    pub fn reversed(&self) -> TensorElement {
        let mut r = TensorElement::zero(self.arity);
        for (s, c) in &self.terms {
            r.add_term(s.iter().rev().cloned().collect(), c.clone());
        }
        r
    }

    /// Replaces slot `k` by its coproduct, raising the arity by one.
    pub fn expand_slot(&self, k: usize) -> TensorElement {
        assert!(k < self.arity);
        let mut r = TensorElement::zero(self.arity + 1);
        for (s, c) in &self.terms {
            let d = word_coproduct(&s[k]);
            for (pair, c2) in &d.terms {
                let mut slots = Vec::with_capacity(self.arity + 1);
                slots.extend_from_slice(&s[..k]);
                slots.extend(pair.iter().cloned());
                slots.extend_from_slice(&s[k + 1..]);
                r.add_term(slots, c * c2);
            }
        }
        r
    }

    /// Applies the counit to slot `k`, lowering the arity by one.
    pub fn counit_slot(&self, k: usize) -> TensorElement {
        assert!(self.arity >= 2 && k < self.arity);
        let mut r = TensorElement::zero(self.arity - 1);
        for (s, c) in &self.terms {
            let e = word_counit(&s[k]);
            if e.is_zero() {
                continue;
            }
            let mut slots = s.clone();
            slots.remove(k);
            r.add_term(slots, c * &e);
        }
        r
    }

    /// Multiplies all slots together in order (the iterated product map).
    pub fn multiply_out(&self) -> FreeElement {
        let mut r = FreeElement::zero();
        for (s, c) in &self.terms {
            let w = s.iter().fold(Word::unit(), |a, b| a.concat(b));
            r = &r + &FreeElement::word(w, c.clone());
        }
        r
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(s, c)| {
                let body: Vec<String> = s.iter().map(|w| w.to_string()).collect();
                fmt_coeff_term(c, &body.join(" (x) "))
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `Δ` of a single quantum letter.
pub fn letter_coproduct(l: Letter) -> TensorElement {
    use Letter::*;
    let w = |ls: &[Letter]| Word(ls.to_vec());
    let one = Scalar::one();
    let mut t = TensorElement::zero(2);
    match l {
        E0 | E1 => {
            t.add_term(vec![w(&[l]), Word::unit()], one.clone());
            t.add_term(vec![w(&[Letter::cartan(l.node())]), w(&[l])], one);
        }
        F0 | F1 => {
            t.add_term(vec![w(&[l]), w(&[Letter::cartan_inv(l.node())])], one.clone());
            t.add_term(vec![Word::unit(), w(&[l])], one);
        }
        T0 | T0inv | T1 | T1inv => t.add_term(vec![w(&[l]), w(&[l])], one),
        _ => {
            // Classical letters are primitive.
            t.add_term(vec![w(&[l]), Word::unit()], one.clone());
            t.add_term(vec![Word::unit(), w(&[l])], one);
        }
    }
    t
}

fn word_coproduct(w: &Word) -> TensorElement {
    let mut acc = TensorElement::pure(vec![Word::unit(), Word::unit()], Scalar::one());
    for &l in w.letters() {
        acc = acc.mul(&letter_coproduct(l));
    }
    acc
}

/// Iterated coproduct to `slots` factors, always expanding the leftmost slot.
pub fn coproduct(x: &FreeElement, slots: usize, opposite: bool) -> Result<TensorElement, AlgebraError> {
    if slots < 2 {
        return Err(AlgebraError::TooFewSlots);
    }
    if x.alphabet() == Some(Alphabet::Classical) {
        return Err(AlgebraError::AlphabetMismatch);
    }
    let mut t = TensorElement::from_element(x);
    for _ in 1..slots {
        t = t.expand_slot(0);
    }
    Ok(if opposite { t.reversed() } else { t })
}

/// Classical (primitive) coproduct, used for tensor-product representations at `q = 1`.
pub fn classical_coproduct(x: &FreeElement, slots: usize) -> Result<TensorElement, AlgebraError> {
    if slots < 2 {
        return Err(AlgebraError::TooFewSlots);
    }
    if x.alphabet() == Some(Alphabet::Quantum) {
        return Err(AlgebraError::AlphabetMismatch);
    }
    let mut t = TensorElement::from_element(x);
    for _ in 1..slots {
        t = t.expand_slot(0);
    }
    Ok(t)
}

fn word_counit(w: &Word) -> Scalar {
    if w.letters().iter().all(|l| l.is_grouplike()) {
        Scalar::one()
    } else {
        Scalar::zero()
    }
}

pub fn counit(x: &FreeElement) -> Scalar {
    x.terms().map(|(w, c)| c * &word_counit(w)).sum()
}

fn letter_antipode(l: Letter) -> FreeElement {
    use Letter::*;
    let n = l.node();
    match l {
        E0 | E1 => -FreeElement::from_letters(&[Letter::cartan_inv(n), l]),
        F0 | F1 => -FreeElement::from_letters(&[l, Letter::cartan(n)]),
        T0 | T0inv | T1 | T1inv => FreeElement::letter(l.inverse().unwrap()),
        _ => -FreeElement::letter(l),
    }
}

/// Anti-homomorphic extension of the antipode table.
pub fn antipode(x: &FreeElement) -> FreeElement {
    let mut r = FreeElement::zero();
    for (w, c) in x.terms() {
        let mut acc = FreeElement::scalar(c.clone());
        for &l in w.letters().iter().rev() {
            acc = &acc * &letter_antipode(l);
        }
        r = &r + &acc;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::gens::*;
    use super::*;
    use crate::coeff::params;

    fn w(ls: &[Letter]) -> Word {
        Word(ls.to_vec())
    }

    #[test]
    fn unit_and_bilinearity() {
        assert_eq!(&e0() * &FreeElement::one(), e0());
        let x = &(&e1() + &f1()) * &t1();
        let mut expect = FreeElement::from_letters(&[Letter::E1, Letter::T1]);
        expect = &expect + &FreeElement::from_letters(&[Letter::F1, Letter::T1]);
        assert_eq!(x, expect);
        assert_eq!(x.len(), 2);
    }

    #[test]
    fn qcomm_examples() {
        let x = qcomm(&e1(), &e0(), 1);
        let expect = &e1().pow(1) * &e0();
        let expect = &expect.scale(&params::q()) - &(&e0() * &e1()).scale(&params::qinv());
        assert_eq!(x, expect);
        let y = FreeElement::from_letters(&[Letter::E1, Letter::F0]);
        assert_eq!(qcomm(&y, &y, 1), (&y * &y).scale(&params::qdiff(1)));
        assert_eq!(qcomm(&e0(), &f1(), 0), -qcomm(&f1(), &e0(), 0));
    }

    #[test]
    fn alphabet_mismatch() {
        let c = FreeElement::letter(Letter::E0c);
        assert_eq!(e0().try_mul(&c), Err(AlgebraError::AlphabetMismatch));
        assert_eq!(coproduct(&c, 2, false), Err(AlgebraError::AlphabetMismatch));
    }

    #[test]
    fn coproduct_examples() {
        let d = coproduct(&e1(), 2, false).unwrap();
        let mut expect = TensorElement::zero(2);
        expect.add_term(vec![w(&[Letter::E1]), Word::unit()], Scalar::one());
        expect.add_term(vec![w(&[Letter::T1]), w(&[Letter::E1])], Scalar::one());
        assert_eq!(d, expect);

        let u = coproduct(&FreeElement::one(), 3, false).unwrap();
        assert_eq!(u, TensorElement::pure(vec![Word::unit(); 3], Scalar::one()));

        let f = coproduct(&f1(), 3, false).unwrap();
        let ti = Letter::T1inv;
        let mut expect = TensorElement::zero(3);
        expect.add_term(vec![w(&[Letter::F1]), w(&[ti]), w(&[ti])], Scalar::one());
        expect.add_term(vec![Word::unit(), w(&[Letter::F1]), w(&[ti])], Scalar::one());
        expect.add_term(vec![Word::unit(), Word::unit(), w(&[Letter::F1])], Scalar::one());
        assert_eq!(f, expect);
    }

    #[test]
    fn coassociativity_on_letters() {
        for l in Letter::QUANTUM {
            let x = FreeElement::letter(l);
            let d = coproduct(&x, 2, false).unwrap();
            assert_eq!(d.expand_slot(0), d.expand_slot(1), "{l}");
        }
    }

    #[test]
    fn counit_axiom_on_letters() {
        for l in Letter::QUANTUM {
            let x = FreeElement::letter(l);
            let d = coproduct(&x, 2, false).unwrap();
            assert_eq!(d.counit_slot(0).multiply_out(), x);
            assert_eq!(d.counit_slot(1).multiply_out(), x);
        }
    }

    #[test]
    fn counit_examples() {
        assert!(counit(&FreeElement::from_letters(&[Letter::E0, Letter::F1, Letter::T0])).is_zero());
        assert_eq!(counit(&qc()), Scalar::one());
    }

    #[test]
    fn antipode_examples() {
        assert_eq!(antipode(&e1()), -FreeElement::from_letters(&[Letter::T1inv, Letter::E1]));
        assert_eq!(antipode(&FreeElement::one()), FreeElement::one());
        assert_eq!(antipode(&f0()), -FreeElement::from_letters(&[Letter::F0, Letter::T0]));
    }

    #[test]
    fn opposite_reverses_slots() {
        let d = coproduct(&e0(), 2, true).unwrap();
        let mut expect = TensorElement::zero(2);
        expect.add_term(vec![Word::unit(), w(&[Letter::E0])], Scalar::one());
        expect.add_term(vec![w(&[Letter::E0]), w(&[Letter::T0])], Scalar::one());
        assert_eq!(d, expect);
    }

    #[test]
    fn text_form() {
        let x = &qcomm(&e1(), &e0(), 1) + &t0inv();
        assert_eq!(x.to_text(), "((-1)*q^-1) e0 e1 + (q) e1 e0 + t0'");
        let d = coproduct(&e1(), 2, false).unwrap();
        assert_eq!(d.to_text(), "e1 (x) 1 + t1 (x) e1");
    }
}
