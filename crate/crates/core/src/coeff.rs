//! Exact coefficients: rationals, Laurent polynomials in the formal
//! parameters, and their fraction field.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use thiserror::Error;

pub type Rational = BigRational;

pub const NVARS: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    EvaluationSingular,
    #[error("negative power of {0} evaluated at zero")]
    PoleAtZero(Var),
    #[error("expression is not polynomial in {0}")]
    NotPolynomialInVariable(Var),
    #[error("expression is not divisible by {0}^{1}")]
    NotDivisible(Var, u32),
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

/// The formal parameters, in their fixed global order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Q,
    Zeta,
    Kp,
    Km,
    Ep,
    Em,
    Pt,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::Q, Var::Zeta, Var::Kp, Var::Km, Var::Ep, Var::Em, Var::Pt];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::Q => "q",
            Var::Zeta => "zeta",
            Var::Kp => "kp",
            Var::Km => "km",
            Var::Ep => "ep",
            Var::Em => "em",
            Var::Pt => "pt",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.iter().copied().find(|v| v.name() == s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Laurent monomial: exponent vector over [`Var::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub [i32; NVARS]);

impl Monomial {
    pub fn unit() -> Self {
        Monomial([0; NVARS])
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: i32) -> Self {
        let mut m = [0; NVARS];
        m[v.index()] = e;
        Monomial(m)
    }

    pub fn exp(&self, v: Var) -> i32 {
        self.0[v.index()]
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0.iter()) {
            *a += b;
        }
        Monomial(m)
    }

    pub fn div(&self, o: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0.iter()) {
            *a -= b;
        }
        Monomial(m)
    }

    pub fn pow(&self, n: i32) -> Monomial {
        let mut m = self.0;
        for a in m.iter_mut() {
            *a *= n;
        }
        Monomial(m)
    }

    pub fn inv(&self) -> Monomial {
        self.pow(-1)
    }

    fn meet(&self, o: &Monomial) -> Monomial {
        let mut m = self.0;
        for (a, b) in m.iter_mut().zip(o.0.iter()) {
            *a = (*a).min(*b);
        }
        Monomial(m)
    }

    /// Componentwise `self <= o`.
    fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(o.0.iter()).all(|(a, b)| a <= b)
    }

    fn without(&self, v: Var) -> Monomial {
        let mut m = self.0;
        m[v.index()] = 0;
        Monomial(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("1");
        }
        let mut first = true;
        for v in Var::ALL {
            let e = self.exp(v);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

/// Finite map monomial → nonzero rational.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::unit(), c)
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), Rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut p = LaurentPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().next().map_or(false, |(m, c)| m.is_unit() && c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_unit().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(Monomial, Rational)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((*m, c.clone()))
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Largest monomial in the fixed lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Componentwise minimum over all monomials (unit for zero).
    pub fn min_monomial(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::unit(),
            Some(first) => it.fold(*first, |acc, m| acc.meet(m)),
        }
    }

    pub fn swap_vars(&self, pairs: &[(Var, Var)]) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut e = m.0;
            for (a, b) in pairs {
                e.swap(a.index(), b.index());
            }
            (Monomial(e), c.clone())
        }))
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) != 0)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn scale(&self, r: &Rational) -> LaurentPoly {
        if r.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (*k, c * r)).collect() }
    }

    pub fn pow(&self, n: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient `self / d`, if `d` divides `self` in the Laurent ring.
    pub fn exact_div(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero());
        }
        if let Some((m, c)) = d.as_monomial() {
            return Some(self.mul_monomial(&m.inv()).scale(&c.recip()));
        }
        // Shift both into the polynomial ring with `d` free of monomial factors;
        // a Laurent quotient then exists iff a polynomial one does.
        let dm = d.min_monomial();
        let d0 = d.mul_monomial(&dm.inv());
        let nm = self.min_monomial();
        let mut rem = self.mul_monomial(&nm.inv());
        let (dlm, dlc) = {
            let (m, c) = d0.leading().unwrap();
            (*m, c.clone())
        };
        let mut quot = LaurentPoly::zero();
        while let Some((lm, lc)) = rem.leading().map(|(m, c)| (*m, c.clone())) {
            if !dlm.divides(&lm) {
                return None;
            }
            let tm = lm.div(&dlm);
            let tc = &lc / &dlc;
            for (m, c) in d0.terms.iter() {
                rem.add_term(m.mul(&tm), -(c * &tc));
            }
            quot.add_term(tm, tc);
        }
        Some(quot.mul_monomial(&nm.div(&dm)))
    }

    pub fn substitute(&self, a: &Assignment) -> Result<LaurentPoly, CoeffError> {
        let mut out = LaurentPoly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut mono = *m;
            let mut vanished = false;
            for v in Var::ALL {
                let e = m.exp(v);
                if e == 0 {
                    continue;
                }
                if let Some(val) = a.get(v) {
                    if val.is_zero() {
                        if e < 0 {
                            return Err(CoeffError::PoleAtZero(v));
                        }
                        vanished = true;
                        break;
                    }
                    coeff *= rat_pow(val, e);
                    mono.0[v.index()] = 0;
                }
            }
            if !vanished {
                out.add_term(mono, coeff);
            }
        }
        Ok(out)
    }

    fn to_canonical(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let cs = if c.is_integer() && !c.is_negative() {
                    fmt_rational(c)
                } else {
                    format!("({})", fmt_rational(c))
                };
                match (m.is_unit(), c.is_one()) {
                    (true, _) => cs,
                    (false, true) => m.to_string(),
                    (false, false) => format!("{}*{}", cs, m),
                }
            })
            .collect();
        parts.join(" + ")
    }
}

fn rat_pow(r: &Rational, e: i32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= r;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical())
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, -c.clone());
        }
        r
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = LaurentPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

/// Partial assignment of rationals to the formal parameters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    vals: [Option<Rational>; NVARS],
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, v: Var, r: Rational) -> Self {
        self.vals[v.index()] = Some(r);
        self
    }

    pub fn set(&mut self, v: Var, r: Rational) {
        self.vals[v.index()] = Some(r);
    }

    pub fn get(&self, v: Var) -> Option<&Rational> {
        self.vals[v.index()].as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.iter().all(Option::is_none)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &Rational)> {
        Var::ALL.into_iter().filter_map(move |v| self.get(v).map(|r| (v, r)))
    }

    /// Distinct small rationals with `|value| ∉ {0, 1}` for every variable.
    pub fn random_point<R: Rng>(rng: &mut R) -> Self {
        let mut a = Assignment::new();
        let mut used: Vec<Rational> = Vec::new();
        for v in Var::ALL {
            loop {
                let n: i64 = rng.gen_range(-11..=11);
                let d: i64 = rng.gen_range(1..=7);
                let r = rat(n, d);
                if r.is_zero() || r.abs().is_one() || used.iter().any(|u| u.abs() == r.abs()) {
                    continue;
                }
                used.push(r.clone());
                a.set(v, r);
                break;
            }
        }
        a
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(v, r)| format!("{}={}", v, fmt_rational(r))).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Element of the fraction field, compared by cross-multiplication.
#[derive(Debug, Clone)]
pub struct Scalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(rat(n, d))
    }

    pub fn rational(r: Rational) -> Self {
        Scalar { num: LaurentPoly::constant(r), den: LaurentPoly::one() }
    }

    pub fn var(v: Var) -> Self {
        Scalar { num: LaurentPoly::var(v), den: LaurentPoly::one() }
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        Scalar { num: LaurentPoly::term(m, c), den: LaurentPoly::one() }
    }

    pub fn poly(p: LaurentPoly) -> Self {
        Scalar { num: p, den: LaurentPoly::one() }
    }

    pub fn q() -> Self {
        Self::var(Var::Q)
    }

    /// `q^n`.
    pub fn qpow(n: i32) -> Self {
        Self::monomial(Monomial::var_pow(Var::Q, n), Rational::one())
    }

    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Scalar { num, den }.normalized())
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn as_rational(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den = LaurentPoly::one();
            return self;
        }
        let m = self.den.min_monomial();
        if !m.is_unit() {
            let mi = m.inv();
            self.num = self.num.mul_monomial(&mi);
            self.den = self.den.mul_monomial(&mi);
        }
        let lc = self.den.leading().unwrap().1.clone();
        if !lc.is_one() {
            let r = lc.recip();
            self.num = self.num.scale(&r);
            self.den = self.den.scale(&r);
        }
        if self.den.len() > 1 {
            if let Some(qt) = self.num.exact_div(&self.den) {
                self.num = qt;
                self.den = LaurentPoly::one();
            }
        }
        self
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar, CoeffError> {
        if o.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(self * &o.recip_unchecked())
    }

    pub fn recip(&self) -> Result<Scalar, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(self.recip_unchecked())
    }

    fn recip_unchecked(&self) -> Scalar {
        Scalar { num: self.den.clone(), den: self.num.clone() }.normalized()
    }

    pub fn pow(&self, n: i32) -> Result<Scalar, CoeffError> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn substitute(&self, a: &Assignment) -> Result<Scalar, CoeffError> {
        if a.is_empty() {
            return Ok(self.clone());
        }
        let num = self.num.substitute(a)?;
        let den = self.den.substitute(a)?;
        if den.is_zero() {
            return Err(CoeffError::EvaluationSingular);
        }
        Ok(Scalar { num, den }.normalized())
    }

    /// Coefficient of `v^n` in the `v`-expansion.
    pub fn extract_order(&self, v: Var, n: u32) -> Result<Scalar, CoeffError> {
        if self.den.depends_on(v) {
            return Err(CoeffError::NotPolynomialInVariable(v));
        }
        if self.num.terms.keys().any(|m| m.exp(v) < 0) {
            return Err(CoeffError::NotPolynomialInVariable(v));
        }
        let num = LaurentPoly::from_terms(
            self.num
                .terms
                .iter()
                .filter(|(m, _)| m.exp(v) == n as i32)
                .map(|(m, c)| (m.without(v), c.clone())),
        );
        Ok(Scalar { num, den: self.den.clone() }.normalized())
    }

    /// `lim_{v→0} self / v^n`, requiring all lower orders to vanish.
    pub fn divide_limit(&self, v: Var, n: u32) -> Result<Scalar, CoeffError> {
        for k in 0..n {
            if !self.extract_order(v, k)?.is_zero() {
                return Err(CoeffError::NotDivisible(v, n));
            }
        }
        self.extract_order(v, n)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.num.depends_on(v) || self.den.depends_on(v)
    }

    /// Exchanges each pair of variables.
    pub fn swap_vars(&self, pairs: &[(Var, Var)]) -> Scalar {
        Scalar { num: self.num.swap_vars(pairs), den: self.den.swap_vars(pairs) }.normalized()
    }

    pub fn to_canonical(&self) -> String {
        if self.den.is_one() {
            self.num.to_canonical()
        } else {
            format!("({}) / ({})", self.num.to_canonical(), self.den.to_canonical())
        }
    }

    pub fn parse(s: &str) -> Result<Scalar, CoeffError> {
        let s = s.trim();
        match split_top_level(s, " / ") {
            Some((a, b)) => {
                let num = parse_poly(strip_parens(a))?;
                let den = parse_poly(strip_parens(b))?;
                Scalar::new(num, den)
            }
            None => Ok(Scalar::poly(parse_poly(s)?)),
        }
    }
}

fn split_top_level<'a>(s: &'a str, pat: &str) -> Option<(&'a str, &'a str)> {
    let mut depth = 0i32;
    let bytes = s.as_bytes();
    for i in 0..bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            _ if depth == 0 && s[i..].starts_with(pat) => return Some((&s[..i], &s[i + pat.len()..])),
            _ => {}
        }
    }
    None
}

fn strip_parens(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(s)
}

fn parse_rational(s: &str) -> Result<Rational, CoeffError> {
    let err = || CoeffError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s.trim()).map_err(|_| err())?)),
    }
}

fn parse_poly(s: &str) -> Result<LaurentPoly, CoeffError> {
    let s = s.trim();
    if s == "0" {
        return Ok(LaurentPoly::zero());
    }
    let mut p = LaurentPoly::zero();
    for term in s.split(" + ") {
        let mut coeff = Rational::one();
        let mut mono = Monomial::unit();
        for factor in term.trim().split('*') {
            let f = factor.trim();
            if let Some(inner) = f.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
                coeff *= parse_rational(inner)?;
            } else if f.starts_with(|c: char| c.is_ascii_digit()) {
                coeff *= parse_rational(f)?;
            } else {
                let (name, e) = match f.split_once('^') {
                    Some((n, e)) => (n, e.parse::<i32>().map_err(|_| CoeffError::Parse(f.into()))?),
                    None => (f, 1),
                };
                let v = Var::from_name(name).ok_or_else(|| CoeffError::Parse(f.into()))?;
                mono = mono.mul(&Monomial::var_pow(v, e));
            }
        }
        p.add_term(mono, coeff);
    }
    Ok(p)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        if self.den == o.den {
            self.num == o.num
        } else {
            &self.num * &o.den == &o.num * &self.den
        }
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::rational(r)
    }
}

impl From<Var> for Scalar {
    fn from(v: Var) -> Self {
        Scalar::var(v)
    }
}

impl From<LaurentPoly> for Scalar {
    fn from(p: LaurentPoly) -> Self {
        Scalar::poly(p)
    }
}

fn add_sub(a: &Scalar, b: &Scalar, negate: bool) -> Scalar {
    let bn = if negate { -&b.num } else { b.num.clone() };
    if a.is_zero() {
        return Scalar { num: bn, den: b.den.clone() };
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.den == b.den {
        let num = &a.num + &bn;
        return Scalar { num, den: a.den.clone() }.normalized();
    }
    if b.den.is_one() {
        let num = &a.num + &(&bn * &a.den);
        return Scalar { num, den: a.den.clone() }.normalized();
    }
    if a.den.is_one() {
        let num = &(&a.num * &b.den) + &bn;
        return Scalar { num, den: b.den.clone() }.normalized();
    }
    if let Some(e) = a.den.exact_div(&b.den) {
        let num = &a.num + &(&bn * &e);
        return Scalar { num, den: a.den.clone() }.normalized();
    }
    if let Some(e) = b.den.exact_div(&a.den) {
        let num = &(&a.num * &e) + &bn;
        return Scalar { num, den: b.den.clone() }.normalized();
    }
    let num = &(&a.num * &b.den) + &(&bn * &a.den);
    Scalar { num, den: &a.den * &b.den }.normalized()
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        add_sub(self, o, false)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        add_sub(self, o, true)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar { num: &self.num * &o.num, den: LaurentPoly::one() };
        }
        Scalar { num: &self.num * &o.num, den: &self.den * &o.den }.normalized()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

owned_ops!(Scalar);
owned_ops!(LaurentPoly);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(it: I) -> Scalar {
        it.fold(Scalar::zero(), |a, b| &a + &b)
    }
}

/// Named parameter scalars.
pub mod params {
    use super::*;

    pub fn q() -> Scalar {
        Scalar::q()
    }

    pub fn qinv() -> Scalar {
        Scalar::qpow(-1)
    }

    /// `q^a - q^-a`.
    pub fn qdiff(a: i32) -> Scalar {
        &Scalar::qpow(a) - &Scalar::qpow(-a)
    }

    /// `q^a + q^-a`.
    pub fn qsum(a: i32) -> Scalar {
        &Scalar::qpow(a) + &Scalar::qpow(-a)
    }

    pub fn kp() -> Scalar {
        Scalar::var(Var::Kp)
    }

    pub fn km() -> Scalar {
        Scalar::var(Var::Km)
    }

    pub fn ep() -> Scalar {
        Scalar::var(Var::Ep)
    }

    pub fn em() -> Scalar {
        Scalar::var(Var::Em)
    }

    pub fn pt() -> Scalar {
        Scalar::var(Var::Pt)
    }

    pub fn zeta() -> Scalar {
        Scalar::var(Var::Zeta)
    }

    /// `(q+q^-1)^2 kp km`.
    pub fn rho() -> Scalar {
        &(&qsum(1) * &qsum(1)) * &(&kp() * &km())
    }

    /// `km (q+q^-1)^2`.
    pub fn rho_t() -> Scalar {
        &km() * &(&qsum(1) * &qsum(1))
    }

    /// `-ep em (q-q^-1)`.
    pub fn rhot_t() -> Scalar {
        -&(&(&ep() * &em()) * &qdiff(1))
    }

    /// `(q^3-q^-3)(q^2-q^-2)^3/(q-q^-1)`.
    pub fn rho_d() -> Scalar {
        let n = &qdiff(3) * &qdiff(2).pow(3).unwrap();
        n.checked_div(&qdiff(1)).unwrap()
    }

    /// Anisotropy `(q+q^-1)/2`.
    pub fn delta_aniso() -> Scalar {
        &qsum(1) * &Scalar::frac(1, 2)
    }
}

#[cfg(test)]
mod tests {
    use super::params::*;
    use super::*;

    #[test]
    fn rho_expansion() {
        let r = rho();
        assert!(r.is_polynomial());
        let expect = LaurentPoly::from_terms([
            (Monomial([2, 0, 1, 1, 0, 0, 0]), int(1)),
            (Monomial([0, 0, 1, 1, 0, 0, 0]), int(2)),
            (Monomial([-2, 0, 1, 1, 0, 0, 0]), int(1)),
        ]);
        assert_eq!(r.num(), &expect);
        assert_eq!(r.num().len(), 3);
    }

    #[test]
    fn rho_d_division_is_exact() {
        // (q^3-q^-3) = (q-q^-1)(q^2+1+q^-2) by hand.
        let oracle = &(&Scalar::qpow(2) + &(&Scalar::one() + &Scalar::qpow(-2))) * &qdiff(2).pow(3).unwrap();
        let r = rho_d();
        assert!(r.is_polynomial());
        assert_eq!(r, oracle);
        let lowest = r.num().terms().next().unwrap();
        assert_eq!(lowest.0.exp(Var::Q), -8);
        assert_eq!(lowest.1, &int(-1));
        let rem = qdiff(3).num() * &qdiff(2).pow(3).unwrap().num().clone();
        assert!(rem.exact_div(qdiff(1).num()).is_some());
    }

    #[test]
    fn cross_multiplication_equality() {
        let a = Scalar::q().checked_div(&Scalar::one()).unwrap();
        let b = Scalar::qpow(2).checked_div(&Scalar::q()).unwrap();
        assert_eq!(a, b);
        let c = Scalar::new(LaurentPoly::var(Var::Kp) + LaurentPoly::one(), LaurentPoly::var(Var::Ep) + LaurentPoly::one()).unwrap();
        let d = Scalar::new(
            &(LaurentPoly::var(Var::Kp) + LaurentPoly::one()) * &(LaurentPoly::var(Var::Q) + LaurentPoly::one()),
            &(LaurentPoly::var(Var::Ep) + LaurentPoly::one()) * &(LaurentPoly::var(Var::Q) + LaurentPoly::one()),
        )
        .unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn division_by_zero() {
        assert_eq!(Scalar::one().checked_div(&Scalar::zero()), Err(CoeffError::DivisionByZero));
        assert!(Scalar::new(LaurentPoly::one(), LaurentPoly::zero()).is_err());
    }

    #[test]
    fn substitution_examples() {
        assert!(rho().substitute(&Assignment::new().with(Var::Kp, int(0))).unwrap().is_zero());
        let s = qsum(1).pow(2).unwrap().substitute(&Assignment::new().with(Var::Q, int(2))).unwrap();
        assert_eq!(s, Scalar::frac(25, 4));
        let ratio = (&ep() - &em()).checked_div(&(&ep() + &em())).unwrap();
        let v = ratio.substitute(&Assignment::new().with(Var::Ep, int(1)).with(Var::Em, int(0))).unwrap();
        assert_eq!(v, Scalar::one());
    }

    #[test]
    fn substitution_errors() {
        let x = Scalar::var(Var::Kp).recip().unwrap();
        assert_eq!(x.substitute(&Assignment::new().with(Var::Kp, int(0))), Err(CoeffError::PoleAtZero(Var::Kp)));
        let y = Scalar::one().checked_div(&(&ep() - &em())).unwrap();
        let a = Assignment::new().with(Var::Ep, int(3)).with(Var::Em, int(3));
        assert_eq!(y.substitute(&a), Err(CoeffError::EvaluationSingular));
    }

    #[test]
    fn extract_order_examples() {
        let x = &kp() * &qsum(1);
        assert_eq!(x.extract_order(Var::Kp, 1).unwrap(), qsum(1));
        assert_eq!(rho().extract_order(Var::Kp, 1).unwrap(), &qsum(1).pow(2).unwrap() * &km());
        assert!(rho().extract_order(Var::Kp, 0).unwrap().is_zero());
        let bad = kp().recip().unwrap();
        assert_eq!(bad.extract_order(Var::Kp, 0), Err(CoeffError::NotPolynomialInVariable(Var::Kp)));
        assert_eq!((&kp() + &Scalar::one()).divide_limit(Var::Kp, 1), Err(CoeffError::NotDivisible(Var::Kp, 1)));
    }

    #[test]
    fn canonical_text() {
        let x = &(&Scalar::frac(1, 2) * &qinv()) * &kp() - &(&Scalar::frac(1, 2) * &q()) * &kp();
        assert_eq!(x.to_canonical(), "(1/2)*q^-1*kp + (-1/2)*q*kp");
        assert_eq!(Scalar::parse(&x.to_canonical()).unwrap(), x);
        let y = Scalar::one().checked_div(&(&ep() + &em())).unwrap();
        assert_eq!(y.to_canonical(), "(1) / (em + ep)");
        assert_eq!(Scalar::parse(&y.to_canonical()).unwrap(), y);
        assert_eq!(Scalar::zero().to_canonical(), "0");
    }

    #[test]
    fn exact_division_collapses_denominators() {
        let x = (&qpow2m1() * &ep()).checked_div(&qdiff(1)).unwrap();
        assert!(x.is_polynomial());
        assert_eq!(x, &q() * &ep());
    }

    fn qpow2m1() -> Scalar {
        &Scalar::qpow(2) - &Scalar::one()
    }
}
