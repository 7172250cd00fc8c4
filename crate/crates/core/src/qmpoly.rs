//! The ring `Q[E2, E4, E6]` of quasi-modular forms, its grading and depth
//! filtration, Ramanujan's derivation, q-expansions and dimension counts.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::sigma_table;
use crate::error::{QmxError, Result};
use crate::rational::{self, frac, int, Rational};
use crate::useries::USeries;

/// `E2^e2 * E4^e4 * E6^e6`. The derived order is lexicographic in
/// `(e2, e4, e6)`, which fixes basis order everywhere downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub e2: u32,
    pub e4: u32,
    pub e6: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { e2: 0, e4: 0, e6: 0 };

    pub fn new(e2: u32, e4: u32, e6: u32) -> Self {
        Monomial { e2, e4, e6 }
    }

    pub fn weight(&self) -> i64 {
        2 * self.e2 as i64 + 4 * self.e4 as i64 + 6 * self.e6 as i64
    }

    fn times(&self, o: &Monomial) -> Monomial {
        Monomial::new(self.e2 + o.e2, self.e4 + o.e4, self.e6 + o.e6)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("E2", self.e2), ("E4", self.e4), ("E6", self.e6)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<((u32, u32, u32), String)>", into = "Vec<((u32, u32, u32), String)>")]
pub struct QMPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl From<QMPoly> for Vec<((u32, u32, u32), String)> {
    fn from(p: QMPoly) -> Self {
        p.terms
            .iter()
            .map(|(m, c)| ((m.e2, m.e4, m.e6), rational::to_string(c)))
            .collect()
    }
}

impl TryFrom<Vec<((u32, u32, u32), String)>> for QMPoly {
    type Error = QmxError;

    fn try_from(v: Vec<((u32, u32, u32), String)>) -> Result<Self> {
        let mut p = QMPoly::zero();
        for ((i, j, k), c) in v {
            p.add_term(Monomial::new(i, j, k), rational::parse(&c)?);
        }
        Ok(p)
    }
}

impl fmt::Debug for QMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({})*{}", rational::to_string(c), m))
            .collect();
        write!(f, "{}", s.join(" + "))
    }
}

/// Parses sums and products of rationals, `E2`, `E4`, `E6` and `Delta`, with
/// `^` for non-negative integer powers and `/` by constants:
/// `"(E2*E4 - E6)/720"`, `"E4^3 - 1728*Delta"`. Accepts the `Display` form.
impl std::str::FromStr for QMPoly {
    type Err = QmxError;

    fn from_str(s: &str) -> Result<Self> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0 };
        let e = p.expr()?;
        match p.toks.get(p.pos) {
            None => Ok(e),
            Some(t) => Err(QmxError::Parse(format!("unexpected {t:?} in {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut d = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
                d.push(c);
                chars.next();
            }
            out.push(Tok::Num(d.parse().map_err(|_| QmxError::Parse(d.clone()))?));
        } else if c.is_ascii_alphabetic() {
            let mut d = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_alphanumeric()) {
                d.push(c);
                chars.next();
            }
            out.push(Tok::Ident(d));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            chars.next();
        } else {
            return Err(QmxError::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn eat(&mut self, op: char) -> bool {
        if self.toks.get(self.pos) == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<QMPoly> {
        let mut acc = if self.eat('-') { -&self.term()? } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<QMPoly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.power()?;
            } else if self.eat('/') {
                let d = self.power()?;
                let c = match d.terms.iter().next() {
                    Some((m, c)) if d.terms.len() == 1 && *m == Monomial::ONE => c.clone(),
                    _ => return Err(QmxError::Parse(format!("can only divide by a non-zero constant, not {d}"))),
                };
                acc = acc.scale(&(Rational::one() / c));
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<QMPoly> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        match self.toks.get(self.pos) {
            Some(Tok::Num(n)) => {
                let n = u32::try_from(n).map_err(|_| QmxError::Parse(format!("exponent {n} too large")))?;
                self.pos += 1;
                Ok(base.pow(n))
            }
            t => Err(QmxError::Parse(format!("expected an exponent, found {t:?}"))),
        }
    }

    fn atom(&mut self) -> Result<QMPoly> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match t {
            Some(Tok::Num(n)) => Ok(QMPoly::constant(Rational::from_integer(n))),
            Some(Tok::Ident(id)) => match id.as_str() {
                "E2" => Ok(QMPoly::e2()),
                "E4" => Ok(QMPoly::e4()),
                "E6" => Ok(QMPoly::e6()),
                "Delta" => Ok(delta_form()),
                _ => Err(QmxError::Parse(format!("unknown symbol {id}"))),
            },
            Some(Tok::Op('(')) => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(QmxError::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Some(Tok::Op('-')) => Ok(-&self.power()?),
            t => Err(QmxError::Parse(format!("unexpected {t:?}"))),
        }
    }
}

/// The three generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Eisenstein {
    E2,
    E4,
    E6,
}

impl QMPoly {
    pub fn zero() -> Self {
        QMPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(Monomial::ONE, c)
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn e2() -> Self {
        Self::monomial(Monomial::new(1, 0, 0), Rational::one())
    }

    pub fn e4() -> Self {
        Self::monomial(Monomial::new(0, 1, 0), Rational::one())
    }

    pub fn e6() -> Self {
        Self::monomial(Monomial::new(0, 0, 1), Rational::one())
    }

    pub fn generator(which: Eisenstein) -> Self {
        match which {
            Eisenstein::E2 => Self::e2(),
            Eisenstein::E4 => Self::e4(),
            Eisenstein::E6 => Self::e6(),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        QMPoly { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Weight of a non-zero homogeneous form. `Ok(None)` for zero.
    pub fn weight(&self) -> Result<Option<i64>> {
        let mut it = self.terms.keys().map(Monomial::weight);
        match it.next() {
            None => Ok(None),
            Some(w) => {
                if it.all(|x| x == w) {
                    Ok(Some(w))
                } else {
                    Err(QmxError::NotHomogeneous)
                }
            }
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.weight().is_ok()
    }

    /// Highest power of `E2`; `None` for the zero form.
    pub fn depth(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.e2).max()
    }

    pub fn is_e2_free(&self) -> bool {
        self.terms.keys().all(|m| m.e2 == 0)
    }

    pub fn partial_e2(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.e2 > 0 {
                out.add_term(Monomial::new(m.e2 - 1, m.e4, m.e6), c * int(m.e2 as i64));
            }
        }
        out
    }

    /// Ramanujan's derivation `D = q d/dq`, extended from
    /// `D E2 = (E2^2 - E4)/12`, `D E4 = (E2 E4 - E6)/3`, `D E6 = (E2 E6 - E4^2)/2`
    /// by the Leibniz rule.
    pub fn ramanujan_d(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.e2 > 0 {
                let k = c * int(m.e2 as i64) * frac(1, 12);
                out.add_term(Monomial::new(m.e2 + 1, m.e4, m.e6), k.clone());
                out.add_term(Monomial::new(m.e2 - 1, m.e4 + 1, m.e6), -k);
            }
            if m.e4 > 0 {
                let k = c * int(m.e4 as i64) * frac(1, 3);
                out.add_term(Monomial::new(m.e2 + 1, m.e4, m.e6), k.clone());
                out.add_term(Monomial::new(m.e2, m.e4 - 1, m.e6 + 1), -k);
            }
            if m.e6 > 0 {
                let k = c * int(m.e6 as i64) * frac(1, 2);
                out.add_term(Monomial::new(m.e2 + 1, m.e4, m.e6), k.clone());
                out.add_term(Monomial::new(m.e2, m.e4 + 2, m.e6 - 1), -k);
            }
        }
        out
    }

    pub fn ramanujan_d_n(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.ramanujan_d())
    }

    /// q-expansion to `q_prec` coefficients.
    pub fn expand(&self, q_prec: usize) -> USeries {
        Expander::new(q_prec).expand(self)
    }
}

impl Add for &QMPoly {
    type Output = QMPoly;
    fn add(self, rhs: &QMPoly) -> QMPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &QMPoly {
    type Output = QMPoly;
    fn sub(self, rhs: &QMPoly) -> QMPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &QMPoly {
    type Output = QMPoly;
    fn neg(self) -> QMPoly {
        QMPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

impl Mul for &QMPoly {
    type Output = QMPoly;
    fn mul(self, rhs: &QMPoly) -> QMPoly {
        let mut out = QMPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

impl Add for QMPoly {
    type Output = QMPoly;
    fn add(self, rhs: QMPoly) -> QMPoly {
        &self + &rhs
    }
}

impl Sub for QMPoly {
    type Output = QMPoly;
    fn sub(self, rhs: QMPoly) -> QMPoly {
        &self - &rhs
    }
}

impl Mul for QMPoly {
    type Output = QMPoly;
    fn mul(self, rhs: QMPoly) -> QMPoly {
        &self * &rhs
    }
}

/// q-expansion of an Eisenstein generator to `q_prec` coefficients.
pub fn eisenstein(which: Eisenstein, q_prec: usize) -> USeries {
    let (k, mult) = match which {
        Eisenstein::E2 => (1, -24),
        Eisenstein::E4 => (3, 240),
        Eisenstein::E6 => (5, -504),
    };
    let sig = sigma_table(k, q_prec.saturating_sub(1));
    let mult = BigInt::from(mult);
    USeries::from_q_coeffs((0..q_prec).map(|n| {
        if n == 0 {
            Rational::one()
        } else {
            Rational::from_integer(&sig[n] * &mult)
        }
    }))
}

/// `Delta = (E4^3 - E6^2) / 1728`.
pub fn delta_form() -> QMPoly {
    (&QMPoly::e4().pow(3) - &QMPoly::e6().pow(2)).scale(&frac(1, 1728))
}

/// Expands many polynomials at one precision, caching generator powers.
pub struct Expander {
    q_prec: usize,
    pows: [Vec<USeries>; 3],
}

impl Expander {
    pub fn new(q_prec: usize) -> Self {
        let base = [Eisenstein::E2, Eisenstein::E4, Eisenstein::E6]
            .map(|e| vec![USeries::one(2 * q_prec as i64), eisenstein(e, q_prec)]);
        Expander { q_prec, pows: base }
    }

    pub fn q_prec(&self) -> usize {
        self.q_prec
    }

    fn power(&mut self, g: usize, e: u32) -> &USeries {
        let list = &mut self.pows[g];
        while list.len() <= e as usize {
            let next = &list[list.len() - 1] * &list[1];
            list.push(next);
        }
        &list[e as usize]
    }

    pub fn expand_monomial(&mut self, m: &Monomial) -> USeries {
        let a = self.power(0, m.e2).clone();
        let b = self.power(1, m.e4).clone();
        let c = self.power(2, m.e6).clone();
        &(&a * &b) * &c
    }

    pub fn expand(&mut self, f: &QMPoly) -> USeries {
        let mut out = USeries::zero(2 * self.q_prec as i64);
        for (m, c) in &f.terms {
            let s = self.expand_monomial(m).scale(c);
            out = &out + &s;
        }
        out
    }
}

/// `d(w) = dim M_w` for level one.
pub fn dim_modular(w: i64) -> i64 {
    if w < 0 || w % 2 != 0 {
        0
    } else if w % 12 == 2 {
        w / 12
    } else {
        w / 12 + 1
    }
}

/// `delta_l(w) = sum_{i=0}^{l} d(w - 2i)`, the dimension of forms of weight
/// `w` and depth at most `l`.
pub fn dim_qm(l: u32, w: i64) -> i64 {
    (0..=l as i64).map(|i| dim_modular(w - 2 * i)).sum()
}

/// `kappa_l(w) = d((l+1)w) - delta_l(w)`.
pub fn kappa(l: u32, w: i64) -> i64 {
    dim_modular((l as i64 + 1) * w) - dim_qm(l, w)
}

/// The stable value `kappa_l = kappa_l(2l + 12)`. Panics if the trivial
/// bound `0 <= kappa_l <= (3+l)(4+l)/6` fails, which would mean the dimension
/// formulas are wrong.
pub fn kappa_stable(l: u32) -> i64 {
    let k = kappa(l, 2 * l as i64 + 12);
    let bound = (3 + l as i64) * (4 + l as i64) / 6;
    assert!((0..=bound).contains(&k), "kappa_{l} = {k} outside [0, {bound}]");
    k
}

/// Number of `(i, j, k)` in `N^3` with `i + 2j + 3k = n`; `a(0) = 1`,
/// `a(n) = 0` for negative `n`.
pub fn a_count(n: i64) -> i64 {
    if n < 0 {
        return 0;
    }
    let mut count = 0;
    for k in 0..=n / 3 {
        count += (n - 3 * k) / 2 + 1;
    }
    count
}

/// The same count with the literal "zero for n <= 0" convention.
pub fn a_count_literal(n: i64) -> i64 {
    if n <= 0 {
        0
    } else {
        a_count(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    pub w: i64,
    pub l: u32,
    pub d: i64,
    pub delta: i64,
    pub kappa_w: i64,
    pub kappa_stable: i64,
}

pub fn dim_report(l: u32, w: i64) -> DimReport {
    DimReport {
        w,
        l,
        d: dim_modular(w),
        delta: dim_qm(l, w),
        kappa_w: kappa(l, w),
        kappa_stable: kappa_stable(l),
    }
}

/// Monomials `E2^i E4^j E6^k` of weight `w` with `i <= l`, in lexicographic
/// order of `(i, j, k)`.
pub fn basis_monomials(l: u32, w: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if w < 0 || w % 2 != 0 {
        return out;
    }
    for i in 0..=l as i64 {
        let rest = w - 2 * i;
        if rest < 0 {
            break;
        }
        for j in 0..=rest / 4 {
            let r = rest - 4 * j;
            if r % 6 == 0 {
                out.push(Monomial::new(i as u32, j as u32, (r / 6) as u32));
            }
        }
    }
    out
}

pub fn monomial_basis(l: u32, w: i64) -> Vec<QMPoly> {
    basis_monomials(l, w)
        .into_iter()
        .map(|m| QMPoly::monomial(m, Rational::one()))
        .collect()
}
