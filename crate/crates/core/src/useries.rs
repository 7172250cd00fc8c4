//! Truncated Laurent series in the uniformiser `u`, where `u^2 = q`.
//!
//! A [`USeries`] stores its non-zero coefficients sparsely, keyed by the
//! exponent of `u`, together with a precision bound `prec`: every coefficient
//! at an exponent `< prec` is known exactly, nothing is claimed beyond it.
//! q-series are simply u-series supported on even exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{QmxError, Result};
use crate::rational::{self, Rational};

/// Order of vanishing. `Infinite` is reported for a series that is zero to
/// its precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct USeries {
    coeffs: BTreeMap<i64, Rational>,
    prec: i64,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    prec: i64,
    coeffs: Vec<(i64, String)>,
}

impl From<USeries> for SeriesRepr {
    fn from(s: USeries) -> Self {
        SeriesRepr {
            prec: s.prec,
            coeffs: s.coeffs.iter().map(|(e, c)| (*e, rational::to_string(c))).collect(),
        }
    }
}

impl TryFrom<SeriesRepr> for USeries {
    type Error = QmxError;

    fn try_from(r: SeriesRepr) -> Result<Self> {
        let mut s = USeries::zero(r.prec);
        for (e, c) in r.coeffs {
            if e >= r.prec {
                return Err(QmxError::Parse(format!("exponent {e} not below prec {}", r.prec)));
            }
            let c = rational::parse(&c)?;
            s.add_term(e, c);
        }
        Ok(s)
    }
}

impl fmt::Debug for USeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for USeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})u^{}", rational::to_string(c), e)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(u^{})", self.prec)
    }
}

impl USeries {
    pub fn zero(prec: i64) -> Self {
        USeries { coeffs: BTreeMap::new(), prec }
    }

    pub fn one(prec: i64) -> Self {
        Self::monomial(0, Rational::one(), prec)
    }

    /// `c * u^exp + O(u^prec)`.
    pub fn monomial(exp: i64, c: Rational, prec: i64) -> Self {
        let mut s = Self::zero(prec);
        s.add_term(exp, c);
        s
    }

    /// Builds `sum_n coeffs[n] q^n + O(q^{coeffs.len()})`.
    pub fn from_q_coeffs<I, T>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<Rational>,
    {
        let cs: Vec<Rational> = coeffs.into_iter().map(Into::into).collect();
        let prec = 2 * cs.len() as i64;
        Self::from_terms(cs.into_iter().enumerate().map(|(n, c)| (2 * n as i64, c)), prec)
    }

    /// Builds a series from `(u_exponent, coefficient)` pairs.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Rational)>, prec: i64) -> Self {
        let mut s = Self::zero(prec);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Adds `c u^e`; silently dropped when `e >= prec`.
    pub fn add_term(&mut self, e: i64, c: Rational) {
        if e >= self.prec || c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(e) {
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

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// The q-adic precision, i.e. `ceil(prec / 2)`.
    pub fn q_prec(&self) -> i64 {
        (self.prec + 1).div_euclid(2)
    }

    pub fn coeff(&self, e: i64) -> Rational {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `q^n`.
    pub fn q_coeff(&self, n: i64) -> Rational {
        self.coeff(2 * n)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Lowest exponent with a non-zero coefficient, in u-units.
    pub fn valuation(&self) -> Valuation {
        match self.coeffs.keys().next() {
            Some(&e) => Valuation::Finite(e),
            None => Valuation::Infinite,
        }
    }

    /// Valuation in q-units. Fails if the leading exponent is odd.
    pub fn q_valuation(&self) -> Result<Valuation> {
        match self.valuation() {
            Valuation::Finite(e) if e % 2 != 0 => Err(QmxError::OutOfRange(format!(
                "leading exponent u^{e} is not an integral power of q"
            ))),
            Valuation::Finite(e) => Ok(Valuation::Finite(e / 2)),
            Valuation::Infinite => Ok(Valuation::Infinite),
        }
    }

    pub fn leading(&self) -> Option<(i64, &Rational)> {
        self.coeffs.iter().next().map(|(e, c)| (*e, c))
    }

    /// True if every stored exponent is even.
    pub fn is_q_series(&self) -> bool {
        self.coeffs.keys().all(|e| e % 2 == 0)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        USeries {
            coeffs: self.coeffs.range(..prec).map(|(e, c)| (*e, c.clone())).collect(),
            prec,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.prec);
        }
        USeries {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
            prec: self.prec,
        }
    }

    /// Multiplication by `u^shift`; moves the precision bound along.
    pub fn shift(&self, shift: i64) -> Self {
        USeries {
            coeffs: self.coeffs.iter().map(|(e, v)| (e + shift, v.clone())).collect(),
            prec: self.prec + shift,
        }
    }

    /// The derivation `D = q d/dq`, which sends `u^m` to `(m/2) u^m`.
    pub fn derive(&self) -> Self {
        let mut out = Self::zero(self.prec);
        for (e, c) in &self.coeffs {
            out.add_term(*e, c * Rational::new(BigInt::from(*e), BigInt::from(2)));
        }
        out
    }

    pub fn derive_n(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |s, _| s.derive())
    }

    /// Valuation used for precision bookkeeping: a series that is zero to its
    /// precision is only known to vanish up to `prec`.
    fn effective_valuation(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.prec)
    }

    /// Multiplicative inverse. The leading exponent negates and the precision
    /// drops to `prec - 2v`.
    pub fn invert(&self) -> Result<Self> {
        let (v, lead) = match self.leading() {
            Some((v, c)) => (v, c.clone()),
            None => return Err(QmxError::NonInvertible("zero series".into())),
        };
        let rel = self.prec - v;
        let h = self.normalized_tail(v, &lead);
        let mut g: Vec<Rational> = Vec::with_capacity(rel as usize);
        g.push(Rational::one());
        for m in 1..rel {
            let mut acc = Rational::zero();
            for (j, hj) in &h {
                if *j > m {
                    break;
                }
                acc -= hj * &g[(m - j) as usize];
            }
            g.push(acc);
        }
        let inv_lead = lead.recip();
        let terms = g.into_iter().enumerate().map(|(i, c)| (i as i64 - v, c * &inv_lead));
        Ok(Self::from_terms(terms, rel - v))
    }

    /// `(self / (lead u^v)) - 1` as a sparse list of `(relative exponent, coeff)`.
    fn normalized_tail(&self, v: i64, lead: &Rational) -> Vec<(i64, Rational)> {
        self.coeffs
            .iter()
            .skip(1)
            .map(|(e, c)| (e - v, c / lead))
            .collect()
    }

    /// The unique square root whose leading coefficient is positive.
    ///
    /// Requires an even leading exponent and a leading coefficient that is the
    /// square of a rational.
    pub fn sqrt_normalized(&self) -> Result<Self> {
        let (v, lead) = match self.leading() {
            Some((v, c)) => (v, c.clone()),
            None => return Err(QmxError::NotASquare("zero series".into())),
        };
        if v % 2 != 0 {
            return Err(QmxError::NotASquare(format!("leading exponent u^{v} is odd")));
        }
        let root_lead = rational::sqrt_exact(&lead).ok_or_else(|| {
            QmxError::NotASquare(format!(
                "leading coefficient {} is not a rational square",
                rational::to_string(&lead)
            ))
        })?;
        let rel = self.prec - v;
        let h = self.normalized_tail(v, &lead);
        let mut hd = vec![Rational::zero(); rel.max(0) as usize];
        for (j, c) in h {
            hd[j as usize] = c;
        }
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let mut g: Vec<Rational> = Vec::with_capacity(rel as usize);
        g.push(Rational::one());
        for m in 1..rel as usize {
            let mut acc = hd[m].clone();
            for j in 1..m {
                if !g[j].is_zero() && !g[m - j].is_zero() {
                    acc -= &g[j] * &g[m - j];
                }
            }
            g.push(acc * &half);
        }
        let terms = g.into_iter().enumerate().map(|(i, c)| (i as i64 + v / 2, c * &root_lead));
        Ok(Self::from_terms(terms, rel + v / 2))
    }

    /// `self^r` for a series of the form `1 + O(u)`, `r` any rational.
    pub fn pow_unit(&self, r: &Rational) -> Result<Self> {
        match self.leading() {
            Some((0, c)) if c.is_one() => {}
            _ => {
                return Err(QmxError::OutOfRange(
                    "rational powers need a series of the form 1 + O(u)".into(),
                ))
            }
        }
        let n = self.prec.max(0) as usize;
        let mut f = vec![Rational::zero(); n];
        for (e, c) in self.coeffs.range(1..) {
            f[*e as usize] = c.clone();
        }
        let mut g: Vec<Rational> = Vec::with_capacity(n);
        g.push(Rational::one());
        for m in 1..n {
            let mut acc = Rational::zero();
            for j in 1..=m {
                if f[j].is_zero() {
                    continue;
                }
                let w = r * Rational::from_integer(BigInt::from(j))
                    - Rational::from_integer(BigInt::from(m - j));
                acc += w * &f[j] * &g[m - j];
            }
            g.push(acc / Rational::from_integer(BigInt::from(m)));
        }
        Ok(Self::from_terms(
            g.into_iter().enumerate().map(|(i, c)| (i as i64, c)),
            self.prec,
        ))
    }

    /// Integer power by repeated squaring; negative exponents invert first.
    /// `a^0` is `1` carried at the relative precision of `a`.
    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.invert()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut result: Option<USeries> = None;
        let mut power = base;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => power.clone(),
                    Some(r) => &r * &power,
                });
            }
            e >>= 1;
            if e > 0 {
                power = &power * &power;
            }
        }
        Ok(result.unwrap_or_else(|| Self::one(self.prec - self.effective_valuation())))
    }

    /// Least common multiple of all coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        rational::lcm_denominators(self.coeffs.values())
    }

    pub fn all_integral(&self) -> bool {
        self.coeffs.values().all(rational::is_integer)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// Common-denominator integer view: coefficients `num[i]` of
    /// `u^{offset+i}` for `offset <= e < offset + len`, and the denominator.
    fn integer_terms(&self, below: i64) -> (Vec<(i64, BigInt)>, BigInt) {
        let den = rational::lcm_denominators(self.coeffs.range(..below).map(|(_, c)| c));
        let terms = self
            .coeffs
            .range(..below)
            .map(|(e, c)| {
                let scale = &den / c.denom();
                (*e, c.numer() * scale)
            })
            .collect();
        (terms, den)
    }
}

impl Add for &USeries {
    type Output = USeries;

    fn add(self, rhs: &USeries) -> USeries {
        let prec = self.prec.min(rhs.prec);
        let mut out = self.truncate(prec);
        for (e, c) in rhs.coeffs.range(..prec) {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &USeries {
    type Output = USeries;

    fn sub(self, rhs: &USeries) -> USeries {
        let prec = self.prec.min(rhs.prec);
        let mut out = self.truncate(prec);
        for (e, c) in rhs.coeffs.range(..prec) {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &USeries {
    type Output = USeries;

    fn neg(self) -> USeries {
        USeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            prec: self.prec,
        }
    }
}

impl Mul for &USeries {
    type Output = USeries;

    /// Cauchy product. A coefficient at exponent `e` is exact as long as
    /// `e < min(prec_a + val_b, prec_b + val_a)`, which becomes the result
    /// precision.
    fn mul(self, rhs: &USeries) -> USeries {
        let va = self.effective_valuation();
        let vb = rhs.effective_valuation();
        let prec = (self.prec + vb).min(rhs.prec + va);
        if self.is_zero() || rhs.is_zero() || prec <= va + vb {
            return USeries::zero(prec);
        }
        let (ta, da) = self.integer_terms(prec - vb);
        let (tb, db) = rhs.integer_terms(prec - va);
        let base = va + vb;
        let len = (prec - base) as usize;
        let mut acc = vec![BigInt::zero(); len];
        for (ea, ca) in &ta {
            let off_a = ea - va;
            for (eb, cb) in &tb {
                let idx = off_a + (eb - vb);
                if idx as usize >= len {
                    break;
                }
                acc[idx as usize] += ca * cb;
            }
        }
        let den = da * db;
        let mut coeffs = BTreeMap::new();
        for (i, c) in acc.into_iter().enumerate() {
            if !c.is_zero() {
                coeffs.insert(base + i as i64, Rational::new(c, den.clone()));
            }
        }
        USeries { coeffs, prec }
    }
}

impl Add for USeries {
    type Output = USeries;
    fn add(self, rhs: USeries) -> USeries {
        &self + &rhs
    }
}

impl Sub for USeries {
    type Output = USeries;
    fn sub(self, rhs: USeries) -> USeries {
        &self - &rhs
    }
}

impl Mul for USeries {
    type Output = USeries;
    fn mul(self, rhs: USeries) -> USeries {
        &self * &rhs
    }
}

impl Neg for USeries {
    type Output = USeries;
    fn neg(self) -> USeries {
        -&self
    }
}

/// True when `a` and `b` agree at every exponent below both precisions.
pub fn agree(a: &USeries, b: &USeries) -> bool {
    (a - b).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn q(coeffs: &[i64]) -> USeries {
        USeries::from_q_coeffs(coeffs.iter().map(|&c| int(c)))
    }

    /// Eisenstein series from their divisor-sum definition, kept separate
    /// from the library's own constructors.
    fn eis(mult: i64, k: u32, n: usize) -> USeries {
        let mut c = vec![BigInt::one()];
        for m in 1..n {
            let s: i64 = (1..=m as i64).filter(|d| m as i64 % d == 0).map(|d| d.pow(k)).sum();
            c.push(BigInt::from(mult * s));
        }
        USeries::from_q_coeffs(c.into_iter().map(Rational::from_integer))
    }

    /// q * prod (1 - q^n)^24, expanded directly.
    fn delta_product(n: usize) -> Vec<BigInt> {
        let mut p = vec![BigInt::zero(); n];
        p[0] = BigInt::one();
        for m in 1..n {
            for _ in 0..24 {
                for i in (m..n).rev() {
                    let t = p[i - m].clone();
                    p[i] -= t;
                }
            }
        }
        let mut out = vec![BigInt::zero(); n];
        out[1..n].clone_from_slice(&p[..n - 1]);
        out
    }

    #[test]
    fn add_examples() {
        let s = &q(&[1, 1, 0]) + &q(&[1, -1]);
        assert_eq!(s, q(&[2, 0]));
        assert_eq!(s.prec(), 4);
        let a = q(&[3, 0, 5]);
        assert_eq!(&a + &USeries::zero(a.prec()), a);
        let s = &eis(240, 3, 6) + &eis(-504, 5, 6);
        assert_eq!(s.q_coeff(1), int(-264));
    }

    #[test]
    fn mul_examples() {
        let u = USeries::monomial(1, int(1), 10);
        let uu = &u * &u;
        assert_eq!(uu.coeff(2), int(1));
        assert_eq!(uu.num_terms(), 1);
        assert_eq!(&q(&[1, 1, 0, 0]) * &q(&[1, -1, 0, 0]), q(&[1, 0, -1, 0]));

        let e4 = eis(240, 3, 8);
        let e6 = eis(-504, 5, 8);
        let d = &(&(&e4 * &e4) * &e4) - &(&e6 * &e6);
        assert_eq!(d.q_coeff(0), int(0));
        assert_eq!(d.q_coeff(1), int(1728));
        assert_eq!(d.q_coeff(2), int(-41472));
        let tau = delta_product(8);
        for n in 0..8 {
            assert_eq!(d.q_coeff(n as i64), Rational::from_integer(&tau[n] * 1728));
        }
        assert_eq!(d.q_valuation().unwrap(), Valuation::Finite(1));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(USeries::one(8).invert().unwrap(), USeries::one(8));
        let inv = q(&[1, -1, 0, 0, 0]).invert().unwrap();
        assert_eq!(inv, q(&[1, 1, 1, 1, 1]));
        assert!(USeries::zero(5).invert().is_err());

        let delta = USeries::from_q_coeffs(delta_product(12).into_iter().map(Rational::from_integer));
        let root = delta.sqrt_normalized().unwrap();
        let inv = root.invert().unwrap();
        assert_eq!(inv.coeff(-1), int(1));
        assert_eq!(inv.coeff(1), int(12));
        assert_eq!(inv.valuation(), Valuation::Finite(-1));
        assert!(agree(&(&inv * &root), &USeries::one(inv.prec())));
    }

    #[test]
    fn sqrt_examples() {
        let qq = USeries::monomial(2, int(1), 10);
        let r = qq.sqrt_normalized().unwrap();
        assert_eq!(r.coeff(1), int(1));
        assert_eq!(r.num_terms(), 1);

        let delta = USeries::from_q_coeffs(delta_product(10).into_iter().map(Rational::from_integer));
        let r = delta.sqrt_normalized().unwrap();
        assert_eq!(r.coeff(1), int(1));
        assert_eq!(r.coeff(3), int(-12));
        assert!(agree(&(&r * &r), &delta));

        assert_eq!(q(&[1, 2, 1, 0, 0]).sqrt_normalized().unwrap(), q(&[1, 1, 0, 0, 0]));
        assert!(q(&[2, 1]).sqrt_normalized().is_err());
        assert!(USeries::monomial(1, int(1), 5).sqrt_normalized().is_err());
    }

    #[test]
    fn pow_unit_matches_sqrt_and_integer_powers() {
        let delta = USeries::from_q_coeffs(delta_product(14).into_iter().map(Rational::from_integer));
        let unit = delta.shift(-2);
        let half = unit.pow_unit(&frac(1, 2)).unwrap();
        assert_eq!(half.shift(1), delta.sqrt_normalized().unwrap().truncate(half.prec() + 1));
        let cube = unit.pow_unit(&int(3)).unwrap();
        assert!(agree(&cube, &unit.pow(3).unwrap()));
        let minus = unit.pow_unit(&int(-1)).unwrap();
        assert!(agree(&minus, &unit.invert().unwrap()));
    }

    #[test]
    fn derive_examples() {
        let q3 = USeries::monomial(6, int(1), 20);
        assert_eq!(q3.derive().coeff(6), int(3));
        let u = USeries::monomial(1, int(1), 20);
        assert_eq!(u.derive().coeff(1), frac(1, 2));
        assert!(USeries::one(10).derive().is_zero());
    }

    #[test]
    fn valuation_examples() {
        let s = USeries::from_terms([(6, int(1)), (10, int(1))], 20);
        assert_eq!(s.q_valuation().unwrap(), Valuation::Finite(3));
        assert_eq!(USeries::zero(10).valuation(), Valuation::Infinite);
    }

    #[test]
    fn serde_shape() {
        let s = USeries::from_terms([(-1, int(1)), (1, frac(-3, 2))], 5);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"prec":5,"coeffs":[[-1,"1"],[1,"-3/2"]]}"#);
        let back: USeries = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<USeries>(r#"{"prec":2,"coeffs":[[3,"1"]]}"#).is_err());
    }

    fn series_strategy(min_exp: i64, len: usize) -> impl Strategy<Value = USeries> {
        prop::collection::vec((-20i64..20, 1i64..5), len).prop_map(move |cs| {
            let prec = min_exp + cs.len() as i64;
            USeries::from_terms(
                cs.into_iter()
                    .enumerate()
                    .map(|(i, (n, d))| (min_exp + i as i64, frac(n, d))),
                prec,
            )
        })
    }

    fn unit_strategy() -> impl Strategy<Value = USeries> {
        (series_strategy(1, 10), 1i64..6, -3i64..3).prop_map(|(tail, c, v)| {
            let lead = USeries::monomial(0, int(c), tail.prec());
            (&lead + &tail).shift(v)
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in series_strategy(-2, 10), b in series_strategy(0, 10), c in series_strategy(1, 10)) {
            prop_assert!(agree(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
            prop_assert!(agree(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
            prop_assert!(agree(&(&a * &b), &(&b * &a)));
        }

        #[test]
        fn invert_is_inverse(a in unit_strategy()) {
            let inv = a.invert().unwrap();
            let p = &a * &inv;
            prop_assert!(agree(&p, &USeries::one(p.prec())));
            prop_assert_eq!(inv.valuation().finite(), a.valuation().finite().map(|v| -v));
        }

        #[test]
        fn sqrt_squares_back(a in unit_strategy()) {
            let sq = &a * &a;
            let r = sq.sqrt_normalized().unwrap();
            prop_assert!(agree(&(&r * &r), &sq));
            prop_assert!(r.leading().unwrap().1.is_positive());
        }

        #[test]
        fn leibniz(a in series_strategy(-3, 12), b in series_strategy(0, 12)) {
            let lhs = (&a * &b).derive();
            let rhs = &(&a.derive() * &b) + &(&a * &b.derive());
            prop_assert!(agree(&lhs, &rhs));
        }

        #[test]
        fn valuation_additive(a in unit_strategy(), b in unit_strategy()) {
            let va = a.valuation().finite().unwrap();
            let vb = b.valuation().finite().unwrap();
            prop_assert_eq!((&a * &b).valuation(), Valuation::Finite(va + vb));
        }
    }
}
