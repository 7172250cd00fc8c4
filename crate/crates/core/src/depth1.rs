//! Depth-one extremal forms through the hypergeometric-type recursion
//!
//! ```text
//! n (n + 2x) c_n(x) = 240 x^2 sum_{i=1..n} sigma_3(i) c_{n-i}(x),   c_0 = 1,
//! ```
//!
//! and the operator identities behind it.
//!
//! Operators live in the Ore algebra generated over quasi-modular
//! coefficients by `D = q d/dq` and the shift `sigma`. They act on elements
//! `sum_m Y^m a_m(u)` where `Y` stands for `q^{k/2}` (so `D(Y) = (k/2) Y`) and
//! `sigma(Y) = Y u`, `sigma(k) = k + 1`. Identities that are rational in `k`
//! are checked exactly at rational sample points instead of over `Q(k)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{factor, sigma_table, strip_primes_below};
use crate::error::{QmxError, Result};
use crate::extremal::{numax_and_form, ExtremalConfig};
use crate::qmpoly::{delta_form, Eisenstein, Expander, QMPoly};
use crate::rational::{self, frac, int, Rational};
use crate::useries::USeries;

// ---------------------------------------------------------------------------
// The recursion

/// `[c_0(x), ..., c_{n_max}(x)]`.
pub fn c_sequence(x: &Rational, n_max: usize) -> Result<Vec<Rational>> {
    let sig = sigma_table(3, n_max);
    let scale = int(240) * x * x;
    let mut c = Vec::with_capacity(n_max + 1);
    c.push(Rational::one());
    for n in 1..=n_max {
        let den = int(n as i64) * (int(n as i64) + x * int(2));
        if den.is_zero() {
            return Err(QmxError::Pole(format!(
                "c_{n}(x) at x = {}: n + 2x = 0",
                rational::to_string(x)
            )));
        }
        let mut acc = Rational::zero();
        if !scale.is_zero() {
            for i in 1..=n {
                acc += Rational::from_integer(sig[i].clone()) * &c[n - i];
            }
        }
        c.push(&scale * acc / den);
    }
    Ok(c)
}

pub fn c_coeff(x: &Rational, n: usize) -> Result<Rational> {
    Ok(c_sequence(x, n)?.pop().unwrap_or_else(Rational::one))
}

/// `sum_{n < q_prec} c_n(x) q^n`.
fn c_series(x: &Rational, q_prec: usize) -> Result<USeries> {
    let c = c_sequence(x, q_prec.saturating_sub(1))?;
    Ok(USeries::from_terms(
        c.into_iter().enumerate().map(|(n, v)| (2 * n as i64, v)),
        2 * q_prec as i64,
    ))
}

/// `g_i = u^i sum_j c_j(i/2) q^j`, which equals `f_{1,6i} Delta^{-i/2}`.
pub fn g_series(i: u32, q_prec: usize) -> Result<USeries> {
    Ok(c_series(&frac(i as i64, 2), q_prec)?.shift(i as i64))
}

/// `mu(k) = (1+k)(2+k) / (12 (7+6k)(11+6k))`.
pub fn mu(k: &Rational) -> Result<Rational> {
    KFn::mu().eval(k)
}

// ---------------------------------------------------------------------------
// Rational functions of k

/// `num(k) / den(k)` with polynomial coefficients listed from degree 0 up.
#[derive(Clone, PartialEq, Eq)]
pub struct KFn {
    num: Vec<Rational>,
    den: Vec<Rational>,
}

impl fmt::Debug for KFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: &[Rational]| {
            p.iter().map(rational::to_string).collect::<Vec<_>>().join(",")
        };
        write!(f, "[{}]/[{}]", show(&self.num), show(&self.den))
    }
}

fn poly_eval(p: &[Rational], k: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * k + c)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

/// `p(k + s)` by Horner's scheme in the shifted variable.
fn poly_shift(p: &[Rational], s: i64) -> Vec<Rational> {
    let lin = [int(s), int(1)];
    p.iter().rev().fold(Vec::new(), |acc, c| poly_add(&poly_mul(&acc, &lin), std::slice::from_ref(c)))
}

impl KFn {
    pub fn poly(coeffs: &[Rational]) -> Self {
        KFn { num: coeffs.to_vec(), den: vec![int(1)] }
    }

    pub fn constant(c: Rational) -> Self {
        Self::poly(&[c])
    }

    pub fn ratio(num: &[Rational], den: &[Rational]) -> Self {
        KFn { num: num.to_vec(), den: den.to_vec() }
    }

    /// The coefficient `mu(k)` of the contiguity operator.
    pub fn mu() -> Self {
        KFn::ratio(&[int(2), int(3), int(1)], &[int(924), int(1296), int(432)])
    }

    pub fn eval(&self, k: &Rational) -> Result<Rational> {
        let d = poly_eval(&self.den, k);
        if d.is_zero() {
            return Err(QmxError::Pole(format!(
                "coefficient {self:?} at k = {}",
                rational::to_string(k)
            )));
        }
        Ok(poly_eval(&self.num, k) / d)
    }

    /// `k -> k + s`.
    pub fn shift(&self, s: i64) -> Self {
        KFn { num: poly_shift(&self.num, s), den: poly_shift(&self.den, s) }
    }

    pub fn mul(&self, o: &KFn) -> Self {
        KFn { num: poly_mul(&self.num, &o.num), den: poly_mul(&self.den, &o.den) }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        KFn { num: self.num.iter().map(|x| x * c).collect(), den: self.den.clone() }
    }
}

// ---------------------------------------------------------------------------
// Series context

/// Shared q-expansions at a fixed precision: quasi-modular polynomials and
/// powers of `Delta^{-1/2}`.
pub struct SeriesCtx {
    q_prec: usize,
    expander: Mutex<Expander>,
    delta_pows: Mutex<HashMap<i64, USeries>>,
    inv_sqrt_delta: USeries,
    sqrt_delta: USeries,
}

impl SeriesCtx {
    pub fn new(q_prec: usize) -> Result<Self> {
        let mut expander = Expander::new(q_prec);
        let delta = expander.expand(&delta_form());
        let sqrt_delta = delta.sqrt_normalized()?;
        let inv_sqrt_delta = sqrt_delta.invert()?;
        Ok(SeriesCtx {
            q_prec,
            expander: Mutex::new(expander),
            delta_pows: Mutex::new(HashMap::new()),
            inv_sqrt_delta,
            sqrt_delta,
        })
    }

    pub fn q_prec(&self) -> usize {
        self.q_prec
    }

    pub fn expand(&self, p: &QMPoly) -> USeries {
        self.expander.lock().expect("expander lock").expand(p)
    }

    pub fn eisenstein(&self, which: Eisenstein) -> USeries {
        self.expand(&QMPoly::generator(which))
    }

    /// `Delta^{1/2} = u - 12 u^3 + ...`.
    pub fn sqrt_delta(&self) -> &USeries {
        &self.sqrt_delta
    }

    /// `Delta^{-1/2} = u^{-1} + 12 u + ...`.
    pub fn inv_sqrt_delta(&self) -> &USeries {
        &self.inv_sqrt_delta
    }

    /// `Delta^{-m/2}` for any integer `m`.
    pub fn delta_pow(&self, m: i64) -> Result<USeries> {
        if let Some(s) = self.delta_pows.lock().expect("cache lock").get(&m) {
            return Ok(s.clone());
        }
        let s = self.inv_sqrt_delta.pow(m)?;
        self.delta_pows.lock().expect("cache lock").insert(m, s.clone());
        Ok(s)
    }

    /// `(Delta / q)^r`, a unit series, for rational `r`.
    pub fn delta_over_q_pow(&self, r: &Rational) -> Result<USeries> {
        self.sqrt_delta.shift(-1).pow(2)?.pow_unit(r)
    }
}

// ---------------------------------------------------------------------------
// Coefficients and operators

/// `kf(k) * poly * Delta^{-m/2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTerm {
    pub kf: KFn,
    pub poly: QMPoly,
    pub half_delta: i64,
}

/// A finite sum of [`CoeffTerm`]s; a coefficient of the Ore algebra.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OreCoeff {
    pub terms: Vec<CoeffTerm>,
}

impl OreCoeff {
    pub fn new(kf: KFn, poly: QMPoly, half_delta: i64) -> Self {
        OreCoeff { terms: vec![CoeffTerm { kf, poly, half_delta }] }
    }

    pub fn scalar(kf: KFn) -> Self {
        Self::new(kf, QMPoly::one(), 0)
    }

    pub fn one() -> Self {
        Self::scalar(KFn::constant(int(1)))
    }

    /// `sigma^s` acting on a coefficient: `k -> k + s`.
    pub fn shift(&self, s: i64) -> Self {
        OreCoeff {
            terms: self
                .terms
                .iter()
                .map(|t| CoeffTerm { kf: t.kf.shift(s), ..t.clone() })
                .collect(),
        }
    }

    /// `D` on a coefficient, using `D(Delta) = E2 Delta`.
    pub fn derive(&self) -> Self {
        let mut out = OreCoeff::default();
        for t in &self.terms {
            let half = frac(t.half_delta, 2);
            let poly = &t.poly.ramanujan_d() - &(&QMPoly::e2() * &t.poly).scale(&half);
            if !poly.is_zero() {
                out.terms.push(CoeffTerm { kf: t.kf.clone(), poly, half_delta: t.half_delta });
            }
        }
        out
    }

    pub fn mul(&self, o: &OreCoeff) -> Self {
        let mut out = OreCoeff::default();
        for a in &self.terms {
            for b in &o.terms {
                out.terms.push(CoeffTerm {
                    kf: a.kf.mul(&b.kf),
                    poly: &a.poly * &b.poly,
                    half_delta: a.half_delta + b.half_delta,
                });
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        OreCoeff {
            terms: self.terms.iter().map(|t| CoeffTerm { kf: t.kf.scale(c), ..t.clone() }).collect(),
        }
    }

    pub fn eval(&self, k: &Rational, ctx: &SeriesCtx) -> Result<USeries> {
        let mut acc: Option<USeries> = None;
        for t in &self.terms {
            let c = t.kf.eval(k)?;
            if c.is_zero() {
                continue;
            }
            let s = &ctx.expand(&t.poly).scale(&c) * &ctx.delta_pow(t.half_delta)?;
            acc = Some(match acc {
                None => s,
                Some(a) => &a + &s,
            });
        }
        Ok(acc.unwrap_or_else(|| USeries::zero(2 * ctx.q_prec() as i64)))
    }
}

/// `coeff * D^d * sigma^s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OreTerm {
    pub coeff: OreCoeff,
    pub d: u32,
    pub s: u32,
}

/// A finite sum of [`OreTerm`]s.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OreOperator {
    pub terms: Vec<OreTerm>,
}

fn binomial(n: u32, k: u32) -> Rational {
    (0..k).fold(int(1), |acc, i| acc * int((n - i) as i64) / int(i as i64 + 1))
}

impl OreOperator {
    pub fn term(coeff: OreCoeff, d: u32, s: u32) -> Self {
        OreOperator { terms: vec![OreTerm { coeff, d, s }] }
    }

    pub fn identity() -> Self {
        Self::term(OreCoeff::one(), 0, 0)
    }

    pub fn d() -> Self {
        Self::term(OreCoeff::one(), 1, 0)
    }

    pub fn sigma() -> Self {
        Self::term(OreCoeff::one(), 0, 1)
    }

    pub fn mul_coeff(c: OreCoeff) -> Self {
        Self::term(c, 0, 0)
    }

    pub fn add(&self, o: &OreOperator) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        OreOperator { terms }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        OreOperator {
            terms: self
                .terms
                .iter()
                .map(|t| OreTerm { coeff: t.coeff.scale(c), ..t.clone() })
                .collect(),
        }
    }

    pub fn sub(&self, o: &OreOperator) -> Self {
        self.add(&o.scale(&int(-1)))
    }

    /// The twist `Psi -> Psi^{(s)}`: every coefficient shifted `k -> k + s`,
    /// so that `Psi^{(s)} sigma^s = sigma^s Psi`.
    pub fn twist(&self, s: i64) -> Self {
        OreOperator {
            terms: self
                .terms
                .iter()
                .map(|t| OreTerm { coeff: t.coeff.shift(s), ..t.clone() })
                .collect(),
        }
    }

    /// `self * o`, normalised to the form `sum c D^d sigma^s` with
    /// `sigma c = sigma(c) sigma`, `D c = c D + D(c)` and `D sigma = sigma D`.
    pub fn compose(&self, o: &OreOperator) -> Self {
        let mut out = OreOperator::default();
        for a in &self.terms {
            for b in &o.terms {
                let mut inner = b.coeff.shift(a.s as i64);
                for i in 0..=a.d {
                    let c = a.coeff.mul(&inner).scale(&binomial(a.d, i));
                    out.terms.push(OreTerm { coeff: c, d: a.d - i + b.d, s: a.s + b.s });
                    inner = inner.derive();
                }
            }
        }
        out
    }

    /// Applies the operator to a family.
    pub fn apply(&self, x: &Family, ctx: &Arc<SeriesCtx>) -> Family {
        let op = self.clone();
        let x = x.clone();
        let ctx = Arc::clone(ctx);
        Family::new(move |k| op.apply_at(&x, k, &ctx))
    }

    /// `(c D^d sigma^s)(x)` at `k` is `c(k) D^d (sigma^s x)(k)`, where
    /// `(sigma^s x)(k)` twists `x(k + s)`.
    pub fn apply_at(&self, x: &Family, k: &Rational, ctx: &SeriesCtx) -> Result<OreElement> {
        let mut out = OreElement::zero(k.clone());
        let mut shifted: BTreeMap<u32, OreElement> = BTreeMap::new();
        for t in &self.terms {
            if !shifted.contains_key(&t.s) {
                let e = x.at(&(k + int(t.s as i64)))?.sigma_twist(t.s, k.clone());
                shifted.insert(t.s, e);
            }
            let mut e = shifted[&t.s].clone();
            for _ in 0..t.d {
                e = e.derive();
            }
            let c = t.coeff.eval(k, ctx)?;
            out = out.add(&e.mul_series(&c));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Elements and families

/// `sum_m Y^m parts[m]` at a fixed value of `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OreElement {
    pub parts: BTreeMap<i64, USeries>,
    pub k: Rational,
}

impl OreElement {
    pub fn zero(k: Rational) -> Self {
        OreElement { parts: BTreeMap::new(), k }
    }

    pub fn single(m: i64, s: USeries, k: Rational) -> Self {
        let mut parts = BTreeMap::new();
        parts.insert(m, s);
        OreElement { parts, k }
    }

    pub fn part(&self, m: i64) -> Option<&USeries> {
        self.parts.get(&m)
    }

    /// `D(Y^m a) = Y^m ((m k / 2) a + D a)`.
    pub fn derive(&self) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|(&m, a)| {
                let lam = int(m) * &self.k / int(2);
                (m, &a.scale(&lam) + &a.derive())
            })
            .collect();
        OreElement { parts, k: self.k.clone() }
    }

    /// `Y^m a -> Y^m u^{m s} a`, relabelled to parameter `k`.
    fn sigma_twist(&self, s: u32, k: Rational) -> Self {
        let parts = self.parts.iter().map(|(&m, a)| (m, a.shift(m * s as i64))).collect();
        OreElement { parts, k }
    }

    pub fn mul_series(&self, c: &USeries) -> Self {
        let parts = self.parts.iter().map(|(&m, a)| (m, a * c)).collect();
        OreElement { parts, k: self.k.clone() }
    }

    pub fn add(&self, o: &OreElement) -> Self {
        let mut parts = self.parts.clone();
        for (&m, a) in &o.parts {
            let v = match parts.remove(&m) {
                Some(b) => &b + a,
                None => a.clone(),
            };
            parts.insert(m, v);
        }
        OreElement { parts, k: self.k.clone() }
    }

    pub fn sub(&self, o: &OreElement) -> Self {
        let neg = OreElement {
            parts: o.parts.iter().map(|(&m, a)| (m, -a)).collect(),
            k: o.k.clone(),
        };
        self.add(&neg)
    }

    /// Zero at every stored exponent below each part's precision.
    pub fn is_zero(&self) -> bool {
        self.parts.values().all(USeries::is_zero)
    }

    /// Smallest precision over the parts, `None` when there are none.
    pub fn min_prec(&self) -> Option<i64> {
        self.parts.values().map(USeries::prec).min()
    }
}

/// An element depending on `k`, evaluated on demand; `sigma` reads the
/// family at shifted parameters.
#[derive(Clone)]
pub struct Family {
    f: Arc<dyn Fn(&Rational) -> Result<OreElement> + Send + Sync>,
}

impl Family {
    pub fn new(f: impl Fn(&Rational) -> Result<OreElement> + Send + Sync + 'static) -> Self {
        Family { f: Arc::new(f) }
    }

    pub fn at(&self, k: &Rational) -> Result<OreElement> {
        (self.f)(k)
    }
}

/// `phi_2 = Y sum_n c_n(k/2) q^n`.
pub fn phi2_family(q_prec: usize) -> Family {
    Family::new(move |k| Ok(OreElement::single(1, c_series(&(k / int(2)), q_prec)?, k.clone())))
}

/// `phi_1 = Y^{-1} sum_n c_n(-k/2) q^n`, with poles at positive integers `k`.
pub fn phi1_family(q_prec: usize) -> Family {
    Family::new(move |k| Ok(OreElement::single(-1, c_series(&(-k / int(2)), q_prec)?, k.clone())))
}

/// Data of a random test element: for each `Y`-exponent, terms
/// `(alpha + beta k) u^j`.
#[derive(Debug, Clone)]
pub struct TestElement {
    pub parts: Vec<(i64, Vec<(i64, Rational, Rational)>)>,
    pub u_prec: i64,
}

impl TestElement {
    pub fn random(rng: &mut ChaCha8Rng, q_prec: usize) -> Self {
        let mut parts = Vec::new();
        for m in -1..=1i64 {
            if rng.gen_bool(0.6) {
                let n = rng.gen_range(1..=4);
                let terms = (0..n)
                    .map(|_| {
                        let j = rng.gen_range(-1..=6);
                        let a = frac(rng.gen_range(-9..=9), rng.gen_range(1..=5));
                        let b = frac(rng.gen_range(-4..=4), rng.gen_range(1..=3));
                        (j, a, b)
                    })
                    .collect();
                parts.push((m, terms));
            }
        }
        TestElement { parts, u_prec: 2 * q_prec as i64 }
    }

    pub fn family(&self) -> Family {
        let data = self.clone();
        Family::new(move |k| {
            let mut e = OreElement::zero(k.clone());
            for (m, terms) in &data.parts {
                let mut s = USeries::zero(data.u_prec);
                for (j, a, b) in terms {
                    s.add_term(*j, a + b * k);
                }
                e = e.add(&OreElement::single(*m, s, k.clone()));
            }
            Ok(e)
        })
    }
}

impl fmt::Display for TestElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = Vec::new();
        for (m, terms) in &self.parts {
            for (j, a, b) in terms {
                out.push(format!(
                    "Y^{m} u^{j} ({} + {} k)",
                    rational::to_string(a),
                    rational::to_string(b)
                ));
            }
        }
        if out.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", out.join(" + "))
        }
    }
}

// ---------------------------------------------------------------------------
// The operators E, F, G_mu

/// Which version of an identity to build: the one that holds, or the
/// uncorrected variant (kept to report its residual).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    Corrected,
    AsPrinted,
}

fn kpoly(c: &[i64]) -> KFn {
    KFn::poly(&c.iter().map(|&x| int(x)).collect::<Vec<_>>())
}

/// `E = D^2 - (k^2/4) E4`.
pub fn op_e() -> OreOperator {
    let e4 = OreCoeff::new(KFn::poly(&[int(0), int(0), frac(-1, 4)]), QMPoly::e4(), 0);
    OreOperator::term(OreCoeff::one(), 2, 0).add(&OreOperator::mul_coeff(e4))
}

/// `F = Delta^{-1/2} (E2 E4 + (5 + 6k) E6 + 12 E4 D) sigma`. The uncorrected
/// version carries `12 E2 D`, which is not of homogeneous weight.
pub fn op_f(v: Variant) -> OreOperator {
    let c0 = OreCoeff::new(kpoly(&[1]), &QMPoly::e2() * &QMPoly::e4(), 1);
    let c1 = OreCoeff::new(kpoly(&[5, 6]), QMPoly::e6(), 1);
    let x = match v {
        Variant::Corrected => QMPoly::e4(),
        Variant::AsPrinted => QMPoly::e2(),
    };
    let c2 = OreCoeff::new(kpoly(&[12]), x, 1);
    OreOperator::term(c0, 0, 1)
        .add(&OreOperator::term(c1, 0, 1))
        .add(&OreOperator::term(c2, 1, 1))
}

/// `G_mu = sigma^2 - mu(k) (1 - E6 Delta^{-1/2} sigma)`.
pub fn op_g(mu: &KFn) -> OreOperator {
    let m = OreCoeff::scalar(mu.clone());
    let r = OreCoeff::new(mu.clone(), QMPoly::e6(), 1);
    OreOperator::term(OreCoeff::one(), 0, 2)
        .sub(&OreOperator::mul_coeff(m))
        .add(&OreOperator::term(r, 0, 1))
}

/// Both sides of `F E - E F = 4 Delta^{-1/2} (E2 E4 + 2 E6) sigma E`.
pub fn lax1_sides(v: Variant) -> (OreOperator, OreOperator) {
    let (e, f) = (op_e(), op_f(v));
    let lhs = f.compose(&e).sub(&e.compose(&f));
    let c = OreCoeff::new(kpoly(&[4]), &(&QMPoly::e2() * &QMPoly::e4()) + &QMPoly::e6().scale(&int(2)), 1);
    let rhs = OreOperator::term(c, 0, 1).compose(&e);
    (lhs, rhs)
}

/// Both sides of `G_mu E - E^{(2)} G_mu = mu(k) E4 (F/12 - (k+1))`. The
/// uncorrected variant has the commutator the other way round.
pub fn lax2_sides(mu: &KFn, v: Variant) -> (OreOperator, OreOperator) {
    let (e, g) = (op_e(), op_g(mu));
    let e2 = e.twist(2);
    let lhs = match v {
        Variant::Corrected => g.compose(&e).sub(&e2.compose(&g)),
        Variant::AsPrinted => e2.compose(&g).sub(&g.compose(&e)),
    };
    let inner = op_f(Variant::Corrected)
        .scale(&frac(1, 12))
        .sub(&OreOperator::mul_coeff(OreCoeff::scalar(kpoly(&[1, 1]))));
    let rhs = OreOperator::mul_coeff(OreCoeff::new(mu.clone(), QMPoly::e4(), 0)).compose(&inner);
    (lhs, rhs)
}

// ---------------------------------------------------------------------------
// Checks

/// Result of checking an operator identity on test elements at one `k`.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub k: String,
    pub trials: usize,
    pub passed: usize,
    /// Smallest u-precision at which the two sides were compared.
    pub checked_u_prec: i64,
    pub counterexample: Option<String>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.passed == self.trials && self.checked_u_prec > 0
    }
}

/// Margin of extra q-coefficients carried by coefficient expansions.
const CTX_MARGIN: usize = 8;

/// Applies `lhs` and `rhs` to `trials` random elements at `k` and compares.
pub fn check_identity(
    name: &str,
    lhs: &OreOperator,
    rhs: &OreOperator,
    k: &Rational,
    q_prec: usize,
    trials: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let ctx = SeriesCtx::new(q_prec + CTX_MARGIN)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut checked = i64::MAX;
    let mut counterexample = None;
    for t in 0..trials {
        // the first trial is always the zero element
        let elem = if t == 0 {
            TestElement { parts: Vec::new(), u_prec: 2 * q_prec as i64 }
        } else {
            TestElement::random(&mut rng, q_prec)
        };
        let fam = elem.family();
        let a = lhs.apply_at(&fam, k, &ctx)?;
        let b = rhs.apply_at(&fam, k, &ctx)?;
        let diff = a.sub(&b);
        if let Some(p) = diff.min_prec() {
            checked = checked.min(p);
        }
        if diff.is_zero() {
            passed += 1;
        } else if counterexample.is_none() {
            let (m, s) = diff.parts.iter().find(|(_, s)| !s.is_zero()).expect("non-zero part");
            counterexample = Some(format!("element {elem}: difference has Y^{m} part {s}"));
        }
    }
    Ok(IdentityReport {
        name: name.to_string(),
        k: rational::to_string(k),
        trials,
        passed,
        checked_u_prec: if checked == i64::MAX { 0 } else { checked },
        counterexample,
    })
}

pub fn lax_check_1(k: &Rational, q_prec: usize, trials: usize, seed: u64, v: Variant) -> Result<IdentityReport> {
    let (lhs, rhs) = lax1_sides(v);
    check_identity("lax1", &lhs, &rhs, k, q_prec, trials, seed)
}

pub fn lax_check_2(
    k: &Rational,
    mu: &KFn,
    q_prec: usize,
    trials: usize,
    seed: u64,
    v: Variant,
) -> Result<IdentityReport> {
    let (lhs, rhs) = lax2_sides(mu, v);
    check_identity("lax2", &lhs, &rhs, k, q_prec, trials, seed)
}

/// Eigenvalue of `F` on `phi_2` at one value of `k`.
#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    pub k: String,
    /// `F(phi_2) / phi_2`, when it is a constant.
    pub raw: Option<String>,
    /// `raw / 12`, the eigenvalue of `F / 12`; expected `k + 1`.
    pub lambda: Option<String>,
    pub scalar: bool,
    pub checked_u_prec: i64,
}

impl EigenReport {
    pub fn equals_k_plus_one(&self, k: &Rational) -> bool {
        self.lambda.as_deref() == Some(rational::to_string(&(k + int(1))).as_str())
    }
}

pub fn eigen_check(k: &Rational, q_prec: usize, v: Variant) -> Result<EigenReport> {
    let ctx = Arc::new(SeriesCtx::new(q_prec + CTX_MARGIN)?);
    let phi = phi2_family(q_prec);
    let image = op_f(v).apply_at(&phi, k, &ctx)?;
    let base = phi.at(k)?;
    let ratio = match (image.part(1), base.part(1)) {
        (Some(a), Some(b)) if image.parts.keys().all(|&m| m == 1 || image.parts[&m].is_zero()) => {
            a * &b.invert()?
        }
        _ => return Err(QmxError::Invariant("F(phi_2) left the Y^1 component".into())),
    };
    let c = ratio.coeff(0);
    let scalar = ratio.terms().all(|(e, _)| e == 0);
    Ok(EigenReport {
        k: rational::to_string(k),
        raw: scalar.then(|| rational::to_string(&c)),
        lambda: scalar.then(|| rational::to_string(&(&c / int(12)))),
        scalar,
        checked_u_prec: ratio.prec(),
    })
}

/// The `Y^1` part of `G_mu(phi_2)` at `k`; zero exactly when `mu = mu(k)`.
pub fn g_residual(k: &Rational, mu_value: &Rational, q_prec: usize) -> Result<USeries> {
    let ctx = Arc::new(SeriesCtx::new(q_prec + CTX_MARGIN)?);
    let e = op_g(&KFn::constant(mu_value.clone())).apply_at(&phi2_family(q_prec), k, &ctx)?;
    Ok(e.part(1).cloned().unwrap_or_else(|| USeries::zero(2 * q_prec as i64)))
}

/// Whether `E` annihilates `phi_1` and `phi_2` at `k`.
pub fn kernel_check(k: &Rational, q_prec: usize) -> Result<(bool, bool)> {
    let ctx = Arc::new(SeriesCtx::new(q_prec + CTX_MARGIN)?);
    let e = op_e();
    let a = e.apply_at(&phi1_family(q_prec), k, &ctx)?;
    let b = e.apply_at(&phi2_family(q_prec), k, &ctx)?;
    Ok((a.is_zero(), b.is_zero()))
}

/// `g_{i+2} = mu(i) (g_i - E6 Delta^{-1/2} g_{i+1})`.
pub fn contiguity_step(g_i: &USeries, g_next: &USeries, i: u32) -> Result<USeries> {
    let q_prec = (g_i.prec().max(g_next.prec()) / 2 + 2).max(2) as usize;
    let ctx = SeriesCtx::new(q_prec)?;
    step_with(g_i, g_next, &mu(&int(i as i64))?, &ctx)
}

fn step_with(g_i: &USeries, g_next: &USeries, m: &Rational, ctx: &SeriesCtx) -> Result<USeries> {
    let r = &ctx.eisenstein(Eisenstein::E6) * ctx.inv_sqrt_delta();
    Ok((g_i - &(&r * g_next)).scale(m))
}

/// One row of the two-path comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ContiguityRow {
    pub i: u32,
    pub agrees: bool,
    /// q-coefficients compared.
    pub checked_q_prec: i64,
}

/// Runs the contiguity recursion from `g_0, g_1` up to `g_{i_max}` and
/// compares each value with the c-recursion. `mu_override` replaces `mu`
/// (fault injection).
pub fn contiguity_agreement(
    i_max: u32,
    q_prec: usize,
    mu_override: Option<&dyn Fn(&Rational) -> Result<Rational>>,
) -> Result<Vec<ContiguityRow>> {
    // each step costs one u-coefficient of precision
    let start = q_prec + i_max as usize + 2;
    let ctx = SeriesCtx::new(start + 2)?;
    let mut prev = g_series(0, start)?;
    let mut cur = g_series(1, start)?;
    let mut rows = Vec::new();
    for i in 0..=i_max {
        let direct = g_series(i, q_prec)?;
        let via = match i {
            0 => prev.clone(),
            1 => cur.clone(),
            _ => {
                let ki = int(i as i64 - 2);
                let m = match mu_override {
                    Some(f) => f(&ki)?,
                    None => mu(&ki)?,
                };
                let next = step_with(&prev, &cur, &m, &ctx)?;
                prev = std::mem::replace(&mut cur, next);
                cur.clone()
            }
        };
        let diff = &direct - &via;
        rows.push(ContiguityRow { i, agrees: diff.is_zero(), checked_q_prec: diff.q_prec() });
    }
    Ok(rows)
}

/// `D^2(g_k) - (k^2/4) E4 g_k`.
pub fn ode_residual(k: u32, q_prec: usize) -> Result<USeries> {
    let g = g_series(k, q_prec)?;
    let e4 = QMPoly::e4().expand(q_prec + 1);
    let c = frac((k * k) as i64, 4);
    Ok(&g.derive_n(2) - &(&e4 * &g).scale(&c))
}

/// `(D^2 - (w/6) E2 D + (w(w-1)/12) D(E2)) f_{1,w}` for `w` divisible by 6.
pub fn kk_ode_residual(w: i64, q_prec: usize, cfg: &ExtremalConfig) -> Result<USeries> {
    if w < 0 || w % 6 != 0 {
        return Err(QmxError::OutOfRange(format!("w = {w} is not a non-negative multiple of 6")));
    }
    let f = numax_and_form(1, w, cfg)?.form_poly;
    let mut ex = Expander::new(q_prec);
    let fs = ex.expand(&f);
    let e2 = ex.expand(&QMPoly::e2());
    let de2 = ex.expand(&QMPoly::e2().ramanujan_d());
    let df = fs.derive();
    Ok(&(&df.derive() - &(&e2 * &df).scale(&frac(w, 6))) + &(&de2 * &fs).scale(&frac(w * (w - 1), 12)))
}

/// Checks, on `trials` random Laurent series `s`, that
/// `(D^2 - k E2 D + (3k^2 - k/2) D(E2)) s = Delta^{k/2} (D^2 - (k^2/4) E4) Delta^{-k/2} s`
/// with `Delta^{k/2} = Y (Delta/q)^{k/2}`.
pub fn conjugation_check(k: &Rational, q_prec: usize, trials: usize, seed: u64) -> Result<IdentityReport> {
    let ctx = Arc::new(SeriesCtx::new(q_prec + CTX_MARGIN)?);
    let up = ctx.delta_over_q_pow(&(k / int(2)))?;
    let down = ctx.delta_over_q_pow(&(-k / int(2)))?;
    let e2 = ctx.eisenstein(Eisenstein::E2);
    let de2 = ctx.expand(&QMPoly::e2().ramanujan_d());
    let c2 = int(3) * k * k - k / int(2);
    let e = op_e();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut checked = i64::MAX;
    let mut counterexample = None;
    for _ in 0..trials {
        let mut s = USeries::zero(2 * q_prec as i64);
        for _ in 0..rng.gen_range(1..=5) {
            s.add_term(rng.gen_range(-2..=8), frac(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
        }
        let ds = s.derive();
        let lhs = &(&ds.derive() - &(&e2 * &ds).scale(k)) + &(&de2 * &s).scale(&c2);
        let inner = OreElement::single(-1, &down * &s, k.clone());
        let fam = Family::new(move |_| Ok(inner.clone()));
        let out = e.apply_at(&fam, k, &ctx)?;
        let rhs = match out.part(-1) {
            Some(p) => &up * p,
            None => USeries::zero(lhs.prec()),
        };
        let diff = &lhs - &rhs;
        checked = checked.min(diff.prec());
        if diff.is_zero() {
            passed += 1;
        } else if counterexample.is_none() {
            counterexample = Some(format!("series {s}: difference {diff}"));
        }
    }
    Ok(IdentityReport {
        name: "conjugation".into(),
        k: rational::to_string(k),
        trials,
        passed,
        checked_u_prec: if checked == i64::MAX { 0 } else { checked },
        counterexample,
    })
}

// ---------------------------------------------------------------------------
// Denominators

/// Primes dividing some coefficient denominator.
pub fn denominator_primes(s: &USeries) -> BTreeSet<BigInt> {
    let lcm = s.denominator_lcm();
    let f = factor(&lcm);
    let mut out = f.primes;
    out.extend(f.unfactored);
    out
}

/// `f_{1,6k} = Delta^{k/2} g_k`.
pub fn f_1_6k(k: u32, q_prec: usize) -> Result<USeries> {
    let ctx = SeriesCtx::new(q_prec + 1)?;
    let g = g_series(k, q_prec)?;
    Ok(&ctx.sqrt_delta().pow(k as i64)? * &g)
}

/// Denominator data of `f_{1,6k}` to a given q-precision.
#[derive(Debug, Clone, Serialize)]
pub struct DenominatorRow {
    pub k: u32,
    pub q_prec: i64,
    pub primes: Vec<String>,
    /// Every prime is `< 6k`.
    pub within_bound: bool,
    pub g_nonnegative: bool,
}

pub fn denominator_row(k: u32, q_prec: usize) -> Result<DenominatorRow> {
    let f = f_1_6k(k, q_prec)?;
    let within_bound = strip_primes_below(&f.denominator_lcm(), 6 * k as u64).is_one();
    let g = g_series(k, q_prec)?;
    Ok(DenominatorRow {
        k,
        q_prec: f.q_prec(),
        primes: denominator_primes(&f).iter().map(|p| p.to_string()).collect(),
        within_bound,
        g_nonnegative: g.all_nonnegative(),
    })
}

/// Rational sample points for `k` that avoid every pole: no integers (so the
/// recursions for `phi_1` and `phi_2` never divide by zero) and none of
/// `-7/6, -11/6`.
pub fn k_samples(n: usize, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Rational> = Vec::new();
    while out.len() < n {
        let den = rng.gen_range(2..=7i64);
        let num = rng.gen_range(-3 * den..=6 * den);
        let k = frac(num, den);
        if k.is_integer() || k.denom() == &BigInt::from(6) && k.is_negative() || out.contains(&k) {
            continue;
        }
        out.push(k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sigma_k;

    #[test]
    fn c_examples() {
        assert_eq!(c_coeff(&frac(7, 3), 0).unwrap(), int(1));
        for k in [int(1), int(4), frac(2, 3), frac(-1, 2)] {
            let want = int(60) * &k * &k / (&k + int(1));
            assert_eq!(c_coeff(&(&k / int(2)), 1).unwrap(), want);
        }
        assert!(c_sequence(&int(0), 20).unwrap()[1..].iter().all(Zero::is_zero));
        let e = c_coeff(&frac(-3, 2), 5).unwrap_err();
        assert!(matches!(e, QmxError::Pole(_)), "{e}");
        assert_eq!(c_coeff(&frac(1, 2), 1).unwrap(), int(30));
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(&int(0)).unwrap(), frac(1, 462));
        assert_eq!(mu(&int(-1)).unwrap(), int(0));
        assert!(matches!(mu(&frac(-7, 6)), Err(QmxError::Pole(_))));
        for i in 2..30i64 {
            let want = frac(i * (i - 1), 12 * (6 * i - 5) * (6 * i - 1));
            assert_eq!(mu(&int(i - 2)).unwrap(), want);
        }
    }

    #[test]
    fn kfn_shift() {
        let m = KFn::mu();
        for k in [int(0), frac(3, 5), int(4)] {
            assert_eq!(m.shift(2).eval(&k).unwrap(), m.eval(&(&k + int(2))).unwrap());
        }
    }

    #[test]
    fn g_matches_f_1_6() {
        assert_eq!(g_series(0, 10).unwrap(), USeries::one(20));
        let f = f_1_6k(1, 20).unwrap();
        for n in 1..20 {
            let want = BigInt::from(n) * sigma_k(3, n).unwrap();
            assert_eq!(f.q_coeff(n), Rational::from_integer(want));
        }
        assert!(denominator_primes(&f).is_empty());
        assert!(denominator_primes(&USeries::one(10)).is_empty());
    }

    #[test]
    fn contiguity_paths_agree() {
        let g0 = g_series(0, 20).unwrap();
        let g1 = g_series(1, 20).unwrap();
        let g2 = contiguity_step(&g0, &g1, 0).unwrap();
        assert_eq!(g2.leading(), Some((2, &int(1))));
        assert!(crate::useries::agree(&g2, &g_series(2, 20).unwrap()));
        // Delta g_2 is f_{1,12}
        let f12 = numax_and_form(1, 12, &ExtremalConfig::default()).unwrap();
        let d = delta_form().expand(20);
        assert!(crate::useries::agree(&(&d * &g2), &f12.expansion_to(15)));
        for row in contiguity_agreement(8, 20, None).unwrap() {
            assert!(row.agrees && row.checked_q_prec >= 20, "{row:?}");
        }
        let bad = |k: &Rational| Ok(mu(k)? * frac(1001, 1000));
        let rows = contiguity_agreement(4, 20, Some(&bad)).unwrap();
        assert!(!rows[2].agrees);
    }

    #[test]
    fn odes_vanish() {
        for k in [0, 1, 7] {
            assert!(ode_residual(k, 40).unwrap().is_zero());
        }
        for w in [0, 6, 12] {
            assert!(kk_ode_residual(w, 30, &ExtremalConfig::default()).unwrap().is_zero());
        }
        assert!(kk_ode_residual(4, 30, &ExtremalConfig::default()).is_err());
    }

    #[test]
    fn denominators_of_f_1_12() {
        let row = denominator_row(2, 30).unwrap();
        assert!(row.within_bound && row.g_nonnegative);
        let g2 = g_series(2, 30).unwrap();
        let allowed: BTreeSet<BigInt> = [2, 3, 5, 7, 11].into_iter().map(BigInt::from).collect();
        assert!(denominator_primes(&g2).is_subset(&allowed));
    }

    #[test]
    fn eigenvalue() {
        for (k, want) in [(int(0), int(1)), (int(3), int(4)), (frac(1, 2), frac(3, 2))] {
            let r = eigen_check(&k, 20, Variant::Corrected).unwrap();
            assert!(r.scalar, "{r:?}");
            assert!(r.equals_k_plus_one(&k));
            assert_eq!(r.lambda, Some(rational::to_string(&want)));
            assert_eq!(r.raw, Some(rational::to_string(&(want * int(12)))));
        }
        let r = eigen_check(&int(3), 20, Variant::AsPrinted).unwrap();
        assert!(!r.scalar);
    }

    #[test]
    fn kernel_of_e() {
        for k in k_samples(3, 5) {
            assert_eq!(kernel_check(&k, 15).unwrap(), (true, true), "k = {k}");
        }
    }

    #[test]
    fn g_kills_phi2_only_for_the_right_mu() {
        for k in [int(0), frac(5, 2), int(3)] {
            assert!(g_residual(&k, &mu(&k).unwrap(), 15).unwrap().is_zero());
            let bad = g_residual(&k, &(mu(&k).unwrap() * frac(11, 10)), 15).unwrap();
            assert_eq!(bad.leading().map(|(e, _)| e), Some(2), "k = {k}");
        }
    }

    #[test]
    fn lax_identities() {
        for k in [int(2), frac(5, 2), int(0)] {
            let r = lax_check_1(&k, 12, 4, 1, Variant::Corrected).unwrap();
            assert!(r.ok(), "{r:?}");
            let r = lax_check_2(&k, &KFn::mu(), 12, 4, 2, Variant::Corrected).unwrap();
            assert!(r.ok(), "{r:?}");
            let r = lax_check_2(&k, &KFn::constant(int(1)), 12, 4, 3, Variant::Corrected).unwrap();
            assert!(r.ok(), "{r:?}");
        }
        let r = lax_check_1(&int(3), 12, 4, 1, Variant::AsPrinted).unwrap();
        assert!(!r.ok());
        let r = lax_check_2(&int(3), &KFn::mu(), 12, 4, 1, Variant::AsPrinted).unwrap();
        assert!(!r.ok());
    }

    #[test]
    fn composition_agrees_with_sequential_application() {
        let ctx = Arc::new(SeriesCtx::new(20).unwrap());
        let (e, f) = (op_e(), op_f(Variant::Corrected));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for k in [frac(1, 3), int(2)] {
            let x = TestElement::random(&mut rng, 12).family();
            let a = f.compose(&e).apply_at(&x, &k, &ctx).unwrap();
            let b = f.apply(&e.apply(&x, &ctx), &ctx).at(&k).unwrap();
            assert!(a.sub(&b).is_zero());
        }
    }

    #[test]
    fn conjugation_identity() {
        for k in [frac(1, 2), int(2), frac(-2, 3)] {
            let r = conjugation_check(&k, 15, 5, 4).unwrap();
            assert!(r.ok(), "{r:?}");
        }
    }

    #[test]
    fn sample_points_avoid_poles() {
        let ks = k_samples(20, 1);
        assert_eq!(ks.len(), 20);
        for k in &ks {
            assert!(!k.is_integer());
            assert!(mu(k).is_ok());
        }
    }
}
