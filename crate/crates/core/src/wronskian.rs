//! The vector-valued form `F_f` attached to a quasi-modular form `f` of depth
//! `<= l`, and its D-Wronskian.
//!
//! By the transformation law of `E2`, the polynomial `P_f(X)` describing how
//! `f` transforms is `f` with `E2` replaced by `E2 + 12 X / (2 pi i)`.
//! Writing `Z` for `2 pi i z` keeps every coefficient rational: powers of
//! `2 pi i` are tracked as an integer grade, and `D = (2 pi i)^{-1} d/dz`
//! acts by `D(Z) = 1` and by Ramanujan's derivation on coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{QmxError, Result};
use crate::extremal::{modular_order_bound, numax_and_form, ExtremalConfig};
use crate::qmpoly::{dim_qm, kappa_stable, QMPoly};
use crate::rational::{int, Rational};
use crate::useries::Valuation;

/// A polynomial in `Z` with quasi-modular coefficients; the analytic object
/// it stands for is `value * (2 pi i)^twopi_exp`.
#[derive(Clone, PartialEq, Eq, Default, Serialize)]
pub struct ZQMPoly {
    coeffs: BTreeMap<u32, QMPoly>,
    pub twopi_exp: i64,
}

impl fmt::Debug for ZQMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ZQMPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(d, c)| match d {
                0 => format!("[{c}]"),
                1 => format!("[{c}]*Z"),
                _ => format!("[{c}]*Z^{d}"),
            })
            .collect();
        write!(f, "({}) * (2 pi i)^{}", parts.join(" + "), self.twopi_exp)
    }
}

impl ZQMPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: QMPoly, twopi_exp: i64) -> Self {
        let mut p = ZQMPoly { coeffs: BTreeMap::new(), twopi_exp };
        p.add_term(0, c);
        p
    }

    pub fn add_term(&mut self, deg: u32, c: QMPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(deg).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.coeffs.remove(&deg);
        }
    }

    /// Coefficient of `Z^deg`.
    pub fn coeff(&self, deg: u32) -> QMPoly {
        self.coeffs.get(&deg).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &QMPoly)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn z_degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_z_free(&self) -> bool {
        self.coeffs.keys().all(|&d| d == 0)
    }

    /// Weight with `Z` of weight `-2`. `Ok(None)` for zero.
    pub fn weight(&self) -> Result<Option<i64>> {
        let mut w = None;
        for (d, c) in &self.coeffs {
            let cw = c.weight()?.map(|x| x - 2 * *d as i64);
            match (w, cw) {
                (None, x) => w = x,
                (Some(a), Some(b)) if a != b => return Err(QmxError::NotHomogeneous),
                _ => {}
            }
        }
        Ok(w)
    }

    /// `D` with `D(Z) = 1`.
    pub fn derive(&self) -> Self {
        let mut out = ZQMPoly { coeffs: BTreeMap::new(), twopi_exp: self.twopi_exp };
        for (&d, c) in &self.coeffs {
            out.add_term(d, c.ramanujan_d());
            if d > 0 {
                out.add_term(d - 1, c.scale(&int(d as i64)));
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = ZQMPoly { coeffs: BTreeMap::new(), twopi_exp: self.twopi_exp };
        for (&d, p) in &self.coeffs {
            out.add_term(d, p.scale(c));
        }
        out
    }
}

impl Add for &ZQMPoly {
    type Output = ZQMPoly;

    /// Panics if the `2 pi i` grades differ and both sides are non-zero.
    fn add(self, o: &ZQMPoly) -> ZQMPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        assert_eq!(self.twopi_exp, o.twopi_exp, "adding terms of different 2 pi i grade");
        let mut out = self.clone();
        for (&d, c) in &o.coeffs {
            out.add_term(d, c.clone());
        }
        out
    }
}

impl Neg for &ZQMPoly {
    type Output = ZQMPoly;

    fn neg(self) -> ZQMPoly {
        self.scale(&int(-1))
    }
}

impl Sub for &ZQMPoly {
    type Output = ZQMPoly;

    fn sub(self, o: &ZQMPoly) -> ZQMPoly {
        self + &(-o)
    }
}

impl Mul for &ZQMPoly {
    type Output = ZQMPoly;

    fn mul(self, o: &ZQMPoly) -> ZQMPoly {
        let mut out = ZQMPoly { coeffs: BTreeMap::new(), twopi_exp: self.twopi_exp + o.twopi_exp };
        for (&a, p) in &self.coeffs {
            for (&b, q) in &o.coeffs {
                out.add_term(a + b, p * q);
            }
        }
        out
    }
}

fn check_input(f: &QMPoly, l: u32) -> Result<()> {
    f.weight()?;
    if let Some(d) = f.depth() {
        if d > l {
            return Err(QmxError::OutOfRange(format!("form of depth {d} exceeds l = {l}")));
        }
    }
    Ok(())
}

/// `hat f_r = 12^r / r! * (d/dE2)^r f` for `r = 0..=l`, so that
/// `P_f(X) = sum_r hat f_r (X / (2 pi i))^r`.
pub fn pf_coefficients(f: &QMPoly, l: u32) -> Result<Vec<QMPoly>> {
    check_input(f, l)?;
    let mut out = Vec::with_capacity(l as usize + 1);
    let mut deriv = f.clone();
    let mut factor = int(1);
    for r in 0..=l {
        if r > 0 {
            deriv = deriv.partial_e2();
            factor = factor * int(12) / int(r as i64);
        }
        out.push(deriv.scale(&factor));
    }
    Ok(out)
}

fn falling(n: u32, j: u32) -> Rational {
    (0..j).fold(int(1), |acc, i| acc * int((n - i) as i64))
}

/// Components `j = 0..=l` of `F_f`: the `j`-th derivative of
/// `Q_f(x) = x^l P_f(1/x)` at `x = z`.
pub fn f_vector(f: &QMPoly, l: u32) -> Result<Vec<ZQMPoly>> {
    let hat = pf_coefficients(f, l)?;
    Ok((0..=l)
        .map(|j| {
            let mut comp = ZQMPoly { coeffs: BTreeMap::new(), twopi_exp: j as i64 - l as i64 };
            for (r, fr) in hat.iter().enumerate().take((l - j) as usize + 1) {
                let r = r as u32;
                comp.add_term(l - r - j, fr.scale(&falling(l - r, j)));
            }
            comp
        })
        .collect())
}

/// Determinant of a square matrix over `QMPoly[Z]` by expansion over column
/// subsets: `acc[S]` is the signed sum over the ways of filling the first
/// `|S|` rows with the columns in `S`.
fn determinant(m: &[Vec<ZQMPoly>]) -> ZQMPoly {
    let n = m.len();
    let mut acc: Vec<Option<ZQMPoly>> = vec![None; 1 << n];
    acc[0] = Some(ZQMPoly::constant(QMPoly::one(), 0));
    for mask in 0usize..(1 << n) {
        let Some(cur) = acc[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            acc[mask] = Some(cur);
            continue;
        }
        for c in (0..n).filter(|c| mask & (1 << c) == 0) {
            // sign of inserting column c after the columns already used
            let above = (mask >> (c + 1)).count_ones();
            let mut term = &cur * &m[row][c];
            if above % 2 == 1 {
                term = -&term;
            }
            let next = mask | (1 << c);
            acc[next] = Some(match acc[next].take() {
                Some(t) => &t + &term,
                None => term,
            });
        }
        acc[mask] = Some(cur);
    }
    acc[(1 << n) - 1].take().unwrap_or_default()
}

/// `W(F_f) = det(F, D F, ..., D^l F)`.
///
/// The result is checked to be free of `Z` and `E2`, homogeneous of weight
/// `(l+1) w`, non-zero, and of `2 pi i` grade `-l(l+1)/2`; any failure is an
/// [`QmxError::Invariant`] error.
pub fn wronskian(f: &QMPoly, l: u32) -> Result<ZQMPoly> {
    if f.is_zero() {
        return Err(QmxError::OutOfRange("the Wronskian of the zero form vanishes".into()));
    }
    let w = f.weight()?.unwrap_or(0);
    let comps = f_vector(f, l)?;
    let rows: Vec<Vec<ZQMPoly>> = comps
        .iter()
        .map(|c| {
            let mut row = vec![c.clone()];
            for _ in 0..l {
                let next = row.last().map(ZQMPoly::derive).unwrap_or_default();
                row.push(next);
            }
            row
        })
        .collect();
    let mut det = determinant(&rows);
    let want_exp = -((l * (l + 1) / 2) as i64);
    let fail = |what: &str, det: &ZQMPoly| {
        Err(QmxError::Invariant(format!("W(F_f) for f = {f}, l = {l}: {what}; got {det}")))
    };
    if det.is_zero() {
        return fail("determinant vanishes", &det);
    }
    det.twopi_exp = want_exp;
    if !det.is_z_free() {
        return fail("not free of Z", &det);
    }
    if !det.coeff(0).is_e2_free() {
        return fail("not free of E2", &det);
    }
    match det.weight() {
        Ok(Some(x)) if x == (l as i64 + 1) * w => {}
        _ => return fail(&format!("not homogeneous of weight {}", (l as i64 + 1) * w), &det),
    }
    Ok(det)
}

/// q-valuation of a `Z`-free element, computed from its expansion.
pub fn valuation(p: &ZQMPoly, q_prec: usize) -> Result<Valuation> {
    if !p.is_z_free() {
        return Err(QmxError::OutOfRange("valuation of a polynomial in Z".into()));
    }
    p.coeff(0).expand(q_prec).q_valuation()
}

/// One instance of the chain
/// `nu_max(l, w) <= nu(W(F_f)) <= d((l+1)w) - 1` with `f = f_{l,w}`,
/// and the multiplicity estimate `nu_max(l, w) <= delta_l(w) - 1 + kappa_l`
/// that follows from it.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplicityCertificate {
    pub l: u32,
    pub w: i64,
    pub delta: i64,
    pub kappa: i64,
    pub nu_f: i64,
    pub nu_wronskian: i64,
    pub modular_bound: i64,
    pub wronskian: ZQMPoly,
    pub chain_holds: bool,
}

pub fn multiplicity_certificate(l: u32, w: i64, cfg: &ExtremalConfig) -> Result<MultiplicityCertificate> {
    let ext = numax_and_form(l, w, cfg)?;
    let wr = wronskian(&ext.form_poly, l)?;
    let bound = modular_order_bound(l, w);
    // a non-zero modular form cannot vanish past the bound
    let nu_wronskian = valuation(&wr, bound.max(0) as usize + 2)?
        .finite()
        .ok_or_else(|| QmxError::Invariant("Wronskian expansion vanishes".into()))?;
    let delta = dim_qm(l, w);
    let kappa = kappa_stable(l);
    let chain_holds = ext.nu <= nu_wronskian && nu_wronskian <= bound && ext.nu <= delta - 1 + kappa;
    Ok(MultiplicityCertificate {
        l,
        w,
        delta,
        kappa,
        nu_f: ext.nu,
        nu_wronskian,
        modular_bound: bound,
        wronskian: wr,
        chain_holds,
    })
}

/// Scalar `c` with `W(F_{c f}) = c^(l+1) W(F_f)`.
pub fn homogeneity_holds(f: &QMPoly, l: u32, c: &Rational) -> Result<bool> {
    if c.is_zero() {
        return Ok(true);
    }
    let lhs = wronskian(&f.scale(c), l)?;
    let rhs = wronskian(f, l)?.scale(&(0..=l).fold(int(1), |a, _| a * c));
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmpoly::{basis_monomials, delta_form, Expander};
    use crate::rational::frac;
    use crate::useries::USeries;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wronskian_of_e2() {
        let w = wronskian(&QMPoly::e2(), 1).unwrap();
        assert_eq!(w, ZQMPoly::constant(-&QMPoly::e4(), -1));
        assert_eq!(w.twopi_exp, -1);
    }

    #[test]
    fn pf_examples() {
        assert_eq!(pf_coefficients(&QMPoly::e2(), 1).unwrap(), vec![QMPoly::e2(), QMPoly::constant(int(12))]);
        assert_eq!(pf_coefficients(&QMPoly::e4(), 1).unwrap(), vec![QMPoly::e4(), QMPoly::zero()]);
        let e22 = QMPoly::e2().pow(2);
        assert_eq!(
            pf_coefficients(&e22, 2).unwrap(),
            vec![e22.clone(), QMPoly::e2().scale(&int(24)), QMPoly::constant(int(144))]
        );
        assert!(pf_coefficients(&(&QMPoly::e2() + &QMPoly::e4()), 1).is_err());
        assert!(pf_coefficients(&e22, 1).is_err());
    }

    #[test]
    fn f_vector_examples() {
        let v = f_vector(&QMPoly::e2(), 1).unwrap();
        let mut c0 = ZQMPoly::constant(QMPoly::constant(int(12)), -1);
        c0.add_term(1, QMPoly::e2());
        assert_eq!(v, vec![c0, ZQMPoly::constant(QMPoly::e2(), 0)]);
        let d = delta_form();
        assert_eq!(f_vector(&d, 0).unwrap(), vec![ZQMPoly::constant(d.clone(), 0)]);
        assert_eq!(f_vector(&d, 3).unwrap().len(), 4);
        assert_eq!(wronskian(&d, 0).unwrap(), ZQMPoly::constant(d, 0));
    }

    #[test]
    fn wronskian_of_f_1_6_is_a_cusp_form() {
        let f = QMPoly::e4().ramanujan_d().scale(&frac(1, 240));
        let w = wronskian(&f, 1).unwrap();
        assert_eq!(w.weight().unwrap(), Some(12));
        assert!(valuation(&w, 4).unwrap() >= Valuation::Finite(1));
    }

    fn leibniz_det(m: &[Vec<ZQMPoly>]) -> ZQMPoly {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for i in 0..n {
                    let mut q = p.clone();
                    q.insert(i, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.len();
        let mut total = ZQMPoly::zero();
        for p in perms(n) {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let mut t = ZQMPoly::constant(QMPoly::one(), 0);
            for (r, &c) in p.iter().enumerate() {
                t = &t * &m[r][c];
            }
            if inversions % 2 == 1 {
                t = -&t;
            }
            total = &total + &t;
        }
        total
    }

    fn random_form(rng: &mut ChaCha8Rng, l: u32, w: i64) -> QMPoly {
        let mut f = QMPoly::zero();
        for m in basis_monomials(l, w) {
            f.add_term(m, frac(rng.gen_range(-5..=5), rng.gen_range(1..=3)));
        }
        f
    }

    #[test]
    fn subset_determinant_matches_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            let m: Vec<Vec<ZQMPoly>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let mut p = ZQMPoly::zero();
                            for d in 0..2 {
                                p.add_term(d, random_form(&mut rng, 1, 4));
                            }
                            p
                        })
                        .collect()
                })
                .collect();
            assert_eq!(determinant(&m), leibniz_det(&m));
        }
    }

    #[test]
    fn random_wronskians_are_modular() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 30 {
            let l = rng.gen_range(0..=4u32);
            let w = 2 * rng.gen_range(0..=12i64);
            if dim_qm(l, w) == 0 {
                continue;
            }
            let f = random_form(&mut rng, l, w);
            if f.is_zero() {
                continue;
            }
            let wr = wronskian(&f, l).unwrap();
            assert_eq!(wr.twopi_exp, -((l * (l + 1) / 2) as i64));
            let nu_f = f.expand(12).q_valuation().unwrap();
            let nu_w = valuation(&wr, 12).unwrap();
            assert!(nu_w >= nu_f, "l={l} w={w} f={f}");
            let c = frac(rng.gen_range(1..=4), rng.gen_range(1..=4));
            assert!(homogeneity_holds(&f, l, &c).unwrap());
            done += 1;
        }
    }

    #[test]
    fn derivation_matches_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut p = ZQMPoly::zero();
        for d in 0..3 {
            p.add_term(d, random_form(&mut rng, 2, 8 - 2 * d as i64));
        }
        let dp = p.derive();
        let mut ex = Expander::new(10);
        for d in 0..3u32 {
            // coefficient of Z^d in D(p) is D(c_d) + (d+1) c_{d+1}
            let want: USeries = &ex.expand(&p.coeff(d)).derive()
                + &ex.expand(&p.coeff(d + 1)).scale(&int(d as i64 + 1));
            assert_eq!(ex.expand(&dp.coeff(d)), want);
        }
    }

    #[test]
    fn certificates() {
        let cfg = ExtremalConfig::default();
        let c = multiplicity_certificate(1, 6, &cfg).unwrap();
        assert_eq!((c.nu_f, c.nu_wronskian, c.modular_bound), (1, 1, 1));
        assert!(c.chain_holds);
        let c = multiplicity_certificate(2, 4, &cfg).unwrap();
        assert_eq!(c.delta, 2);
        assert!(c.chain_holds);
        let c = multiplicity_certificate(5, 12, &cfg).unwrap();
        assert_eq!(c.kappa, 1);
        assert!(c.chain_holds);
        assert!(c.nu_f - (c.delta - 1) <= c.kappa);
    }
}
