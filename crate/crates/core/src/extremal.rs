//! Extremal quasi-modular forms.
//!
//! The space of forms of weight `w` and depth `<= l` is spanned by the
//! monomial basis. Row-reducing the matrix of q-expansion coefficients
//! (rows = basis elements, columns = powers of q) exposes every vanishing
//! order that occurs in the space as a pivot column; the last pivot row is,
//! up to scaling, the unique form of maximal vanishing order.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{QmxError, Result};
use crate::linalg::{self, fraction_free_echelon};
use crate::qmpoly::{basis_monomials, dim_modular, dim_qm, kappa_stable, Expander, Monomial, QMPoly};
use crate::rational::Rational;
use crate::useries::{USeries, Valuation};

#[derive(Debug, Clone)]
pub struct ExtremalConfig {
    /// Extra q-coefficients beyond `delta + kappa_l` for the first attempt.
    pub buffer: usize,
    /// Overrides the first attempt's q-precision.
    pub start_q_prec: Option<usize>,
    /// Precision doubling stops here.
    pub max_q_prec: usize,
}

impl Default for ExtremalConfig {
    fn default() -> Self {
        ExtremalConfig { buffer: 8, start_q_prec: None, max_q_prec: 4096 }
    }
}

/// Pivot structure of the row reduction that produced an extremal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EchelonCertificate {
    /// Vanishing orders realised in the space, one per basis element.
    pub pivots: Vec<usize>,
    pub rank: usize,
    pub q_prec: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremalResult {
    pub l: u32,
    pub w: i64,
    pub form_poly: QMPoly,
    /// q-expansion to `certificate.q_prec` coefficients, leading coefficient 1.
    pub expansion: USeries,
    pub nu: i64,
    pub delta: i64,
    pub kappa: i64,
    /// `nu == delta - 1`.
    pub meets_dimension_bound: bool,
    /// `nu == delta - 1` and the form has depth exactly `l`.
    pub algebraically_extremal: bool,
    pub depth_actual: u32,
    /// `w - 2l = 2`: the space is non-zero but contains no form of depth `l`.
    pub no_form_of_exact_depth: bool,
    pub certificate: EchelonCertificate,
}

impl ExtremalResult {
    pub fn expansion_to(&self, q_prec: usize) -> USeries {
        self.form_poly.expand(q_prec)
    }
}

/// Integer q-coefficient rows of the monomial basis.
fn coefficient_rows(basis: &[Monomial], q_prec: usize) -> Result<Vec<Vec<BigInt>>> {
    let mut ex = Expander::new(q_prec);
    basis
        .iter()
        .map(|m| {
            let s = ex.expand_monomial(m);
            (0..q_prec as i64)
                .map(|n| {
                    let c = s.q_coeff(n);
                    if c.denom().is_one() {
                        Ok(c.numer().clone())
                    } else {
                        Err(QmxError::Invariant(format!("non-integral expansion of {m}")))
                    }
                })
                .collect()
        })
        .collect()
}

/// Computes `nu_max(l, w)` and the normalised form realising it.
///
/// Starts at `delta + kappa_l + buffer` q-coefficients and doubles until the
/// basis expansions are independent, failing with
/// [`QmxError::InsufficientPrecision`] past `max_q_prec`. Exceeding the
/// multiplicity bound `delta - 1 + kappa_l` is reported as an invariant
/// violation.
pub fn numax_and_form(l: u32, w: i64, cfg: &ExtremalConfig) -> Result<ExtremalResult> {
    let delta = dim_qm(l, w);
    if delta < 1 {
        return Err(QmxError::EmptySpace { l, w });
    }
    let kappa = kappa_stable(l);
    let mut q_prec = cfg.start_q_prec.unwrap_or((delta + kappa) as usize + cfg.buffer).min(cfg.max_q_prec).max(1);
    loop {
        match solve_at(l, w, delta, kappa, q_prec) {
            Err(QmxError::InsufficientPrecision(msg)) => {
                if q_prec >= cfg.max_q_prec {
                    return Err(QmxError::InsufficientPrecision(format!(
                        "(l={l}, w={w}) at {q_prec} q-coefficients: {msg}"
                    )));
                }
                q_prec = (2 * q_prec).min(cfg.max_q_prec);
            }
            other => return other,
        }
    }
}

fn solve_at(l: u32, w: i64, delta: i64, kappa: i64, q_prec: usize) -> Result<ExtremalResult> {
    let basis = basis_monomials(l, w);
    debug_assert_eq!(basis.len() as i64, delta);
    let rows = coefficient_rows(&basis, q_prec)?;
    let ech = fraction_free_echelon(rows)?;
    if (ech.rank() as i64) < delta {
        return Err(QmxError::InsufficientPrecision(format!(
            "rank {} < {delta}: some combination vanishes to order {q_prec}",
            ech.rank()
        )));
    }
    let last = ech.rank() - 1;
    let nu = ech.pivots[last] as i64;
    if nu > delta - 1 + kappa {
        return Err(QmxError::Invariant(format!(
            "nu_max({l},{w}) = {nu} exceeds delta - 1 + kappa = {}",
            delta - 1 + kappa
        )));
    }
    let lead = ech.rows[last][nu as usize].clone();
    let lead_r = Rational::from_integer(lead);
    let mut form_poly = QMPoly::zero();
    for (m, c) in basis.iter().zip(&ech.transform[last]) {
        if !c.is_zero() {
            form_poly.add_term(*m, Rational::from_integer(c.clone()) / &lead_r);
        }
    }
    let expansion = USeries::from_q_coeffs(
        ech.rows[last].iter().map(|c| Rational::from_integer(c.clone()) / &lead_r),
    );
    let depth_actual = form_poly.depth().unwrap_or(0);
    let meets = nu == delta - 1;
    Ok(ExtremalResult {
        l,
        w,
        form_poly,
        expansion,
        nu,
        delta,
        kappa,
        meets_dimension_bound: meets,
        algebraically_extremal: meets && depth_actual == l,
        depth_actual,
        no_form_of_exact_depth: w - 2 * l as i64 == 2,
        certificate: EchelonCertificate {
            pivots: ech.pivots.clone(),
            rank: ech.rank(),
            q_prec,
        },
    })
}

/// True iff `nu(f) = delta_l(w) - 1` with `l` the depth and `w` the weight of `f`.
pub fn is_algebraically_extremal(f: &QMPoly) -> Result<bool> {
    let w = f
        .weight()?
        .ok_or_else(|| QmxError::OutOfRange("the zero form has no weight".into()))?;
    let l = f.depth().unwrap_or(0);
    let delta = dim_qm(l, w);
    let s = f.expand(delta as usize + 1);
    Ok(s.q_valuation()? == Valuation::Finite(delta - 1))
}

/// A basis `g_0, ..., g_{delta-1}` with `g_i = q^i + O(q^delta)`.
///
/// Fails with [`QmxError::Singular`], carrying the offending combination of
/// monomials, when the leading `delta x delta` coefficient matrix is singular.
pub fn diagonal_basis(l: u32, w: i64) -> Result<Vec<QMPoly>> {
    let basis = basis_monomials(l, w);
    let delta = basis.len();
    if delta == 0 {
        return Err(QmxError::EmptySpace { l, w });
    }
    let rows = coefficient_rows(&basis, delta)?;
    let u = linalg::to_rational_matrix(&rows);
    let inv = linalg::inverse(&u)?;
    Ok(inv
        .into_iter()
        .map(|c| {
            let mut g = QMPoly::zero();
            for (m, x) in basis.iter().zip(c) {
                g.add_term(*m, x);
            }
            g
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct FlagReport {
    pub w: i64,
    /// `(l, nu_max(l, w))` along the flag.
    pub entries: Vec<(u32, i64)>,
    pub strictly_increasing: bool,
}

/// `nu_max(l, w)` for `l = 0..=w/2`, skipping `l = w/2 - 1` (where the space
/// does not grow), and whether it strictly increases.
pub fn flag_monotonicity_check(w: i64, cfg: &ExtremalConfig) -> Result<FlagReport> {
    if w < 4 || w % 2 != 0 {
        return Err(QmxError::OutOfRange(format!("flag check needs even w >= 4, got {w}")));
    }
    let top = (w / 2) as u32;
    let mut entries = Vec::new();
    for l in (0..=top).filter(|&l| l != top - 1) {
        entries.push((l, numax_and_form(l, w, cfg)?.nu));
    }
    let strictly_increasing = entries.windows(2).all(|p| p[0].1 < p[1].1);
    Ok(FlagReport { w, entries, strictly_increasing })
}

/// `d((l+1)w) - 1`, the largest vanishing order a non-zero modular form of
/// weight `(l+1)w` can have.
pub fn modular_order_bound(l: u32, w: i64) -> i64 {
    dim_modular((l as i64 + 1) * w) - 1
}
