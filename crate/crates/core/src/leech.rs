//! The theta series of the Leech lattice,
//! `theta = E12 - (65520/691) Delta`, and the extremal form
//! `f_{1,14} = D(theta) / 393120`.
//!
//! Shell sizes `|L_a|` (vectors of norm `a`) are read off the coefficients
//! of `theta`; no lattice vectors are enumerated.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::sigma_table;
use crate::error::{QmxError, Result};
use crate::extremal::{numax_and_form, ExtremalConfig};
use crate::qmpoly::delta_form;
use crate::rational::{self, frac, Rational};
use crate::useries::{agree, USeries, Valuation};

/// `393120 = 2^5 3^3 5 7 13`, twice the number of norm-2 vectors.
pub const A: i64 = 393_120;

/// `E12 = 1 + (65520/691) sum sigma_11(n) q^n`.
pub fn e12(q_prec: usize) -> USeries {
    let sig = sigma_table(11, q_prec);
    let c = frac(65520, 691);
    let mut s = USeries::one(2 * q_prec as i64);
    for (n, v) in sig.iter().enumerate().take(q_prec).skip(1) {
        s.add_term(2 * n as i64, &c * Rational::from_integer(v.clone()));
    }
    s
}

/// `E12 - (65520/691) Delta`. Fails if a coefficient is not a non-negative
/// integer.
pub fn theta_leech(q_prec: usize) -> Result<USeries> {
    let delta = delta_form().expand(q_prec);
    let theta = &e12(q_prec) - &delta.scale(&frac(65520, 691));
    if let Some((e, c)) = theta.terms().find(|(_, c)| !rational::is_integer(c) || c.is_negative()) {
        return Err(QmxError::Invariant(format!(
            "theta coefficient of q^{} is {}",
            e / 2,
            rational::to_string(c)
        )));
    }
    Ok(theta)
}

/// `D(theta) / 393120`.
pub fn f_1_14(q_prec: usize) -> Result<USeries> {
    Ok(theta_leech(q_prec)?.derive().scale(&frac(1, A)))
}

/// `|L_a|` for `a = 0..q_prec`.
pub fn shell_sizes(theta: &USeries) -> Vec<BigInt> {
    (0..theta.q_prec()).map(|a| theta.q_coeff(a).to_integer()).collect()
}

/// A divisibility statement over all shells, with the first shell where it
/// fails.
#[derive(Debug, Clone, Serialize)]
pub struct ShellCheck {
    pub statement: String,
    pub holds: bool,
    pub first_failure: Option<i64>,
}

fn shell_check(statement: &str, shells: &[BigInt], pred: impl Fn(i64, &BigInt) -> bool) -> ShellCheck {
    let first_failure = (1..shells.len() as i64).find(|&a| !pred(a, &shells[a as usize]));
    ShellCheck { statement: statement.to_string(), holds: first_failure.is_none(), first_failure }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaReport {
    /// Shells `a = 0..q_prec` were examined.
    pub q_prec: i64,
    /// `(a, |L_a|)`.
    pub shells: Vec<(i64, String)>,
    /// `393120 | a |L_a|` for every `1 <= a <= a_max`.
    pub divisibility_ok: bool,
    pub finer_checks: Vec<ShellCheck>,
    pub f114_integral: bool,
    pub f114_nonnegative: bool,
    pub f114_valuation: Option<i64>,
    /// Agrees coefficient for coefficient with the extremal solver's `f_{1,14}`.
    pub f114_matches_extremal: bool,
    pub failures: Vec<String>,
}

pub fn divisibility_scan(a_max: usize, cfg: &ExtremalConfig) -> Result<ThetaReport> {
    if a_max < 1 {
        return Err(QmxError::OutOfRange("a_max must be at least 1".into()));
    }
    let q_prec = a_max + 1;
    let theta = theta_leech(q_prec)?;
    let shells = shell_sizes(&theta);
    let big_a = BigInt::from(A);
    let mut failures = Vec::new();
    for (a, l) in shells.iter().enumerate().skip(1) {
        if !(l * BigInt::from(a)).is_multiple_of(&big_a) {
            failures.push(format!("393120 does not divide {a} * |L_{a}| = {a} * {l}"));
        }
    }
    let divides = |d: i64, times_a: bool| {
        move |a: i64, l: &BigInt| {
            let v = if times_a { l * BigInt::from(a) } else { l.clone() };
            v.is_multiple_of(&BigInt::from(d))
        }
    };
    let finer_checks = vec![
        shell_check("5*7*13 | |L_a|", &shells, divides(455, false)),
        shell_check("9 | |L_a|", &shells, divides(9, false)),
        shell_check("27 | a|L_a|", &shells, divides(27, true)),
        shell_check("32 | a|L_a|", &shells, divides(32, true)),
    ];
    let f = theta.derive().scale(&frac(1, A));
    let ext = numax_and_form(1, 14, cfg)?.form_poly.expand(q_prec);
    let f114_valuation = f.q_valuation()?.finite();
    let f114_matches_extremal = agree(&f, &ext) && f.prec() == ext.prec();
    if !f114_matches_extremal {
        failures.push("D(theta)/393120 differs from the extremal f_{1,14}".into());
    }
    Ok(ThetaReport {
        q_prec: q_prec as i64,
        shells: shells.iter().enumerate().map(|(a, l)| (a as i64, l.to_string())).collect(),
        divisibility_ok: failures.iter().all(|s| !s.starts_with("393120")),
        finer_checks,
        f114_integral: f.all_integral(),
        f114_nonnegative: f.all_nonnegative(),
        f114_valuation,
        f114_matches_extremal,
        failures,
    })
}

/// The vanishing order of `f_{1,14}`, from its expansion.
pub fn f_1_14_valuation(q_prec: usize) -> Result<Valuation> {
    f_1_14(q_prec)?.q_valuation()
}

/// Zero test used by callers that only need the `q^1` shell.
pub fn no_norm_one_vectors(theta: &USeries) -> bool {
    theta.q_coeff(1).is_zero()
}
