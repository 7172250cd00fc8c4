//! Grid scans over `(l, w)`: extremal orders against the dimension bounds,
//! and integrality / positivity of extremal forms.
//!
//! Cells are independent and run through [`crate::par::map`]; rows always
//! come back in `(l, w)` order. Integrality and positivity are observed to a
//! finite q-precision only.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::arith::{factor, strip_primes_below};
use crate::error::{QmxError, Result};
use crate::extremal::{numax_and_form, ExtremalConfig, ExtremalResult};
use crate::par::{self, Execution};
use crate::qmpoly::{dim_qm, kappa_stable};
use crate::useries::USeries;

/// All `(l, w)` with `l` in `ls`, `w = 0, 2, ..., w_max`.
pub fn grid(ls: impl IntoIterator<Item = u32>, w_max: i64) -> Vec<(u32, i64)> {
    ls.into_iter()
        .flat_map(|l| (0..=w_max).step_by(2).map(move |w| (l, w)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    /// Computed; statements hold to the stated precision.
    Observed,
    /// `delta_l(w) = 0`.
    Empty,
    /// `w < 2l` or `w - 2l = 2`: no form of depth exactly `l` exists.
    Skipped,
    /// The solver ran out of precision.
    PrecisionExhausted,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremalRow {
    pub l: u32,
    pub w: i64,
    pub status: CellStatus,
    pub nu: Option<i64>,
    pub delta: i64,
    pub kappa: i64,
    /// `delta - 1 <= nu`.
    pub lower_bound_ok: bool,
    /// `nu <= delta - 1 + kappa`.
    pub upper_bound_ok: bool,
    /// `nu = delta - 1`.
    pub meets_dimension_bound: bool,
    pub prec_used: usize,
    pub message: Option<String>,
}

fn extremal_row(l: u32, w: i64, cfg: &ExtremalConfig) -> ExtremalRow {
    let delta = dim_qm(l, w);
    let kappa = kappa_stable(l);
    let mut row = ExtremalRow {
        l,
        w,
        status: CellStatus::Empty,
        nu: None,
        delta,
        kappa,
        lower_bound_ok: false,
        upper_bound_ok: false,
        meets_dimension_bound: false,
        prec_used: 0,
        message: None,
    };
    if delta < 1 {
        return row;
    }
    match numax_and_form(l, w, cfg) {
        Ok(r) => {
            row.status = CellStatus::Observed;
            row.nu = Some(r.nu);
            row.lower_bound_ok = r.nu >= delta - 1;
            row.upper_bound_ok = r.nu <= delta - 1 + kappa;
            row.meets_dimension_bound = r.meets_dimension_bound;
            row.prec_used = r.certificate.q_prec;
        }
        Err(e) => {
            row.status = if e.is_precision() { CellStatus::PrecisionExhausted } else { CellStatus::Failed };
            row.message = Some(e.to_string());
        }
    }
    row
}

/// `nu_max(l, w)` against `delta_l(w) - 1` and `delta_l(w) - 1 + kappa_l`
/// for every cell of the grid.
pub fn scan_extremal(cells: &[(u32, i64)], cfg: &ExtremalConfig, exec: Execution) -> Vec<ExtremalRow> {
    par::map(exec, cells.to_vec(), |(l, w)| extremal_row(l, w, cfg))
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub l: u32,
    pub w: i64,
    pub status: CellStatus,
    pub nu: Option<i64>,
    pub delta: i64,
    /// Every coefficient below `prec_used` is an integer.
    pub integral: bool,
    /// Every coefficient from `q^nu` up to `prec_used` is positive.
    pub positive: bool,
    pub nonnegative: bool,
    /// Largest prime dividing a denominator.
    pub max_denominator_prime: Option<String>,
    /// Some denominator cofactor could not be split into primes.
    pub denominator_unfactored: bool,
    /// Denominator primes are all `< w`.
    pub primes_below_w: bool,
    /// q-coefficients examined.
    pub prec_used: usize,
    pub message: Option<String>,
}

fn positive_from_valuation(s: &USeries, nu: i64) -> bool {
    (nu..s.q_prec()).all(|n| s.q_coeff(n).is_positive())
}

fn integrality_row(l: u32, w: i64, q_prec: usize, cfg: &ExtremalConfig) -> ScanRow {
    let delta = dim_qm(l, w);
    let mut row = ScanRow {
        l,
        w,
        status: CellStatus::Empty,
        nu: None,
        delta,
        integral: false,
        positive: false,
        nonnegative: false,
        max_denominator_prime: None,
        denominator_unfactored: false,
        primes_below_w: false,
        prec_used: q_prec,
        message: None,
    };
    if delta < 1 {
        return row;
    }
    let excess = w - 2 * l as i64;
    if excess < 0 || excess == 2 {
        row.status = CellStatus::Skipped;
        row.message = Some("no form of weight w and depth exactly l".into());
        return row;
    }
    let r: ExtremalResult = match numax_and_form(l, w, cfg) {
        Ok(r) => r,
        Err(e) => {
            row.status = if e.is_precision() { CellStatus::PrecisionExhausted } else { CellStatus::Failed };
            row.message = Some(e.to_string());
            return row;
        }
    };
    let s = r.form_poly.expand(q_prec.max(r.nu as usize + 1));
    row.prec_used = s.q_prec() as usize;
    row.status = CellStatus::Observed;
    row.nu = Some(r.nu);
    row.integral = s.all_integral();
    row.nonnegative = s.all_nonnegative();
    row.positive = positive_from_valuation(&s, r.nu);
    let lcm = s.denominator_lcm();
    if !lcm.is_one() {
        let f = factor(&lcm);
        row.max_denominator_prime = f.max_prime().map(BigInt::to_string);
        row.denominator_unfactored = !f.unfactored.is_empty();
    }
    row.primes_below_w = w > 0 && strip_primes_below(&lcm, w as u64).is_one() || lcm.is_one();
    row
}

/// Integrality and positivity of `f_{l,w}` to `q_prec` coefficients.
pub fn scan_integrality(cells: &[(u32, i64)], q_prec: usize, cfg: &ExtremalConfig, exec: Execution) -> Vec<ScanRow> {
    par::map(exec, cells.to_vec(), |(l, w)| integrality_row(l, w, q_prec, cfg))
}

/// A cell where an observed statement of the depth `<= 4` conjecture fails.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub l: u32,
    pub w: i64,
    pub what: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Conjecture1Report {
    pub q_prec: usize,
    pub cells_checked: usize,
    pub cells_skipped: usize,
    pub violations: Vec<Violation>,
    /// Weights `w` with `f_{l,w}` integral to `q_prec`, per `l`.
    pub integral_weights: Vec<(u32, Vec<i64>)>,
    pub rows: Vec<ScanRow>,
    pub label: String,
}

/// For `1 <= l <= l_max <= 4` and even `w <= w_max`: denominators of
/// `f_{l,w}` only involve primes `< w`, and coefficients are positive except
/// for `f_{1,2} = E2`.
pub fn conjecture1_scan(l_max: u32, w_max: i64, q_prec: usize, cfg: &ExtremalConfig, exec: Execution) -> Result<Conjecture1Report> {
    if l_max > 4 {
        return Err(QmxError::OutOfRange(format!("the conjecture concerns l <= 4, got {l_max}")));
    }
    let cells = grid(1..=l_max, w_max);
    let rows = scan_integrality(&cells, q_prec, cfg, exec);
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut skipped = 0;
    for r in &rows {
        match r.status {
            CellStatus::Observed => checked += 1,
            CellStatus::Empty | CellStatus::Skipped => {
                skipped += 1;
                continue;
            }
            _ => {
                violations.push(Violation { l: r.l, w: r.w, what: r.message.clone().unwrap_or_default() });
                continue;
            }
        }
        if !r.primes_below_w {
            violations.push(Violation {
                l: r.l,
                w: r.w,
                what: format!("denominator prime {:?} >= w", r.max_denominator_prime),
            });
        }
        let exempt = r.l == 1 && r.w == 2;
        if !r.positive && !exempt {
            violations.push(Violation { l: r.l, w: r.w, what: "non-positive coefficient".into() });
        }
    }
    let integral_weights = (1..=l_max)
        .map(|l| {
            let ws = rows
                .iter()
                .filter(|r| r.l == l && r.status == CellStatus::Observed && r.integral)
                .map(|r| r.w)
                .collect();
            (l, ws)
        })
        .collect();
    Ok(Conjecture1Report {
        q_prec,
        cells_checked: checked,
        cells_skipped: skipped,
        violations,
        integral_weights,
        rows,
        label: format!("observed to q-precision {q_prec}; not a proof"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExtremalConfig {
        ExtremalConfig::default()
    }

    #[test]
    fn extremal_grid_meets_bounds() {
        let rows = scan_extremal(&grid(0..=4, 40), &cfg(), Execution::Parallel);
        for r in &rows {
            if r.status == CellStatus::Observed {
                assert!(r.meets_dimension_bound && r.lower_bound_ok && r.upper_bound_ok, "{r:?}");
            } else {
                assert_eq!(r.status, CellStatus::Empty, "{r:?}");
            }
        }
        let seq = scan_extremal(&grid(0..=4, 40), &cfg(), Execution::Sequential);
        let key = |v: &[ExtremalRow]| v.iter().map(|r| (r.l, r.w, r.nu)).collect::<Vec<_>>();
        assert_eq!(key(&rows), key(&seq));
    }

    #[test]
    fn integrality_examples() {
        let rows = scan_integrality(&[(1, 6), (1, 14), (1, 2), (3, 6), (1, 4)], 30, &cfg(), Execution::Sequential);
        assert!(rows[0].integral && rows[0].positive);
        assert!(rows[1].integral && rows[1].positive);
        assert!(rows[2].integral && !rows[2].positive);
        assert!(rows[3].integral && rows[3].positive);
        assert_eq!(rows[4].status, CellStatus::Skipped);
        let skipped = scan_integrality(&[(2, 6)], 10, &cfg(), Execution::Sequential);
        assert_eq!(skipped[0].status, CellStatus::Skipped);
    }

    #[test]
    fn conjecture_scan_small() {
        let r = conjecture1_scan(2, 30, 25, &cfg(), Execution::Parallel).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(r.cells_checked > 0);
        assert!(conjecture1_scan(5, 10, 10, &cfg(), Execution::Parallel).is_err());
    }
}
