//! Exact linear algebra: fraction-free row echelon form over the integers
//! and Gauss-Jordan over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{QmxError, Result};
use crate::rational::Rational;

/// Fraction-free (Bareiss) row echelon form of an integer matrix, carried out
/// on `[A | I]` so that each echelon row is an explicit integer combination of
/// the original rows.
#[derive(Debug, Clone)]
pub struct Echelon {
    /// Echelon rows; row `i` is zero left of `pivots[i]`.
    pub rows: Vec<Vec<BigInt>>,
    /// `transform[i]` gives `rows[i]` as a combination of the input rows.
    pub transform: Vec<Vec<BigInt>>,
    /// Pivot column of each non-zero echelon row, strictly increasing.
    pub pivots: Vec<usize>,
    /// Combinations of input rows that vanish on every column.
    pub null_combinations: Vec<Vec<BigInt>>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Row-reduces `a` column by column. The pivot in each column is the
/// remaining row with the smallest original index, so the result depends
/// only on the row order of the input.
pub fn fraction_free_echelon(a: Vec<Vec<BigInt>>) -> Result<Echelon> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rows = a;
    let mut transform: Vec<Vec<BigInt>> = (0..nrows)
        .map(|i| {
            let mut v = vec![BigInt::zero(); nrows];
            v[i] = BigInt::one();
            v
        })
        .collect();
    let mut origin: Vec<usize> = (0..nrows).collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let pick = (r..nrows)
            .filter(|&i| !rows[i][c].is_zero())
            .min_by_key(|&i| origin[i]);
        let Some(p) = pick else { continue };
        rows.swap(r, p);
        transform.swap(r, p);
        origin.swap(r, p);
        let piv = rows[r][c].clone();
        for i in r + 1..nrows {
            let factor = rows[i][c].clone();
            for j in c + 1..ncols {
                let v = &piv * &rows[i][j] - &factor * &rows[r][j];
                rows[i][j] = exact_div(v, &prev)?;
            }
            rows[i][c] = BigInt::zero();
            for j in 0..nrows {
                let v = &piv * &transform[i][j] - &factor * &transform[r][j];
                transform[i][j] = exact_div(v, &prev)?;
            }
            // columns left of c are already zero in rows below r
        }
        prev = piv;
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    let null_combinations = transform.split_off(r);
    Ok(Echelon { rows, transform, pivots, null_combinations })
}

fn exact_div(v: BigInt, d: &BigInt) -> Result<BigInt> {
    let (q, rem) = v.div_rem(d);
    if !rem.is_zero() {
        return Err(QmxError::Invariant("inexact division in fraction-free elimination".into()));
    }
    Ok(q)
}

/// Inverse of a square rational matrix, or the error [`QmxError::Singular`]
/// carrying a non-zero `c` with `c^T M = 0`.
pub fn inverse(m: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Err(QmxError::Singular { kernel: left_kernel_vector(m) });
        };
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(a: &mut [Vec<Rational>]) -> Vec<usize> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A non-zero vector `c` with `sum_i c_i * m[i] = 0`, as `num/den` strings.
/// Empty if the rows are independent.
pub fn left_kernel_vector(m: &[Vec<Rational>]) -> Vec<String> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut t: Vec<Vec<Rational>> =
        (0..ncols).map(|j| (0..nrows).map(|i| m[i][j].clone()).collect()).collect();
    let pivots = rref(&mut t);
    let Some(free) = (0..nrows).find(|c| !pivots.contains(c)) else {
        return Vec::new();
    };
    let mut v = vec![Rational::zero(); nrows];
    v[free] = Rational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -t[row][free].clone();
    }
    v.iter().map(crate::rational::to_string).collect()
}

pub fn to_rational_matrix(m: &[Vec<BigInt>]) -> Vec<Vec<Rational>> {
    m.iter()
        .map(|r| r.iter().cloned().map(Rational::from_integer).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn big(m: &[&[i64]]) -> Vec<Vec<BigInt>> {
        m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn echelon_skips_dependent_columns() {
        let a = big(&[&[0, 2, 4, 1], &[0, 1, 2, 3], &[0, 3, 6, 4]]);
        let e = fraction_free_echelon(a.clone()).unwrap();
        assert_eq!(e.pivots, vec![1, 3]);
        // each echelon row is the stated combination of input rows
        for (row, comb) in e.rows.iter().zip(&e.transform) {
            for j in 0..4 {
                let s: BigInt = (0..3).map(|i| &comb[i] * &a[i][j]).sum();
                assert_eq!(s, row[j]);
            }
        }
    }

    #[test]
    fn inverse_and_kernel() {
        let m = vec![vec![int(1), int(2)], vec![int(3), int(4)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![int(-2), int(1)], vec![frac(3, 2), frac(-1, 2)]]);
        let s = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        match inverse(&s) {
            Err(QmxError::Singular { kernel }) => assert_eq!(kernel, vec!["-2", "1"]),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn transform_reproduces_rows(entries in prop::collection::vec(-6i64..6, 20)) {
            let a: Vec<Vec<BigInt>> = entries.chunks(5).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let e = fraction_free_echelon(a.clone()).unwrap();
            for (k, (row, comb)) in e.rows.iter().zip(&e.transform).enumerate() {
                for j in 0..5 {
                    let s: BigInt = (0..4).map(|i| &comb[i] * &a[i][j]).sum();
                    prop_assert_eq!(&s, &row[j]);
                    if j < e.pivots[k] { prop_assert!(s.is_zero()); }
                }
                prop_assert!(!row[e.pivots[k]].is_zero());
            }
            let mut ra = to_rational_matrix(&a);
            prop_assert_eq!(rref(&mut ra), e.pivots);
        }
    }
}
