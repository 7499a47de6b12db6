
use super::{LatticeError, Matrix};
use crate::scalar::Scalar;

/// Smith normal form `left * m * right = diag(divisors)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult<T> {
    /// Diagonal entries, `min(rows, cols)` of them, nonzero ones first.
    pub divisors: Vec<T>,
    pub rank: usize,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
    /// Inverse of `right`, tracked alongside it.
    pub right_inverse: Matrix<T>,
}

impl<T: Scalar> SnfResult<T> {
    /// Nonzero divisors greater than one.
    pub fn torsion(&self) -> Vec<T> {
        self.divisors.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect()
    }
}

/// Smith normal form by alternating row/column elimination, always pivoting
/// on the entry of least absolute value.
pub fn snf<T: Scalar>(m: &Matrix<T>) -> Result<SnfResult<T>, LatticeError> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut left = Matrix::identity(rows);
    let mut right = Matrix::identity(cols);
    let mut right_inv = Matrix::identity(cols);
    let n = rows.min(cols);
    let mut rank = 0;
    'outer: for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = &a[(i, j)];
                    if v.is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| v.abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break 'outer };
            a.swap_rows(t, pi);
            left.swap_rows(t, pi);
            a.swap_cols(t, pj);
            right.swap_cols(t, pj);
            right_inv.swap_rows(t, pj);

            let pivot = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&pivot);
                a.row_sub_mul(i, &q, t)?;
                left.row_sub_mul(i, &q, t)?;
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&pivot);
                a.col_sub_mul(j, &q, t)?;
                right.col_sub_mul(j, &q, t)?;
                right_inv.row_sub_mul(t, &q.try_neg()?, j)?;
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a[(i, j)].mod_floor(&pivot).is_zero()));
            match bad {
                Some(i) => {
                    let minus_one = T::one().try_neg()?;
                    a.row_sub_mul(t, &minus_one, i)?;
                    left.row_sub_mul(t, &minus_one, i)?;
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t)?;
            left.negate_row(t)?;
        }
        rank = t + 1;
    }
    let divisors = (0..n).map(|i| a[(i, i)].clone()).collect();
    Ok(SnfResult { divisors, rank, left, right, right_inverse: right_inv })
}
