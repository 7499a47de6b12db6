use super::{LatticeError, Matrix};
use crate::scalar::Scalar;

/// Row-style Hermite normal form of a row lattice.
///
/// Rows are in echelon form with strictly increasing pivot columns, pivots
/// positive, and entries above each pivot reduced into `[0, pivot)`. Zero rows
/// are dropped, so the row count is the lattice rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hnf<T> {
    basis: Matrix<T>,
    pivots: Vec<usize>,
}

impl<T: Scalar> Hnf<T> {
    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    /// Canonical representative of the coset `v + L`.
    ///
    /// Two vectors lie in the same coset exactly when their residues are equal.
    pub fn reduce(&self, v: &[T]) -> Result<Vec<T>, LatticeError> {
        if v.len() != self.basis.cols() {
            return Err(LatticeError::Dimension { expected: self.basis.cols(), got: v.len() });
        }
        let mut out = v.to_vec();
        for (k, &p) in self.pivots.iter().enumerate() {
            let q = out[p].div_floor(&self.basis[(k, p)]);
            if q.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate().skip(p) {
                *o = o.try_sub_mul(&q, &self.basis[(k, j)])?;
            }
        }
        Ok(out)
    }

    /// `reduce` writing into `out`, which must have the column count.
    pub fn reduce_into(&self, v: &[T], out: &mut [T]) -> Result<(), LatticeError> {
        if v.len() != self.basis.cols() || out.len() != v.len() {
            return Err(LatticeError::Dimension { expected: self.basis.cols(), got: v.len() });
        }
        out.clone_from_slice(v);
        for (k, &p) in self.pivots.iter().enumerate() {
            let q = out[p].div_floor(&self.basis[(k, p)]);
            if q.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate().skip(p) {
                *o = o.try_sub_mul(&q, &self.basis[(k, j)])?;
            }
        }
        Ok(())
    }

    pub fn contains(&self, v: &[T]) -> Result<bool, LatticeError> {
        Ok(self.reduce(v)?.iter().all(|x| x.is_zero()))
    }

    /// True iff `v` lies in the rational span of the lattice, so that adding
    /// it does not raise the rank.
    pub fn spans(&self, v: &[T]) -> Result<bool, LatticeError> {
        if v.len() != self.basis.cols() {
            return Err(LatticeError::Dimension { expected: self.basis.cols(), got: v.len() });
        }
        let mut w = v.to_vec();
        for (k, &p) in self.pivots.iter().enumerate() {
            if w[p].is_zero() {
                continue;
            }
            let pivot = &self.basis[(k, p)];
            let g = w[p].gcd(pivot);
            let (sw, sr) = (pivot.clone() / g.clone(), w[p].clone() / g);
            for (j, x) in w.iter_mut().enumerate().skip(p) {
                *x = x.try_mul(&sw)?.try_sub_mul(&sr, &self.basis[(k, j)])?;
            }
        }
        Ok(w.iter().all(|x| x.is_zero()))
    }

    /// HNF of this lattice extended by one more generator.
    pub fn extend(&self, v: &[T]) -> Result<Hnf<T>, LatticeError> {
        let mut m = self.basis.clone();
        m.push_row(v)?;
        hnf(&m)
    }
}

/// Row-style Hermite normal form of the row lattice of `m`.
pub fn hnf<T: Scalar>(m: &Matrix<T>) -> Result<Hnf<T>, LatticeError> {
    let cols = m.cols();
    let mut work: Vec<Vec<T>> = (0..m.rows())
        .map(|i| m.row(i).to_vec())
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut out: Vec<Vec<T>> = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..cols {
        if work.is_empty() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            let mut count = 0;
            for (i, r) in work.iter().enumerate() {
                if r[col].is_zero() {
                    continue;
                }
                count += 1;
                if best.map_or(true, |b| r[col].abs() < work[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(p) = best else { break };
            if count == 1 {
                let mut row = work.swap_remove(p);
                if row[col].is_negative() {
                    for x in row.iter_mut() {
                        *x = x.try_neg()?;
                    }
                }
                out.push(row);
                pivots.push(col);
                break;
            }
            let pivot_row = work[p].clone();
            for (i, r) in work.iter_mut().enumerate() {
                if i == p || r[col].is_zero() {
                    continue;
                }
                let q = r[col].div_floor(&pivot_row[col]);
                for j in col..cols {
                    r[j] = r[j].try_sub_mul(&q, &pivot_row[j])?;
                }
            }
            work.retain(|r| r.iter().any(|x| !x.is_zero()));
        }
    }
    for k in 0..out.len() {
        let p = pivots[k];
        let (upper, lower) = out.split_at_mut(k);
        let pivot_row = &lower[0];
        for r in upper.iter_mut() {
            let q = r[p].div_floor(&pivot_row[p]);
            if q.is_zero() {
                continue;
            }
            for j in p..cols {
                r[j] = r[j].try_sub_mul(&q, &pivot_row[j])?;
            }
        }
    }
    Ok(Hnf { basis: Matrix::from_rows(cols, &out)?, pivots })
}

/// True iff `v` is an integer combination of the rows of `lattice_rows`.
pub fn lattice_contains<T: Scalar>(lattice_rows: &Matrix<T>, v: &[T]) -> Result<bool, LatticeError> {
    if v.len() != lattice_rows.cols() {
        return Err(LatticeError::Dimension { expected: lattice_rows.cols(), got: v.len() });
    }
    hnf(lattice_rows)?.contains(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn m(cols: usize, rows: &[&[i64]]) -> Matrix<i64> {
        Matrix::from_rows(cols, rows).unwrap()
    }

    #[test]
    fn rational_span_ignores_torsion() {
        let h = hnf(&m(3, &[&[2, 0, 0], &[0, 3, 1]])).unwrap();
        assert!(h.spans(&[1, 0, 0]).unwrap());
        assert!(h.spans(&[5, 6, 2]).unwrap());
        assert!(!h.spans(&[0, 1, 0]).unwrap());
        assert!(!h.spans(&[0, 0, 1]).unwrap());
        assert!(hnf(&m(2, &[&[0, 0]])).unwrap().spans(&[0, 0]).unwrap());
    }

    #[test]
    fn identity_is_fixed() {
        let h = hnf(&m(2, &[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(h.basis().to_rows(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn dependent_row_is_dropped() {
        let h = hnf(&m(2, &[&[2, 4], &[4, 8]])).unwrap();
        assert_eq!(h.basis().to_rows(), vec![vec![2, 4]]);
    }

    #[test]
    fn gcd_row_emerges() {
        // Oracle: (2,3) = (6,9) - (4,6), and both generators are multiples of (2,3).
        let h = hnf(&m(2, &[&[4, 6], &[6, 9]])).unwrap();
        assert_eq!(h.basis().to_rows(), vec![vec![2, 3]]);
    }

    #[test]
    fn entries_above_pivots_are_reduced() {
        let h = hnf(&m(3, &[&[1, 5, 7], &[0, 3, 11], &[0, 0, -4]])).unwrap();
        let b = h.basis();
        assert_eq!(h.pivots(), &[0, 1, 2]);
        for k in 0..3 {
            assert!(b[(k, k)] > 0);
            for j in 0..k {
                assert!(b[(j, k)] >= 0 && b[(j, k)] < b[(k, k)]);
            }
        }
    }

    #[test]
    fn membership_examples() {
        let ones = m(3, &[&[1, 1, 1]]);
        assert!(lattice_contains(&ones, &[2, 2, 2]).unwrap());
        assert!(!lattice_contains(&ones, &[1, 0, 0]).unwrap());
        // a*(1,1,1) + b*(2,0,0) = (0,1,1) forces 2b = -1: the exhaustive
        // coefficient search finds nothing.
        let l = m(3, &[&[1, 1, 1], &[2, 0, 0]]);
        let oracle = (-5i64..=5).any(|a| (-5i64..=5).any(|b| [a + 2 * b, a, a] == [0, 1, 1]));
        assert!(!oracle);
        assert_eq!(lattice_contains(&l, &[0, 1, 1]).unwrap(), oracle);
        assert!(lattice_contains(&l, &[-1, 1, 1]).unwrap());
        assert_eq!(
            lattice_contains(&ones, &[1, 1]),
            Err(LatticeError::Dimension { expected: 3, got: 2 })
        );
    }

    #[test]
    fn empty_lattice() {
        let h = hnf(&Matrix::<i64>::zeros(0, 4)).unwrap();
        assert_eq!(h.rank(), 0);
        assert!(h.contains(&[0, 0, 0, 0]).unwrap());
        assert!(!h.contains(&[0, 1, 0, 0]).unwrap());
    }

    #[test]
    fn bigint_agrees_with_i64() {
        let a = m(3, &[&[12, -7, 3], &[5, 5, 5], &[-9, 2, 8]]);
        let small = hnf(&a).unwrap();
        let big = hnf(&a.convert::<BigInt>().unwrap()).unwrap();
        assert_eq!(small.basis().convert::<BigInt>().unwrap(), *big.basis());
    }
}
