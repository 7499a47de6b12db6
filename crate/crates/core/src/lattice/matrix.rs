use std::fmt;

use num_traits::Zero;

use super::LatticeError;
use crate::scalar::{convert, Scalar};

/// Dense row-major integer matrix. Zero rows or columns are allowed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows<R: AsRef<[T]>>(cols: usize, rows: &[R]) -> Result<Self, LatticeError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(LatticeError::Dimension { expected: cols, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn from_i64_rows(cols: usize, rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LatticeError::Dimension { expected: cols, got: row.len() });
            }
            data.extend(row.iter().map(|&x| <T as Scalar>::from_i64(x)));
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[T]) -> Result<(), LatticeError> {
        if row.len() != self.cols {
            return Err(LatticeError::Dimension { expected: self.cols, got: row.len() });
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] -= q * row[src]`
    pub fn row_sub_mul(&mut self, dst: usize, q: &T, src: usize) -> Result<(), LatticeError> {
        if q.is_zero() {
            return Ok(());
        }
        for j in 0..self.cols {
            let v = self[(dst, j)].try_sub_mul(q, &self[(src, j)])?;
            self[(dst, j)] = v;
        }
        Ok(())
    }

    /// `col[dst] -= q * col[src]`
    pub fn col_sub_mul(&mut self, dst: usize, q: &T, src: usize) -> Result<(), LatticeError> {
        if q.is_zero() {
            return Ok(());
        }
        for i in 0..self.rows {
            let v = self[(i, dst)].try_sub_mul(q, &self[(i, src)])?;
            self[(i, dst)] = v;
        }
        Ok(())
    }

    pub fn negate_row(&mut self, i: usize) -> Result<(), LatticeError> {
        for j in 0..self.cols {
            let v = self[(i, j)].try_neg()?;
            self[(i, j)] = v;
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix<T>) -> Result<Matrix<T>, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::Dimension { expected: self.cols, got: other.rows });
        }
        let mut out: Matrix<T> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].try_add(&a.try_mul(&other[(k, j)])?)?;
                    out[(i, j)] = v;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[T]) -> Result<Vec<T>, LatticeError> {
        if v.len() != self.rows {
            return Err(LatticeError::Dimension { expected: self.rows, got: v.len() });
        }
        let mut out = vec![T::zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = o.try_add(&x.try_mul(&self[(i, j)])?)?;
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>, LatticeError> {
        if v.len() != self.cols {
            return Err(LatticeError::Dimension { expected: self.cols, got: v.len() });
        }
        let mut out = vec![T::zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, x) in v.iter().enumerate() {
                *o = o.try_add(&self[(i, j)].try_mul(x)?)?;
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<T, LatticeError> {
        if self.rows != self.cols {
            return Err(LatticeError::Dimension { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(T::one());
        }
        let mut a = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = sign.try_neg()?;
                    }
                    None => return Ok(T::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[(i, j)]
                        .try_mul(&a[(k, k)])?
                        .try_sub(&a[(i, k)].try_mul(&a[(k, j)])?)?;
                    a[(i, j)] = num / prev.clone();
                }
            }
            prev = a[(k, k)].clone();
        }
        a[(n - 1, n - 1)].try_mul(&sign)
    }

    pub fn convert<U: Scalar>(&self) -> Result<Matrix<U>, LatticeError> {
        let data = self.data.iter().map(convert).collect::<Result<Vec<U>, _>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn empty_matrices_are_legal() {
        let m: Matrix<i64> = Matrix::zeros(0, 3);
        assert_eq!(m.rows(), 0);
        assert_eq!(m.cols(), 3);
        assert_eq!(Matrix::<i64>::zeros(0, 0).determinant().unwrap(), 1);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = Matrix::<i64>::from_i64_rows(3, &[vec![2, -1, 0], vec![1, 3, 4], vec![0, 5, -2]]).unwrap();
        // 2*(3*-2 - 4*5) - (-1)*(1*-2 - 4*0) + 0
        assert_eq!(m.determinant().unwrap(), 2 * (-6 - 20) + (-2));
        let z = Matrix::<i64>::from_i64_rows(2, &[vec![0, 1], vec![0, 2]]).unwrap();
        assert_eq!(z.determinant().unwrap(), 0);
        let swap = Matrix::<BigInt>::from_i64_rows(2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(swap.determinant().unwrap(), BigInt::from(-1));
    }

    #[test]
    fn multiplication_overflow_is_reported() {
        let m = Matrix::<i64>::from_i64_rows(1, &[vec![i64::MAX]]).unwrap();
        assert_eq!(m.mul(&m), Err(LatticeError::Overflow));
        let big: Matrix<BigInt> = m.convert().unwrap();
        assert!(big.mul(&big).is_ok());
    }
}
