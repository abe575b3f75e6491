//! Dense matrices over a [`FieldSpec`] with Gaussian elimination.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldElement, FieldError, FieldSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

/// Result of [`Matrix::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub x: Vec<FieldElement>,
    /// False when the coefficient matrix has a nontrivial kernel; `x` is then
    /// the solution with all free variables set to zero.
    pub unique: bool,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r).iter().map(|e| e.0).collect::<Vec<_>>())?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &FieldSpec, k: usize) -> Matrix {
        let mut m = Matrix::zeros(field, k, k);
        for i in 0..k {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &FieldSpec, rows: &[Vec<FieldElement>]) -> Result<Matrix, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(field, rows, cols)
    }

    /// Like [`Matrix::from_rows`] but keeps the column count when `rows` is
    /// empty.
    pub fn from_rows_with_cols(
        field: &FieldSpec,
        rows: &[Vec<FieldElement>],
        cols: usize,
    ) -> Result<Matrix, MatrixError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(MatrixError::Dimension {
                    expected: format!("{cols} columns"),
                    got: format!("{} columns", row.len()),
                });
            }
            for &v in row {
                field.element(v.0)?;
                data.push(v);
            }
        }
        Ok(Matrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(
        field: &FieldSpec,
        columns: &[Vec<FieldElement>],
        rows: usize,
    ) -> Result<Matrix, MatrixError> {
        Ok(Self::from_rows_with_cols(field, columns, rows)?.transpose())
    }

    #[inline]
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// The submatrix formed by the listed columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.rows, columns.len());
        for r in 0..self.rows {
            for (k, &c) in columns.iter().enumerate() {
                out.set(r, k, self.get(r, c));
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>, MatrixError> {
        if v.len() != self.cols {
            return Err(MatrixError::Dimension {
                expected: format!("vector of length {}", self.cols),
                got: format!("length {}", v.len()),
            });
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.field.check_same(&other.field)?;
        if self.cols != other.rows {
            return Err(MatrixError::Dimension {
                expected: format!("{} rows", self.cols),
                got: format!("{} rows", other.rows),
            });
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// In-place reduction to reduced row echelon form. Returns the pivot
    /// columns; pivot entries are normalized to one.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for k in c..self.cols {
                let v = f.mul(self.get(r, k), inv);
                self.set(r, k, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for k in c..self.cols {
                    let v = f.sub(self.get(i, k), f.mul(factor, self.get(r, k)));
                    self.set(i, k, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }

    pub fn rank(&self) -> usize {
        // forward elimination only
        let f = &self.field;
        let mut m = self.data.clone();
        let cols = self.cols;
        let mut rank = 0;
        for c in 0..cols {
            if rank == self.rows {
                break;
            }
            let Some(pr) = (rank..self.rows).find(|&i| !m[i * cols + c].is_zero()) else {
                continue;
            };
            if pr != rank {
                for k in c..cols {
                    m.swap(pr * cols + k, rank * cols + k);
                }
            }
            let inv = f.inv(m[rank * cols + c]).expect("pivot is nonzero");
            for i in rank + 1..self.rows {
                let lead = m[i * cols + c];
                if lead.is_zero() {
                    continue;
                }
                let factor = f.mul(lead, inv);
                for k in c..cols {
                    m[i * cols + k] = f.sub(m[i * cols + k], f.mul(factor, m[rank * cols + k]));
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn determinant(&self) -> Result<FieldElement, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let f = &self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(f.zero());
            };
            if pr != c {
                m.swap_rows(pr, c);
                det = f.neg(det);
            }
            let pivot = m.get(c, c);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot)?;
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor.is_zero() {
                    continue;
                }
                for k in c..n {
                    let v = f.sub(m.get(i, k), f.mul(factor, m.get(c, k)));
                    m.set(i, k, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, self.field.one());
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(MatrixError::Singular);
        }
        let mut out = Matrix::zeros(&self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, aug.get(r, n + c));
            }
        }
        Ok(out)
    }

    /// Basis of the right kernel `{x : A x = 0}`, returned as the rows of a
    /// matrix in reduced row echelon form.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldElement>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(r.get(row, free));
            }
            basis.push(v);
        }
        if basis.is_empty() {
            return basis;
        }
        let (b, pivots) = Matrix::from_rows(f, &basis)
            .expect("basis rows have equal length")
            .rref();
        (0..pivots.len()).map(|i| b.row(i).to_vec()).collect()
    }

    /// Solves `A x = rhs`.
    pub fn solve(&self, rhs: &[FieldElement]) -> Result<Solution, MatrixError> {
        if rhs.len() != self.rows {
            return Err(MatrixError::Dimension {
                expected: format!("right-hand side of length {}", self.rows),
                got: format!("length {}", rhs.len()),
            });
        }
        let mut aug = Matrix::zeros(&self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, self.field.element(rhs[r].0)?);
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return Err(MatrixError::Inconsistent);
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = aug.get(row, self.cols);
        }
        Ok(Solution {
            x,
            unique: pivots.len() == self.cols,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn el(v: &[u64]) -> Vec<FieldElement> {
        v.iter().map(|&x| FieldElement(x)).collect()
    }

    #[test]
    fn identity_rank() {
        let f = make_field(3, 2).unwrap();
        for k in 0..6 {
            assert_eq!(Matrix::identity(&f, k).rank(), k);
        }
    }

    #[test]
    fn kernel_of_all_ones_row() {
        let f = make_field(2, 1).unwrap();
        let a = Matrix::from_rows(&f, &[el(&[1, 1])]).unwrap();
        assert_eq!(a.kernel_basis(), vec![el(&[1, 1])]);
    }

    #[test]
    fn kernel_is_rref_and_annihilated() {
        let f = make_field(5, 1).unwrap();
        let a = Matrix::from_rows(&f, &[el(&[1, 2, 3, 4]), el(&[2, 4, 1, 3])]).unwrap();
        let basis = a.kernel_basis();
        assert_eq!(basis.len(), 4 - a.rank());
        for v in &basis {
            assert!(a.mul_vec(v).unwrap().iter().all(|e| e.is_zero()));
        }
        let b = Matrix::from_rows(&f, &basis).unwrap();
        assert_eq!(b.rref().0, b);
    }

    #[test]
    fn solve_unique_and_underdetermined() {
        let f = make_field(7, 1).unwrap();
        let a = Matrix::from_rows(&f, &[el(&[1, 1]), el(&[1, 6])]).unwrap();
        let s = a.solve(&el(&[3, 1])).unwrap();
        assert!(s.unique);
        assert_eq!(a.mul_vec(&s.x).unwrap(), el(&[3, 1]));

        let b = Matrix::from_rows(&f, &[el(&[1, 1, 0])]).unwrap();
        let s = b.solve(&el(&[5])).unwrap();
        assert!(!s.unique);
        assert_eq!(b.mul_vec(&s.x).unwrap(), el(&[5]));

        let c = Matrix::from_rows(&f, &[el(&[1, 1]), el(&[2, 2])]).unwrap();
        assert_eq!(c.solve(&el(&[1, 1])), Err(MatrixError::Inconsistent));
    }

    #[test]
    fn determinant_and_inverse() {
        let f = make_field(2, 3).unwrap();
        let a = Matrix::from_rows(&f, &[el(&[1, 2]), el(&[3, 4])]).unwrap();
        let det = a.determinant().unwrap();
        // 1*4 - 2*3 in GF(8)
        assert_eq!(det, f.sub(f.mul(FieldElement(1), FieldElement(4)), f.mul(FieldElement(2), FieldElement(3))));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(&f, 2));
        let s = Matrix::from_rows(&f, &[el(&[1, 2]), el(&[1, 2])]).unwrap();
        assert_eq!(s.determinant().unwrap(), FieldElement(0));
        assert_eq!(s.inverse(), Err(MatrixError::Singular));
    }

    #[test]
    fn empty_shapes() {
        let f = make_field(2, 1).unwrap();
        let a = Matrix::zeros(&f, 3, 0);
        assert_eq!(a.rank(), 0);
        assert!(a.kernel_basis().is_empty());
        let b = Matrix::zeros(&f, 0, 3);
        assert_eq!(b.kernel_basis().len(), 3);
    }
}
