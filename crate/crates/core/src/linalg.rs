//! Minimal dense row-major matrix and a small linear solver.
//!
//! The classifier and the attribution solve need only dense storage, row
//! views, and Gaussian elimination on systems of at most a few dozen
//! unknowns, so this stays hand-rolled and generic over [`Scalar`].

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T: Scalar = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Builds from a flat row-major buffer; `data.len()` must be `rows·cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeError(format!(
                "expected {rows}x{cols} = {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds from equally long rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::ShapeError(format!(
                    "row {i} has {} values, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
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

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    /// Appends one row; the length must match the column count (or define it
    /// when the matrix is still 0×0).
    pub fn push_row(&mut self, row: &[T]) -> Result<()> {
        if self.rows == 0 && self.cols == 0 {
            self.cols = row.len();
        }
        if row.len() != self.cols {
            return Err(Error::ShapeError(format!(
                "pushed row has {} values, expected {}",
                row.len(),
                self.cols
            )));
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    /// New matrix containing the selected rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Solves the square system `a·x = b` by Gaussian elimination with partial
/// pivoting. `a` is consumed as scratch space.
pub fn solve_dense<T: Scalar>(mut a: Matrix<T>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::ShapeError(format!(
            "solve needs a square system, got {}x{} with rhs length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    for col in 0..n {
        let mut pivot = col;
        let mut best = a.get(col, col).abs();
        for r in col + 1..n {
            let v = a.get(r, col).abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == T::zero() || !best.is_finite() {
            return Err(Error::RankDeficient(format!(
                "no usable pivot in column {col}"
            )));
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a.get(col, j);
                a.set(col, j, a.get(pivot, j));
                a.set(pivot, j, tmp);
            }
            b.swap(col, pivot);
        }
        let diag = a.get(col, col);
        for r in col + 1..n {
            let factor = a.get(r, col) / diag;
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                let v = a.get(r, j) - factor * a.get(col, j);
                a.set(r, j, v);
            }
            b[r] = b[r] - factor * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for j in col + 1..n {
            acc = acc - a.get(col, j) * x[j];
        }
        x[col] = acc / a.get(col, col);
    }
    Ok(x)
}
