//! Dense matrices over the integers with unbounded entries.
//!
//! Decomposition and Cartan matrices in this crate are tiny, so storage is a
//! plain row-major `Vec<BigInt>`. Nothing here ever touches floating point.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error(
        "dimension error: expected {expected} entries for a {rows}x{cols} matrix, got {actual}"
    )]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },
    #[error("ragged row {row}: expected {expected} entries, got {actual}")]
    Ragged {
        /// 1-based row index.
        row: usize,
        expected: usize,
        actual: usize,
    },
    #[error("dimension error: matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension error: matrix has no {0}")]
    Empty(&'static str),
}

/// Exact integer matrix, immutable after construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, MatrixError> {
        let expected = rows
            .checked_mul(cols)
            .ok_or(MatrixError::Empty("representable size"))?;
        if entries.len() != expected {
            return Err(MatrixError::EntryCount {
                rows,
                cols,
                expected,
                actual: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from rows, rejecting ragged input. An empty row list
    /// gives the 0x0 matrix.
    pub fn from_rows<T, R>(rows: R) -> Result<Self, MatrixError>
    where
        T: Into<BigInt>,
        R: IntoIterator,
        R::Item: IntoIterator<Item = T>,
    {
        let mut entries = Vec::new();
        let mut cols = None;
        let mut count = 0;
        for (i, row) in rows.into_iter().enumerate() {
            let before = entries.len();
            entries.extend(row.into_iter().map(Into::into));
            let len = entries.len() - before;
            match cols {
                None => cols = Some(len),
                Some(c) if c != len => {
                    return Err(MatrixError::Ragged {
                        row: i + 1,
                        expected: c,
                        actual: len,
                    })
                }
                _ => {}
            }
            count += 1;
        }
        Self::new(count, cols.unwrap_or(0), entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    /// Panics if the index is out of bounds.
    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        assert!(
            row < self.rows && col < self.cols,
            "index ({row}, {col}) out of bounds"
        );
        &self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[BigInt] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[BigInt]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = &BigInt> + '_ {
        (0..self.rows).map(move |i| self.get(i, col))
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.row_iter().map(<[BigInt]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// `ᵀD·D`: the Gram matrix of the columns of `self`.
    ///
    /// `C[i][j] = Σ_r D[r][i]·D[r][j]`. The result is symmetric and
    /// `cols × cols`. Requires at least one row and one column.
    pub fn transpose_multiply(&self) -> Result<Self, MatrixError> {
        if self.rows == 0 {
            return Err(MatrixError::Empty("rows"));
        }
        if self.cols == 0 {
            return Err(MatrixError::Empty("columns"));
        }
        let n = self.cols;
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = BigInt::zero();
                for row in self.row_iter() {
                    if !row[i].is_zero() && !row[j].is_zero() {
                        acc += &row[i] * &row[j];
                    }
                }
                if i != j {
                    out[j * n + i] = acc.clone();
                }
                out[i * n + j] = acc;
            }
        }
        Ok(Self {
            rows: n,
            cols: n,
            entries: out,
        })
    }

    pub fn is_symmetric(&self) -> Result<bool, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.cols;
        Ok((0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == self.get(j, i))))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }

    /// Entrywise `self >= other`; `None` when the shapes differ.
    pub fn dominates(&self, other: &Self) -> Option<bool> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(self.entries.iter().zip(&other.entries).all(|(a, b)| a >= b))
    }

    pub fn diagonal(&self) -> impl Iterator<Item = &BigInt> + '_ {
        (0..self.rows.min(self.cols)).map(move |i| self.get(i, i))
    }

    /// Number of nonzero entries in each column.
    pub fn column_nonzero_counts(&self) -> Vec<usize> {
        (0..self.cols)
            .map(|j| self.column(j).filter(|e| !e.is_zero()).count())
            .collect()
    }

    /// Simultaneous row/column relabelling `M'[i][j] = M[perm[i]][perm[j]]`,
    /// i.e. `ᵀP·M·P` for the permutation matrix with `P[perm[i]][i] = 1`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Result<Self, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        assert_eq!(perm.len(), self.cols, "permutation length mismatch");
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(perm[i], perm[j]).clone()
        }))
    }

    /// Copy with entry (`row`, `col`) replaced.
    pub fn with_entry(&self, row: usize, col: usize, value: BigInt) -> Self {
        let mut out = self.clone();
        out.entries[row * self.cols + col] = value;
        out
    }

    /// Entry as `i64` if it fits.
    pub fn get_i64(&self, row: usize, col: usize) -> Option<i64> {
        i64::try_from(self.get(row, col)).ok()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(
                self.row_iter()
                    .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()),
            )
            .finish()
    }
}

impl fmt::Display for IntMatrix {
    /// Right-aligned rows, one per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .entries
            .iter()
            .map(|e| e.to_string().len())
            .max()
            .unwrap_or(1);
        for (i, row) in self.row_iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|e| format!("{e:>width$}")).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}
