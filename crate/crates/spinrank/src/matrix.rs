//! Dense matrices over Q(i) with exact Gaussian elimination.

use std::ops::{Index, IndexMut};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

/// Row-major dense matrix of exact scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

impl ScalarMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ScalarMatrix {
            rows,
            cols,
            data: vec![GaussianRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = GaussianRational::one();
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> GaussianRational,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ScalarMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput(
                "matrix rows have unequal lengths".into(),
            ));
        }
        Ok(ScalarMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> ScalarMatrix {
        ScalarMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Exact matrix product; rows of the output are computed in parallel.
    pub fn matmul(&self, rhs: &ScalarMatrix) -> Result<ScalarMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidInput(format!(
                "matrix product dimension mismatch: {}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let cols = rhs.cols;
        let inner = self.cols;
        let data: Vec<GaussianRational> = (0..self.rows)
            .into_par_iter()
            .flat_map_iter(|r| {
                (0..cols).map(move |c| {
                    let mut acc = GaussianRational::zero();
                    for k in 0..inner {
                        if !self[(r, k)].is_zero() && !rhs[(k, c)].is_zero() {
                            acc += &(&self[(r, k)] * &rhs[(k, c)]);
                        }
                    }
                    acc
                })
            })
            .collect();
        Ok(ScalarMatrix {
            rows: self.rows,
            cols,
            data,
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Rank over Q(i) by exact elimination. The pivot is always the first
    /// nonzero entry scanning columns left to right, then rows top to
    /// bottom, so runs are reproducible bit for bit.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut next_row = 0;
        for col in 0..m.cols {
            if next_row == m.rows {
                break;
            }
            let Some(pivot) = (next_row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(next_row, pivot);
            let inv = m[(next_row, col)].inverse().expect("pivot is nonzero");
            for r in next_row + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] * &inv;
                for c in col..m.cols {
                    let delta = &factor * &m[(next_row, c)];
                    let cell = &mut m[(r, c)];
                    *cell -= &delta;
                }
            }
            next_row += 1;
        }
        next_row
    }

    /// Exact determinant by elimination with row-swap sign tracking.
    pub fn determinant(&self) -> Result<GaussianRational> {
        if self.rows != self.cols {
            return Err(Error::InvalidInput(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = GaussianRational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Ok(GaussianRational::zero());
            };
            if pivot != col {
                m.swap_rows(col, pivot);
                det = -det;
            }
            det = &det * &m[(col, col)];
            let inv = m[(col, col)].inverse().expect("pivot is nonzero");
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] * &inv;
                for c in col..n {
                    let delta = &factor * &m[(col, c)];
                    let cell = &mut m[(r, c)];
                    *cell -= &delta;
                }
            }
        }
        Ok(det)
    }

    /// Inverse of a unit upper-triangular matrix by back-substitution.
    pub fn invert_unitriangular(&self) -> Result<ScalarMatrix> {
        let n = self.rows;
        if self.rows != self.cols {
            return Err(Error::InvalidInput(
                "unitriangular inverse needs a square matrix".into(),
            ));
        }
        for i in 0..n {
            if !self[(i, i)].is_one() {
                return Err(Error::InvalidInput("matrix is not unit triangular".into()));
            }
            for j in 0..i {
                if !self[(i, j)].is_zero() {
                    return Err(Error::InvalidInput("matrix is not upper triangular".into()));
                }
            }
        }
        let mut inv = ScalarMatrix::identity(n);
        // solve column by column: inv[j][j] = 1, then rows above in reverse
        for j in 0..n {
            for i in (0..j).rev() {
                let mut acc = GaussianRational::zero();
                for l in i + 1..=j {
                    if !self[(i, l)].is_zero() && !inv[(l, j)].is_zero() {
                        acc += &(&self[(i, l)] * &inv[(l, j)]);
                    }
                }
                inv[(i, j)] = -acc;
            }
        }
        Ok(inv)
    }

    pub fn entries(&self) -> impl Iterator<Item = &GaussianRational> {
        self.data.iter()
    }
}

impl Index<(usize, usize)> for ScalarMatrix {
    type Output = GaussianRational;
    fn index(&self, (r, c): (usize, usize)) -> &GaussianRational {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ScalarMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut GaussianRational {
        &mut self.data[r * self.cols + c]
    }
}
