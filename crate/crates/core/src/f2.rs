//! Exact linear algebra over GF(2).
//!
//! The encoding of a forest is an invertible matrix `G` with
//! `G[j][i] = 1` iff `i` lies in the subtree of `j`, so that the stored
//! vector is `x = G * n`. Together with the prefix matrix `A` this yields
//! the ground-truth parity sets: row `j` of `A * G^-1` is exactly the set
//! of stored values whose XOR gives the prefix sum at `j`. This module is
//! the desk-scale oracle the rest of the crate is checked against; it is
//! not a performance path.

use thiserror::Error;

use crate::encoding::Boundary;
use crate::forest::Forest;
use crate::nodeset::NodeSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is singular: row {row} is linearly dependent")]
    Singular { row: usize },
    #[error("dimension mismatch: {left_rows}x{left_cols} * {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
}

/// Dense bit matrix, row-major, 64 bits per word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        self.bits[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let word = &mut self.bits[r * self.words_per_row + c / 64];
        if value {
            *word |= 1 << (c % 64);
        } else {
            *word &= !(1 << (c % 64));
        }
    }

    /// Column indices of the 1-bits in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        assert!(r < self.rows);
        let mut out = Vec::new();
        for (w, &word) in self.row_words(r).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                out.push(w * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    /// GF(2) matrix product.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row_support(r) {
                let src = other.row_words(k).to_vec();
                out.xor_into_row(r, &src);
            }
        }
        Ok(out)
    }

    /// Inverse over GF(2) via Gauss-Jordan elimination.
    pub fn invert(&self) -> Result<BitMatrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = BitMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| work.get(r, col))
                .ok_or(MatrixError::Singular { row: col })?;
            work.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let work_pivot = work.row_words(col).to_vec();
            let inv_pivot = inv.row_words(col).to_vec();
            for r in 0..n {
                if r != col && work.get(r, col) {
                    work.xor_into_row(r, &work_pivot);
                    inv.xor_into_row(r, &inv_pivot);
                }
            }
        }
        Ok(inv)
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    fn xor_into_row(&mut self, r: usize, words: &[u64]) {
        let start = r * self.words_per_row;
        for (dst, src) in self.bits[start..start + self.words_per_row]
            .iter_mut()
            .zip(words)
        {
            *dst ^= src;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words_per_row {
            self.bits
                .swap(a * self.words_per_row + w, b * self.words_per_row + w);
        }
    }
}

/// The matrix `G` with `x = G * n`: row `j` is the subtree indicator of `j`.
pub fn encoding_matrix(forest: &Forest) -> BitMatrix {
    let n = forest.size();
    let mut g = BitMatrix::zeros(n, n);
    for j in 0..n {
        for i in forest.subtree_nodes(j).expect("index in range").iter() {
            g.set(j, i, true);
        }
    }
    g
}

/// The prefix-sum matrix `A`: lower-triangular ones, with the diagonal
/// included or not depending on the boundary convention.
pub fn prefix_matrix(n: usize, boundary: Boundary) -> BitMatrix {
    let mut a = BitMatrix::zeros(n, n);
    for j in 0..n {
        let limit = match boundary {
            Boundary::Inclusive => j + 1,
            Boundary::Exclusive => j,
        };
        for i in 0..limit {
            a.set(j, i, true);
        }
    }
    a
}

/// Ground-truth parity sets: the row supports of `A * G^-1`.
pub fn parity_sets_oracle(
    forest: &Forest,
    boundary: Boundary,
) -> Result<Vec<NodeSet>, MatrixError> {
    let g = encoding_matrix(forest);
    let g_inv = g.invert()?;
    let a = prefix_matrix(forest.size(), boundary);
    let m = a.mul(&g_inv)?;
    Ok((0..forest.size())
        .map(|j| NodeSet::from_sorted(m.row_support(j)))
        .collect())
}
