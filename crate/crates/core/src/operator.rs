//! Sparse matrices built from basis-label actions.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;

/// Matrix stored as `(row, col, value)` triplets; duplicates add up.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn new(dim: usize) -> Self {
        SparseOp {
            dim,
            entries: Vec::new(),
        }
    }

    /// Builds the operator from a per-column action: `action(col)` yields
    /// the `(row, amplitude)` pairs of `op |col⟩`.
    pub fn from_action<I, F>(dim: usize, mut action: F) -> Self
    where
        F: FnMut(usize) -> I,
        I: IntoIterator<Item = (usize, C64)>,
    {
        let mut op = SparseOp::new(dim);
        for col in 0..dim {
            for (row, v) in action(col) {
                op.push(row, col, v);
            }
        }
        op
    }

    pub fn push(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.dim && col < self.dim);
        if value != C64::new(0.0, 0.0) {
            self.entries.push((row, col, value));
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn adjoint(&self) -> SparseOp {
        SparseOp {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| (c, r, v.conj()))
                .collect(),
        }
    }

    /// Adds the Hermitian conjugate of every entry, turning `A` into `A + A†`.
    pub fn plus_adjoint(&self) -> SparseOp {
        let mut out = self.clone();
        out.entries.extend(self.adjoint().entries);
        out
    }

    pub fn scaled(&self, factor: C64) -> SparseOp {
        SparseOp {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|&(r, c, v)| (r, c, v * factor))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<C64>) -> SparseOp {
        let mut op = SparseOp::new(m.nrows());
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                op.push(r, c, m[(r, c)]);
            }
        }
        op
    }

    /// `self† self`, computed densely (operators here are tiny).
    pub fn adjoint_times_self(&self) -> SparseOp {
        let d = self.to_dense();
        SparseOp::from_dense(&(d.adjoint() * &d))
    }
}

/// Largest entry of `|A - A†|`.
pub fn hermiticity_error(m: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
