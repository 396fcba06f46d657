use std::io::Write;

use nalgebra::DMatrix;

/// Collects `(row, col, value)` triplets; duplicates are summed on build.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(dim: usize) -> Self {
        TripletBuilder {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, cap: usize) -> Self {
        TripletBuilder {
            dim,
            entries: Vec::with_capacity(cap),
        }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.entries.push((row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorts, merges duplicates and compresses rows. `height * width` must equal the dimension
    /// (use `1 x dim` for operators not tied to an image).
    pub fn build(mut self, height: usize, width: usize) -> SparseOperator {
        assert_eq!(
            height * width,
            self.dim,
            "grid shape does not match operator size"
        );
        self.entries.sort_unstable_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(self.entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *vals.last_mut().expect("merged entry") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..self.dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseOperator {
            dim: self.dim,
            height,
            width,
            h: 1.0,
            row_ptr,
            cols,
            vals,
        }
    }
}

/// Square sparse matrix in compressed-row layout, with its grid shape.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    height: usize,
    width: usize,
    h: f64,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseOperator {
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn grid_step(&self) -> f64 {
        self.h
    }

    pub(crate) fn set_grid_step(&mut self, h: f64) {
        self.h = h;
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        self.row(r).0.binary_search(&c).is_ok()
    }

    /// All stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// `y = A x`
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let mut acc = 0.0;
            for k in a..b {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.dim];
        for (c, v) in self.cols.iter().zip(&self.vals) {
            sums[*c] += v;
        }
        sums
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|r| self.get(r, r)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut sums = vec![0.0; self.dim];
        for (c, v) in self.cols.iter().zip(&self.vals) {
            sums[*c] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// `A + shift I` (adds missing diagonal entries).
    pub fn shifted(&self, shift: f64) -> SparseOperator {
        let mut t = TripletBuilder::with_capacity(self.dim, self.nnz() + self.dim);
        for (r, c, v) in self.iter() {
            t.push(r, c, v);
        }
        for k in 0..self.dim {
            t.push(k, k, shift);
        }
        let mut out = t.build(self.height, self.width);
        out.h = self.h;
        out
    }

    pub fn scaled(&self, s: f64) -> SparseOperator {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Off-diagonal sparsity graph: edge `i -> j` iff `A[i, j] != 0`, `i != j`.
    pub fn digraph(&self) -> Vec<Vec<usize>> {
        (0..self.dim)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter()
                    .zip(vals)
                    .filter(|(&c, &v)| c != r && v != 0.0)
                    .map(|(&c, _)| c)
                    .collect()
            })
            .collect()
    }

    pub fn is_structurally_symmetric(&self) -> bool {
        self.iter().all(|(r, c, _)| self.contains(c, r))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<f64>) -> SparseOperator {
        assert_eq!(m.nrows(), m.ncols(), "square matrix required");
        let n = m.nrows();
        let mut t = TripletBuilder::new(n);
        for r in 0..n {
            for c in 0..n {
                if m[(r, c)] != 0.0 {
                    t.push(r, c, m[(r, c)]);
                }
            }
        }
        t.build(1, n)
    }

    /// Text dump, one `row col value` line per stored entry.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (r, c, v) in self.iter() {
            writeln!(out, "{r} {c} {v:e}")?;
        }
        Ok(())
    }
}
