use crate::operator::SparseOperator;

/// Matrix-vector kernel specialised to grid operators: the five-point
/// diagonals are stored densely, everything else row-wise.
///
/// Vectors passed to [`GridKernel::taylor_update`] are padded with `width`
/// zeros on both sides so the diagonal sweep needs no border branches.
#[derive(Debug, Clone)]
pub(crate) struct GridKernel {
    dim: usize,
    width: usize,
    centre: Vec<f64>,
    east: Vec<f64>,
    west: Vec<f64>,
    south: Vec<f64>,
    north: Vec<f64>,
    extra_rows: Vec<usize>,
    extra_ptr: Vec<usize>,
    extra_cols: Vec<usize>,
    extra_vals: Vec<f64>,
}

impl GridKernel {
    pub fn new(a: &SparseOperator) -> Self {
        let dim = a.dim();
        let width = a.grid().1.max(1);
        let mut k = GridKernel {
            dim,
            width,
            centre: vec![0.0; dim],
            east: vec![0.0; dim],
            west: vec![0.0; dim],
            south: vec![0.0; dim],
            north: vec![0.0; dim],
            extra_rows: Vec::new(),
            extra_ptr: vec![0],
            extra_cols: Vec::new(),
            extra_vals: Vec::new(),
        };
        let two_d = width > 1;
        for r in 0..dim {
            let (cols, vals) = a.row(r);
            let before = k.extra_cols.len();
            for (&c, &v) in cols.iter().zip(vals) {
                let d = c as isize - r as isize;
                let w = width as isize;
                if d == 0 {
                    k.centre[r] = v;
                } else if d == 1 && r % width != width - 1 {
                    k.east[r] = v;
                } else if d == -1 && r % width != 0 {
                    k.west[r] = v;
                } else if two_d && d == w {
                    k.south[r] = v;
                } else if two_d && d == -w {
                    k.north[r] = v;
                } else {
                    k.extra_cols.push(c);
                    k.extra_vals.push(v);
                }
            }
            if k.extra_cols.len() > before {
                k.extra_rows.push(r);
                k.extra_ptr.push(k.extra_cols.len());
            }
        }
        k
    }

    /// Length of a padded vector.
    pub fn padded_len(&self) -> usize {
        self.dim + 2 * self.width
    }

    pub fn pad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.padded_len()];
        out[self.width..self.width + self.dim].copy_from_slice(x);
        out
    }

    pub fn unpad_mut<'a>(&self, x: &'a mut [f64]) -> &'a mut [f64] {
        &mut x[self.width..self.width + self.dim]
    }

    #[cfg(test)]
    pub fn unpad<'a>(&self, x: &'a [f64]) -> &'a [f64] {
        &x[self.width..self.width + self.dim]
    }

    /// `next = c A term` and `sum += next` on the interior of padded vectors
    /// (`sum` is unpadded). Returns `(‖next‖₁, ‖sum‖₁)`.
    pub fn taylor_update(
        &self,
        c: f64,
        term: &[f64],
        next: &mut [f64],
        sum: &mut [f64],
    ) -> (f64, f64) {
        let (n, w) = (self.dim, self.width);
        assert!(
            term.len() == self.padded_len() && next.len() == self.padded_len() && sum.len() == n
        );
        {
            let out = &mut next[w..w + n];
            let mid = &term[w..w + n];
            let left = &term[w - 1..w - 1 + n];
            let right = &term[w + 1..w + 1 + n];
            let up = &term[..n];
            let down = &term[2 * w..2 * w + n];
            for r in 0..n {
                out[r] = self.centre[r] * mid[r]
                    + self.east[r] * right[r]
                    + self.west[r] * left[r]
                    + self.south[r] * down[r]
                    + self.north[r] * up[r];
            }
        }
        for (k, &r) in self.extra_rows.iter().enumerate() {
            let (a, b) = (self.extra_ptr[k], self.extra_ptr[k + 1]);
            let mut acc = 0.0;
            for (&col, &v) in self.extra_cols[a..b].iter().zip(&self.extra_vals[a..b]) {
                acc += v * term[w + col];
            }
            next[w + r] += acc;
        }
        let mut next_norm = 0.0;
        let mut sum_norm = 0.0;
        for (t, s) in next[w..w + n].iter_mut().zip(sum.iter_mut()) {
            *t *= c;
            *s += *t;
            next_norm += t.abs();
            sum_norm += s.abs();
        }
        (next_norm, sum_norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::build_weight_field;
    use crate::grid::{MaskField, ScalarField};
    use crate::operator::assemble;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(a: &SparseOperator, rng: &mut ChaCha8Rng) {
        let k = GridKernel::new(a);
        let x: Vec<f64> = (0..a.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut sum: Vec<f64> = (0..a.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sum0 = sum.clone();
        let mut next = vec![f64::NAN; k.padded_len()];
        next[..k.width].fill(0.0);
        let end = k.width + k.dim;
        next[end..].fill(0.0);
        let (nn, sn) = k.taylor_update(0.5, &k.pad(&x), &mut next, &mut sum);
        let y = a.matvec(&x);
        for r in 0..a.dim() {
            assert!((k.unpad(&next)[r] - 0.5 * y[r]).abs() < 1e-13);
            assert!((sum[r] - sum0[r] - 0.5 * y[r]).abs() < 1e-13);
        }
        assert!((nn - k.unpad(&next).iter().map(|v| v.abs()).sum::<f64>()).abs() < 1e-12);
        assert!((sn - sum.iter().map(|v| v.abs()).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn matches_the_sparse_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (h, w) in [(7, 9), (1, 6), (6, 1), (12, 5)] {
            let v = ScalarField::from_fn(h, w, |_, _| rng.random_range(0.1..1.0));
            let theta = ScalarField::from_fn(h, w, |i, j| 0.3 * i as f64 + 0.2 * j as f64);
            let mask = MaskField::from_fn(h, w, |i, j| (i + j) % 3 == 0);
            let wf = build_weight_field(&theta, 0.05, &mask).unwrap();
            check(&assemble(&v, &wf, &mask).unwrap(), &mut rng);
        }
        let dense = DMatrix::from_fn(5, 5, |r, c| (r * 5 + c) as f64 * 0.1 - 1.0);
        check(&SparseOperator::from_dense(&dense), &mut rng);
    }
}
