use nalgebra::DMatrix;

use crate::error::{OsmoseError, Result};

/// Largest matrix accepted by [`dense_expm_reference`].
pub const DENSE_REFERENCE_MAX_DIM: usize = 400;

const TAYLOR_TERMS: usize = 24;

/// `exp(A)` by scaling and squaring around a fixed Taylor core: `A / 2^j`
/// with `‖A / 2^j‖₁ <= 1/2`, 24 Horner terms, then `j` squarings.
///
/// The core is evaluated as `e^{-m} T(X + m I)` with `m` the most negative
/// diagonal entry of `X = A / 2^j`, so for matrices with nonnegative
/// off-diagonals every term is nonnegative and no positivity is lost to
/// cancellation.
///
/// The squarings are also kept numerous enough for the polynomial to reach
/// every entry with margin (`24 · 2^j >= 6 (n - 1)`), so the tiny far entries
/// of an irreducible generator's exponential are neither truncated to zero
/// nor distorted by the cut-off series.
///
/// Intended as a test oracle; accurate to about `1e-13` for the
/// column-stochastic exponentials produced by osmosis generators.
pub fn dense_expm_reference(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(OsmoseError::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", n, a.ncols()),
        });
    }
    if n > DENSE_REFERENCE_MAX_DIM {
        return Err(OsmoseError::invalid(format!(
            "dense reference is limited to {DENSE_REFERENCE_MAX_DIM}x{DENSE_REFERENCE_MAX_DIM}, got {n}x{n}"
        )));
    }
    if let Some(k) = a.iter().position(|v| !v.is_finite()) {
        return Err(OsmoseError::NonFinite { index: k });
    }
    let norm = (0..n)
        .map(|c| a.column(c).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    while norm > 0.0 && (TAYLOR_TERMS << squarings) < 6 * n.saturating_sub(1) {
        squarings += 1;
    }
    let mut x = a / 2f64.powi(squarings as i32);
    let m = (0..n).map(|k| -x[(k, k)]).fold(0.0, f64::max);
    for k in 0..n {
        x[(k, k)] += m;
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut e = id.clone();
    for k in (1..=TAYLOR_TERMS).rev() {
        e = &id + (&x * e) / k as f64;
    }
    e *= (-m).exp();
    for _ in 0..squarings {
        e = &e * &e;
    }
    Ok(e)
}
