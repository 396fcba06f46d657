use super::kernel::GridKernel;
use super::theta::{ThetaTable, MAX_TAYLOR_DEGREE};
use crate::error::{OsmoseError, Result};
use crate::operator::SparseOperator;

/// Sub-step doublings tried before giving up.
const MAX_DOUBLINGS: u32 = 6;

/// Degree `m` and number of sub-steps `s` for one application.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaylorPlan {
    pub degree: usize,
    pub substeps: usize,
}

/// Reusable evaluator of `exp(τA) b` for a fixed operator and tolerance.
///
/// Works on the shifted matrix `B = A - μI`, `μ = trace(A) / S`, and rescales
/// each sub-step by `exp(τμ / s)`. Only matrix-vector products are used.
#[derive(Debug, Clone)]
pub struct ExpmAction {
    kernel: GridKernel,
    dim: usize,
    shift: f64,
    norm: f64,
    table: ThetaTable,
}

impl ExpmAction {
    pub fn new(a: &SparseOperator, tol: f64) -> Result<Self> {
        Self::with_shift(a, tol, true)
    }

    /// `use_shift = false` skips the trace shift (`μ = 0`).
    pub fn with_shift(a: &SparseOperator, tol: f64, use_shift: bool) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(OsmoseError::invalid(format!(
                "tolerance must lie in (0, 1), got {tol}"
            )));
        }
        let shift = if use_shift {
            a.trace() / a.dim() as f64
        } else {
            0.0
        };
        let shifted = if shift != 0.0 {
            a.shifted(-shift)
        } else {
            a.clone()
        };
        let norm = shifted.norm1();
        if !norm.is_finite() {
            return Err(OsmoseError::invalid("operator has non-finite entries"));
        }
        Ok(ExpmAction {
            kernel: GridKernel::new(&shifted),
            dim: a.dim(),
            shift,
            norm,
            table: ThetaTable::new(tol),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Cheapest `(m, s)` with `τ ‖B‖₁ / s <= θ_m`.
    pub fn plan(&self, tau: f64) -> TaylorPlan {
        let rho = tau * self.norm;
        if rho == 0.0 {
            return TaylorPlan {
                degree: 0,
                substeps: 1,
            };
        }
        let mut best = TaylorPlan {
            degree: MAX_TAYLOR_DEGREE,
            substeps: usize::MAX,
        };
        let mut best_cost = usize::MAX;
        for m in 1..=MAX_TAYLOR_DEGREE {
            let s = (rho / self.table.get(m)).ceil().max(1.0);
            if s > 1e12 {
                continue;
            }
            let s = s as usize;
            let cost = m.saturating_mul(s);
            if cost < best_cost {
                best_cost = cost;
                best = TaylorPlan {
                    degree: m,
                    substeps: s,
                };
            }
        }
        best
    }

    /// `exp(τA) b`.
    pub fn apply(&self, b: &[f64], tau: f64) -> Result<Vec<f64>> {
        if b.len() != self.dim() {
            return Err(OsmoseError::DimensionMismatch {
                expected: format!("vector of length {}", self.dim()),
                actual: format!("length {}", b.len()),
            });
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(OsmoseError::invalid(format!(
                "time step must be positive, got {tau}"
            )));
        }
        if let Some(k) = b.iter().position(|v| !v.is_finite()) {
            return Err(OsmoseError::NonFinite { index: k });
        }
        let plan = self.plan(tau);
        for doubling in 0..=MAX_DOUBLINGS {
            let substeps = plan.substeps << doubling;
            if let Some(out) = self.run(b, tau, plan.degree, substeps) {
                return Ok(out);
            }
        }
        Err(OsmoseError::Convergence(format!(
            "iterates overflowed even with {} sub-steps",
            plan.substeps << MAX_DOUBLINGS
        )))
    }

    /// One attempt; `None` when the iterates stop being finite.
    fn run(&self, b: &[f64], tau: f64, degree: usize, substeps: usize) -> Option<Vec<f64>> {
        let h = tau / substeps as f64;
        let eta = (h * self.shift).exp();
        let tol = self.table.tol();
        let k = &self.kernel;
        let mut v = b.to_vec();
        let mut term = k.pad(b);
        let mut next = vec![0.0; k.padded_len()];
        for _ in 0..substeps {
            let mut sum = v.clone();
            let mut prev_norm = norm1(&v);
            k.unpad_mut(&mut term).copy_from_slice(&v);
            for j in 1..=degree {
                let (term_norm, sum_norm) =
                    k.taylor_update(h / j as f64, &term, &mut next, &mut sum);
                std::mem::swap(&mut term, &mut next);
                if !sum_norm.is_finite() {
                    return None;
                }
                // two consecutive negligible terms end the series early
                if prev_norm + term_norm <= tol * sum_norm {
                    break;
                }
                prev_norm = term_norm;
            }
            for (vi, si) in v.iter_mut().zip(&sum) {
                *vi = eta * si;
            }
            if !eta.is_finite() {
                return None;
            }
        }
        Some(v)
    }
}

#[inline]
fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// `exp(τA) b` with relative backward-error tolerance `tol`.
pub fn expm_action(a: &SparseOperator, b: &[f64], tau: f64, tol: f64) -> Result<Vec<f64>> {
    ExpmAction::new(a, tol)?.apply(b, tau)
}
