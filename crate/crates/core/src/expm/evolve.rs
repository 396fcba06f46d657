use std::io::Write;

use super::action::ExpmAction;
use super::DOUBLE_TOL;
use crate::error::{OsmoseError, Result};
use crate::operator::SparseOperator;

/// Time stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    /// Step size τ.
    pub tau: f64,
    /// Relative backward-error tolerance of each exponential action.
    pub tol: f64,
    /// Maximum number of steps K.
    pub max_steps: usize,
    /// Stop once `‖u^{k+1} - u^k‖_∞ / ‖u^k‖_∞` falls below this.
    pub steady_tol: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            tau: 100.0,
            tol: DOUBLE_TOL,
            max_steps: 100,
            steady_tol: 1e-8,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(OsmoseError::invalid(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(OsmoseError::invalid(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.max_steps == 0 {
            return Err(OsmoseError::invalid("at least one time step is required"));
        }
        if !(self.steady_tol >= 0.0) {
            return Err(OsmoseError::invalid(format!(
                "steady_tol must be >= 0, got {}",
                self.steady_tol
            )));
        }
        Ok(())
    }
}

/// Per-step diagnostics. Index 0 describes the initial state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvolutionTrace {
    pub steps: usize,
    pub means: Vec<f64>,
    pub mins: Vec<f64>,
    /// Relative sup-norm change of each step (index 0 is 0).
    pub residuals: Vec<f64>,
}

impl EvolutionTrace {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }

    /// Largest relative deviation of the per-step mean from the initial mean.
    pub fn max_mean_drift(&self) -> f64 {
        let m0 = self.means[0];
        self.means
            .iter()
            .map(|m| ((m - m0) / m0).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.mins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// CSV with header `step,mean,min,residual`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "step,mean,min,residual")?;
        for k in 0..self.means.len() {
            writeln!(
                out,
                "{k},{:.17e},{:.17e},{:.17e}",
                self.means[k], self.mins[k], self.residuals[k]
            )?;
        }
        Ok(())
    }
}

fn record(trace: &mut EvolutionTrace, u: &[f64], residual: f64) {
    trace.means.push(u.iter().sum::<f64>() / u.len() as f64);
    trace
        .mins
        .push(u.iter().copied().fold(f64::INFINITY, f64::min));
    trace.residuals.push(residual);
}

fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `u^{k+1} = exp(τA) u^k` until `max_steps` or a steady state.
pub fn evolve(
    a: &SparseOperator,
    f: &[f64],
    cfg: &StepperConfig,
) -> Result<(Vec<f64>, EvolutionTrace)> {
    cfg.validate()?;
    if f.len() != a.dim() {
        return Err(OsmoseError::DimensionMismatch {
            expected: format!("vector of length {}", a.dim()),
            actual: format!("length {}", f.len()),
        });
    }
    if let Some((k, &v)) = f.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(OsmoseError::NonPositive { index: k, value: v });
    }
    let stepper = ExpmAction::new(a, cfg.tol)?;
    let mut trace = EvolutionTrace::default();
    let mut u = f.to_vec();
    record(&mut trace, &u, 0.0);
    for _ in 0..cfg.max_steps {
        let next = stepper.apply(&u, cfg.tau)?;
        let change = u
            .iter()
            .zip(&next)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let residual = change / sup_norm(&u);
        u = next;
        trace.steps += 1;
        record(&mut trace, &u, residual);
        if residual < cfg.steady_tol {
            break;
        }
    }
    Ok((u, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::WeightField;
    use crate::grid::{MaskField, ScalarField};
    use crate::operator::assemble;

    #[test]
    fn converges_to_rescaled_guidance() {
        let v = ScalarField::from_fn(6, 5, |i, j| {
            0.3 + 0.1 * i as f64 + 0.05 * ((j * j) as f64).sin()
        });
        let f: Vec<f64> = (0..30).map(|k| 0.2 + 0.02 * k as f64).collect();
        let a = assemble(&v, &WeightField::identity(6, 5), &MaskField::empty(6, 5)).unwrap();
        let cfg = StepperConfig {
            tau: 50.0,
            max_steps: 200,
            steady_tol: 1e-13,
            ..StepperConfig::default()
        };
        let (u, trace) = evolve(&a, &f, &cfg).unwrap();
        let mf = f.iter().sum::<f64>() / 30.0;
        let mv = v.mean();
        for (ui, vi) in u.iter().zip(v.as_slice()) {
            assert!((ui - mf / mv * vi).abs() < 1e-9 * ui);
        }
        assert!(trace.max_mean_drift() < 1e-12);
        assert!(trace.min_value() > 0.0);
        assert!(trace.steps < 200);
    }

    #[test]
    fn csv_export() {
        let trace = EvolutionTrace {
            steps: 1,
            means: vec![0.5, 0.5],
            mins: vec![0.1, 0.2],
            residuals: vec![0.0, 0.25],
        };
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,mean,min,residual");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("1,5.0"));
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            StepperConfig {
                tau: 0.0,
                ..Default::default()
            },
            StepperConfig {
                tol: 1.0,
                ..Default::default()
            },
            StepperConfig {
                max_steps: 0,
                ..Default::default()
            },
            StepperConfig {
                steady_tol: -1.0,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
    }
}
