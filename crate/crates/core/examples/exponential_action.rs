//! Applies `exp(τA)` to a vector with the truncated Taylor scheme, compares it
//! with the dense reference and runs an evolution to the steady state.
//!
//! `cargo run --release --example exponential_action [trace.csv]`

use std::fs::File;

use osmose::anisotropy::build_weight_field;
use osmose::expm::{dense_expm_reference, evolve, ExpmAction, StepperConfig, DOUBLE_TOL};
use osmose::operator::assemble;
use osmose::{MaskField, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 14;
    let v = ScalarField::from_fn(n, n, |i, j| 0.2 + 0.05 * ((i * 7 + j * 3) % 11) as f64);
    let mask = MaskField::from_fn(n, n, |i, j| i + j >= 12 && i + j <= 15);
    let theta = ScalarField::from_fn(n, n, |i, _| 0.1 * i as f64);
    let a = assemble(&v, &build_weight_field(&theta, 0.05, &mask)?, &mask)?;
    let f: Vec<f64> = (0..n * n)
        .map(|k| 0.5 + 0.4 * ((k as f64) * 0.37).sin())
        .collect();

    let action = ExpmAction::new(&a, DOUBLE_TOL)?;
    println!("trace shift {:.3}", action.shift());
    for tau in [0.01, 1.0, 100.0, 10_000.0] {
        let plan = action.plan(tau);
        let got = action.apply(&f, tau)?;
        let e = dense_expm_reference(&(a.to_dense() * tau))?;
        let expect = e * nalgebra::DVector::from_column_slice(&f);
        let err = got
            .iter()
            .zip(expect.iter())
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
            / expect.norm();
        println!(
            "tau {tau:>8}: degree {:>2} x {:>4} substeps, rel error vs dense {err:.1e}",
            plan.degree, plan.substeps
        );
    }

    let cfg = StepperConfig {
        tau: 50.0,
        max_steps: 500,
        steady_tol: 1e-12,
        ..Default::default()
    };
    let (u, trace) = evolve(&a, &f, &cfg)?;
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    println!(
        "evolution: {} steps, final residual {:.1e}, mean {:.15} -> {:.15}, min {:.3e}",
        trace.steps,
        trace.final_residual(),
        mean(&f),
        mean(&u),
        trace.min_value()
    );
    if let Some(path) = std::env::args().nth(1) {
        trace.write_csv(File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
