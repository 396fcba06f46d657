#![allow(dead_code)]

use std::f64::consts::PI;
use std::io::Write;

use osmose::anisotropy::{weight_tensor, WeightField, CALIBRATED_CONVENTION};
use osmose::expm::EvolutionTrace;
use osmose::{MaskField, ScalarField};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Sum of a few random low-frequency waves, mapped affinely onto `[lo, hi]`.
pub fn smooth_field(rng: &mut ChaCha8Rng, h: usize, w: usize, lo: f64, hi: f64) -> ScalarField {
    let waves: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(-0.6..0.6),
                rng.random_range(-0.6..0.6),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let raw = ScalarField::from_fn(h, w, |i, j| {
        waves
            .iter()
            .map(|&(a, b, p)| (a * i as f64 + b * j as f64 + p).sin())
            .sum::<f64>()
    });
    let (mn, mx) = raw
        .as_slice()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let span = (mx - mn).max(1e-12);
    ScalarField::from_fn(h, w, |i, j| lo + (hi - lo) * (raw.get(i, j) - mn) / span)
}

pub fn random_field(rng: &mut ChaCha8Rng, h: usize, w: usize, lo: f64, hi: f64) -> ScalarField {
    ScalarField::from_fn(h, w, |_, _| rng.random_range(lo..hi))
}

/// Smoothly varying directions and eigenvalue ratios with `κ <= kappa_max`.
pub fn smooth_weights(rng: &mut ChaCha8Rng, h: usize, w: usize, kappa_max: f64) -> WeightField {
    let theta = smooth_field(rng, h, w, 0.0, 2.0 * PI);
    let eps = smooth_field(rng, h, w, 1.0 / (kappa_max * kappa_max), 1.0);
    let data = (0..h * w)
        .map(|k| {
            weight_tensor(
                theta.as_slice()[k],
                eps.as_slice()[k],
                CALIBRATED_CONVENTION,
            )
        })
        .collect();
    WeightField::from_tensors(h, w, data).unwrap()
}

/// A band of random orientation and width, or a rectangle.
pub fn random_mask(rng: &mut ChaCha8Rng, h: usize, w: usize) -> MaskField {
    let width = rng.random_range(1..=3usize) as f64;
    match rng.random_range(0..3) {
        0 => {
            let c = rng.random_range(0..w) as f64;
            MaskField::from_fn(h, w, |_, j| (j as f64 - c).abs() < width)
        }
        1 => {
            let (a, b) = (
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..(h + w) as f64),
            );
            MaskField::from_fn(h, w, |i, j| {
                (i as f64 + a * j as f64 - b * 0.5).abs() < width
            })
        }
        _ => {
            let (i0, j0) = (rng.random_range(0..h), rng.random_range(0..w));
            MaskField::from_fn(h, w, |i, j| i >= i0 && i < i0 + 3 && j >= j0 && j < j0 + 4)
        }
    }
}

/// Largest relative deviation of the per-step mean and the smallest value.
pub fn trace_extremes(trace: &EvolutionTrace) -> (f64, f64) {
    (trace.max_mean_drift(), trace.min_value())
}

pub fn rmse(a: &[f64], b: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for k in (0..a.len()).filter(|&k| keep(k)) {
        s += (a[k] - b[k]).powi(2);
        n += 1;
    }
    (s / n.max(1) as f64).sqrt()
}

/// Prints one line straight to the terminal (bypassing output capture).
pub fn report(label: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[{verdict}] {label}: {detail}");
    let _ = out.flush();
}
