//! Stick voting with a curvature-penalised decay and a 45° aperture.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::{eigen_decompose_2x2, Sym2};
use super::tensor::{encode, TensorField};
use crate::error::{OsmoseError, Result};
use crate::grid::{ImageBuffer, MaskField, ScalarField};

/// Orientations are quantised into this many bins over `[0, π)`.
pub const ORIENTATION_BINS: usize = 32;

/// Votes whose decay falls below this are dropped.
const DECAY_CUTOFF: f64 = 1e-6;

/// Bin index of an orientation angle (any real, modulo π).
#[inline]
pub fn orientation_bin(theta: f64) -> usize {
    let step = PI / ORIENTATION_BINS as f64;
    (theta.rem_euclid(PI) / step).round() as usize % ORIENTATION_BINS
}

/// Maps an x-right/y-up angle to the image frame (rows pointing down).
#[inline]
pub fn xy_to_ij(theta_xy: f64) -> f64 {
    let t = (-theta_xy).rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if t >= TAU {
        0.0
    } else {
        t
    }
}

#[derive(Debug, Clone, Copy)]
struct KernelEntry {
    di: isize,
    dj: isize,
    vote: Sym2,
}

/// Precomputed stick-vote kernels, one per orientation bin, for one scale.
#[derive(Debug, Clone)]
pub struct StickVoter {
    scale: f64,
    radius: usize,
    kernels: Vec<Vec<KernelEntry>>,
}

impl StickVoter {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(OsmoseError::invalid(format!(
                "vote scale must be positive, got {scale}"
            )));
        }
        let radius = (scale * (-DECAY_CUTOFF.ln()).sqrt()).ceil() as usize;
        let step = PI / ORIENTATION_BINS as f64;
        let kernels = (0..ORIENTATION_BINS)
            .map(|b| {
                let theta = b as f64 * step;
                let tangent = [theta.cos(), theta.sin()];
                let r = radius as isize;
                let mut entries = Vec::new();
                for di in -r..=r {
                    for dj in -r..=r {
                        // x = j, y = -i
                        let offset = [dj as f64, -di as f64];
                        if let Some(vote) = stick_vote_single(tangent, offset, scale) {
                            entries.push(KernelEntry { di, dj, vote });
                        }
                    }
                }
                entries
            })
            .collect();
        Ok(StickVoter {
            scale,
            radius,
            kernels,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Half-width of the truncated voting window, in pixels.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Accumulates the votes of every salient pixel.
    pub fn vote(&self, saliency: &ScalarField, orientation: &ScalarField) -> TensorField {
        let (h, w) = (saliency.height(), saliency.width());
        let mut out = TensorField::zeros(h, w);
        let acc = out.as_mut_slice();
        for i in 0..h {
            for j in 0..w {
                let s = saliency.get(i, j);
                if !(s > 0.0) {
                    continue;
                }
                let kernel = &self.kernels[orientation_bin(orientation.get(i, j))];
                for e in kernel {
                    let qi = i as isize + e.di;
                    let qj = j as isize + e.dj;
                    if qi < 0 || qj < 0 || qi >= h as isize || qj >= w as isize {
                        continue;
                    }
                    acc[qi as usize * w + qj as usize] += e.vote * s;
                }
            }
        }
        out
    }
}

/// Decay coefficient of the curvature term.
fn curvature_weight(scale: f64) -> f64 {
    (-16.0 * 0.1f64.ln() * (scale - 1.0) / (PI * PI)).max(0.0)
}

/// Unit-saliency stick vote cast by a voter with tangent `tangent` to a
/// receiver at `offset` (both x-right/y-up). `None` outside the aperture or
/// below the decay cut-off.
fn stick_vote_single(tangent: [f64; 2], offset: [f64; 2], scale: f64) -> Option<Sym2> {
    let d = offset[0].hypot(offset[1]);
    if d == 0.0 {
        return Some(Sym2::outer(tangent));
    }
    let mut t = tangent;
    let mut along = t[0] * offset[0] + t[1] * offset[1];
    if along < 0.0 {
        t = [-t[0], -t[1]];
        along = -along;
    }
    let phi = (along / d).clamp(-1.0, 1.0).acos();
    if phi > FRAC_PI_4 + 1e-12 {
        return None;
    }
    let sin_phi = phi.sin();
    let arc = if phi < 1e-12 { d } else { d * phi / sin_phi };
    let curvature = 2.0 * sin_phi / d;
    let decay =
        (-(arc * arc + curvature_weight(scale) * curvature * curvature) / (scale * scale)).exp();
    if decay < DECAY_CUTOFF {
        return None;
    }
    let side = t[0] * offset[1] - t[1] * offset[0];
    let rot = if side >= 0.0 { 2.0 * phi } else { -2.0 * phi };
    let (s, c) = rot.sin_cos();
    let n = [c * t[0] - s * t[1], s * t[0] + c * t[1]];
    Some(Sym2::outer(n) * decay)
}

/// Stick voting of a (saliency, tangent orientation) field at one scale.
pub fn stick_vote(
    saliency: &ScalarField,
    orientation: &ScalarField,
    scale: f64,
) -> Result<TensorField> {
    Ok(StickVoter::new(scale)?.vote(saliency, orientation))
}

/// Multi-scale vote accumulator over all channels, with the shadow band
/// silenced: masked pixels cast no votes and carry a random orientation.
pub fn vote_accumulator(
    img: &ImageBuffer,
    mask: &MaskField,
    scales: &[f64],
    sigma: f64,
    seed: u64,
) -> Result<TensorField> {
    if scales.is_empty() {
        return Err(OsmoseError::invalid(
            "at least one voting scale is required",
        ));
    }
    mask.check_shape(img.height(), img.width())?;
    let voters = scales
        .iter()
        .map(|&s| StickVoter::new(s))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (h, w) = (img.height(), img.width());
    let mut acc = TensorField::zeros(h, w);
    for c in 0..img.channels() {
        let mut enc = encode(&img.channel(c), sigma)?;
        for k in 0..h * w {
            if mask.at(k) {
                enc.saliency.as_mut_slice()[k] = 0.0;
                enc.orientation.as_mut_slice()[k] = rng.random_range(0.0..TAU);
            }
        }
        for voter in &voters {
            let votes = voter.vote(&enc.saliency, &enc.orientation);
            // round trip through (saliency + ballness, ballness, orientation)
            for (a, t) in acc.as_mut_slice().iter_mut().zip(votes.as_slice()) {
                let e = eigen_decompose_2x2(*t);
                let ballness = e.l2;
                let saliency = e.l1 - e.l2;
                *a += Sym2::from_eigen(saliency + ballness, e.e1, ballness, e.e2);
            }
        }
    }
    Ok(acc)
}

/// Per-pixel orientation θ (image frame, `[0, 2π)`) of the second eigenvector
/// of the multi-scale vote accumulator.
///
/// Votes are built from tangents, so the second eigenvector is the normal of
/// the voted structure, i.e. the direction of the underlying gradient.
pub fn estimate_directions(
    img: &ImageBuffer,
    mask: &MaskField,
    scales: &[f64],
    sigma: f64,
    seed: u64,
) -> Result<ScalarField> {
    let acc = vote_accumulator(img, mask, scales, sigma, seed)?;
    let data = acc
        .as_slice()
        .iter()
        .map(|&t| {
            let e = eigen_decompose_2x2(t);
            xy_to_ij(e.e2[1].atan2(e.e2[0]))
        })
        .collect();
    ScalarField::new(img.height(), img.width(), data)
}
