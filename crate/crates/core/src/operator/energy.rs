use super::assemble::GRID_STEP;
use crate::anisotropy::WeightField;
use crate::error::{OsmoseError, Result};
use crate::grid::ScalarField;

/// Quadrature of `∫ v ∇(u/v)ᵀ W ∇(u/v)` with forward differences.
///
/// The difference across the last column (row) is taken as zero, matching
/// the no-flux boundary.
pub fn osmosis_energy(u: &ScalarField, v: &ScalarField, w: &WeightField) -> Result<f64> {
    let (h, wd) = (u.height(), u.width());
    if !v.same_shape(h, wd) || w.height() != h || w.width() != wd {
        return Err(OsmoseError::DimensionMismatch {
            expected: format!("{h}x{wd}"),
            actual: format!(
                "{}x{} guidance, {}x{} weights",
                v.height(),
                v.width(),
                w.height(),
                w.width()
            ),
        });
    }
    for (k, (&a, &b)) in u.as_slice().iter().zip(v.as_slice()).enumerate() {
        if !(a > 0.0) {
            return Err(OsmoseError::NonPositive { index: k, value: a });
        }
        if !(b > 0.0) {
            return Err(OsmoseError::NonPositive { index: k, value: b });
        }
    }
    let ratio: Vec<f64> = u
        .as_slice()
        .iter()
        .zip(v.as_slice())
        .map(|(a, b)| a / b)
        .collect();
    let mut energy = 0.0;
    for i in 0..h {
        for j in 0..wd {
            let k = i * wd + j;
            let gx = if j + 1 < wd {
                (ratio[k + 1] - ratio[k]) / GRID_STEP
            } else {
                0.0
            };
            let gy = if i + 1 < h {
                (ratio[k + wd] - ratio[k]) / GRID_STEP
            } else {
                0.0
            };
            energy += v.as_slice()[k] * w.at(k).inner([gx, gy], [gx, gy]);
        }
    }
    Ok(energy * GRID_STEP * GRID_STEP)
}
