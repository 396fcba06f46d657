//! Test scenes with a known shadow-free image.

use std::f64::consts::PI;

use crate::error::{OsmoseError, Result};
use crate::grid::{ImageBuffer, MaskField, ScalarField};

/// Parameters of a striped scene with a straight cast-shadow edge.
///
/// The shadow edge passes through the image centre along the stripes'
/// gradient direction, so every stripe crosses the boundary band.
#[derive(Debug, Clone, PartialEq)]
pub struct StripeScene {
    pub size: usize,
    /// Gradient direction of the stripes in the image frame (x = column,
    /// y = row downwards), radians.
    pub angle: f64,
    pub period: f64,
    /// Multiplicative attenuation inside the shadow.
    pub shadow_factor: f64,
    /// Width of the masked band around the shadow edge, in pixels.
    pub band: usize,
    /// Width of the soft transition of the shadow edge, in pixels.
    pub penumbra: f64,
}

impl Default for StripeScene {
    fn default() -> Self {
        StripeScene {
            size: 128,
            angle: 65f64.to_radians(),
            period: 8.0,
            shadow_factor: 0.4,
            band: 7,
            penumbra: 3.0,
        }
    }
}

/// A rendered scene.
#[derive(Debug, Clone)]
pub struct SceneImages {
    pub shadowed: ImageBuffer,
    pub shadow_free: ImageBuffer,
    /// The shadow-boundary band.
    pub mask: MaskField,
    /// Pixels that are (at least partly) in shadow.
    pub shadow: MaskField,
}

impl StripeScene {
    /// Signed distance of pixel `(i, j)` to the shadow edge; negative values
    /// lie in the shadow.
    pub fn edge_distance(&self, i: usize, j: usize) -> f64 {
        let c = (self.size as f64 - 1.0) / 2.0;
        let (dx, dy) = (j as f64 - c, i as f64 - c);
        dy * self.angle.cos() - dx * self.angle.sin()
    }

    pub fn stripe_value(&self, i: usize, j: usize) -> f64 {
        let (c, s) = (self.angle.cos(), self.angle.sin());
        let phase = 2.0 * PI * (j as f64 * c + i as f64 * s) / self.period;
        0.5 + 0.35 * phase.sin()
    }

    /// Attenuation at `(i, j)`: `shadow_factor` well inside, 1 well outside,
    /// smoothstep across the penumbra.
    pub fn attenuation(&self, i: usize, j: usize) -> f64 {
        let x = self.edge_distance(i, j);
        let t = ((x / self.penumbra) + 0.5).clamp(0.0, 1.0);
        let smooth = t * t * (3.0 - 2.0 * t);
        self.shadow_factor + (1.0 - self.shadow_factor) * smooth
    }

    pub fn render(&self) -> Result<SceneImages> {
        if self.size < 8 || !(self.shadow_factor > 0.0 && self.shadow_factor < 1.0) {
            return Err(OsmoseError::InvalidParameter(format!(
                "scene needs size >= 8 and shadow factor in (0, 1), got {} and {}",
                self.size, self.shadow_factor
            )));
        }
        if !(self.period > 0.0)
            || !(self.penumbra > 0.0)
            || self.band == 0
            || self.penumbra > self.band as f64
        {
            return Err(OsmoseError::InvalidParameter(
                "invalid stripe period, penumbra or band".into(),
            ));
        }
        let n = self.size;
        let clean = ScalarField::from_fn(n, n, |i, j| self.stripe_value(i, j));
        let shaded = ScalarField::from_fn(n, n, |i, j| self.attenuation(i, j) * clean.get(i, j));
        let half = self.band as f64 / 2.0;
        let mask = MaskField::from_fn(n, n, |i, j| self.edge_distance(i, j).abs() < half);
        let shadow = MaskField::from_fn(n, n, |i, j| self.attenuation(i, j) < 1.0);
        Ok(SceneImages {
            shadowed: ImageBuffer::from_channels(&[shaded])?,
            shadow_free: ImageBuffer::from_channels(&[clean])?,
            mask,
            shadow,
        })
    }
}
