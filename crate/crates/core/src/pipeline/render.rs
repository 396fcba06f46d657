use std::f64::consts::PI;
use std::path::Path;

use image::ExtendedColorType;

use crate::error::Result;
use crate::grid::{write_png, MaskField, ScalarField};

/// Fully saturated colour for a hue in `[0, 1)`.
pub fn hue_to_rgb(hue: f64) -> [u8; 3] {
    let h = hue.rem_euclid(1.0) * 6.0;
    let sector = h.floor();
    let f = h - sector;
    let (r, g, b) = match sector as u8 {
        0 => (1.0, f, 0.0),
        1 => (1.0 - f, 1.0, 0.0),
        2 => (0.0, 1.0, f),
        3 => (0.0, 1.0 - f, 1.0),
        4 => (f, 0.0, 1.0),
        _ => (1.0, 0.0, 1.0 - f),
    };
    let q = |v: f64| (v * 255.0).round() as u8;
    [q(r), q(g), q(b)]
}

/// Interleaved RGB bytes: hue `θ mod π` on the mask, `background` (in `[0, 1]`)
/// as grey elsewhere.
pub fn theta_map_rgb(
    theta: &ScalarField,
    mask: &MaskField,
    background: &ScalarField,
) -> Result<Vec<u8>> {
    let (h, w) = (theta.height(), theta.width());
    mask.check_shape(h, w)?;
    mask.check_shape(background.height(), background.width())?;
    let mut raw = Vec::with_capacity(3 * h * w);
    for k in 0..h * w {
        if mask.at(k) {
            raw.extend_from_slice(&hue_to_rgb(theta.as_slice()[k].rem_euclid(PI) / PI));
        } else {
            let g = (background.as_slice()[k].clamp(0.0, 1.0) * 255.0).round() as u8;
            raw.extend_from_slice(&[g, g, g]);
        }
    }
    Ok(raw)
}

/// Writes the orientation overlay produced by [`theta_map_rgb`] as a PNG.
pub fn render_theta_map(
    theta: &ScalarField,
    mask: &MaskField,
    background: &ScalarField,
    path: impl AsRef<Path>,
) -> Result<()> {
    let raw = theta_map_rgb(theta, mask, background)?;
    write_png(
        path.as_ref(),
        &raw,
        theta.width(),
        theta.height(),
        ExtendedColorType::Rgb8,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primary_hues() {
        assert_eq!(hue_to_rgb(0.0), [255, 0, 0]);
        assert_eq!(hue_to_rgb(1.0 / 3.0), [0, 255, 0]);
        assert_eq!(hue_to_rgb(2.0 / 3.0), [0, 0, 255]);
        assert_eq!(hue_to_rgb(1.0), [255, 0, 0]);
    }

    #[test]
    fn constant_theta_gives_one_colour() {
        let theta = ScalarField::filled(4, 6, 0.0);
        let mask = MaskField::from_fn(4, 6, |i, _| i == 1 || i == 2);
        let bg = ScalarField::filled(4, 6, 0.5);
        let raw = theta_map_rgb(&theta, &mask, &bg).unwrap();
        for (k, px) in raw.chunks(3).enumerate() {
            if mask.at(k) {
                assert_eq!(px, [255, 0, 0]);
            } else {
                assert_eq!(px, [128, 128, 128]);
            }
        }
    }

    #[test]
    fn ramp_sweeps_the_hue_wheel() {
        let n = 180;
        let theta = ScalarField::from_fn(1, n, |_, j| PI * j as f64 / n as f64);
        let mask = MaskField::from_fn(1, n, |_, _| true);
        let raw = theta_map_rgb(&theta, &mask, &ScalarField::filled(1, n, 0.0)).unwrap();
        let distinct: std::collections::BTreeSet<[u8; 3]> =
            raw.chunks(3).map(|p| [p[0], p[1], p[2]]).collect();
        assert!(distinct.len() > 150);
        for target in [[255, 0, 0], [0, 255, 0], [0, 0, 255]] {
            assert!(distinct.contains(&target));
        }
        // θ and θ + π share a colour
        assert_eq!(
            hue_to_rgb((0.3f64).rem_euclid(PI) / PI),
            hue_to_rgb((0.3 + PI).rem_euclid(PI) / PI)
        );
    }

    #[test]
    fn empty_mask_reproduces_the_background() {
        let bg = ScalarField::from_fn(3, 3, |i, j| (i * 3 + j) as f64 / 8.0);
        let raw = theta_map_rgb(
            &ScalarField::filled(3, 3, 1.0),
            &MaskField::empty(3, 3),
            &bg,
        )
        .unwrap();
        for (k, px) in raw.chunks(3).enumerate() {
            let g = (bg.as_slice()[k] * 255.0).round() as u8;
            assert_eq!(px, [g, g, g]);
        }
    }

    #[test]
    fn unwritable_path() {
        let t = ScalarField::filled(2, 2, 0.0);
        let err = render_theta_map(
            &t,
            &MaskField::empty(2, 2),
            &t,
            "/nonexistent-dir/theta.png",
        );
        assert!(err.is_err());
    }
}
