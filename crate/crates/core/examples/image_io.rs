//! Round trip through the image files used by the command-line tool: writes a
//! colour image and a mask, reads them back, lifts and dilates.
//!
//! `cargo run --example image_io [dir]`

use std::path::PathBuf;

use osmose::grid::{dilate_mask, lift_positive, load_image, load_mask, save_image, DEFAULT_LIFT};
use osmose::{ImageBuffer, MaskField, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let (h, w) = (48, 64);
    let channel = |phase: f64| {
        ScalarField::from_fn(h, w, |i, j| {
            0.5 + 0.5 * ((i + j) as f64 * 0.2 + phase).sin()
        })
    };
    let img = ImageBuffer::from_channels(&[channel(0.0), channel(2.0), channel(4.0)])?;
    let mask = MaskField::from_fn(h, w, |i, j| {
        (i as i64 - 24).abs() + (j as i64 - 32).abs() < 6
    });
    let mask_img = ImageBuffer::from_channels(&[ScalarField::from_fn(h, w, |i, j| {
        if mask.get(i, j) {
            1.0
        } else {
            0.0
        }
    })])?;

    let (img_path, mask_path) = (
        dir.join("osmose_demo.png"),
        dir.join("osmose_demo_mask.png"),
    );
    save_image(&img, &img_path)?;
    save_image(&mask_img, &mask_path)?;

    let loaded = load_image(&img_path)?;
    let worst = loaded
        .as_slice()
        .iter()
        .zip(img.as_slice())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!(
        "{}: {}x{}x{}, max quantisation error {worst:.4}",
        img_path.display(),
        loaded.height(),
        loaded.width(),
        loaded.channels()
    );

    let lifted = lift_positive(&loaded, DEFAULT_LIFT)?;
    let min = lifted
        .as_slice()
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(v));
    println!("lifted by {:.5}: min value {min:.5}", lifted.lift());

    let m = load_mask(&mask_path, 0.5)?;
    for r in [0, 1, 3] {
        println!("mask dilated by {r}: {} pixels", dilate_mask(&m, r).count());
    }
    Ok(())
}
