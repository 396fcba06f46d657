//! Removes a synthetic cast shadow from a striped image, once with isotropic
//! and once with anisotropic diffusion inside the boundary band.
//!
//! `cargo run --release --example stripe_shadow [out_dir]`

use std::time::Instant;

use osmose::grid::save_image;
use osmose::pipeline::{remove_shadow, FilterParams, Mode};
use osmose::synthetic::StripeScene;

fn rmse_on(a: &[f64], b: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
    let (mut s, mut n) = (0.0, 0usize);
    for k in (0..a.len()).filter(|&k| keep(k)) {
        s += (a[k] - b[k]).powi(2);
        n += 1;
    }
    (s / n as f64).sqrt()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args().nth(1);
    let scene = StripeScene::default().render()?;
    let f = &scene.shadowed;
    let scale = f.mean() / scene.shadow_free.mean();
    let truth: Vec<f64> = scene
        .shadow_free
        .plane(0)
        .iter()
        .map(|v| v * scale)
        .collect();

    for mode in [Mode::Isotropic, Mode::Anisotropic] {
        let params = FilterParams {
            mode,
            tau: 100.0,
            final_time: 10_000.0,
            ..Default::default()
        };
        let t0 = Instant::now();
        let out = remove_shadow(f, &scene.mask, &params)?;
        let u = out.image.plane(0);
        println!(
            "{mode:>11}: {:>3} steps in {:6.2}s  rmse band {:.4}  rmse outside {:.4}",
            out.traces[0].steps,
            t0.elapsed().as_secs_f64(),
            rmse_on(u, &truth, |k| scene.mask.at(k)),
            rmse_on(u, &truth, |k| !scene.mask.at(k)),
        );
        if let Some(dir) = &out_dir {
            save_image(&out.image, format!("{dir}/stripes_{mode}.png"))?;
        }
    }
    if let Some(dir) = &out_dir {
        save_image(f, format!("{dir}/stripes_input.png"))?;
    }
    Ok(())
}
