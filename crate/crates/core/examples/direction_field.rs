//! Estimates the edge direction inside a shadow-boundary band by multi-scale
//! tensor voting and compares it with the known stripe orientation.
//!
//! `cargo run --release --example direction_field [theta_map.png]`

use std::f64::consts::PI;

use osmose::pipeline::render_theta_map;
use osmose::structure::{estimate_directions, structure_tensor};
use osmose::synthetic::StripeScene;

fn angular_error(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d).to_degrees()
}

fn summary(label: &str, mut errors: Vec<f64>) {
    errors.sort_by(f64::total_cmp);
    println!(
        "{label:<22} median {:5.2} deg  90th percentile {:5.2} deg",
        errors[errors.len() / 2],
        errors[errors.len() * 9 / 10]
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = StripeScene::default();
    let scene = cfg.render()?;
    let band: Vec<usize> = (0..scene.mask.as_slice().len())
        .filter(|&k| scene.mask.at(k))
        .collect();

    for scales in [vec![5.0], vec![15.0], vec![5.0, 10.0, 15.0]] {
        let theta = estimate_directions(&scene.shadowed, &scene.mask, &scales, 0.5, 0)?;
        let errors = band
            .iter()
            .map(|&k| angular_error(theta.as_slice()[k], cfg.angle))
            .collect();
        summary(&format!("voting {scales:?}"), errors);
    }

    // the plain structure tensor sees the shadow edge inside the band
    let j = structure_tensor(&scene.shadowed.channel(0), 0.5, 2.0)?;
    let errors = band
        .iter()
        .map(|&k| {
            let e = j.eigen()[k];
            let theta_xy = e.e1[1].atan2(e.e1[0]);
            angular_error(osmose::structure::xy_to_ij(theta_xy), cfg.angle)
        })
        .collect();
    summary("structure tensor", errors);

    if let Some(path) = std::env::args().nth(1) {
        let theta = estimate_directions(&scene.shadowed, &scene.mask, &[5.0, 10.0, 15.0], 0.5, 0)?;
        render_theta_map(&theta, &scene.mask, &scene.shadowed.channel(0), &path)?;
        println!("wrote {path}");
    }
    Ok(())
}
