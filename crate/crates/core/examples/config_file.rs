//! Drives the whole pipeline from a flat `key = value` configuration, the
//! format accepted by `osmose --config`.
//!
//! `cargo run --release --example config_file [dir]`

use std::path::PathBuf;

use osmose::grid::save_image;
use osmose::pipeline::{run_shadow_removal, PipelineConfig};
use osmose::synthetic::StripeScene;
use osmose::{ImageBuffer, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let scene = StripeScene {
        size: 64,
        ..Default::default()
    }
    .render()?;
    let mask = ImageBuffer::from_channels(&[ScalarField::from_fn(64, 64, |i, j| {
        if scene.mask.get(i, j) {
            1.0
        } else {
            0.0
        }
    })])?;
    save_image(&scene.shadowed, dir.join("stripes.png"))?;
    save_image(&mask, dir.join("stripes_mask.png"))?;

    let text = format!(
        "# anisotropic run on the stripe scene\n\
         input = {0}/stripes.png\n\
         mask = {0}/stripes_mask.png\n\
         output = {0}/stripes_out.png\n\
         mode = anisotropic\n\
         tau = 100\n\
         T = 2000\n\
         epsilon = 0.05\n\
         scales = 5,10,15\n\
         theta-map = {0}/stripes_theta.png\n\
         trace = {0}/stripes_trace.csv\n\
         validate = true\n",
        dir.display()
    );
    let cfg_path = dir.join("stripes.conf");
    std::fs::write(&cfg_path, &text)?;

    let mut cfg = PipelineConfig::default();
    cfg.apply_file(&cfg_path)?;
    print!("{}", cfg.to_text());
    let out = run_shadow_removal(&cfg)?;
    for (c, t) in out.traces.iter().enumerate() {
        println!(
            "channel {c}: {} steps, final residual {:.1e}",
            t.steps,
            t.final_residual()
        );
    }
    for r in &out.reports {
        println!("{r}");
    }
    println!("wrote {}", cfg.output.display());
    Ok(())
}
