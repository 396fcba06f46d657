//! Obtuse superbases and AD-LBR stencil weights for increasingly anisotropic
//! tensors, laid out on the pixel grid around a centre pixel.
//!
//! `cargo run --example lattice_stencils [theta_degrees]`

use osmose::anisotropy::{
    anisotropy_ratio, selling_superbase, stencil_weights, weight_tensor, CALIBRATED_CONVENTION,
};
use osmose::structure::xy_to_ij;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let degrees: f64 = match std::env::args().nth(1) {
        Some(s) => s.parse()?,
        None => 120.0,
    };
    // angle given with y pointing up, as in a textbook figure
    let theta = xy_to_ij(degrees.to_radians());
    for eps in [1.0, 0.5, 0.1, 0.02] {
        let w = weight_tensor(theta, eps, CALIBRATED_CONVENTION);
        let sb = selling_superbase(w)?;
        let st = stencil_weights(w)?;
        let r = st.reconstruct();
        println!(
            "eps {eps:<5} kappa {:.2}  superbase {:?}  offsets {:?}  weights [{:.4}, {:.4}, {:.4}]",
            anisotropy_ratio(w),
            sb.e,
            st.offsets,
            st.weights[0],
            st.weights[1],
            st.weights[2]
        );
        println!(
            "  reconstruction error {:.1e}",
            (r.a11 - w.a11)
                .abs()
                .max((r.a12 - w.a12).abs())
                .max((r.a22 - w.a22).abs())
        );
        let reach = st.max_offset().max(1) as usize;
        let side = 2 * reach + 1;
        let mut grid = vec![vec![0.0; side]; side];
        for (&[dx, dy], &c) in st.offsets.iter().zip(&st.weights) {
            for s in [1, -1] {
                let (row, col) = (
                    (reach as i64 + s * dy) as usize,
                    (reach as i64 + s * dx) as usize,
                );
                grid[row][col] += c;
            }
        }
        grid[reach][reach] = -2.0 * st.weights.iter().sum::<f64>();
        for row in &grid {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:7.3}")).collect();
            println!("  {}", cells.join(" "));
        }
    }
    Ok(())
}
