//! Assembles the osmosis generator of a small image with an anisotropic band,
//! checks the generator hypotheses and dumps the matrix as triplets.
//!
//! `cargo run --example assemble_operator [triplets.txt]`

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufWriter;

use osmose::anisotropy::build_weight_field;
use osmose::operator::{assemble, validate_generator};
use osmose::{MaskField, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (h, w) = (12, 16);
    let v = ScalarField::from_fn(h, w, |i, j| {
        0.3 + 0.2 * ((i as f64 * 0.7).sin() + (j as f64 * 0.4).cos()).abs()
    });
    let mask = MaskField::from_fn(h, w, |_, j| (6..9).contains(&j));
    let theta = ScalarField::filled(h, w, PI / 3.0);

    for eps in [1.0, 0.1, 0.01] {
        let weights = build_weight_field(&theta, eps, &mask)?;
        let a = assemble(&v, &weights, &mask)?;
        let report = validate_generator(&a);
        println!(
            "eps {eps:<5} nnz {:>5}  hypotheses hold: {}",
            a.nnz(),
            report.satisfies_hypotheses()
        );
        println!("  {report}");
    }

    // with an empty mask the guidance image spans the kernel
    let weights = build_weight_field(&theta, 0.1, &MaskField::empty(h, w))?;
    let a = assemble(&v, &weights, &MaskField::empty(h, w))?;
    let residual = a
        .matvec(v.as_slice())
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));
    println!("empty mask: max |A v| = {residual:.1e}");

    if let Some(path) = std::env::args().nth(1) {
        a.write_triplets(BufWriter::new(File::create(&path)?))?;
        println!("wrote {} entries to {path}", a.nnz());
    }
    Ok(())
}
