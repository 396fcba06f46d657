use std::path::Path;
use std::process::Command;

use osmose::grid::{load_image, save_image};
use osmose::synthetic::StripeScene;
use osmose::{ImageBuffer, ScalarField};

fn osmose() -> Command {
    Command::new(env!("CARGO_BIN_EXE_osmose"))
}

fn write_scene(dir: &Path) {
    let scene = StripeScene {
        size: 32,
        band: 5,
        ..Default::default()
    }
    .render()
    .unwrap();
    let mask = ScalarField::from_fn(32, 32, |i, j| f64::from(u8::from(scene.mask.get(i, j))));
    save_image(&scene.shadowed, dir.join("in.png")).unwrap();
    save_image(
        &ImageBuffer::from_channels(&[mask]).unwrap(),
        dir.join("mask.png"),
    )
    .unwrap();
}

#[test]
fn filters_an_image_and_writes_side_outputs() {
    let dir = tempfile::tempdir().unwrap();
    write_scene(dir.path());
    let p = |name: &str| dir.path().join(name);
    let out = osmose()
        .args(["--input", p("in.png").to_str().unwrap()])
        .args(["--mask", p("mask.png").to_str().unwrap()])
        .args(["--output", p("out.png").to_str().unwrap()])
        .args([
            "--mode",
            "anisotropic",
            "--tau",
            "100",
            "--T",
            "500",
            "--epsilon",
            "0.05",
        ])
        .args([
            "--scales",
            "5,10",
            "--sigma",
            "0.5",
            "--seed",
            "3",
            "--validate",
        ])
        .args(["--theta-map", p("theta.png").to_str().unwrap()])
        .args(["--trace", p("trace.csv").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let img = load_image(p("out.png")).unwrap();
    assert_eq!((img.height(), img.width(), img.channels()), (32, 32, 1));
    let theta = load_image(p("theta.png")).unwrap();
    assert_eq!(theta.channels(), 3);
    let trace = std::fs::read_to_string(p("trace.csv")).unwrap();
    assert!(trace.starts_with("step,mean,min,residual"));
    assert_eq!(trace.lines().count(), 1 + 5 + 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("strongly connected components 1"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    write_scene(dir.path());
    let p = |name: &str| dir.path().join(name);
    let conf = format!(
        "input = {}\nmask = {}\noutput = {}\nmode = isotropic\ntau = 50\nT = 100\n",
        p("in.png").display(),
        p("mask.png").display(),
        p("wrong.png").display()
    );
    std::fs::write(p("run.conf"), conf).unwrap();
    let out = osmose()
        .args(["--config", p("run.conf").to_str().unwrap()])
        .args(["--output", p("right.png").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(p("right.png").exists() && !p("wrong.png").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("channel 0: 2 steps"));
}

#[test]
fn failures_name_their_stage() {
    let dir = tempfile::tempdir().unwrap();
    write_scene(dir.path());
    let p = |name: &str| dir.path().join(name);

    let missing = osmose()
        .args(["--input", p("nope.png").to_str().unwrap()])
        .args(["--mask", p("mask.png").to_str().unwrap()])
        .args(["--output", p("out.png").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error: load:"));

    let bad_eps = osmose()
        .args(["--input", p("in.png").to_str().unwrap()])
        .args(["--mask", p("mask.png").to_str().unwrap()])
        .args(["--output", p("out.png").to_str().unwrap()])
        .args(["--epsilon", "0"])
        .output()
        .unwrap();
    assert_eq!(bad_eps.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_eps.stderr).starts_with("error: config:"));

    let bad_scales = osmose().args(["--scales", "5,x"]).output().unwrap();
    assert_eq!(bad_scales.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_scales.stderr).starts_with("error: config:"));
    assert!(!p("out.png").exists());
}
