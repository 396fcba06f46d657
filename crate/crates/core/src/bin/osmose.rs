use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use osmose::pipeline::{parse_scales, run_shadow_removal, Mode, PipelineConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Anisotropic,
    Isotropic,
}

/// Remove a cast shadow given a mask of its boundary band.
#[derive(Debug, Parser)]
#[command(name = "osmose", version)]
struct Args {
    /// Input image (8/16-bit greyscale or RGB).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Mask image; bright pixels mark the shadow boundary.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Output PNG.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Time step size.
    #[arg(long)]
    tau: Option<f64>,
    /// Final time; the number of steps is round(T / tau).
    #[arg(long = "T")]
    final_time: Option<f64>,
    /// Small eigenvalue of the weight tensors on the mask.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Pre-smoothing of the gradients used for voting.
    #[arg(long)]
    sigma: Option<f64>,
    /// Voting scales, comma separated.
    #[arg(long)]
    scales: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dilate the mask by this many pixels.
    #[arg(long)]
    dilate: Option<usize>,
    /// Offset added to intensities before filtering.
    #[arg(long)]
    lift: Option<f64>,
    #[arg(long = "mask-threshold")]
    mask_threshold: Option<f64>,
    /// Relative change that counts as a steady state.
    #[arg(long = "steady-tol")]
    steady_tol: Option<f64>,
    /// Write a colour map of the estimated orientations.
    #[arg(long = "theta-map")]
    theta_map: Option<PathBuf>,
    /// Write the per-step evolution trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Flat `key = value` file; flags given here take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Check and print the generator report of every channel.
    #[arg(long)]
    validate: bool,
}

fn build_config(args: Args) -> Result<PipelineConfig, osmose::OsmoseError> {
    let mut cfg = PipelineConfig::default();
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    let f = &mut cfg.filter;
    if let Some(v) = args.mode {
        f.mode = match v {
            ModeArg::Anisotropic => Mode::Anisotropic,
            ModeArg::Isotropic => Mode::Isotropic,
        };
    }
    if let Some(v) = args.tau {
        f.tau = v;
    }
    if let Some(v) = args.final_time {
        f.final_time = v;
    }
    if let Some(v) = args.epsilon {
        f.epsilon = v;
    }
    if let Some(v) = args.sigma {
        f.sigma = v;
    }
    if let Some(v) = &args.scales {
        f.scales = parse_scales(v)?;
    }
    if let Some(v) = args.seed {
        f.seed = v;
    }
    if let Some(v) = args.dilate {
        f.dilate = v;
    }
    if let Some(v) = args.steady_tol {
        f.steady_tol = v;
    }
    if let Some(v) = args.input {
        cfg.input = v;
    }
    if let Some(v) = args.mask {
        cfg.mask = v;
    }
    if let Some(v) = args.output {
        cfg.output = v;
    }
    if let Some(v) = args.lift {
        cfg.lift = v;
    }
    if let Some(v) = args.mask_threshold {
        cfg.mask_threshold = v;
    }
    if args.theta_map.is_some() {
        cfg.theta_map = args.theta_map;
    }
    if args.trace.is_some() {
        cfg.trace = args.trace;
    }
    cfg.validate |= args.validate;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match build_config(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: config: {e}");
            return ExitCode::from(2);
        }
    };
    match run_shadow_removal(&cfg) {
        Ok(result) => {
            if cfg.validate {
                for (c, r) in result.reports.iter().enumerate() {
                    println!("channel {c}: {r}");
                }
            }
            for (c, t) in result.traces.iter().enumerate() {
                eprintln!(
                    "channel {c}: {} steps, final residual {:.3e}, mean drift {:.3e}",
                    t.steps,
                    t.final_residual(),
                    t.max_mean_drift()
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
