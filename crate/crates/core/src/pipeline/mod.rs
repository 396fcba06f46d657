//! End-to-end shadow removal: directions, weights, one generator per channel,
//! exponential stepping.

mod config;
mod render;

use std::fs::File;
use std::io::{BufWriter, Write};

pub use config::{
    parse_assignments, parse_scales, FilterParams, Mode, PipelineConfig, CONFIG_KEYS,
};
pub use render::{hue_to_rgb, render_theta_map, theta_map_rgb};

use crate::anisotropy::{build_weight_field, WeightField};
use crate::error::{OsmoseError, Result};
use crate::expm::{evolve, EvolutionTrace, StepperConfig};
use crate::grid::{
    dilate_mask, lift_positive, load_image, load_mask, save_image, ImageBuffer, MaskField,
    ScalarField,
};
use crate::operator::{assemble, validate_generator, GeneratorReport};
use crate::structure::estimate_directions;

/// Result of a filter run. `image` is still lifted.
#[derive(Debug, Clone)]
pub struct ShadowRemoval {
    pub image: ImageBuffer,
    /// The mask after dilation.
    pub mask: MaskField,
    /// Estimated directions; `None` when no estimate was needed.
    pub theta: Option<ScalarField>,
    pub reports: Vec<GeneratorReport>,
    pub traces: Vec<EvolutionTrace>,
}

impl ShadowRemoval {
    pub fn hypotheses_hold(&self) -> bool {
        self.reports
            .iter()
            .all(GeneratorReport::satisfies_hypotheses)
    }
}

/// The weight field for `params.mode`, plus θ when it was estimated.
///
/// Isotropic mode and an empty mask both give `W = I` without any voting.
pub fn weight_field_for(
    img: &ImageBuffer,
    mask: &MaskField,
    params: &FilterParams,
) -> Result<(WeightField, Option<ScalarField>)> {
    let (h, w) = (img.height(), img.width());
    if params.mode == Mode::Isotropic || mask.is_clear() {
        return Ok((WeightField::identity(h, w), None));
    }
    let theta = estimate_directions(img, mask, &params.scales, params.sigma, params.seed)
        .map_err(|e| e.at_stage("directions"))?;
    let wf = build_weight_field(&theta, params.epsilon, mask).map_err(|e| e.at_stage("weights"))?;
    Ok((wf, Some(theta)))
}

/// Filters a positive image in memory. Every channel starts from itself and is
/// guided by itself, with the drift switched off on the (dilated) mask.
pub fn remove_shadow(
    img: &ImageBuffer,
    mask: &MaskField,
    params: &FilterParams,
) -> Result<ShadowRemoval> {
    params.validate().map_err(|e| e.at_stage("parameters"))?;
    mask.check_shape(img.height(), img.width())
        .map_err(|e| e.at_stage("mask"))?;
    let mask = dilate_mask(mask, params.dilate);
    let (weights, theta) = weight_field_for(img, &mask, params)?;
    let stepper = StepperConfig {
        tau: params.tau,
        tol: params.tol,
        max_steps: params.steps(),
        steady_tol: params.steady_tol,
    };

    let channel_run = |c: usize| -> Result<(Vec<f64>, GeneratorReport, EvolutionTrace)> {
        let v = img.channel(c);
        let a = assemble(&v, &weights, &mask).map_err(|e| e.at_stage("assembly"))?;
        let report = validate_generator(&a);
        let (u, trace) = evolve(&a, v.as_slice(), &stepper).map_err(|e| e.at_stage("evolution"))?;
        Ok((u, report, trace))
    };
    let results: Vec<Result<_>> = if img.channels() == 1 {
        vec![channel_run(0)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..img.channels())
                .map(|c| s.spawn(move || channel_run(c)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("channel worker panicked"))
                .collect()
        })
    };

    let mut image = img.clone();
    let mut reports = Vec::with_capacity(img.channels());
    let mut traces = Vec::with_capacity(img.channels());
    for (c, r) in results.into_iter().enumerate() {
        let (u, report, trace) = r?;
        image.set_plane(c, &u)?;
        reports.push(report);
        traces.push(trace);
    }
    Ok(ShadowRemoval {
        image,
        mask,
        theta,
        reports,
        traces,
    })
}

/// Writes the traces as CSV. A single channel gives `step,mean,min,residual`;
/// colour images get a leading `channel` column.
pub fn write_traces<W: Write>(traces: &[EvolutionTrace], mut out: W) -> std::io::Result<()> {
    if let [only] = traces {
        return only.write_csv(out);
    }
    writeln!(out, "channel,step,mean,min,residual")?;
    for (c, t) in traces.iter().enumerate() {
        for k in 0..t.means.len() {
            writeln!(
                out,
                "{c},{k},{:.17e},{:.17e},{:.17e}",
                t.means[k], t.mins[k], t.residuals[k]
            )?;
        }
    }
    Ok(())
}

fn io_error(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> OsmoseError + '_ {
    move |source| OsmoseError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads, filters and saves according to `cfg`.
///
/// With `cfg.validate` set, a generator that fails the hypotheses check
/// aborts the run before anything is written.
pub fn run_shadow_removal(cfg: &PipelineConfig) -> Result<ShadowRemoval> {
    cfg.validate().map_err(|e| e.at_stage("config"))?;
    let raw = load_image(&cfg.input).map_err(|e| e.at_stage("load"))?;
    let img = lift_positive(&raw, cfg.lift).map_err(|e| e.at_stage("load"))?;
    let mask = load_mask(&cfg.mask, cfg.mask_threshold).map_err(|e| e.at_stage("mask"))?;
    mask.check_shape(img.height(), img.width())
        .map_err(|e| e.at_stage("mask"))?;

    let mut result = remove_shadow(&img, &mask, &cfg.filter)?;
    if cfg.validate {
        if let Some(bad) = result.reports.iter().find(|r| !r.satisfies_hypotheses()) {
            return Err(
                OsmoseError::invalid(format!("generator check failed: {bad}"))
                    .at_stage("validation"),
            );
        }
    }

    save_image(&result.image, &cfg.output).map_err(|e| e.at_stage("save"))?;

    if let Some(path) = &cfg.theta_map {
        let theta = match &result.theta {
            Some(t) => t.clone(),
            None if result.mask.is_clear() => ScalarField::filled(img.height(), img.width(), 0.0),
            None => estimate_directions(
                &img,
                &result.mask,
                &cfg.filter.scales,
                cfg.filter.sigma,
                cfg.filter.seed,
            )
            .map_err(|e| e.at_stage("theta-map"))?,
        };
        let mut grey = raw.greyscale();
        grey.as_mut_slice()
            .iter_mut()
            .for_each(|g| *g = g.clamp(0.0, 1.0));
        render_theta_map(&theta, &result.mask, &grey, path).map_err(|e| e.at_stage("theta-map"))?;
        result.theta = Some(theta);
    }

    if let Some(path) = &cfg.trace {
        let file = File::create(path)
            .map_err(io_error(path))
            .map_err(|e| e.at_stage("trace"))?;
        let mut out = BufWriter::new(file);
        write_traces(&result.traces, &mut out)
            .and_then(|_| out.flush())
            .map_err(io_error(path))
            .map_err(|e| e.at_stage("trace"))?;
    }
    Ok(result)
}
