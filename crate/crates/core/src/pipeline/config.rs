use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{OsmoseError, Result};
use crate::expm::DOUBLE_TOL;
use crate::grid::DEFAULT_LIFT;

/// Which weight field drives the diffusion inside the shadow band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// `W = I` everywhere, no direction estimation.
    Isotropic,
    /// Tensor-voting directions with the small eigenvalue `ε` on the band.
    #[default]
    Anisotropic,
}

impl FromStr for Mode {
    type Err = OsmoseError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "isotropic" => Ok(Mode::Isotropic),
            "anisotropic" => Ok(Mode::Anisotropic),
            other => Err(OsmoseError::invalid(format!(
                "mode must be `isotropic` or `anisotropic`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Isotropic => "isotropic",
            Mode::Anisotropic => "anisotropic",
        })
    }
}

/// Numerical parameters of the filter, independent of any file.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterParams {
    pub mode: Mode,
    pub tau: f64,
    /// Final time `T`; the number of steps is `round(T / tau)`.
    pub final_time: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub scales: Vec<f64>,
    pub seed: u64,
    /// Radius of the square dilation applied to the mask.
    pub dilate: usize,
    pub steady_tol: f64,
    /// Backward-error tolerance of each exponential step.
    pub tol: f64,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            mode: Mode::Anisotropic,
            tau: 1000.0,
            final_time: 100_000.0,
            epsilon: 0.05,
            sigma: 0.5,
            scales: vec![5.0, 10.0, 15.0],
            seed: 0,
            dilate: 0,
            steady_tol: 1e-8,
            tol: DOUBLE_TOL,
        }
    }
}

impl FilterParams {
    pub fn steps(&self) -> usize {
        (self.final_time / self.tau).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(OsmoseError::invalid(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.final_time >= self.tau) || !self.final_time.is_finite() {
            return Err(OsmoseError::invalid(format!(
                "T must be finite and at least tau ({}), got {}",
                self.tau, self.final_time
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(OsmoseError::invalid(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(OsmoseError::invalid(format!(
                "sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        if self.mode == Mode::Anisotropic {
            if self.scales.is_empty() {
                return Err(OsmoseError::invalid(
                    "anisotropic mode needs at least one voting scale",
                ));
            }
            if let Some(s) = self.scales.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
                return Err(OsmoseError::invalid(format!(
                    "voting scales must be positive, got {s}"
                )));
            }
        }
        if !(self.steady_tol >= 0.0) {
            return Err(OsmoseError::invalid(format!(
                "steady-tol must be >= 0, got {}",
                self.steady_tol
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(OsmoseError::invalid(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Everything a command-line run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub mask: PathBuf,
    pub output: PathBuf,
    pub lift: f64,
    pub mask_threshold: f64,
    pub theta_map: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub validate: bool,
    pub filter: FilterParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::new(),
            mask: PathBuf::new(),
            output: PathBuf::new(),
            lift: DEFAULT_LIFT,
            mask_threshold: 0.5,
            theta_map: None,
            trace: None,
            validate: false,
            filter: FilterParams::default(),
        }
    }
}

/// Keys accepted by [`PipelineConfig::set`]; they match the CLI flag names.
pub const CONFIG_KEYS: &[&str] = &[
    "input",
    "mask",
    "output",
    "mode",
    "tau",
    "T",
    "epsilon",
    "sigma",
    "scales",
    "seed",
    "lift",
    "dilate",
    "mask-threshold",
    "theta-map",
    "trace",
    "steady-tol",
    "tol",
    "validate",
];

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| OsmoseError::invalid(format!("cannot parse `{value}` for {key}")))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(OsmoseError::invalid(format!(
            "cannot parse `{value}` for {key}"
        ))),
    }
}

/// Parses a comma-separated list such as `5,10,15`.
pub fn parse_scales(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| number("scales", s))
        .collect()
}

/// Splits flat `key = value` text into pairs; `#` starts a comment.
pub fn parse_assignments(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(OsmoseError::invalid(format!(
                "line {}: expected `key = value`, got `{line}`",
                n + 1
            )));
        };
        out.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

impl PipelineConfig {
    pub fn new(
        input: impl Into<PathBuf>,
        mask: impl Into<PathBuf>,
        output: impl Into<PathBuf>,
    ) -> Self {
        PipelineConfig {
            input: input.into(),
            mask: mask.into(),
            output: output.into(),
            ..Default::default()
        }
    }

    /// Sets one key from its textual value. Underscores and dashes are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let f = &mut self.filter;
        match key.trim().replace('_', "-").as_str() {
            "input" => self.input = PathBuf::from(value),
            "mask" => self.mask = PathBuf::from(value),
            "output" => self.output = PathBuf::from(value),
            "mode" => f.mode = value.parse()?,
            "tau" => f.tau = number(key, value)?,
            "T" | "final-time" => f.final_time = number(key, value)?,
            "epsilon" => f.epsilon = number(key, value)?,
            "sigma" => f.sigma = number(key, value)?,
            "scales" => f.scales = parse_scales(value)?,
            "seed" => f.seed = number(key, value)?,
            "lift" => self.lift = number(key, value)?,
            "dilate" => f.dilate = number(key, value)?,
            "mask-threshold" => self.mask_threshold = number(key, value)?,
            "theta-map" => self.theta_map = Some(PathBuf::from(value)),
            "trace" => self.trace = Some(PathBuf::from(value)),
            "steady-tol" => f.steady_tol = number(key, value)?,
            "tol" => f.tol = number(key, value)?,
            "validate" => self.validate = flag(key, value)?,
            other => {
                return Err(OsmoseError::invalid(format!(
                    "unknown configuration key `{other}` (known: {})",
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies every assignment of a flat `key = value` file.
    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| OsmoseError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        for (k, v) in parse_assignments(&text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    /// Renders the configuration in the format read by [`PipelineConfig::apply_file`].
    pub fn to_text(&self) -> String {
        let f = &self.filter;
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        line("input", self.input.display().to_string());
        line("mask", self.mask.display().to_string());
        line("output", self.output.display().to_string());
        line("mode", f.mode.to_string());
        line("tau", format!("{:?}", f.tau));
        line("T", format!("{:?}", f.final_time));
        line("epsilon", format!("{:?}", f.epsilon));
        line("sigma", format!("{:?}", f.sigma));
        line(
            "scales",
            f.scales
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        line("seed", f.seed.to_string());
        line("lift", format!("{:?}", self.lift));
        line("dilate", f.dilate.to_string());
        line("mask-threshold", format!("{:?}", self.mask_threshold));
        if let Some(p) = &self.theta_map {
            line("theta-map", p.display().to_string());
        }
        if let Some(p) = &self.trace {
            line("trace", p.display().to_string());
        }
        line("steady-tol", format!("{:?}", f.steady_tol));
        line("tol", format!("{:?}", f.tol));
        line("validate", self.validate.to_string());
        s
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("input", &self.input),
            ("mask", &self.mask),
            ("output", &self.output),
        ] {
            if p.as_os_str().is_empty() {
                return Err(OsmoseError::invalid(format!("missing {name} path")));
            }
        }
        if !(self.lift > 0.0) || !self.lift.is_finite() {
            return Err(OsmoseError::invalid(format!(
                "lift must be positive, got {}",
                self.lift
            )));
        }
        if !(self.mask_threshold > 0.0 && self.mask_threshold < 1.0) {
            return Err(OsmoseError::invalid(format!(
                "mask-threshold must lie in (0, 1), got {}",
                self.mask_threshold
            )));
        }
        self.filter.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_once_paths_are_set() {
        let cfg = PipelineConfig::new("a.png", "m.png", "o.png");
        cfg.validate().unwrap();
        assert_eq!(cfg.filter.steps(), 100);
        assert!(PipelineConfig::default().validate().is_err());
    }

    #[test]
    fn steps_round_to_nearest() {
        let p = FilterParams {
            tau: 300.0,
            final_time: 1000.0,
            ..Default::default()
        };
        assert_eq!(p.steps(), 3);
        let p = FilterParams {
            tau: 400.0,
            final_time: 1000.0,
            ..Default::default()
        };
        assert_eq!(p.steps(), 3);
    }

    #[test]
    fn parameter_invariants() {
        let cases = [
            FilterParams {
                tau: 0.0,
                ..Default::default()
            },
            FilterParams {
                final_time: 10.0,
                tau: 100.0,
                ..Default::default()
            },
            FilterParams {
                epsilon: 0.0,
                ..Default::default()
            },
            FilterParams {
                epsilon: 1.5,
                ..Default::default()
            },
            FilterParams {
                scales: vec![],
                ..Default::default()
            },
            FilterParams {
                scales: vec![5.0, -1.0],
                ..Default::default()
            },
            FilterParams {
                sigma: -0.5,
                ..Default::default()
            },
        ];
        for p in cases {
            assert!(p.validate().is_err(), "{p:?}");
        }
        let iso = FilterParams {
            mode: Mode::Isotropic,
            scales: vec![],
            ..Default::default()
        };
        iso.validate().unwrap();
    }

    #[test]
    fn assignments_round_trip() {
        let mut cfg = PipelineConfig::new("in.png", "mask.png", "out.png");
        cfg.set("mode", "isotropic").unwrap();
        cfg.set("scales", "2, 4.5").unwrap();
        cfg.set("T", "500").unwrap();
        cfg.set("tau", "50").unwrap();
        cfg.set("theta_map", "theta.png").unwrap();
        cfg.set("validate", "yes").unwrap();
        let text = cfg.to_text();
        let mut back = PipelineConfig::default();
        for (k, v) in parse_assignments(&text).unwrap() {
            back.set(&k, &v).unwrap();
        }
        assert_eq!(back, cfg);
        assert_eq!(back.filter.scales, vec![2.0, 4.5]);
    }

    #[test]
    fn comments_blank_lines_and_errors() {
        let pairs = parse_assignments("# header\n\ntau = 10 # trailing\n  sigma=0.7\n").unwrap();
        assert_eq!(
            pairs,
            vec![("tau".into(), "10".into()), ("sigma".into(), "0.7".into())]
        );
        assert!(parse_assignments("tau 10").is_err());
        let mut cfg = PipelineConfig::default();
        assert!(cfg.set("colour", "red").is_err());
        assert!(cfg.set("tau", "ten").is_err());
        assert!(cfg.set("mode", "sideways").is_err());
        assert!(cfg.set("validate", "maybe").is_err());
    }

    #[test]
    fn file_values_can_be_overridden() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "input = a.png\nmask = b.png\noutput = c.png\nepsilon = 0.1\n",
        )
        .unwrap();
        let mut cfg = PipelineConfig::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.filter.epsilon, 0.1);
        cfg.set("epsilon", "0.2").unwrap();
        assert_eq!(cfg.filter.epsilon, 0.2);
        cfg.validate().unwrap();
        assert!(cfg.apply_file(dir.path().join("missing.conf")).is_err());
    }
}
