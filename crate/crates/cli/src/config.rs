//! Experiment configuration files and built-in presets.
//!
//! ```text
//! # comment
//! name = fig2a
//! x_a = 117            # lambda0 units
//! filter_a = 3         # nm FWHM
//! x_b_max = 800
//! step = 2
//! lambda0 = 780        # nm, optional
//! echo_points = 200    # optional, comma separated
//!
//! [spectrum_b]
//! component = 0.37, 778.853, 0.85   # weight, center nm, FWHM nm
//!
//! [tomography]                      # optional
//! n_per_setting = 10000
//! resamples = 200
//! seed = 7
//! ```

use std::path::Path;

use corrdyn::dephasing::{
    DephasingError, EchoSchedule, GaussianComponent, Retardation, SpectralModel,
};
use corrdyn::SweepConfig;
use thiserror::Error;

pub const DEFAULT_LAMBDA0_NM: f64 = 780.0;
pub const PRESETS: [&str; 4] = ["fig2a", "fig2b", "fig3a", "fig3b"];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("missing key {0:?}")]
    MissingKey(&'static str),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// One Gaussian of the arm-b spectrum, in wavelength units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentSpec {
    pub weight: f64,
    pub center_nm: f64,
    pub fwhm_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographySpec {
    pub n_per_setting: u64,
    pub resamples: usize,
    pub seed: u64,
}

/// Lengths are in units of `lambda0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub x_a: f64,
    pub filter_a: f64,
    pub spectrum_b: Vec<ComponentSpec>,
    pub echo_points: Vec<f64>,
    pub x_b_max: f64,
    pub step: f64,
    pub lambda0: f64,
    pub tomography: Option<TomographySpec>,
}

const FP_PEAKS: [(f64, f64); 3] = [(0.37, 778.853), (0.44, 780.160), (0.19, 781.459)];

fn fp_spectrum(fwhm_nm: f64) -> Vec<ComponentSpec> {
    FP_PEAKS
        .iter()
        .map(|&(weight, center_nm)| ComponentSpec { weight, center_nm, fwhm_nm })
        .collect()
}

/// Built-in configuration by name.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let base = |name: &str, fwhm: f64, echo: Vec<f64>| ExperimentConfig {
        name: name.to_string(),
        x_a: 117.0,
        filter_a: 3.0,
        spectrum_b: fp_spectrum(fwhm),
        echo_points: echo,
        x_b_max: 800.0,
        step: 2.0,
        lambda0: DEFAULT_LAMBDA0_NM,
        tomography: None,
    };
    match name {
        "fig2a" => Some(base(name, 0.85, vec![])),
        "fig2b" => Some(base(name, 0.2, vec![])),
        "fig3a" => Some(base(name, 0.85, vec![200.0])),
        "fig3b" => Some(base(name, 0.85, vec![400.0])),
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Top,
    SpectrumB,
    Tomography,
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::ParseError {
            line,
            message: format!("{key}: expected a number, got {value:?}"),
        })
}

fn parse_int<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse::<T>().map_err(|_| ConfigError::ParseError {
        line,
        message: format!("{key}: expected a non-negative integer, got {value:?}"),
    })
}

fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(line, key, s))
        .collect()
}

#[derive(Default)]
struct TomographyDraft {
    n_per_setting: Option<u64>,
    resamples: Option<usize>,
    seed: Option<u64>,
}

/// Parse the line-oriented format. `default_name` is used when no `name` key
/// is given.
pub fn parse_config_str(text: &str, default_name: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut section = Section::Top;
    let mut name = None;
    let (mut x_a, mut filter_a, mut x_b_max, mut step, mut lambda0) = (None, None, None, None, None);
    let mut echo_points = Vec::new();
    let mut spectrum_b = Vec::new();
    let mut tomo: Option<TomographyDraft> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[') {
            let header = header.strip_suffix(']').ok_or_else(|| ConfigError::ParseError {
                line,
                message: format!("unterminated section header {content:?}"),
            })?;
            section = match header.trim() {
                "spectrum_b" => Section::SpectrumB,
                "tomography" => {
                    tomo.get_or_insert_with(TomographyDraft::default);
                    Section::Tomography
                }
                other => {
                    return Err(ConfigError::ParseError { line, message: format!("unknown section [{other}]") })
                }
            };
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::ParseError {
            line,
            message: format!("expected key = value, got {content:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        match (section, key) {
            (Section::Top, "name") => name = Some(value.to_string()),
            (Section::Top, "x_a") => x_a = Some(parse_f64(line, key, value)?),
            (Section::Top, "filter_a") => filter_a = Some(parse_f64(line, key, value)?),
            (Section::Top, "x_b_max") => x_b_max = Some(parse_f64(line, key, value)?),
            (Section::Top, "step") => step = Some(parse_f64(line, key, value)?),
            (Section::Top, "lambda0") => lambda0 = Some(parse_f64(line, key, value)?),
            (Section::Top, "echo_points") => echo_points = parse_list(line, key, value)?,
            (Section::SpectrumB, "component") => {
                let parts = parse_list(line, key, value)?;
                let [weight, center_nm, fwhm_nm] = parts[..] else {
                    return Err(ConfigError::ParseError {
                        line,
                        message: "component needs weight, center_nm, fwhm_nm".to_string(),
                    });
                };
                spectrum_b.push(ComponentSpec { weight, center_nm, fwhm_nm });
            }
            (Section::Tomography, k) => {
                let draft = tomo.get_or_insert_with(TomographyDraft::default);
                match k {
                    "n_per_setting" => draft.n_per_setting = Some(parse_int(line, key, value)?),
                    "resamples" => draft.resamples = Some(parse_int(line, key, value)?),
                    "seed" => draft.seed = Some(parse_int(line, key, value)?),
                    _ => return Err(ConfigError::UnknownKey { line, key: key.to_string() }),
                }
            }
            _ => return Err(ConfigError::UnknownKey { line, key: key.to_string() }),
        }
    }

    let tomography = match tomo {
        None => None,
        Some(d) => Some(TomographySpec {
            n_per_setting: d.n_per_setting.ok_or(ConfigError::MissingKey("tomography.n_per_setting"))?,
            resamples: d.resamples.ok_or(ConfigError::MissingKey("tomography.resamples"))?,
            seed: d.seed.unwrap_or(0),
        }),
    };
    if spectrum_b.is_empty() {
        return Err(ConfigError::MissingKey("spectrum_b.component"));
    }
    let config = ExperimentConfig {
        name: name.unwrap_or_else(|| default_name.to_string()),
        x_a: x_a.ok_or(ConfigError::MissingKey("x_a"))?,
        filter_a: filter_a.ok_or(ConfigError::MissingKey("filter_a"))?,
        spectrum_b,
        echo_points,
        x_b_max: x_b_max.ok_or(ConfigError::MissingKey("x_b_max"))?,
        step: step.ok_or(ConfigError::MissingKey("step"))?,
        lambda0: lambda0.unwrap_or(DEFAULT_LAMBDA0_NM),
        tomography,
    };
    config.validate()?;
    Ok(config)
}

/// Preset name or path to a config file.
pub fn load(source: &str) -> Result<ExperimentConfig, crate::CliError> {
    let path = Path::new(source);
    if !path.exists() {
        if let Some(p) = preset(source) {
            return Ok(p);
        }
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| crate::CliError::Io(format!("{source}: {e}")))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("experiment");
    Ok(parse_config_str(&text, stem)?)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !(self.step > 0.0) {
            return invalid("step must be positive");
        }
        if !(self.x_b_max >= 0.0) {
            return invalid("x_b_max must be non-negative");
        }
        if !(self.x_a >= 0.0) {
            return invalid("x_a must be non-negative");
        }
        if !(self.filter_a > 0.0 && self.lambda0 > 0.0) {
            return invalid("filter_a and lambda0 must be positive");
        }
        if self.echo_points.iter().any(|&p| !(p > 0.0)) || self.echo_points.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("echo points must be positive and strictly increasing");
        }
        if let Some(t) = &self.tomography {
            if t.n_per_setting == 0 || t.resamples < corrdyn::tomography::MIN_RESAMPLES {
                return invalid("tomography needs n_per_setting >= 1 and resamples >= 2");
            }
        }
        Ok(())
    }

    pub fn lambda0_m(&self) -> f64 {
        self.lambda0 * 1e-9
    }

    /// Physical sweep description in SI units.
    pub fn sweep_config(&self) -> Result<SweepConfig, DephasingError> {
        let l0 = self.lambda0_m();
        let components = self
            .spectrum_b
            .iter()
            .map(|c| GaussianComponent::from_wavelength(c.weight, c.center_nm * 1e-9, c.fwhm_nm * 1e-9, l0))
            .collect::<Result<Vec<_>, _>>()?;
        let echo = self
            .echo_points
            .iter()
            .map(|&p| Retardation::from_wavelengths(p, l0))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SweepConfig {
            x_a: Retardation::from_wavelengths(self.x_a, l0)?,
            spectrum_a: SpectralModel::filter(self.filter_a * 1e-9, l0)?,
            spectrum_b: SpectralModel::multi_gaussian(components)?,
            echo: EchoSchedule::new(echo)?,
            x_b_max: self.x_b_max * l0,
            step: self.step * l0,
        })
    }
}
