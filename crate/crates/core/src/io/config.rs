//! Scenario files and the named presets.
//!
//! A scenario file is TOML with four sections:
//!
//! ```toml
//! preset = "gaussian"        # optional starting point
//!
//! [scenario]
//! name = "gaussian"
//! epsilon = 1.65e-4
//! n_rays = 2001
//! x_min = -5.0
//! x_max = 5.0
//! z_end = 152319.9           # defaults to the preset's multiple of π/ε
//! dt = 0.47                  # defaults to ScenarioConfig::default_dt
//! coupling_enabled = true
//!
//! [profile]
//! kind = "centered-comb"     # or "twin-comb", "sampled"
//! a = 1.0
//! b = 0.0
//! q = 1.0
//! m = 0
//! x_c = 0.0
//!
//! [medium]
//! kind = "vacuum"            # or "refractive-index", "external-potential"
//!
//! [output]
//! record_every = 100
//! ray_stride = 10
//! plots = true
//! ```
//!
//! Unknown keys anywhere are errors.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{validate, LaunchProfile, Medium, OutputOptions, ScenarioConfig};

/// Named starting points.
pub const PRESETS: [&str; 3] = ["gaussian", "single-slit", "multi-slit"];

/// Wavelength shared by every preset.
pub const PRESET_EPSILON: f64 = 1.65e-4;

/// Physics and numerics of a preset, plus its `z_end` in units of `π/ε`.
pub fn preset(name: &str) -> Result<(ScenarioConfig, f64)> {
    let (profile, window, n_rays, z_factor) = match name {
        "gaussian" => (LaunchProfile::gaussian(1.0), (-5.0, 5.0), 2001, 8.0),
        "single-slit" => (
            LaunchProfile::CenteredComb { a: 0.0, b: 1.0, q: 1.68, m: 2, x_c: 0.31 },
            (-3.7, 3.7),
            1001,
            4.0,
        ),
        "multi-slit" => (
            LaunchProfile::TwinComb { q: 3.5, m: 3, x_c: 1.15, x_1: 0.3 },
            (-3.5, 3.5),
            1001,
            1.0,
        ),
        other => {
            return Err(Error::Parse(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    let mut c = ScenarioConfig::new(name, PRESET_EPSILON, profile, window, z_factor * PI / PRESET_EPSILON);
    c.n_rays = n_rays;
    c.dt = c.default_dt();
    Ok((c, z_factor))
}

/// A validated preset.
pub fn preset_config(name: &str) -> Result<ScenarioConfig> {
    validate(preset(name)?.0).map_err(Error::Invalid)
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(default)]
    scenario: ScenarioSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profile: Option<LaunchProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    medium: Option<Medium>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<OutputSection>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    record_every: Option<usize>,
    ray_stride: Option<usize>,
    plots: Option<bool>,
}

macro_rules! scenario_section {
    ($($field:ident: $ty:ty),* $(,)?) => {
        #[derive(Debug, Default, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ScenarioSection {
            name: Option<String>,
            $(
                #[serde(skip_serializing_if = "Option::is_none")]
                $field: Option<$ty>,
            )*
        }

        impl ScenarioSection {
            fn apply(self, c: &mut ScenarioConfig) {
                if let Some(v) = self.name {
                    c.name = v;
                }
                $(
                    if let Some(v) = self.$field {
                        c.$field = v;
                    }
                )*
            }

            fn from_config(c: &ScenarioConfig) -> Self {
                Self {
                    name: Some(c.name.clone()),
                    $($field: Some(c.$field.clone()),)*
                }
            }
        }
    };
}

scenario_section! {
    epsilon: f64,
    n_rays: usize,
    x_min: f64,
    x_max: f64,
    dt: f64,
    z_end: f64,
    stencil: usize,
    coupling_enabled: bool,
    min_separation: f64,
    amp_floor: f64,
    pz_correction: bool,
    edge_rays: usize,
    smoothing: f64,
    filter_order: usize,
    tail_threshold: f64,
    tail_fit: usize,
    adaptive_step: bool,
    max_steps: u64,
}

/// Parse and validate a scenario from TOML text.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    let file: FileConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let (mut config, z_factor) = match &file.preset {
        Some(name) => {
            let (c, f) = preset(name)?;
            (c, Some(f))
        }
        None => {
            let profile = file
                .profile
                .clone()
                .ok_or_else(|| Error::Parse("missing [profile] section".into()))?;
            (ScenarioConfig::new("scenario", f64::NAN, profile, (f64::NAN, f64::NAN), f64::NAN), None)
        }
    };
    let has_dt = file.scenario.dt.is_some();
    let has_z_end = file.scenario.z_end.is_some();
    let s = file.scenario;
    if file.preset.is_none() {
        for (key, present) in [
            ("epsilon", s.epsilon.is_some()),
            ("x_min", s.x_min.is_some()),
            ("x_max", s.x_max.is_some()),
            ("z_end", s.z_end.is_some()),
        ] {
            if !present {
                return Err(Error::Parse(format!("missing scenario.{key}")));
            }
        }
    }
    s.apply(&mut config);
    if let Some(p) = file.profile {
        config.profile = p;
    }
    if let Some(m) = file.medium {
        config.medium = m;
    }
    if let Some(o) = file.output {
        let d = config.output;
        config.output = OutputOptions {
            record_every: o.record_every.unwrap_or(d.record_every),
            ray_stride: o.ray_stride.unwrap_or(d.ray_stride),
            plots: o.plots.unwrap_or(d.plots),
        };
    }
    if let (Some(f), false) = (z_factor, has_z_end) {
        config.z_end = f * PI / config.epsilon;
    }
    if !has_dt {
        config.dt = config.default_dt();
    }
    validate(config).map_err(Error::Invalid)
}

/// Read a scenario file; an unreadable file is a config error.
pub fn read_config_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Read, parse and validate a scenario file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = read_config_text(path)?;
    parse_config_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Full TOML description of a config; parses back to an equal config.
pub fn emit_config(config: &ScenarioConfig) -> String {
    let file = FileConfig {
        preset: None,
        scenario: ScenarioSection::from_config(config),
        profile: Some(config.profile.clone()),
        medium: Some(config.medium),
        output: Some(OutputSection {
            record_every: Some(config.output.record_every),
            ray_stride: Some(config.output.ray_stride),
            plots: Some(config.output.plots),
        }),
    };
    toml::to_string(&file).expect("config serializes")
}
