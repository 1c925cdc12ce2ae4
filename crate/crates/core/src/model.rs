//! Domain types shared by the whole engine.
//!
//! Everything here is dimensionless: lengths in units of the launch half-width
//! `w0`, momenta in units of the vacuum wavenumber (or `p0` for matter waves),
//! time in units of `w0 / c` (or `w0 / v0`). [`UnitSystem`] converts to
//! physical quantities for presentation only.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result, ValidationReport, Violation};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One ray's phase-space point plus the amplitude it carries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayState {
    pub x: f64,
    pub z: f64,
    pub px: f64,
    pub pz: f64,
    pub amp: f64,
}

impl RayState {
    pub fn momentum_norm_sq(&self) -> f64 {
        self.px * self.px + self.pz * self.pz
    }
}

/// All rays at a common time, ordered by launch position.
///
/// `g` and `dg_dx` hold the wave potential function `G = ∇²R/R` and its
/// transverse derivative per ray; they are empty until the transport module
/// fills them.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamFront {
    pub rays: Vec<RayState>,
    pub t: f64,
    pub g: Vec<f64>,
    pub dg_dx: Vec<f64>,
}

impl BeamFront {
    pub fn new(rays: Vec<RayState>, t: f64) -> Self {
        Self {
            rays,
            t,
            g: Vec::new(),
            dg_dx: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.rays.iter().map(|r| r.x).collect()
    }

    pub fn amps(&self) -> Vec<f64> {
        self.rays.iter().map(|r| r.amp).collect()
    }

    pub fn mean_z(&self) -> f64 {
        self.rays.iter().map(|r| r.z).sum::<f64>() / self.rays.len() as f64
    }

    pub fn has_potential(&self) -> bool {
        self.g.len() == self.rays.len() && self.dg_dx.len() == self.rays.len()
    }
}

/// Launch amplitude `R(x; z = 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LaunchProfile {
    /// A central Gaussian of weight `a` plus `m` symmetric pairs of weight `b`
    /// centred at `±N·x_c`, all of width `1/q`.
    CenteredComb {
        a: f64,
        b: f64,
        q: f64,
        m: u32,
        x_c: f64,
    },
    /// Two combs of `2m + 1` Gaussians spaced by `x_1`, centred at `±x_c`.
    TwinComb { q: f64, m: u32, x_c: f64, x_1: f64 },
    /// Tabulated `(x, R)` pairs, strictly increasing in `x`.
    Sampled { points: Vec<[f64; 2]> },
}

impl LaunchProfile {
    pub fn gaussian(q: f64) -> Self {
        LaunchProfile::CenteredComb {
            a: 1.0,
            b: 0.0,
            q,
            m: 0,
            x_c: 0.0,
        }
    }

    /// Even symmetry holds by construction for both closed-form families.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self, LaunchProfile::Sampled { .. })
    }

    fn check(&self, out: &mut Vec<Violation>) {
        match self {
            LaunchProfile::CenteredComb { a, b, q, .. } => {
                if !(*q > 0.0) {
                    out.push(v("profile.q", "q must be > 0"));
                }
                if *a < 0.0 || *b < 0.0 {
                    out.push(v("profile.a", "weights a and b must be >= 0"));
                }
                if *a == 0.0 && *b == 0.0 {
                    out.push(v("profile.a", "a and b cannot both be 0"));
                }
            }
            LaunchProfile::TwinComb { q, .. } => {
                if !(*q > 0.0) {
                    out.push(v("profile.q", "q must be > 0"));
                }
            }
            LaunchProfile::Sampled { points } => {
                if points.len() < 2 {
                    out.push(v("profile.points", "need at least 2 samples"));
                }
                if points.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    out.push(v("profile.points", "sample x must be strictly increasing"));
                }
                if points.iter().any(|p| !(p[1] >= 0.0)) {
                    out.push(v("profile.points", "sample amplitudes must be >= 0"));
                }
            }
        }
    }
}

/// Smooth analytic scalar field `offset + scale · shape(x, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticField {
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub scale: f64,
    #[serde(default)]
    pub shape: FieldShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldShape {
    /// Contributes nothing; the field is the constant `offset`.
    #[default]
    Uniform,
    Linear { gx: f64, gz: f64 },
    Quadratic { cx: f64, cz: f64 },
    Gaussian { x0: f64, z0: f64, width: f64 },
}

impl FieldShape {
    fn value_grad(&self, x: f64, z: f64) -> (f64, [f64; 2]) {
        match *self {
            FieldShape::Uniform => (0.0, [0.0, 0.0]),
            FieldShape::Linear { gx, gz } => (gx * x + gz * z, [gx, gz]),
            FieldShape::Quadratic { cx, cz } => {
                (cx * x * x + cz * z * z, [2.0 * cx * x, 2.0 * cz * z])
            }
            FieldShape::Gaussian { x0, z0, width } => {
                let (dx, dz) = (x - x0, z - z0);
                let w2 = width * width;
                let e = (-(dx * dx + dz * dz) / w2).exp();
                (e, [-2.0 * dx / w2 * e, -2.0 * dz / w2 * e])
            }
        }
    }
}

impl AnalyticField {
    pub fn constant(value: f64) -> Self {
        Self {
            offset: value,
            scale: 0.0,
            shape: FieldShape::Uniform,
        }
    }

    pub fn value(&self, x: f64, z: f64) -> f64 {
        self.offset + self.scale * self.shape.value_grad(x, z).0
    }

    pub fn gradient(&self, x: f64, z: f64) -> [f64; 2] {
        let g = self.shape.value_grad(x, z).1;
        [self.scale * g[0], self.scale * g[1]]
    }

    /// The field `1 - self`, exact in the descriptor parameters.
    pub fn complement(&self) -> Self {
        Self {
            offset: 1.0 - self.offset,
            scale: -self.scale,
            shape: self.shape,
        }
    }
}

/// External field acting on the rays.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Medium {
    #[default]
    Vacuum,
    /// Squared refractive index `n²(x, z)`.
    RefractiveIndex { n2: AnalyticField },
    /// Potential energy ratio `V(x, z) / E`.
    ExternalPotential { v_over_e: AnalyticField },
}

impl Medium {
    pub fn is_vacuum(&self) -> bool {
        matches!(self, Medium::Vacuum)
    }

    /// `n²` at a point; `1 - V/E` for potentials.
    pub fn n2(&self, x: f64, z: f64) -> f64 {
        match self {
            Medium::Vacuum => 1.0,
            Medium::RefractiveIndex { n2 } => n2.value(x, z),
            Medium::ExternalPotential { v_over_e } => 1.0 - v_over_e.value(x, z),
        }
    }

    /// `½∇n²`, equivalently `-½∇(V/E)`.
    pub fn half_grad_n2(&self, x: f64, z: f64) -> [f64; 2] {
        match self {
            Medium::Vacuum => [0.0, 0.0],
            Medium::RefractiveIndex { n2 } => {
                let g = n2.gradient(x, z);
                [0.5 * g[0], 0.5 * g[1]]
            }
            Medium::ExternalPotential { v_over_e } => {
                let g = v_over_e.gradient(x, z);
                [-0.5 * g[0], -0.5 * g[1]]
            }
        }
    }

    /// The same physical medium described the other way round.
    pub fn dual(&self) -> Medium {
        match *self {
            Medium::Vacuum => Medium::Vacuum,
            Medium::RefractiveIndex { n2 } => Medium::ExternalPotential {
                v_over_e: n2.complement(),
            },
            Medium::ExternalPotential { v_over_e } => Medium::RefractiveIndex {
                n2: v_over_e.complement(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    /// Keep every k-th front in the trajectory record.
    pub record_every: usize,
    /// Write every k-th ray to the trajectory file.
    pub ray_stride: usize,
    /// Emit `plots.svg` next to the CSV files.
    pub plots: bool,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            record_every: 100,
            ray_stride: 10,
            plots: true,
        }
    }
}

pub const DEFAULT_STENCIL: usize = 5;
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-9;
pub const DEFAULT_AMP_FLOOR: f64 = 1e-12;
pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;
pub const DEFAULT_STEPS_TO_END: f64 = 1e4;
pub const DEFAULT_EDGE_RAYS: usize = 2;
pub const DEFAULT_SMOOTHING: f64 = 4.0;
pub const DEFAULT_FILTER_ORDER: usize = 12;
pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_TAIL_FIT: usize = 4;
/// Fraction of `h² / (ε/4π)` used for the default step.
pub const DT_STABILITY: f64 = 0.25;

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// Dimensionless wavelength `λ0 / w0`.
    pub epsilon: f64,
    pub n_rays: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub dt: f64,
    pub z_end: f64,
    pub stencil: usize,
    pub coupling_enabled: bool,
    pub min_separation: f64,
    /// Relative amplitude floor applied at launch.
    pub amp_floor: f64,
    /// Apply the `1/p_z²` factor when forming `G` from `∂²R/∂x²`.
    pub pz_correction: bool,
    /// Outer rays on each side whose `G` is extrapolated from the interior.
    pub edge_rays: usize,
    /// Damping rate of the grid-scale part of the ray momenta, in units of
    /// `(ε/4π)/d²` with `d` the smallest core ray distance. Zero disables it.
    pub smoothing: f64,
    /// Order of the difference filter that picks out the grid-scale part;
    /// even.
    pub filter_order: usize,
    /// Rays whose launch intensity is below this fraction of the peak are
    /// not integrated; they follow a linear continuation of the core edge.
    pub tail_threshold: f64,
    /// Rays over which that continuation is fitted.
    pub tail_fit: usize,
    /// Scale the step by `(d / h)²` as the front spreads, where `d` is the
    /// smallest core ray distance and `h` its launch value;
    /// capped at `max(dt, z_end / 10⁴)`.
    pub adaptive_step: bool,
    pub max_steps: u64,
    pub profile: LaunchProfile,
    pub medium: Medium,
    pub output: OutputOptions,
}

impl ScenarioConfig {
    /// A config with library defaults for everything except the physics.
    pub fn new(name: &str, epsilon: f64, profile: LaunchProfile, window: (f64, f64), z_end: f64) -> Self {
        let mut config = Self {
            name: name.to_string(),
            epsilon,
            n_rays: 2001,
            x_min: window.0,
            x_max: window.1,
            dt: 0.0,
            z_end,
            stencil: DEFAULT_STENCIL,
            coupling_enabled: true,
            min_separation: DEFAULT_MIN_SEPARATION,
            amp_floor: DEFAULT_AMP_FLOOR,
            pz_correction: true,
            edge_rays: DEFAULT_EDGE_RAYS,
            smoothing: DEFAULT_SMOOTHING,
            filter_order: DEFAULT_FILTER_ORDER,
            tail_threshold: DEFAULT_TAIL_THRESHOLD,
            tail_fit: DEFAULT_TAIL_FIT,
            adaptive_step: true,
            max_steps: DEFAULT_MAX_STEPS,
            profile,
            medium: Medium::Vacuum,
            output: OutputOptions::default(),
        };
        config.dt = config.default_dt();
        config
    }

    /// `(ε/4π)/h²`: the rate scale of the shortest front wavelengths.
    pub fn grid_rate(&self) -> f64 {
        let h = self.launch_spacing();
        self.epsilon / (4.0 * PI) / (h * h)
    }

    /// `z_end / 10⁴`, capped with coupling on by the stability limit of the
    /// shortest front wavelengths.
    pub fn default_dt(&self) -> f64 {
        let nominal = self.z_end / DEFAULT_STEPS_TO_END;
        let limit = DT_STABILITY / self.grid_rate();
        if self.coupling_enabled && limit.is_finite() && limit > 0.0 {
            nominal.min(limit)
        } else {
            nominal
        }
    }

    /// Longest step the adaptive rule may take.
    pub fn max_dt(&self) -> f64 {
        self.dt.max(self.z_end / DEFAULT_STEPS_TO_END)
    }

    /// `(ε/2π)²`, the weight of `G` in the force.
    pub fn coupling_weight(&self) -> f64 {
        let r = self.epsilon / (2.0 * PI);
        r * r
    }

    pub fn launch_spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_rays as f64 - 1.0)
    }
}

fn v(field: &'static str, message: &str) -> Violation {
    Violation {
        field,
        message: message.to_string(),
    }
}

/// Check every config invariant; all violations are reported together.
pub fn validate(config: ScenarioConfig) -> std::result::Result<ScenarioConfig, ValidationReport> {
    let mut out = Vec::new();
    if !(config.epsilon > 0.0) || !config.epsilon.is_finite() {
        out.push(v("epsilon", "epsilon must be > 0"));
    }
    if config.stencil < 3 || config.stencil % 2 == 0 {
        out.push(v("stencil", "stencil must be an odd integer >= 3"));
    }
    if config.n_rays < config.stencil {
        out.push(v("n_rays", "n_rays ≥ stencil required"));
    }
    if !(config.x_min < config.x_max) {
        out.push(v("x_min", "x_min < x_max required"));
    }
    if !(config.dt > 0.0) || !config.dt.is_finite() {
        out.push(v("dt", "dt must be > 0"));
    }
    if !(config.z_end > 0.0) || !config.z_end.is_finite() {
        out.push(v("z_end", "z_end must be > 0"));
    }
    if !(config.min_separation > 0.0) {
        out.push(v("min_separation", "min_separation must be > 0"));
    }
    if !(config.amp_floor >= 0.0 && config.amp_floor < 1.0) {
        out.push(v("amp_floor", "amp_floor must lie in [0, 1)"));
    }
    if !(config.smoothing >= 0.0) || !config.smoothing.is_finite() {
        out.push(v("smoothing", "smoothing must be >= 0"));
    }
    if config.filter_order < 2 || config.filter_order % 2 == 1 || config.filter_order > 32 {
        out.push(v("filter_order", "filter_order must be an even integer in 2..=32"));
    }
    if config.smoothing > 0.0 && config.filter_order + 1 > config.n_rays {
        out.push(v("filter_order", "filter_order + 1 must not exceed n_rays"));
    }
    if !(config.tail_threshold >= 0.0 && config.tail_threshold < 1.0) {
        out.push(v("tail_threshold", "tail_threshold must lie in [0, 1)"));
    }
    if config.tail_fit == 0 || config.tail_fit >= config.n_rays {
        out.push(v("tail_fit", "tail_fit must lie in 1..n_rays"));
    }
    if 2 * config.edge_rays + config.stencil > config.n_rays {
        out.push(v("edge_rays", "edge_rays leave too few interior rays"));
    }
    if config.max_steps == 0 {
        out.push(v("max_steps", "max_steps must be >= 1"));
    }
    if config.output.record_every == 0 {
        out.push(v("record_every", "record_every must be >= 1"));
    }
    if config.output.ray_stride == 0 {
        out.push(v("ray_stride", "ray_stride must be >= 1"));
    }
    config.profile.check(&mut out);
    if out.is_empty() {
        Ok(config)
    } else {
        Err(ValidationReport(out))
    }
}

/// Physical units behind the dimensionless variables.
///
/// SI throughout: lengths in metres, mass in kilograms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub w0: f64,
    pub lambda0: f64,
    pub mass: Option<f64>,
}

impl UnitSystem {
    pub fn epsilon(&self) -> f64 {
        self.lambda0 / self.w0
    }

    pub fn k0(&self) -> f64 {
        2.0 * PI / self.lambda0
    }

    /// de Broglie momentum `2πħ/λ0`.
    pub fn p0(&self) -> f64 {
        2.0 * PI * HBAR / self.lambda0
    }

    /// Kinetic energy `p0²/2m`, for matter waves.
    pub fn energy(&self) -> Option<f64> {
        self.mass.map(|m| self.p0() * self.p0() / (2.0 * m))
    }

    /// Physical `∇²R/R` from the dimensionless `G` (which is in units of `1/w0²`).
    pub fn laplacian_ratio(&self, g: f64) -> f64 {
        g / (self.w0 * self.w0)
    }

    /// Wave potential `W = -(c/2k0)·∇²R/R`, in rad/s.
    pub fn wave_potential(&self, g: f64) -> f64 {
        -SPEED_OF_LIGHT / (2.0 * self.k0()) * self.laplacian_ratio(g)
    }

    /// Quantum potential `Q = -(ħ²/2m)·∇²R/R`, in joules.
    pub fn quantum_potential(&self, g: f64) -> Option<f64> {
        self.mass
            .map(|m| -HBAR * HBAR / (2.0 * m) * self.laplacian_ratio(g))
    }

    /// Check that `epsilon` agrees with this unit system to 1 part in 10⁹.
    pub fn matches_epsilon(&self, epsilon: f64) -> bool {
        ((self.epsilon() - epsilon) / epsilon).abs() <= 1e-9
    }
}

pub fn units_from_physical(lambda0: f64, w0: f64, mass: Option<f64>) -> Result<UnitSystem> {
    if !(lambda0 > 0.0) {
        return Err(Error::Argument("lambda0 must be > 0".into()));
    }
    if !(w0 > 0.0) {
        return Err(Error::Argument("w0 must be > 0".into()));
    }
    if let Some(m) = mass {
        if !(m > 0.0) {
            return Err(Error::Argument("mass must be > 0".into()));
        }
    }
    Ok(UnitSystem { w0, lambda0, mass })
}
