use std::fmt;

/// One violated configuration constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport(pub Vec<Violation>);

impl ValidationReport {
    pub fn contains(&self, needle: &str) -> bool {
        self.0.iter().any(|v| v.message.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Invalid(ValidationReport),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("caustic between rays {ray} and {} at t = {t}: separation {separation:e}", ray - 1)]
    Caustic { ray: usize, t: f64, separation: f64 },

    #[error("ray {ray} turned back at t = {t}: |p_x| = {px}")]
    MomentumOverflow { ray: usize, t: f64, px: f64 },

    #[error("degenerate interpolation stencil around ray {ray}")]
    DegenerateStencil { ray: usize },

    #[error("x = {x} lies outside the sampled profile range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("launch amplitude vanishes on the whole window")]
    ZeroAmplitude,

    #[error("oracle grid too narrow: edge amplitude {edge:e} of peak")]
    GridTooNarrow { edge: f64 },

    #[error("record has not reached the far field: waist slope {ratio} of asymptote")]
    NotFarField { ratio: f64 },

    #[error("curve has no extrema")]
    FlatCurve,

    #[error("ray front covers only {coverage:.3} of the oracle support")]
    InsufficientOverlap { coverage: f64 },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
