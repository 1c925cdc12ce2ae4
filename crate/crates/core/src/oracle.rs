//! Angular-spectrum propagation of the launch field: a grid solution of the
//! vacuum Helmholtz equation used as ground truth for the ray engine.
//!
//! Each transverse Fourier component `k_x` advances by
//! `exp(i Δz (√(k0² - k_x²) - k0))` with `k0 = 2π/ε`, that is, the carrier
//! phase `exp(i k0 Δz)` is factored out. Evanescent components are zeroed.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::diagnostics::{fringe_extrema, match_extrema, significant, Extremum, ExtremumOffset};
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::model::{LaunchProfile, ScenarioConfig};
use crate::profiles::eval_profile_many;

pub const DEFAULT_GRID_NODES: usize = 1 << 16;
const EDGE_TOLERANCE: f64 = 1e-8;

/// Uniform periodic grid `x_i = centre + (i - n/2)·dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nodes: usize,
    pub span: f64,
    pub centre: f64,
}

impl GridSpec {
    pub fn dx(&self) -> f64 {
        self.span / self.nodes as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.centre + (i as f64 - (self.nodes / 2) as f64) * self.dx()
    }

    /// Grid for a scenario propagated to `z_max`: span at least four times
    /// the expected beam width, fine enough for the launch spectrum.
    pub fn for_scenario(config: &ScenarioConfig, z_max: f64) -> Self {
        let k_max = spectral_extent(&config.profile);
        let spread = k_max * config.epsilon / (2.0 * PI) * z_max;
        let half = config.x_min.abs().max(config.x_max.abs()) + spread;
        let span = 4.0 * 2.0 * half;
        let mut nodes = DEFAULT_GRID_NODES;
        // Nyquist at least twice the largest launch wavenumber.
        while span / nodes as f64 > PI / (2.0 * k_max) {
            nodes *= 2;
        }
        Self {
            nodes,
            span,
            centre: 0.5 * (config.x_min + config.x_max),
        }
    }
}

/// Wavenumber beyond which the launch spectrum is below ~1e-10 of its peak.
fn spectral_extent(profile: &LaunchProfile) -> f64 {
    match profile {
        // Spectrum of a Gaussian of width 1/q falls as exp(-k²/4q²).
        LaunchProfile::CenteredComb { q, .. } | LaunchProfile::TwinComb { q, .. } => 2.0 * q * (10.0 * 10f64.ln()).sqrt(),
        LaunchProfile::Sampled { points } => {
            let h = points
                .windows(2)
                .map(|w| w[1][0] - w[0][0])
                .fold(f64::INFINITY, f64::min);
            PI / h
        }
    }
}

/// Complex field on a uniform transverse grid at a given `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: GridSpec,
    pub u: Vec<Complex64>,
    pub z: f64,
    /// `2π/ε` in units of `1/w0`.
    pub k0: f64,
}

/// Launch field `u(x, 0) = R(x; 0)` with uniform phase. Sampled profiles
/// are zero outside their table.
pub fn lift_profile(profile: &LaunchProfile, grid: GridSpec, epsilon: f64) -> Result<ComplexField> {
    if !grid.nodes.is_power_of_two() || grid.nodes < 4 {
        return Err(Error::Argument("grid node count must be a power of two".into()));
    }
    let xs: Vec<f64> = (0..grid.nodes).map(|i| grid.x(i)).collect();
    let amps = match profile {
        LaunchProfile::Sampled { points } => {
            let (lo, hi) = (points[0][0], points[points.len() - 1][0]);
            let inside: Vec<f64> = xs.iter().map(|&x| x.clamp(lo, hi)).collect();
            let vals = eval_profile_many(profile, &inside)?;
            xs.iter()
                .zip(vals)
                .map(|(&x, v)| if x < lo || x > hi { 0.0 } else { v })
                .collect()
        }
        _ => eval_profile_many(profile, &xs)?,
    };
    let peak = amps.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::ZeroAmplitude);
    }
    let edge = amps[0].max(amps[amps.len() - 1]) / peak;
    if edge > EDGE_TOLERANCE {
        return Err(Error::GridTooNarrow { edge });
    }
    Ok(ComplexField {
        grid,
        u: amps.into_iter().map(|a| Complex64::new(a, 0.0)).collect(),
        z: 0.0,
        k0: 2.0 * PI / epsilon,
    })
}

impl ComplexField {
    pub fn xs(&self) -> Vec<f64> {
        (0..self.grid.nodes).map(|i| self.grid.x(i)).collect()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.u.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `Σ|u|² dx`.
    pub fn power(&self) -> f64 {
        self.u.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Intensity at `x` by linear interpolation between nodes.
    pub fn intensity_at(&self, x: f64) -> f64 {
        let dx = self.grid.dx();
        let pos = (x - self.grid.x(0)) / dx;
        let i = (pos.floor().max(0.0) as usize).min(self.grid.nodes - 2);
        let w = pos - i as f64;
        (1.0 - w) * self.u[i].norm_sqr() + w * self.u[i + 1].norm_sqr()
    }
}

/// Propagate by `delta_z` with the exact one-way dispersion relation.
pub fn propagate(field: &ComplexField, delta_z: f64) -> Result<ComplexField> {
    if !(delta_z >= 0.0) {
        return Err(Error::Argument("delta_z must be >= 0".into()));
    }
    let mut out = field.clone();
    out.z += delta_z;
    if delta_z == 0.0 {
        return Ok(out);
    }
    let n = field.grid.nodes;
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut out.u);
    let dk = 2.0 * PI / field.grid.span;
    let k0 = field.k0;
    for (i, c) in out.u.iter_mut().enumerate() {
        let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        let kx = m * dk;
        if kx.abs() >= k0 {
            *c = Complex64::new(0.0, 0.0);
            continue;
        }
        // √(k0² - kx²) - k0 without cancellation.
        let kz_shift = -kx * kx / (k0 + (k0 * k0 - kx * kx).sqrt());
        *c *= Complex64::from_polar(1.0, kz_shift * delta_z);
    }
    planner.plan_fft_inverse(n).process(&mut out.u);
    let scale = 1.0 / n as f64;
    for c in &mut out.u {
        *c *= scale;
    }
    Ok(out)
}

/// Result of comparing a ray intensity curve with the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// `‖I_rays − I_oracle‖₂ / ‖I_oracle‖₂` on the common grid, both at unit peak.
    pub l2_relative: f64,
    /// Fraction of the oracle support covered by the ray curve.
    pub coverage: f64,
    /// Common-grid abscissae and the two normalized curves.
    pub xs: Vec<f64>,
    pub rays: Vec<f64>,
    pub oracle: Vec<f64>,
    /// Matched extrema above [`FRINGE_THRESHOLD`] of each curve's peak,
    /// located on the raw curves. Empty when either curve has none.
    pub extrema: Vec<ExtremumOffset>,
}

/// Oracle support: where its normalized intensity exceeds this.
pub const SUPPORT_THRESHOLD: f64 = 1e-6;
const COMPARE_NODES: usize = 4001;
/// Relative level below which extrema are not treated as fringes.
pub const FRINGE_THRESHOLD: f64 = 1e-3;
pub const EXTREMUM_CENTRE_TOLERANCE: f64 = 1e-6;

/// Resample both curves (monotone cubic) onto a common grid over the oracle
/// support and compare them at unit peak.
pub fn compare(ray_curve: &[(f64, f64)], field: &ComplexField) -> Result<Comparison> {
    let intensity = field.intensity();
    let peak = intensity.iter().cloned().fold(0.0, f64::max);
    let xs = field.xs();
    let above: Vec<usize> = (0..xs.len())
        .filter(|&i| intensity[i] >= SUPPORT_THRESHOLD * peak)
        .collect();
    let (lo, hi) = (xs[above[0]], xs[above[above.len() - 1]]);
    let (rlo, rhi) = (ray_curve[0].0, ray_curve[ray_curve.len() - 1].0);
    let (clo, chi) = (lo.max(rlo), hi.min(rhi));
    let coverage = ((chi - clo) / (hi - lo)).max(0.0);
    if coverage < 0.8 {
        return Err(Error::InsufficientOverlap { coverage });
    }
    let ray_fit = MonotoneCubic::new(
        ray_curve.iter().map(|p| p.0).collect(),
        ray_curve.iter().map(|p| p.1).collect(),
    )
    .ok_or_else(|| Error::Argument("ray curve must be strictly increasing in x".into()))?;
    let oracle_fit = MonotoneCubic::new(xs, intensity.clone()).expect("uniform grid");
    let grid: Vec<f64> = (0..COMPARE_NODES)
        .map(|i| clo + (chi - clo) * i as f64 / (COMPARE_NODES - 1) as f64)
        .collect();
    let mut rays: Vec<f64> = grid.iter().map(|&x| ray_fit.eval(x).unwrap()).collect();
    let mut oracle: Vec<f64> = grid.iter().map(|&x| oracle_fit.eval(x).unwrap()).collect();
    normalize(&mut rays);
    normalize(&mut oracle);
    let num: f64 = rays.iter().zip(&oracle).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = oracle.iter().map(|b| b * b).sum();
    let oracle_curve: Vec<(f64, f64)> = field.xs().into_iter().zip(intensity).collect();
    let extrema = match (significant_extrema(ray_curve), significant_extrema(&oracle_curve)) {
        (Some(r), Some(o)) => match_extrema(&r, &o, field.grid.centre, EXTREMUM_CENTRE_TOLERANCE),
        _ => Vec::new(),
    };
    Ok(Comparison {
        l2_relative: (num / den).sqrt(),
        coverage,
        xs: grid,
        rays,
        oracle,
        extrema,
    })
}

/// Extrema of a curve at or above [`FRINGE_THRESHOLD`] of its peak.
pub fn significant_extrema(curve: &[(f64, f64)]) -> Option<Vec<Extremum>> {
    let peak = curve.iter().map(|p| p.1).fold(0.0, f64::max);
    let all = fringe_extrema(curve).ok()?;
    Some(significant(&all, peak, FRINGE_THRESHOLD))
}

fn normalize(v: &mut [f64]) {
    let peak = v.iter().cloned().fold(0.0, f64::max);
    if peak > 0.0 {
        for x in v.iter_mut() {
            *x /= peak;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> GridSpec {
        GridSpec {
            nodes: 4096,
            span: 80.0,
            centre: 0.0,
        }
    }

    #[test]
    fn lifted_gaussian() {
        let p = LaunchProfile::gaussian(1.0);
        let f = lift_profile(&p, small_grid(), 1.65e-4).unwrap();
        let mid = f.grid.nodes / 2;
        assert_eq!(f.grid.x(mid), 0.0);
        assert_eq!(f.u[mid], Complex64::new(1.0, 0.0));
        for (i, c) in f.u.iter().enumerate() {
            assert_eq!(c.im, 0.0);
            let x = f.grid.x(i);
            assert!((c.re - (-x * x).exp()).abs() <= 1e-15);
        }
    }

    #[test]
    fn narrow_grid_rejected() {
        let g = GridSpec { nodes: 1024, span: 6.0, centre: 0.0 };
        assert!(matches!(
            lift_profile(&LaunchProfile::gaussian(1.0), g, 1e-3),
            Err(Error::GridTooNarrow { .. })
        ));
        let g = GridSpec { nodes: 1000, span: 60.0, centre: 0.0 };
        assert!(lift_profile(&LaunchProfile::gaussian(1.0), g, 1e-3).is_err());
    }

    #[test]
    fn zero_distance_is_identity() {
        let f = lift_profile(&LaunchProfile::gaussian(1.0), small_grid(), 1e-3).unwrap();
        assert_eq!(propagate(&f, 0.0).unwrap().u, f.u);
        assert!(propagate(&f, -1.0).is_err());
    }

    #[test]
    fn power_conserved() {
        let f = lift_profile(&LaunchProfile::gaussian(1.0), small_grid(), 1.65e-4).unwrap();
        let g = propagate(&f, 3.0e4).unwrap();
        assert!(((g.power() - f.power()) / f.power()).abs() < 1e-10);
    }

    #[test]
    fn far_field_gaussian_width() {
        // Paraxial Gaussian beam: I(x, z) ∝ exp(-2x²/w²), w² = 1 + (εz/π)².
        let eps = 1.65e-4;
        let grid = GridSpec { nodes: 1 << 14, span: 200.0, centre: 0.0 };
        let f = lift_profile(&LaunchProfile::gaussian(1.0), grid, eps).unwrap();
        let z = 4.0 * PI / eps;
        let g = propagate(&f, z).unwrap();
        let w_expected = (1.0 + (eps * z / PI).powi(2)).sqrt();
        // Second moment of intensity: <x²> = w²/4.
        let xs = g.xs();
        let i = g.intensity();
        let m0: f64 = i.iter().sum();
        let m2: f64 = xs.iter().zip(&i).map(|(x, v)| x * x * v).sum();
        let w = (4.0 * m2 / m0).sqrt();
        assert!(((w - w_expected) / w_expected).abs() < 1e-3, "{w} vs {w_expected}");
        // On-axis intensity falls as 1/w.
        let ratio = g.intensity_at(0.0) / f.intensity_at(0.0);
        assert!((ratio * w_expected - 1.0).abs() < 1e-3);
    }

    #[test]
    fn self_comparison_is_exact() {
        let f = lift_profile(&LaunchProfile::gaussian(1.0), small_grid(), 1e-3).unwrap();
        let curve: Vec<(f64, f64)> = f.xs().into_iter().zip(f.intensity()).collect();
        let c = compare(&curve, &f).unwrap();
        assert!(c.l2_relative < 1e-15);
        assert!(c.coverage > 0.999);
    }

    #[test]
    fn short_ray_curve_is_insufficient() {
        let f = lift_profile(&LaunchProfile::gaussian(1.0), small_grid(), 1e-3).unwrap();
        let curve: Vec<(f64, f64)> = (0..20).map(|i| (i as f64 * 0.1, 1.0)).collect();
        assert!(matches!(compare(&curve, &f), Err(Error::InsufficientOverlap { .. })));
    }
}
