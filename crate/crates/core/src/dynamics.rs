//! Time integration of the coupled ray system.
//!
//! Each step is a kick-drift-kick splitting with the potential `G` frozen
//! during each half-kick. In vacuum the longitudinal momentum is slaved to
//! the transverse one, `p_z = √(1 - p_x²)`, so `|p| = 1` holds by
//! construction. In a medium both momentum components integrate the full
//! force, with the `G` term applied perpendicular to the ray.
//!
//! Since `R` on a front follows from the ray positions alone (flux tubes),
//! the `G` computed on the drifted front serves both the closing half-kick
//! of one step and the opening half-kick of the next.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BeamFront, Medium, RayState, ScenarioConfig};
use crate::profiles::build_launch_front;
use crate::transport::{adjacent_distances, refresh_potential, FluxTubes, StencilOptions};

/// `dp/dt` at one ray: `½∇n² + ½(ε/2π)²∇G` with `∇G` taken along the front.
///
/// `dg_dx` is the transverse derivative of `G` along the front; the force it
/// produces is perpendicular to `(px, pz)`. Pass `coupling_weight = 0` for
/// the geometrical-optics limit.
pub fn force(medium: &Medium, dg_dx: f64, coupling_weight: f64, ray: &RayState) -> [f64; 2] {
    let ext = medium.half_grad_n2(ray.x, ray.z);
    let gx = 0.5 * coupling_weight * dg_dx;
    [ext[0] + gx, ext[1] - gx * ray.px / ray.pz]
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ReachedZEnd,
    Caustic,
    StepLimit,
    MomentumOverflow,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ReachedZEnd => "reached-z-end",
            Termination::Caustic => "caustic",
            Termination::StepLimit => "step-limit",
            Termination::MomentumOverflow => "momentum-overflow",
        }
    }
}

/// A recorded front.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub front: BeamFront,
}

/// Decimated history of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub config: ScenarioConfig,
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    /// Diagnostic for abnormal termination.
    pub message: Option<String>,
    pub steps: u64,
    /// Worst relative drift of `R²w` observed over the whole run.
    pub max_flux_drift: f64,
    /// Worst `|p_x² + p_z² - 1|` observed over the whole run (vacuum only).
    pub max_norm_error: f64,
}

impl TrajectoryRecord {
    pub fn launch(&self) -> &BeamFront {
        &self.snapshots[0].front
    }

    pub fn last(&self) -> &BeamFront {
        &self.snapshots[self.snapshots.len() - 1].front
    }

    pub fn n_rays(&self) -> usize {
        self.launch().len()
    }

    pub fn launch_xs(&self) -> Vec<f64> {
        self.launch().xs()
    }

    /// Time series of one ray.
    pub fn ray_series(&self, j: usize) -> Vec<(f64, RayState, f64)> {
        self.snapshots
            .iter()
            .map(|s| (s.front.t, s.front.rays[j], s.front.g.get(j).copied().unwrap_or(f64::NAN)))
            .collect()
    }

    /// State of the ray that would have launched at `x0`, interpolated
    /// linearly between the two bracketing rays, at every snapshot.
    pub fn interpolated_ray(&self, x0: f64) -> Option<Vec<RayState>> {
        let xs = self.launch_xs();
        if !(x0 >= xs[0] && x0 <= xs[xs.len() - 1]) {
            return None;
        }
        let i = xs.partition_point(|&x| x <= x0).clamp(1, xs.len() - 1) - 1;
        let w = (x0 - xs[i]) / (xs[i + 1] - xs[i]);
        let lerp = |a: f64, b: f64| if w == 0.0 { a } else { a + w * (b - a) };
        Some(
            self.snapshots
                .iter()
                .map(|s| {
                    let (a, b) = (s.front.rays[i], s.front.rays[i + 1]);
                    RayState {
                        x: lerp(a.x, b.x),
                        z: lerp(a.z, b.z),
                        px: lerp(a.px, b.px),
                        pz: lerp(a.pz, b.pz),
                        amp: lerp(a.amp, b.amp),
                    }
                })
                .collect(),
        )
    }
}

/// A running simulation: the current front plus the launch flux tubes.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: ScenarioConfig,
    opts: StencilOptions,
    /// Median launch ray distance.
    h0: f64,
    /// Launch abscissae.
    labels: Vec<f64>,
    /// Rays `core.0..core.1` are integrated; the rest follow the core edge.
    core: (usize, usize),
    filter: Vec<f64>,
    /// Size of the next step.
    dt: f64,
    /// Smallest core ray distance on the current front.
    d_typ: f64,
    tubes: FluxTubes,
    front: BeamFront,
    steps: u64,
    max_flux_drift: f64,
    max_norm_error: f64,
}

impl Simulation {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let config = crate::model::validate(config).map_err(Error::Invalid)?;
        let mut front = build_launch_front(&config)?;
        let opts = StencilOptions {
            width: config.stencil,
            min_separation: config.min_separation,
            pz_correction: config.pz_correction,
            edge_rays: config.edge_rays,
        };
        let geometry = adjacent_distances(&front, config.min_separation)?;
        let tubes = FluxTubes::from_front(&front, &geometry);
        refresh_potential(&mut front, &opts)?;
        let core = core_range(&front, config.tail_threshold, config.tail_fit);
        let h0 = typical_distance(&geometry, core);
        Ok(Self {
            dt: config.dt,
            filter: difference_filter(config.filter_order),
            config,
            opts,
            h0,
            labels: front.xs(),

            core,
            d_typ: h0,
            tubes,
            front,
            steps: 0,
            max_flux_drift: 0.0,
            max_norm_error: 0.0,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn front(&self) -> &BeamFront {
        &self.front
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn tubes(&self) -> &FluxTubes {
        &self.tubes
    }

    fn weight(&self) -> f64 {
        if self.config.coupling_enabled {
            self.config.coupling_weight()
        } else {
            0.0
        }
    }

    /// Continue the core edge linearly, in launch position, over the tails.
    fn slave_tails(&self, front: &mut BeamFront, positions: bool) {
        let (lo, hi) = self.core;
        let n = front.rays.len();
        let m = self.config.tail_fit;
        let vacuum = self.config.medium.is_vacuum();
        let l = &self.labels;
        if lo > 0 && lo + m < n {
            let (b, c) = (front.rays[lo], front.rays[lo + m]);
            let dl = l[lo + m] - l[lo];
            let (sx, spx, spz) = ((c.x - b.x) / dl, (c.px - b.px) / dl, (c.pz - b.pz) / dl);
            for j in 0..lo {
                let d = l[j] - l[lo];
                let r = &mut front.rays[j];
                if positions {
                    r.x = b.x + d * sx;
                }
                r.px = b.px + d * spx;
                r.pz = if vacuum { (1.0 - r.px * r.px).sqrt() } else { b.pz + d * spz };
            }
        }
        if hi < n && hi >= m + 1 {
            let (b, c) = (front.rays[hi - 1], front.rays[hi - 1 - m]);
            let dl = l[hi - 1] - l[hi - 1 - m];
            let (sx, spx, spz) = ((b.x - c.x) / dl, (b.px - c.px) / dl, (b.pz - c.pz) / dl);
            for j in hi..n {
                let d = l[j] - l[hi - 1];
                let r = &mut front.rays[j];
                if positions {
                    r.x = b.x + d * sx;
                }
                r.px = b.px + d * spx;
                r.pz = if vacuum { (1.0 - r.px * r.px).sqrt() } else { b.pz + d * spz };
            }
        }
    }

    /// Size of the next step.
    pub fn next_dt(&self) -> f64 {
        self.dt
    }

    fn half_kick(&self, front: &mut BeamFront, dt: f64) -> Result<()> {
        let h = 0.5 * dt;
        let weight = self.weight();
        let medium = self.config.medium;
        for (j, ray) in front.rays.iter_mut().enumerate() {
            let f = force(&medium, front.dg_dx[j], weight, ray);
            if medium.is_vacuum() {
                let px = ray.px + h * f[0];
                if !(px.abs() < 1.0) {
                    return Err(Error::MomentumOverflow { ray: j, t: front.t, px });
                }
                ray.px = px;
                ray.pz = (1.0 - px * px).sqrt();
            } else {
                ray.px += h * f[0];
                ray.pz += h * f[1];
                if !(ray.pz > 0.0) {
                    return Err(Error::MomentumOverflow { ray: j, t: front.t, px: ray.px });
                }
            }
        }
        Ok(())
    }

    /// Damp the grid-scale momenta over `dt`; the rate follows the smallest
    /// core ray distance of the last accepted front.
    fn damp(&self, front: &mut BeamFront, dt: f64) -> Result<()> {
        if !self.config.coupling_enabled || self.config.smoothing == 0.0 {
            return Ok(());
        }
        let rate = self.config.smoothing * self.config.epsilon / (4.0 * std::f64::consts::PI)
            / (self.d_typ * self.d_typ);
        relax_momenta(front, &self.filter, 1.0 - (-rate * dt).exp(), self.config.medium.is_vacuum());
        self.slave_tails(front, false);
        match front.rays.iter().enumerate().find(|(_, r)| !(r.pz > 0.0)) {
            Some((j, r)) => Err(Error::MomentumOverflow { ray: j, t: front.t, px: r.px }),
            None => Ok(()),
        }
    }

    /// Advance one step; on error the simulation keeps its previous front.
    pub fn step(&mut self) -> Result<()> {
        self.step_by(self.dt)
    }

    // Damping is split symmetrically around the kick-drift-kick step.
    fn step_by(&mut self, dt: f64) -> Result<()> {
        let mut next = self.front.clone();
        self.damp(&mut next, 0.5 * dt)?;
        self.half_kick(&mut next, dt)?;
        for ray in &mut next.rays {
            ray.x += dt * ray.px;
            ray.z += dt * ray.pz;
        }
        next.t += dt;
        self.slave_tails(&mut next, true);
        let geometry = adjacent_distances(&next, self.config.min_separation)?;
        for (ray, amp) in next.rays.iter_mut().zip(self.tubes.amplitudes(&geometry)) {
            ray.amp = amp;
        }
        refresh_potential(&mut next, &self.opts)?;
        self.half_kick(&mut next, dt)?;
        self.damp(&mut next, 0.5 * dt)?;

        self.max_flux_drift = self.max_flux_drift.max(self.tubes.max_relative_drift(&next, &geometry));
        if self.config.medium.is_vacuum() {
            let worst = next
                .rays
                .iter()
                .map(|r| (r.momentum_norm_sq() - 1.0).abs())
                .fold(0.0, f64::max);
            debug_assert!(worst <= 4.0 * f64::EPSILON, "|p| drifted by {worst}");
            self.max_norm_error = self.max_norm_error.max(worst);
        }
        self.front = next;
        self.steps += 1;
        self.d_typ = typical_distance(&geometry, self.core);
        if self.config.adaptive_step {
            let r = self.d_typ / self.h0;
            self.dt = (self.config.dt * r * r).min(self.config.max_dt());
        }
        Ok(())
    }

    /// Step until the front's time is exactly `t`, shortening the last step.
    pub fn advance_to_time(&mut self, t: f64) -> Result<()> {
        while self.front.t < t {
            let remaining = t - self.front.t;
            if self.dt >= remaining * (1.0 - 1e-12) {
                self.step_by(remaining)?;
                self.front.t = t;
            } else {
                self.step()?;
            }
        }
        Ok(())
    }

    /// Run to `z_end` (mean front position) or until failure.
    pub fn run(mut self) -> TrajectoryRecord {
        let every = self.config.output.record_every as u64;
        let mut snapshots = vec![Snapshot {
            step: 0,
            front: self.front.clone(),
        }];
        let mut message = None;
        let termination = loop {
            if self.front.mean_z() >= self.config.z_end {
                break Termination::ReachedZEnd;
            }
            if self.steps >= self.config.max_steps {
                break Termination::StepLimit;
            }
            match self.step() {
                Ok(()) => {
                    if self.steps % every == 0 {
                        snapshots.push(Snapshot {
                            step: self.steps,
                            front: self.front.clone(),
                        });
                    }
                }
                Err(e) => {
                    message = Some(e.to_string());
                    break match e {
                        Error::MomentumOverflow { .. } => Termination::MomentumOverflow,
                        _ => Termination::Caustic,
                    };
                }
            }
        };
        if snapshots.last().map(|s| s.step) != Some(self.steps) {
            snapshots.push(Snapshot {
                step: self.steps,
                front: self.front.clone(),
            });
        }
        TrajectoryRecord {
            config: self.config,
            snapshots,
            termination,
            message,
            steps: self.steps,
            max_flux_drift: self.max_flux_drift,
            max_norm_error: self.max_norm_error,
        }
    }
}

/// Rays whose launch intensity reaches `threshold` times the peak. Falls back
/// to the whole front when too few rays would remain to fit the tails.
fn core_range(front: &BeamFront, threshold: f64, fit: usize) -> (usize, usize) {
    let n = front.rays.len();
    let peak = front.rays.iter().map(|r| r.amp * r.amp).fold(0.0, f64::max);
    let live = |r: &RayState| r.amp * r.amp >= threshold * peak;
    let lo = front.rays.iter().position(live).unwrap_or(0);
    let hi = n - front.rays.iter().rev().position(live).unwrap_or(0);
    if hi <= lo + fit + 1 {
        (0, n)
    } else {
        (lo, hi)
    }
}

fn typical_distance(geometry: &crate::transport::FrontGeometry, core: (usize, usize)) -> f64 {
    geometry.d[core.0..(core.1 - 1).max(core.0 + 1)]
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Coefficients of the centred `order`-th difference, signed so that a
/// Fourier mode of wavenumber `k` (per ray) maps to `sin(k/2)^order` times
/// itself.
pub fn difference_filter(order: usize) -> Vec<f64> {
    let mut c = vec![1.0f64];
    for _ in 0..order {
        let mut next = vec![0.0; c.len() + 1];
        for (i, &v) in c.iter().enumerate() {
            next[i] += v;
            next[i + 1] -= v;
        }
        c = next;
    }
    let sign = if (order / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let norm = sign / 2f64.powi(order as i32);
    c.iter().map(|v| v * norm).collect()
}

/// Damp the grid-scale part of the ray momenta by a fraction `f`.
///
/// The filter acts in ray index, so polynomials in the index of degree below
/// `filter.len() - 1` pass unchanged. The outer `order / 2` rays on each side
/// are left alone.
pub fn relax_momenta(front: &mut BeamFront, filter: &[f64], f: f64, vacuum: bool) {
    let n = front.rays.len();
    let h = (filter.len() - 1) / 2;
    if n < filter.len() {
        return;
    }
    let px: Vec<f64> = front.rays.iter().map(|r| r.px).collect();
    let pz: Vec<f64> = front.rays.iter().map(|r| r.pz).collect();
    let apply = |v: &[f64], j: usize| -> f64 {
        filter.iter().zip(&v[j - h..=j + h]).map(|(c, x)| c * x).sum()
    };
    for j in h..n - h {
        let dpx = apply(&px, j);
        let ray = &mut front.rays[j];
        ray.px -= f * dpx;
        if vacuum {
            ray.pz = (1.0 - ray.px * ray.px).sqrt();
        } else {
            ray.pz -= f * apply(&pz, j);
        }
    }
}

/// Validate, launch and integrate a scenario.
pub fn run(config: ScenarioConfig) -> Result<TrajectoryRecord> {
    Ok(Simulation::new(config)?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnalyticField, FieldShape, LaunchProfile};

    fn gaussian(z_end: f64) -> ScenarioConfig {
        let mut c = ScenarioConfig::new("g", 1.65e-4, LaunchProfile::gaussian(1.0), (-5.0, 5.0), z_end);
        c.n_rays = 401;
        c.output.record_every = 10;
        c
    }

    #[test]
    fn vacuum_force() {
        let ray = RayState { x: 0.3, z: 1.0, px: 0.0, pz: 1.0, amp: 1.0 };
        assert_eq!(force(&Medium::Vacuum, 0.0, 1e-9, &ray), [0.0, 0.0]);
        let eps: f64 = 1.65e-4;
        let w = (eps / (2.0 * std::f64::consts::PI)).powi(2);
        let f = force(&Medium::Vacuum, 2.5, w, &ray);
        let expected = eps * eps / (8.0 * std::f64::consts::PI.powi(2)) * 2.5;
        assert!((f[0] - expected).abs() < 1e-15 * expected.abs().max(1e-300) + 1e-30);
    }

    #[test]
    fn harmonic_potential_without_coupling() {
        let m = Medium::ExternalPotential {
            v_over_e: AnalyticField {
                offset: 0.0,
                scale: 1.0,
                shape: FieldShape::Quadratic { cx: 1.0, cz: 0.0 },
            },
        };
        for x in [-1.0, 0.2, 3.0] {
            let ray = RayState { x, z: 0.0, px: 0.0, pz: 1.0, amp: 1.0 };
            let f = force(&m, 123.0, 0.0, &ray);
            assert_eq!(f, [-x, 0.0]);
        }
    }

    #[test]
    fn coupling_force_is_perpendicular() {
        let ray = RayState { x: 0.0, z: 0.0, px: 0.3, pz: 0.8, amp: 1.0 };
        let f = force(&Medium::Vacuum, 4.0, 0.1, &ray);
        assert!((f[0] * ray.px + f[1] * ray.pz).abs() < 1e-15);
    }

    #[test]
    fn straight_rays_without_coupling() {
        let mut c = gaussian(1e4);
        c.coupling_enabled = false;
        let rec = run(c).unwrap();
        assert_eq!(rec.termination, Termination::ReachedZEnd);
        let launch = rec.launch().clone();
        for s in &rec.snapshots {
            for (r, r0) in s.front.rays.iter().zip(&launch.rays) {
                assert_eq!(r.x, r0.x);
                assert_eq!(r.z, s.front.t);
                assert!((r.amp - r0.amp).abs() <= 4.0 * f64::EPSILON * r0.amp);
            }
        }
    }

    #[test]
    fn too_few_rays_rejected() {
        let mut c = gaussian(1e3);
        c.n_rays = 1;
        assert!(matches!(run(c), Err(Error::Invalid(_))));
    }

    #[test]
    fn gaussian_spreads_and_stays_symmetric() {
        let eps = 1.65e-4;
        let mut c = gaussian(2.0 * std::f64::consts::PI / eps);
        c.n_rays = 1001;
        c.dt = c.default_dt();
        let rec = run(c).unwrap();
        assert_eq!(rec.termination, Termination::ReachedZEnd);
        let last = rec.last();
        let n = last.len();
        for j in 0..n {
            assert!((last.rays[j].x + last.rays[n - 1 - j].x).abs() < 1e-8, "ray {j}");
        }
        // On-axis amplitude decays as the beam spreads.
        let centre: Vec<f64> = rec.snapshots.iter().map(|s| s.front.rays[n / 2].amp).collect();
        assert!(centre.windows(2).all(|w| w[1] <= w[0]));
        assert!(rec.max_flux_drift < 1e-12);
        assert!(rec.max_norm_error <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn deterministic() {
        let a = run(gaussian(2e4)).unwrap();
        let b = run(gaussian(2e4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn interpolated_ray_hits_grid_ray_exactly() {
        let rec = run(gaussian(5e3)).unwrap();
        let xs = rec.launch_xs();
        let j = 240;
        let ray = rec.interpolated_ray(xs[j]).unwrap();
        for (s, r) in rec.snapshots.iter().zip(ray) {
            assert_eq!(s.front.rays[j], r);
        }
        assert!(rec.interpolated_ray(9.0).is_none());
    }

    #[test]
    fn medium_refraction_bends_rays() {
        // Linear index gradient: rays bend toward higher n².
        let mut c = gaussian(200.0);
        c.coupling_enabled = false;
        c.medium = Medium::RefractiveIndex {
            n2: AnalyticField {
                offset: 1.0,
                scale: 1e-4,
                shape: FieldShape::Linear { gx: 1.0, gz: 0.0 },
            },
        };
        let rec = run(c).unwrap();
        let last = rec.last();
        // dp_x/dt = ½·1e-4 exactly, so x(t) = x0 + ¼·1e-4·t².
        let t = last.t;
        for (r, r0) in last.rays.iter().zip(&rec.launch().rays) {
            let expected = r0.x + 0.25e-4 * t * t;
            assert!((r.x - expected).abs() < 1e-9, "{} vs {}", r.x, expected);
        }
    }

    #[test]
    fn dual_media_give_identical_runs() {
        let field = AnalyticField {
            offset: 0.0,
            scale: 2e-5,
            shape: FieldShape::Gaussian { x0: 0.0, z0: 50.0, width: 3.0 },
        };
        let mut a = gaussian(100.0);
        a.n_rays = 101;
        a.medium = Medium::ExternalPotential { v_over_e: field };
        let mut b = a.clone();
        b.medium = a.medium.dual();
        let (ra, rb) = (run(a).unwrap(), run(b).unwrap());
        for (x, y) in ra.last().rays.iter().zip(&rb.last().rays) {
            assert!((x.x - y.x).abs() <= 1e-12 * x.x.abs().max(1.0));
            assert!((x.px - y.px).abs() <= 1e-12);
        }
    }

    fn momentum_front(px: impl Fn(f64) -> f64, n: usize) -> BeamFront {
        let rays = (0..n)
            .map(|j| {
                let p = px(j as f64);
                RayState { x: j as f64, z: 0.0, px: p, pz: (1.0 - p * p).sqrt(), amp: 1.0 }
            })
            .collect();
        BeamFront::new(rays, 0.0)
    }

    #[test]
    fn filter_passes_low_order_polynomials() {
        let filter = difference_filter(12);
        let poly = |j: f64| {
            let t = j / 60.0;
            1e-3 * (0.2 + 0.5 * t - 0.3 * t * t + 0.7 * t.powi(11))
        };
        let mut front = momentum_front(poly, 60);
        relax_momenta(&mut front, &filter, 1.0, true);
        for (j, r) in front.rays.iter().enumerate() {
            assert!((r.px - poly(j as f64)).abs() < 1e-15, "ray {j}");
            assert!((r.momentum_norm_sq() - 1.0).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn filter_response_is_sine_power() {
        let filter = difference_filter(12);
        for k in [0.4, 1.3, std::f64::consts::PI] {
            let mode = |j: f64| 1e-3 * (k * j).cos();
            let mut front = momentum_front(mode, 80);
            relax_momenta(&mut front, &filter, 0.5, true);
            let gain = 1.0 - 0.5 * (0.5 * k).sin().powi(12);
            for j in 6..74 {
                let expected = gain * mode(j as f64);
                assert!((front.rays[j].px - expected).abs() < 1e-15, "k={k} ray {j}");
            }
        }
    }

    #[test]
    fn faint_tails_follow_the_core_edge_linearly() {
        let mut c = gaussian(3e3);
        c.tail_threshold = 1e-4;
        let sim = Simulation::new(c).unwrap();
        let (lo, hi) = sim.core;
        let n = sim.front().len();
        assert!(lo > 0 && hi < n && lo == n - hi);
        let mut front = sim.front().clone();
        for (ray, l) in front.rays.iter_mut().zip(&sim.labels) {
            ray.x = 2.0 * l + 0.5;
            ray.px = 1e-3 * l;
            ray.pz = (1.0 - ray.px * ray.px).sqrt();
        }
        let expected = front.clone();
        for j in (0..lo).chain(hi..n) {
            front.rays[j].x = 0.0;
            front.rays[j].px = 0.0;
        }
        sim.slave_tails(&mut front, true);
        for (a, b) in front.rays.iter().zip(&expected.rays) {
            assert!((a.x - b.x).abs() < 1e-12 && (a.px - b.px).abs() < 1e-15);
        }
    }

    #[test]
    fn advance_lands_on_the_requested_time() {
        let mut sim = Simulation::new(gaussian(1e4)).unwrap();
        let dt = sim.next_dt();
        sim.advance_to_time(10.3 * dt).unwrap();
        assert_eq!(sim.front().t, 10.3 * dt);
        assert_eq!(sim.steps(), 11);
    }

    #[test]
    fn step_grows_as_the_front_spreads() {
        let mut sim = Simulation::new(gaussian(4e4)).unwrap();
        let dt0 = sim.next_dt();
        sim.advance_to_time(2e4).unwrap();
        assert!(sim.next_dt() > dt0);
        assert!(sim.next_dt() <= sim.config().max_dt());
    }
}
