//! Run a vacuum scenario next to the oracle and grade the result.

use serde::Serialize;

use crate::diagnostics::{
    fringe_count, intensity_profile, uncertainty_product, waist_trajectory, ExtremumOffset, WAIST_LAUNCH,
};
use crate::dynamics::{run, Termination, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::model::LaunchProfile;
use crate::oracle::{compare, lift_profile, propagate, significant_extrema, GridSpec};

pub const WAIST_TOLERANCE: f64 = 5e-3;
pub const UNCERTAINTY_RANGE: (f64, f64) = (7.6, 8.4);
pub const L2_TOLERANCE: f64 = 0.05;
pub const ON_AXIS_TOLERANCE: f64 = 0.02;
pub const EXTREMUM_TOLERANCE: f64 = 0.02;
/// Extrema compared on each side of the centre.
pub const EXTREMA_PER_SIDE: usize = 3;
pub const FLUX_TOLERANCE: f64 = 1e-12;
pub const NORM_TOLERANCE: f64 = 4.0 * f64::EPSILON;
pub const EIKONAL_TOLERANCE: f64 = 1e-12;
/// Extrema this close to the centre belong to both sides.
const CENTRE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Fails as it must with coupling disabled.
    ExpectedFail,
    /// Does not apply to this scenario.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub measured: Option<f64>,
    pub tolerance: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub coupling_enabled: bool,
    pub termination: String,
    pub checks: Vec<Check>,
    /// No check failed unexpectedly.
    pub passed: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Unit-waist single Gaussian, the only profile with a closed-form waist.
fn is_unit_gaussian(p: &LaunchProfile) -> bool {
    matches!(*p, LaunchProfile::CenteredComb { a, b, q, m, .. } if a > 0.0 && (b == 0.0 || m == 0) && q == 1.0)
}

struct Grader {
    coupling: bool,
    checks: Vec<Check>,
}

impl Grader {
    /// Record a check; a failure that needs coupling is expected without it.
    fn add(&mut self, name: &'static str, measured: Option<f64>, tolerance: String, ok: bool, needs_coupling: bool, detail: String) {
        let status = match (ok, needs_coupling && !self.coupling) {
            (true, _) => Status::Pass,
            (false, true) => Status::ExpectedFail,
            (false, false) => Status::Fail,
        };
        self.checks.push(Check { name, measured, tolerance, status, detail });
    }

    fn skip(&mut self, name: &'static str, detail: &str) {
        self.checks.push(Check {
            name,
            measured: None,
            tolerance: String::new(),
            status: Status::Skipped,
            detail: detail.into(),
        });
    }
}

/// Worst and RMS relative waist error of the `±1` rays over every snapshot.
pub fn waist_errors(record: &TrajectoryRecord) -> Option<(f64, f64)> {
    let eps = record.config.epsilon;
    let (mut worst, mut sum, mut count) = (0.0f64, 0.0, 0usize);
    for x0 in [-WAIST_LAUNCH, WAIST_LAUNCH] {
        for r in record.interpolated_ray(x0)? {
            let w = waist_trajectory(eps, r.z);
            let e = (r.x.abs() - w).abs() / w;
            worst = worst.max(e);
            sum += e * e;
            count += 1;
        }
    }
    Some((worst, (sum / count as f64).sqrt()))
}

fn on_axis(curve: &[(f64, f64)], x: f64) -> Option<f64> {
    MonotoneCubic::new(curve.iter().map(|p| p.0).collect(), curve.iter().map(|p| p.1).collect())?.eval(x)
}

/// The first `k` matched extrema on each side of `centre`.
pub fn nearest_extrema(matched: &[ExtremumOffset], centre: f64, k: usize) -> Vec<ExtremumOffset> {
    let mut right: Vec<ExtremumOffset> =
        matched.iter().filter(|e| e.oracle_x >= centre - CENTRE_TOLERANCE).copied().collect();
    let mut left: Vec<ExtremumOffset> =
        matched.iter().filter(|e| e.oracle_x < centre - CENTRE_TOLERANCE).copied().collect();
    right.truncate(k);
    left.reverse();
    // The centre extremum already counts for the left side.
    let take_left = if right.first().is_some_and(|e| (e.oracle_x - centre).abs() <= CENTRE_TOLERANCE) { k - 1 } else { k };
    left.truncate(take_left);
    left.reverse();
    left.extend(right);
    left
}

/// Grade a finished vacuum record.
pub fn verify_record(record: &TrajectoryRecord) -> Result<VerifyReport> {
    let c = &record.config;
    if !c.medium.is_vacuum() {
        return Err(Error::Argument("verify needs a vacuum scenario".into()));
    }
    let mut g = Grader { coupling: c.coupling_enabled, checks: Vec::new() };
    let reached = record.termination == Termination::ReachedZEnd;
    g.add(
        "termination",
        None,
        "reached-z-end".into(),
        reached,
        false,
        record.message.clone().unwrap_or_else(|| record.termination.as_str().into()),
    );
    g.add(
        "flux-closure",
        Some(record.max_flux_drift),
        format!("<= {FLUX_TOLERANCE:e}"),
        record.max_flux_drift <= FLUX_TOLERANCE,
        false,
        "worst relative drift of R²w over the run".into(),
    );
    g.add(
        "momentum-norm",
        Some(record.max_norm_error),
        format!("<= {NORM_TOLERANCE:e}"),
        record.max_norm_error <= NORM_TOLERANCE,
        false,
        "worst |p_x² + p_z² - 1| over the run".into(),
    );
    if c.coupling_enabled {
        g.skip("eikonal-straightness", "coupling enabled");
    } else {
        let launch = record.launch();
        let drift = record
            .snapshots
            .iter()
            .flat_map(|s| s.front.rays.iter().zip(&launch.rays).map(|(r, r0)| (r.x - r0.x).abs()))
            .fold(0.0, f64::max);
        g.add(
            "eikonal-straightness",
            Some(drift),
            format!("<= {EIKONAL_TOLERANCE:e}"),
            drift <= EIKONAL_TOLERANCE,
            false,
            "max |x_j(t) - x_j(0)|".into(),
        );
    }

    if is_unit_gaussian(&c.profile) {
        match waist_errors(record) {
            Some((worst, rms)) => g.add(
                "waist-trajectory",
                Some(worst),
                format!("<= {WAIST_TOLERANCE:e}"),
                worst <= WAIST_TOLERANCE,
                true,
                format!("rays from x = ±1; RMS relative error {rms:e}"),
            ),
            None => g.skip("waist-trajectory", "launch window does not contain x = ±1"),
        }
        match uncertainty_product(record) {
            Ok(u) => g.add(
                "uncertainty-product",
                Some(u.product),
                format!("in [{}, {}]", UNCERTAINTY_RANGE.0, UNCERTAINTY_RANGE.1),
                (UNCERTAINTY_RANGE.0..=UNCERTAINTY_RANGE.1).contains(&u.product),
                true,
                format!("whole-beam product {}; slope ratio {}", u.beam_product, u.slope_ratio),
            ),
            Err(e @ Error::NotFarField { .. }) => g.skip("uncertainty-product", &e.to_string()),
            Err(e) => g.add("uncertainty-product", None, "far field".into(), false, true, e.to_string()),
        }
    } else {
        g.skip("waist-trajectory", "no closed-form waist for this profile");
        g.skip("uncertainty-product", "no closed-form waist for this profile");
    }

    let last = record.last();
    let z = last.mean_z();
    let grid = GridSpec::for_scenario(c, z);
    let field0 = lift_profile(&c.profile, grid, c.epsilon)?;
    let field = propagate(&field0, z)?;
    let curve: Vec<(f64, f64)> = last.rays.iter().map(|r| (r.x, r.amp * r.amp)).collect();
    let centre = grid.centre;
    match compare(&intensity_profile(last), &field) {
        Ok(cmp) => {
            g.add(
                "oracle-l2",
                Some(cmp.l2_relative),
                format!("< {L2_TOLERANCE}"),
                cmp.l2_relative < L2_TOLERANCE,
                true,
                format!("oracle at z = {z}; coverage {}", cmp.coverage),
            );
            let launch: Vec<(f64, f64)> = record.launch().rays.iter().map(|r| (r.x, r.amp * r.amp)).collect();
            let rays = on_axis(&curve, centre).zip(on_axis(&launch, centre)).map(|(a, b)| a / b);
            let oracle = field.intensity_at(centre) / field0.intensity_at(centre);
            match rays {
                Some(ratio) => {
                    let err = (ratio / oracle - 1.0).abs();
                    g.add(
                        "on-axis-decay",
                        Some(err),
                        format!("<= {ON_AXIS_TOLERANCE}"),
                        err <= ON_AXIS_TOLERANCE,
                        true,
                        format!("I(z)/I(0) on axis: rays {ratio}, oracle {oracle}"),
                    );
                }
                None => g.add("on-axis-decay", None, String::new(), false, true, "axis outside the front".into()),
            }
            let oracle_curve: Vec<(f64, f64)> = field.xs().into_iter().zip(field.intensity()).collect();
            let (ray_ext, oracle_ext) = (significant_extrema(&curve), significant_extrema(&oracle_curve));
            let (nr, no) = (ray_ext.as_deref().map(fringe_count), oracle_ext.as_deref().map(fringe_count));
            g.add(
                "fringe-count",
                nr.map(|n| n as f64),
                format!("== {}", no.map(|n| n.to_string()).unwrap_or_else(|| "none".into())),
                nr == no,
                true,
                "maxima above 1e-3 of the peak".into(),
            );
            let wanted = oracle_ext.as_deref().map_or(0, |o| {
                let right = o.iter().filter(|e| e.x >= centre - CENTRE_TOLERANCE).count().min(EXTREMA_PER_SIDE);
                let at_centre = o.iter().any(|e| (e.x - centre).abs() <= CENTRE_TOLERANCE);
                let left = o
                    .iter()
                    .filter(|e| e.x < centre - CENTRE_TOLERANCE)
                    .count()
                    .min(EXTREMA_PER_SIDE - at_centre as usize);
                right + left
            });
            let near = nearest_extrema(&cmp.extrema, centre, EXTREMA_PER_SIDE);
            let worst = near.iter().map(|e| e.relative).fold(0.0, f64::max);
            let listing: Vec<String> = near.iter().map(|e| format!("{:.4}→{:.4}", e.oracle_x, e.ray_x)).collect();
            g.add(
                "fringe-extrema",
                Some(worst),
                format!("<= {EXTREMUM_TOLERANCE} of the local period"),
                near.len() == wanted && worst <= EXTREMUM_TOLERANCE,
                true,
                format!("{} of {wanted} matched: {}", near.len(), listing.join(", ")),
            );
        }
        Err(e) => {
            for name in ["oracle-l2", "on-axis-decay", "fringe-count", "fringe-extrema"] {
                g.add(name, None, String::new(), false, true, e.to_string());
            }
        }
    }
    let passed = g.checks.iter().all(|c| c.status != Status::Fail);
    Ok(VerifyReport {
        scenario: c.name.clone(),
        coupling_enabled: c.coupling_enabled,
        termination: record.termination.as_str().into(),
        checks: g.checks,
        passed,
    })
}

/// Run a scenario and grade it.
pub fn verify(config: crate::model::ScenarioConfig) -> Result<(VerifyReport, TrajectoryRecord)> {
    let record = run(config)?;
    Ok((verify_record(&record)?, record))
}
