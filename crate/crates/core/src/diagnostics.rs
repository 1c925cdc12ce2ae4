//! Closed-form references and derived quantities of a run.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dynamics::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::model::BeamFront;

/// Half-width of a launched Gaussian of unit waist after `z`: `√(1 + (εz/π)²)`.
pub fn waist_trajectory(epsilon: f64, z: f64) -> f64 {
    let s = epsilon * z / PI;
    (1.0 + s * s).sqrt()
}

/// `d/dz` of [`waist_trajectory`]; tends to `ε/π`.
pub fn waist_slope(epsilon: f64, z: f64) -> f64 {
    let s = epsilon * z / PI;
    epsilon / PI * s / (1.0 + s * s).sqrt()
}

/// Relative distance from the asymptotic slope accepted as far field.
pub const FAR_FIELD_TOLERANCE: f64 = 0.01;

/// Launch position of the waist rays.
pub const WAIST_LAUNCH: f64 = 1.0;

/// Breakdown of the uncertainty product of a record's last front.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    /// `Δx·Δp_x` in units of `ħ`, with `Δp_x` taken from the waist rays.
    pub product: f64,
    /// `max|p_x|` over the two waist rays.
    pub waist_px: f64,
    /// `max|p_x|` over every ray of the front.
    pub beam_px: f64,
    /// The product with `beam_px` in place of `waist_px`.
    pub beam_product: f64,
    /// Waist-ray slope `p_x/p_z` over `ε/π`.
    pub slope_ratio: f64,
}

/// Waist-ray state at the last front: mean `|x|` and `max|p_x|` of the pair
/// launched at `±1`, and the mean slope.
fn waist_pair(record: &TrajectoryRecord) -> Result<(f64, f64, f64)> {
    let mut out = (0.0, 0.0, 0.0);
    for x0 in [-WAIST_LAUNCH, WAIST_LAUNCH] {
        let ray = record
            .interpolated_ray(x0)
            .and_then(|s| s.last().copied())
            .ok_or_else(|| Error::Argument(format!("launch window does not contain x = {x0}")))?;
        out.0 += 0.5 * ray.x.abs();
        out.1 = f64::max(out.1, ray.px.abs());
        out.2 += 0.5 * (ray.px / ray.pz).abs();
    }
    Ok(out)
}

/// `Δx·Δp_x / ħ` with `Δx = 2` (the launch waist diameter) and
/// `Δp_x = 2·max|p_x|`; `ħ` is `ε/2π` in the dimensionless momentum unit.
///
/// Fails with [`Error::NotFarField`] unless the waist rays' slope is within
/// [`FAR_FIELD_TOLERANCE`] of `ε/π`. Without coupling the rays never bend and
/// the product is zero.
pub fn uncertainty_product(record: &TrajectoryRecord) -> Result<Uncertainty> {
    let eps = record.config.epsilon;
    let hbar = eps / (2.0 * PI);
    let (_, waist_px, slope) = waist_pair(record)?;
    let beam_px = record.last().rays.iter().map(|r| r.px.abs()).fold(0.0, f64::max);
    let slope_ratio = slope / (eps / PI);
    if record.config.coupling_enabled && (slope_ratio - 1.0).abs() > FAR_FIELD_TOLERANCE {
        return Err(Error::NotFarField { ratio: slope_ratio });
    }
    Ok(Uncertainty {
        product: 2.0 * 2.0 * waist_px / hbar,
        waist_px,
        beam_px,
        beam_product: 2.0 * 2.0 * beam_px / hbar,
        slope_ratio,
    })
}

/// Mean distance of the waist rays from the axis at the last front.
pub fn far_field_width(record: &TrajectoryRecord) -> Result<f64> {
    Ok(waist_pair(record)?.0)
}

/// `(x_j, R_j²)` per ray, scaled to unit peak.
pub fn intensity_profile(front: &BeamFront) -> Vec<(f64, f64)> {
    let peak = front.rays.iter().map(|r| r.amp * r.amp).fold(0.0, f64::max);
    let scale = if peak > 0.0 { 1.0 / peak } else { 1.0 };
    front.rays.iter().map(|r| (r.x, r.amp * r.amp * scale)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub x: f64,
    /// Curve value at the discrete extremum.
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Interior local maxima and minima of a sampled curve, in increasing `x`,
/// each located by the parabola through the discrete extremum and its two
/// neighbours. Runs of equal values count once, at their middle.
pub fn fringe_extrema(curve: &[(f64, f64)]) -> Result<Vec<Extremum>> {
    if curve.len() < 5 {
        return Err(Error::Argument("fringe_extrema needs at least 5 points".into()));
    }
    let mut out = Vec::new();
    let n = curve.len();
    let mut i = 1;
    while i < n - 1 {
        // Extend over a plateau.
        let mut k = i;
        while k + 1 < n - 1 && curve[k + 1].1 == curve[i].1 {
            k += 1;
        }
        let (before, after) = (curve[i - 1].1, curve[k + 1].1);
        let here = curve[i].1;
        let kind = if here > before && here > after {
            Some(ExtremumKind::Maximum)
        } else if here < before && here < after {
            Some(ExtremumKind::Minimum)
        } else {
            None
        };
        if let Some(kind) = kind {
            let x = if k == i {
                parabola_vertex(curve[i - 1], curve[i], curve[i + 1])
            } else {
                0.5 * (curve[i].0 + curve[k].0)
            };
            out.push(Extremum { x, value: here, kind });
        }
        i = k + 1;
    }
    if out.is_empty() {
        return Err(Error::FlatCurve);
    }
    Ok(out)
}

fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let (d1, d2) = (b.0 - a.0, c.0 - b.0);
    let s1 = (b.1 - a.1) / d1;
    let s2 = (c.1 - b.1) / d2;
    let curvature = (s2 - s1) / (c.0 - a.0);
    if curvature == 0.0 {
        return b.0;
    }
    // Vertex of the interpolating parabola; it lies between a and c.
    let x = 0.5 * (a.0 + b.0) - 0.5 * s1 / curvature;
    x.clamp(a.0, c.0)
}

/// Extrema whose value reaches `threshold` times the curve peak.
pub fn significant(extrema: &[Extremum], curve_peak: f64, threshold: f64) -> Vec<Extremum> {
    extrema
        .iter()
        .filter(|e| e.value >= threshold * curve_peak)
        .copied()
        .collect()
}

/// Bright fringes: maxima among `extrema`.
pub fn fringe_count(extrema: &[Extremum]) -> usize {
    extrema.iter().filter(|e| e.kind == ExtremumKind::Maximum).count()
}

/// Local fringe period at extremum `i`: the distance between its two
/// neighbours, or twice the one-sided gap at the ends.
pub fn local_spacing(extrema: &[Extremum], i: usize) -> f64 {
    let n = extrema.len();
    match (i.checked_sub(1), (i + 1 < n).then_some(i + 1)) {
        (Some(a), Some(b)) => extrema[b].x - extrema[a].x,
        (Some(a), None) => 2.0 * (extrema[i].x - extrema[a].x),
        (None, Some(b)) => 2.0 * (extrema[b].x - extrema[i].x),
        (None, None) => f64::INFINITY,
    }
}

/// One ray extremum against its oracle counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumOffset {
    pub kind: ExtremumKind,
    pub oracle_x: f64,
    pub ray_x: f64,
    /// `|ray_x - oracle_x|` over the oracle's local fringe period.
    pub relative: f64,
}

/// Pair the extrema of two curves outward from `centre`, side by side.
///
/// An oracle extremum within `tol` of the centre pairs with the ray extremum
/// nearest the centre. Outward from there the `k`-th extremum of one list
/// meets the `k`-th of the other on each side. Pairing on a side stops at
/// the first kind mismatch or when either list runs out.
pub fn match_extrema(rays: &[Extremum], oracle: &[Extremum], centre: f64, tol: f64) -> Vec<ExtremumOffset> {
    let mut out = Vec::new();
    let pair = |r: usize, o: usize| ExtremumOffset {
        kind: oracle[o].kind,
        oracle_x: oracle[o].x,
        ray_x: rays[r].x,
        relative: (rays[r].x - oracle[o].x).abs() / local_spacing(oracle, o),
    };
    let oc = oracle.iter().position(|e| (e.x - centre).abs() <= tol);
    let rc = rays
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.x - centre).abs().total_cmp(&(b.1.x - centre).abs()))
        .map(|(i, _)| i);
    // Ray and oracle index ranges left and right of the centre.
    let (r_left, r_right, o_left, o_right): (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>) = match (oc, rc) {
        (Some(o), Some(r)) if rays[r].kind == oracle[o].kind => {
            out.push(pair(r, o));
            ((0..r).rev().collect(), (r + 1..rays.len()).collect(), (0..o).rev().collect(), (o + 1..oracle.len()).collect())
        }
        (Some(_), _) => return out,
        (None, _) => {
            let split = |list: &[Extremum]| list.partition_point(|e| e.x < centre);
            let (rs, os) = (split(rays), split(oracle));
            ((0..rs).rev().collect(), (rs..rays.len()).collect(), (0..os).rev().collect(), (os..oracle.len()).collect())
        }
    };
    for (ri, oi) in [(r_left, o_left), (r_right, o_right)] {
        for (&r, &o) in ri.iter().zip(&oi) {
            if rays[r].kind != oracle[o].kind {
                break;
            }
            out.push(pair(r, o));
        }
    }
    out.sort_by(|a, b| a.oracle_x.total_cmp(&b.oracle_x));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn waist_values() {
        let eps = 1.65e-4;
        assert_eq!(waist_trajectory(eps, 0.0), 1.0);
        assert!((waist_trajectory(eps, PI / eps) - 2f64.sqrt()).abs() < 1e-15);
        let z = 1e4 * PI / eps;
        assert!((waist_slope(eps, z) / (eps / PI) - 1.0).abs() < 1e-8);
        // Slope against a centred difference of the trajectory.
        let (z, h) = (2.0 * PI / eps, 10.0);
        let fd = (waist_trajectory(eps, z + h) - waist_trajectory(eps, z - h)) / (2.0 * h);
        assert!((fd - waist_slope(eps, z)).abs() < 1e-8 * fd);
    }

    #[test]
    fn gaussian_has_one_maximum() {
        let curve: Vec<(f64, f64)> = (-40..=40).map(|i| {
            let x = i as f64 * 0.1;
            (x, (-2.0 * x * x).exp())
        }).collect();
        let e = fringe_extrema(&curve).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].kind, ExtremumKind::Maximum);
        assert!(e[0].x.abs() < 1e-12);
    }

    #[test]
    fn cos_squared_extrema() {
        // cos²(x) sampled on an offset grid: maxima at kπ, minima at π/2 + kπ.
        let curve: Vec<(f64, f64)> = (0..2000).map(|i| {
            let x = -7.0 + i as f64 * 0.007 + 0.0013;
            (x, x.cos().powi(2))
        }).collect();
        let e = fringe_extrema(&curve).unwrap();
        assert_eq!(e.len(), 9);
        for ex in &e {
            let period_pos = ex.x / (PI / 2.0);
            let nearest = period_pos.round();
            assert!((ex.x - nearest * PI / 2.0).abs() < 1e-3, "{ex:?}");
            let expect_max = (nearest as i64) % 2 == 0;
            assert_eq!(ex.kind == ExtremumKind::Maximum, expect_max);
        }
    }

    #[test]
    fn flat_and_short_curves() {
        let flat: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(fringe_extrema(&flat), Err(Error::FlatCurve)));
        let ramp: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, i as f64)).collect();
        assert!(matches!(fringe_extrema(&ramp), Err(Error::FlatCurve)));
        assert!(matches!(fringe_extrema(&flat[..4]), Err(Error::Argument(_))));
    }

    #[test]
    fn plateau_counts_once() {
        let c = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 2.0), (4.0, 1.0), (5.0, 0.0)];
        let e = fringe_extrema(&c).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].x, 2.5);
    }

    #[test]
    fn spacing_and_matching() {
        let mk = |xs: &[f64]| -> Vec<Extremum> {
            xs.iter().enumerate().map(|(i, &x)| Extremum {
                x,
                value: 1.0,
                kind: if (i + xs.len() / 2) % 2 == 0 { ExtremumKind::Maximum } else { ExtremumKind::Minimum },
            }).collect()
        };
        let oracle = mk(&[-3.0, -2.0, 0.0, 2.0, 3.0]);
        assert_eq!(local_spacing(&oracle, 2), 4.0);
        assert_eq!(local_spacing(&oracle, 4), 2.0);
        let rays = mk(&[-3.1, -2.0, 0.0, 2.1, 3.0]);
        let m = match_extrema(&rays, &oracle, 0.0, 1e-9);
        assert_eq!(m.len(), 5);
        assert!((m[0].relative - 0.05).abs() < 1e-12);
        assert!((m[3].relative - 0.1 / 3.0).abs() < 1e-12);
        assert_eq!(m[2].relative, 0.0);
    }

    #[test]
    fn profile_scaled_to_unit_peak() {
        use crate::model::RayState;
        let rays = (0..5).map(|j| RayState { x: j as f64, z: 0.0, px: 0.0, pz: 1.0, amp: j as f64 }).collect();
        let p = intensity_profile(&BeamFront::new(rays, 0.0));
        assert_eq!(p[4], (4.0, 1.0));
        assert_eq!(p[2], (2.0, 0.25));
    }
}
