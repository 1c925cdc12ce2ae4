//! Closure of the ray system: amplitude transport by flux conservation and
//! the wave potential function `G = ∇²R/R` estimated from the front.
//!
//! Amplitude transport keeps `R_j² w_j` fixed for every ray, where `w_j` is
//! the width of the flux tube carried by ray `j`: the mean of the two
//! adjacent ray distances (interior rays) or the single adjacent distance
//! (the two outer rays).
//!
//! Transverse derivatives come from the Lagrange polynomial through a
//! `stencil`-point window of rays centred on each ray (shifted inward at the
//! edges), differentiated analytically at the ray abscissa.

use crate::error::{Error, Result};
use crate::interp::{lagrange_weights_into, stencil_start};
use crate::model::BeamFront;

/// Adjacent-ray distances and the cumulative arc abscissa of a front.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontGeometry {
    /// `d[j - 1]` is the distance between rays `j - 1` and `j`.
    pub d: Vec<f64>,
    /// `s[0] = 0`, `s[j] = s[j - 1] + d[j - 1]`.
    pub s: Vec<f64>,
}

impl FrontGeometry {
    /// Flux-tube width of every ray.
    pub fn tube_widths(&self) -> Vec<f64> {
        let m = self.d.len();
        let mut w = Vec::with_capacity(m + 1);
        w.push(self.d[0]);
        for j in 1..m {
            w.push(0.5 * (self.d[j - 1] + self.d[j]));
        }
        w.push(self.d[m - 1]);
        w
    }

    pub fn total_length(&self) -> f64 {
        self.s[self.s.len() - 1]
    }
}

/// Distances between neighbouring rays; fails on collapsing or reordered rays.
pub fn adjacent_distances(front: &BeamFront, min_separation: f64) -> Result<FrontGeometry> {
    let rays = &front.rays;
    if rays.len() < 2 {
        return Err(Error::Argument("a front needs at least two rays".into()));
    }
    let mut d = Vec::with_capacity(rays.len() - 1);
    let mut s = Vec::with_capacity(rays.len());
    s.push(0.0);
    for j in 1..rays.len() {
        let dx = rays[j].x - rays[j - 1].x;
        let dz = rays[j].z - rays[j - 1].z;
        let dist = (dx * dx + dz * dz).sqrt();
        if !(dist >= min_separation) || !(dx > 0.0) {
            return Err(Error::Caustic {
                ray: j,
                t: front.t,
                separation: dist,
            });
        }
        d.push(dist);
        s.push(s[j - 1] + dist);
    }
    Ok(FrontGeometry { d, s })
}

/// Per-ray flux constants `R_j² w_j`, fixed on the launch front.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxTubes {
    constants: Vec<f64>,
}

impl FluxTubes {
    pub fn from_front(front: &BeamFront, geometry: &FrontGeometry) -> Self {
        let constants = front
            .rays
            .iter()
            .zip(geometry.tube_widths())
            .map(|(r, w)| r.amp * r.amp * w)
            .collect();
        Self { constants }
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    /// Amplitudes on a front with the given geometry.
    pub fn amplitudes(&self, geometry: &FrontGeometry) -> Vec<f64> {
        self.constants
            .iter()
            .zip(geometry.tube_widths())
            .map(|(c, w)| (c / w).sqrt())
            .collect()
    }

    /// Worst relative drift of `R_j² w_j` from its launch value.
    pub fn max_relative_drift(&self, front: &BeamFront, geometry: &FrontGeometry) -> f64 {
        self.constants
            .iter()
            .zip(geometry.tube_widths())
            .zip(&front.rays)
            .map(|((c, w), r)| ((r.amp * r.amp * w - c) / c).abs())
            .fold(0.0, f64::max)
    }
}

/// Carry amplitudes from one front to the next step of the same rays:
/// `R_j' = R_j · √(w_j / w_j')`.
pub fn transport_amplitudes(
    prev: &BeamFront,
    prev_geometry: &FrontGeometry,
    next_geometry: &FrontGeometry,
) -> Vec<f64> {
    prev.rays
        .iter()
        .zip(prev_geometry.tube_widths())
        .zip(next_geometry.tube_widths())
        .map(|((r, w0), w1)| r.amp * (w0 / w1).sqrt())
        .collect()
}

/// Options for the derivative estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilOptions {
    pub width: usize,
    pub min_separation: f64,
    pub pz_correction: bool,
    pub edge_rays: usize,
}

fn derivative_at_rays(xs: &[f64], values: &[f64], order: usize, opts: &StencilOptions) -> Result<Vec<f64>> {
    let n = xs.len();
    let width = opts.width;
    if n < width {
        return Err(Error::Argument(format!("{n} rays cannot fill a {width}-point stencil")));
    }
    let mut out = Vec::with_capacity(n);
    let mut local = vec![0.0; width];
    let mut weights = vec![0.0; width * (order + 1)];
    for j in 0..n {
        let start = stencil_start(j, width, n);
        let nodes = &xs[start..start + width];
        // Shift to the evaluation point to keep the node differences exact.
        for (l, &x) in local.iter_mut().zip(nodes) {
            *l = x - xs[j];
        }
        if local.windows(2).any(|w| !(w[1] - w[0] >= opts.min_separation)) {
            return Err(Error::DegenerateStencil { ray: j });
        }
        if !lagrange_weights_into(&local, 0.0, order, &mut weights) {
            return Err(Error::DegenerateStencil { ray: j });
        }
        let v: f64 = weights[order * width..]
            .iter()
            .zip(&values[start..start + width])
            .map(|(c, f)| c * f)
            .sum();
        out.push(v);
    }
    Ok(out)
}

/// `G_j = (∂²R/∂x²)_j / (p_z,j² R_j)` from the front amplitudes.
pub fn estimate_g(front: &BeamFront, opts: &StencilOptions) -> Result<Vec<f64>> {
    let xs = front.xs();
    let amps = front.amps();
    let r2 = derivative_at_rays(&xs, &amps, 2, opts)?;
    Ok(front
        .rays
        .iter()
        .zip(r2)
        .map(|(ray, d2)| {
            let pz2 = if opts.pz_correction { ray.pz * ray.pz } else { 1.0 };
            d2 / (pz2 * ray.amp)
        })
        .collect())
}

/// `∂G/∂x` at every ray from the per-ray `G` values.
pub fn estimate_dg_dx(front: &BeamFront, g: &[f64], opts: &StencilOptions) -> Result<Vec<f64>> {
    derivative_at_rays(&front.xs(), g, 1, opts)
}

/// Fill the front's `G` cache in place.
///
/// On the `edge_rays` outermost rays of each side, `G` is continued
/// linearly from the two nearest interior rays and `∂G/∂x` is held at its
/// last interior value.
pub fn refresh_potential(front: &mut BeamFront, opts: &StencilOptions) -> Result<()> {
    let mut g = estimate_g(front, opts)?;
    let k = opts.edge_rays;
    let n = g.len();
    if k > 0 && n >= 2 * k + 2 {
        let xs = front.xs();
        for j in (0..k).rev() {
            let t = (xs[j] - xs[j + 1]) / (xs[j + 1] - xs[j + 2]);
            g[j] = g[j + 1] + t * (g[j + 1] - g[j + 2]);
        }
        for j in n - k..n {
            let t = (xs[j] - xs[j - 1]) / (xs[j - 1] - xs[j - 2]);
            g[j] = g[j - 1] + t * (g[j - 1] - g[j - 2]);
        }
    }
    let mut dg = estimate_dg_dx(front, &g, opts)?;
    if k > 0 && n >= 2 * k + 2 {
        for j in (0..k).rev() {
            dg[j] = dg[j + 1];
        }
        for j in n - k..n {
            dg[j] = dg[j - 1];
        }
    }
    front.g = g;
    front.dg_dx = dg;
    Ok(())
}
