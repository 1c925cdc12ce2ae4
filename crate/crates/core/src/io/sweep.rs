//! Independent runs over a grid of parameters.

use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::output::run_scenario;
use crate::diagnostics::{far_field_width, fringe_count, intensity_profile, uncertainty_product};
use crate::error::{Error, Result};
use crate::model::{LaunchProfile, ScenarioConfig};
use crate::oracle::significant_extrema;

/// Values to sweep. Every non-empty axis multiplies the grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepSpec {
    pub epsilon: Vec<f64>,
    /// Launch profile parameters by name (`a`, `b`, `q`, `m`, `x_c`, `x_1`).
    pub profile: Vec<(String, Vec<f64>)>,
    /// Keep `ε·z_end` fixed instead of `z_end`.
    pub scale_z_end: bool,
    /// Run points on the rayon pool instead of one after another.
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub epsilon: f64,
    pub params: Vec<(String, f64)>,
    pub dir: PathBuf,
    /// Termination reason, or the error that stopped the point.
    pub status: String,
    pub far_field_width: Option<f64>,
    pub fringe_count: Option<usize>,
    pub uncertainty_product: Option<f64>,
}

fn set_profile_param(profile: &mut LaunchProfile, name: &str, value: f64) -> Result<()> {
    let bad = || Error::Argument(format!("profile has no sweepable parameter {name:?}"));
    let count = || -> Result<u32> {
        if value >= 0.0 && value.fract() == 0.0 {
            Ok(value as u32)
        } else {
            Err(Error::Argument(format!("{name} must be a non-negative integer")))
        }
    };
    match profile {
        LaunchProfile::CenteredComb { a, b, q, m, x_c } => match name {
            "a" => *a = value,
            "b" => *b = value,
            "q" => *q = value,
            "m" => *m = count()?,
            "x_c" => *x_c = value,
            _ => return Err(bad()),
        },
        LaunchProfile::TwinComb { q, m, x_c, x_1 } => match name {
            "q" => *q = value,
            "m" => *m = count()?,
            "x_c" => *x_c = value,
            "x_1" => *x_1 = value,
            _ => return Err(bad()),
        },
        LaunchProfile::Sampled { .. } => return Err(bad()),
    }
    Ok(())
}

/// The configs of every sweep point, in row-major order over
/// `epsilon` then the profile axes.
pub fn expand(base: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<(f64, Vec<(String, f64)>, ScenarioConfig)>> {
    if spec.epsilon.is_empty() && spec.profile.is_empty() {
        return Err(Error::Argument("sweep needs at least one range".into()));
    }
    if let Some((name, _)) = spec.profile.iter().find(|(_, v)| v.is_empty()) {
        return Err(Error::Argument(format!("empty range for {name}")));
    }
    let eps: Vec<f64> = if spec.epsilon.is_empty() { vec![base.epsilon] } else { spec.epsilon.clone() };
    let mut combos: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for (name, values) in &spec.profile {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |&v| {
                    let mut c = c.clone();
                    c.push((name.clone(), v));
                    c
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for &e in &eps {
        for combo in &combos {
            let mut c = base.clone();
            c.epsilon = e;
            if spec.scale_z_end {
                c.z_end = base.z_end * base.epsilon / e;
            }
            for (name, v) in combo {
                set_profile_param(&mut c.profile, name, *v)?;
            }
            c.dt = c.default_dt();
            out.push((e, combo.clone(), c));
        }
    }
    Ok(out)
}

fn run_point(index: usize, epsilon: f64, params: Vec<(String, f64)>, config: ScenarioConfig, out: &Path) -> SweepPoint {
    let dir = out.join(format!("point_{index:03}"));
    let mut point = SweepPoint {
        index,
        epsilon,
        params,
        dir: dir.clone(),
        status: String::new(),
        far_field_width: None,
        fringe_count: None,
        uncertainty_product: None,
    };
    match run_scenario(config, &dir) {
        Ok(outcome) => {
            let r = &outcome.record;
            point.status = r.termination.as_str().to_string();
            point.far_field_width = far_field_width(r).ok();
            point.fringe_count = significant_extrema(&intensity_profile(r.last())).map(|e| fringe_count(&e));
            point.uncertainty_product = uncertainty_product(r).ok().map(|u| u.product);
        }
        Err(e) => point.status = format!("error: {e}"),
    }
    point
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// Run every point into `out/point_NNN` and write `out/summary.csv`.
/// A failing point is recorded and the others still run.
pub fn sweep(base: &ScenarioConfig, spec: &SweepSpec, out: &Path) -> Result<Vec<SweepPoint>> {
    let jobs = expand(base, spec)?;
    std::fs::create_dir_all(out)?;
    let run = |(i, (e, p, c)): (usize, (f64, Vec<(String, f64)>, ScenarioConfig))| run_point(i, e, p, c, out);
    let points: Vec<SweepPoint> = if spec.parallel {
        jobs.into_par_iter().enumerate().map(run).collect()
    } else {
        jobs.into_iter().enumerate().map(run).collect()
    };
    let mut w = std::io::BufWriter::new(std::fs::File::create(out.join("summary.csv"))?);
    let names: Vec<&str> = spec.profile.iter().map(|(n, _)| n.as_str()).collect();
    let mut header = vec!["point", "epsilon"];
    header.extend(&names);
    header.extend(["status", "far_field_width", "fringe_count", "uncertainty_product", "dir"]);
    writeln!(w, "{}", header.join(","))?;
    for p in &points {
        let mut row = vec![p.index.to_string(), p.epsilon.to_string()];
        row.extend(p.params.iter().map(|(_, v)| v.to_string()));
        row.push(format!("\"{}\"", p.status.replace('"', "'")));
        row.push(opt(&p.far_field_width));
        row.push(opt(&p.fringe_count));
        row.push(opt(&p.uncertainty_product));
        row.push(p.dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(points)
}
