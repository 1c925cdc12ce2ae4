//! Run a scenario and write its files.

use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::emit_config;
use super::svg::{decimate, render, Panel, Series, Style};
use crate::diagnostics::{far_field_width, fringe_count, intensity_profile, uncertainty_product, WAIST_LAUNCH};
use crate::dynamics::{run, Termination, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::model::{BeamFront, ScenarioConfig};
use crate::oracle::significant_extrema;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_VAR: &str = "RAYWAVE_OUT";
const DEFAULT_OUTPUT_ROOT: &str = "raywave-out";

pub const TRAJECTORIES: &str = "trajectories.csv";
pub const PROFILE_INITIAL: &str = "profile_initial.csv";
pub const PROFILE_FINAL: &str = "profile_final.csv";
pub const METADATA: &str = "metadata.json";
pub const PLOTS: &str = "plots.svg";

/// `$RAYWAVE_OUT/<name>`, or `raywave-out/<name>` when unset.
pub fn default_output_dir(name: &str) -> PathBuf {
    let root = std::env::var_os(OUTPUT_ROOT_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT));
    root.join(name)
}

/// Exit status for an error raised before or during a run.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Invalid(_)
        | Error::Parse(_)
        | Error::Argument(_)
        | Error::OutOfRange { .. }
        | Error::ZeroAmplitude => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

/// A finished run and the status it maps to.
#[derive(Debug)]
pub struct RunOutcome {
    pub record: TrajectoryRecord,
    pub exit_code: i32,
    pub metadata: Value,
}

/// 17 significant digits: exact round trip for any double.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rays written to the trajectory file.
pub fn written_rays(n: usize, stride: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..n).step_by(stride).collect();
    if ids.last() != Some(&(n - 1)) {
        ids.push(n - 1);
    }
    ids
}

pub fn write_trajectories(record: &TrajectoryRecord, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "ray_id,t,x,z,p_x,p_z,amp,G")?;
    let ids = written_rays(record.n_rays(), record.config.output.ray_stride);
    for s in &record.snapshots {
        let f = &s.front;
        for &j in &ids {
            let r = f.rays[j];
            let g = f.g.get(j).copied().unwrap_or(f64::NAN);
            writeln!(
                w,
                "{j},{},{},{},{},{},{},{}",
                num(f.t),
                num(r.x),
                num(r.z),
                num(r.px),
                num(r.pz),
                num(r.amp),
                num(g)
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile(front: &BeamFront, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,R2,G")?;
    for (j, (x, i)) in intensity_profile(front).into_iter().enumerate() {
        let g = front.g.get(j).copied().unwrap_or(f64::NAN);
        writeln!(w, "{},{},{}", num(x), num(i), num(g))?;
    }
    w.flush()?;
    Ok(())
}

/// Diagnostics that apply to the record; failures become strings.
fn diagnostics(record: &TrajectoryRecord) -> Value {
    let mut d = serde_json::Map::new();
    match far_field_width(record) {
        Ok(w) => d.insert("far_field_width".into(), json!(w)),
        Err(e) => d.insert("far_field_width".into(), json!(e.to_string())),
    };
    match uncertainty_product(record) {
        Ok(u) => d.insert("uncertainty".into(), json!(u)),
        Err(e) => d.insert("uncertainty".into(), json!(e.to_string())),
    };
    let profile = intensity_profile(record.last());
    let count = significant_extrema(&profile).map(|e| fringe_count(&e));
    d.insert("fringe_count".into(), json!(count));
    Value::Object(d)
}

fn metadata(record: &TrajectoryRecord, files: &[&str]) -> Value {
    let c = &record.config;
    let toml_text = emit_config(c);
    let config_value: toml::Value = toml::from_str(&toml_text).expect("emitted config parses");
    let last = record.last();
    json!({
        "name": c.name,
        "versions": {
            "raywave": env!("CARGO_PKG_VERSION"),
            "format": 1,
        },
        "config": config_value,
        "config_toml": toml_text,
        "termination": record.termination.as_str(),
        "message": record.message,
        "partial": record.termination != Termination::ReachedZEnd,
        "steps": record.steps,
        "t_final": last.t,
        "mean_z_final": last.mean_z(),
        "z_end_over_pi_eps": c.z_end * c.epsilon / std::f64::consts::PI,
        "max_flux_drift": record.max_flux_drift,
        "max_norm_error": record.max_norm_error,
        "decimation": {
            "record_every": c.output.record_every,
            "ray_stride": c.output.ray_stride,
            "snapshots": record.snapshots.len(),
        },
        "normalization": "R2 columns of the profile files are scaled to unit peak per front; amp in trajectories.csv is unscaled",
        "diagnostics": diagnostics(record),
        "files": files,
    })
}

/// Intensity profiles, `G` profiles and the trajectory fan.
pub fn plots(record: &TrajectoryRecord) -> String {
    let (first, last) = (record.launch(), record.last());
    // Rays above 10⁻⁶ of the peak intensity.
    let visible = |f: &BeamFront| -> Vec<(usize, (f64, f64))> {
        intensity_profile(f).into_iter().enumerate().filter(|(_, p)| p.1 >= 1e-6).collect()
    };
    let profile_series = |f: &BeamFront, label: &str, style| Series {
        label: label.into(),
        points: decimate(&visible(f).into_iter().map(|(_, p)| p).collect::<Vec<_>>(), 2000),
        style,
    };
    let g_series = |f: &BeamFront, label: &str, style| Series {
        label: label.into(),
        points: decimate(&visible(f).into_iter().map(|(j, p)| (p.0, f.g[j])).collect::<Vec<_>>(), 2000),
        style,
    };
    let mut fan = Vec::new();
    let n = record.n_rays();
    let launched: Vec<usize> = visible(first).into_iter().map(|(j, _)| j).collect();
    let (lo, hi) = (launched[0], launched[launched.len() - 1]);
    for j in written_rays(n, (n / 40).max(1)).into_iter().filter(|j| (lo..=hi).contains(j)) {
        let pts: Vec<(f64, f64)> = record.snapshots.iter().map(|s| (s.front.rays[j].z, s.front.rays[j].x)).collect();
        fan.push(Series { label: format!("ray {j}"), points: decimate(&pts, 400), style: Style::Faint });
    }
    for x0 in [-WAIST_LAUNCH, WAIST_LAUNCH] {
        if let Some(ray) = record.interpolated_ray(x0) {
            let pts: Vec<(f64, f64)> = ray.iter().map(|r| (r.z, r.x)).collect();
            fan.push(Series { label: format!("waist ray from x = {x0}"), points: decimate(&pts, 400), style: Style::Heavy });
        }
    }
    render(&[
        Panel {
            title: "Transverse intensity (initial solid, final dashed)".into(),
            x_label: "x / w0".into(),
            y_label: "R² (unit peak)".into(),
            series: vec![profile_series(first, "initial", Style::Solid), profile_series(last, "final", Style::Dashed)],
        },
        Panel {
            title: "G = ∇²R/R".into(),
            x_label: "x / w0".into(),
            y_label: "G".into(),
            series: vec![g_series(first, "initial", Style::Solid), g_series(last, "final", Style::Dashed)],
        },
        Panel {
            title: "Ray trajectories".into(),
            x_label: "z / w0".into(),
            y_label: "x / w0".into(),
            series: fan,
        },
    ])
}

/// Write every output of a finished record into `dir`.
pub fn write_outputs(record: &TrajectoryRecord, dir: &Path) -> Result<Value> {
    std::fs::create_dir_all(dir)?;
    write_trajectories(record, &dir.join(TRAJECTORIES))?;
    write_profile(record.launch(), &dir.join(PROFILE_INITIAL))?;
    write_profile(record.last(), &dir.join(PROFILE_FINAL))?;
    let mut files = vec![TRAJECTORIES, PROFILE_INITIAL, PROFILE_FINAL, METADATA];
    if record.config.output.plots {
        std::fs::write(dir.join(PLOTS), plots(record))?;
        files.push(PLOTS);
    }
    let meta = metadata(record, &files);
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Argument(e.to_string()))?;
    std::fs::write(dir.join(METADATA), text + "\n")?;
    Ok(meta)
}

/// Run `config` and write its outputs to `dir`. A run that stops early
/// still writes what it has, flagged `partial` in the metadata, and maps to
/// [`EXIT_RUNTIME`].
pub fn run_scenario(config: ScenarioConfig, dir: &Path) -> Result<RunOutcome> {
    let record = run(config)?;
    let metadata = write_outputs(&record, dir)?;
    let exit_code = if record.termination == Termination::ReachedZEnd { EXIT_OK } else { EXIT_RUNTIME };
    Ok(RunOutcome { record, exit_code, metadata })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn written_ray_ids() {
        assert_eq!(written_rays(11, 5), vec![0, 5, 10]);
        assert_eq!(written_rays(12, 5), vec![0, 5, 10, 11]);
        assert_eq!(written_rays(3, 1), vec![0, 1, 2]);
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1.65e-4, -2.5e300, 5e-324] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(exit_code_for(&Error::ZeroAmplitude), EXIT_CONFIG);
        assert_eq!(exit_code_for(&Error::Caustic { ray: 1, t: 0.0, separation: 0.0 }), EXIT_RUNTIME);
    }
}
