//! Launch amplitudes and the initial front.

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::model::{BeamFront, LaunchProfile, RayState, ScenarioConfig};

fn gauss(q: f64, x: f64) -> f64 {
    (-(q * x) * (q * x)).exp()
}

/// `R(x; z = 0)` for a launch profile.
pub fn eval_profile(profile: &LaunchProfile, x: f64) -> Result<f64> {
    match profile {
        LaunchProfile::CenteredComb { a, b, q, m, x_c } => {
            let mut sum = 0.0;
            for n in 1..=*m {
                let shift = n as f64 * x_c;
                sum += gauss(*q, x - shift) + gauss(*q, x + shift);
            }
            Ok(a * gauss(*q, x) + b * sum)
        }
        LaunchProfile::TwinComb { q, m, x_c, x_1 } => {
            let m = *m as i64;
            let mut sum = 0.0;
            // Pair N with -N so the two combs stay mirror images term by term.
            for n in -m..=m {
                let s = n as f64 * x_1;
                sum += gauss(*q, x - x_c + s) + gauss(*q, x + x_c - s);
            }
            Ok(sum)
        }
        LaunchProfile::Sampled { points } => {
            let lo = points[0][0];
            let hi = points[points.len() - 1][0];
            sampled_interpolant(points)?
                .eval(x)
                .map(|r| r.max(0.0))
                .ok_or(Error::OutOfRange { x, lo, hi })
        }
    }
}

fn sampled_interpolant(points: &[[f64; 2]]) -> Result<MonotoneCubic> {
    MonotoneCubic::new(
        points.iter().map(|p| p[0]).collect(),
        points.iter().map(|p| p[1]).collect(),
    )
    .ok_or_else(|| Error::Argument("sample abscissae must be strictly increasing".into()))
}

/// Evaluate a profile on many points, building the sampled interpolant once.
pub fn eval_profile_many(profile: &LaunchProfile, xs: &[f64]) -> Result<Vec<f64>> {
    match profile {
        LaunchProfile::Sampled { points } => {
            let f = sampled_interpolant(points)?;
            let (lo, hi) = f.range();
            xs.iter()
                .map(|&x| {
                    f.eval(x)
                        .map(|r| r.max(0.0))
                        .ok_or(Error::OutOfRange { x, lo, hi })
                })
                .collect()
        }
        _ => xs.iter().map(|&x| eval_profile(profile, x)).collect(),
    }
}

/// Uniform launch abscissae on `[x_min, x_max]`.
///
/// Built around the window centre so a symmetric window gives exactly
/// mirrored abscissae.
pub fn launch_abscissae(x_min: f64, x_max: f64, n: usize) -> Vec<f64> {
    let centre = 0.5 * (x_min + x_max);
    let half = 0.5 * (x_max - x_min);
    let span = (n - 1) as f64;
    (0..n)
        .map(|j| centre + half * ((2 * j) as f64 - span) / span)
        .collect()
}

/// Rays on a uniform grid at `z = 0`, parallel to the axis, carrying the
/// launch amplitude. Amplitudes below `amp_floor × peak` are raised to it.
pub fn build_launch_front(config: &ScenarioConfig) -> Result<BeamFront> {
    let xs = launch_abscissae(config.x_min, config.x_max, config.n_rays);
    let amps = eval_profile_many(&config.profile, &xs)?;
    let peak = amps.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::ZeroAmplitude);
    }
    let floor = config.amp_floor * peak;
    let rays = xs
        .iter()
        .zip(amps)
        .map(|(&x, amp)| RayState {
            x,
            z: 0.0,
            px: 0.0,
            pz: 1.0,
            amp: amp.max(floor),
        })
        .collect();
    Ok(BeamFront::new(rays, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_slit() -> LaunchProfile {
        LaunchProfile::CenteredComb {
            a: 0.0,
            b: 1.0,
            q: 1.68,
            m: 2,
            x_c: 0.31,
        }
    }

    fn multi_slit() -> LaunchProfile {
        LaunchProfile::TwinComb {
            q: 3.5,
            m: 3,
            x_c: 1.15,
            x_1: 0.3,
        }
    }

    #[test]
    fn unit_gaussian_peak() {
        assert_eq!(eval_profile(&LaunchProfile::gaussian(1.0), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn single_slit_centre_value() {
        let q2: f64 = 1.68 * 1.68;
        let oracle = 2.0 * ((-q2 * 0.31f64.powi(2)).exp() + (-q2 * 0.62f64.powi(2)).exp());
        let got = eval_profile(&single_slit(), 0.0).unwrap();
        assert!((got - oracle).abs() < 1e-15);
        assert!((got - 2.0 * (0.7625 + 0.3381)).abs() < 1e-3);
    }

    #[test]
    fn profiles_are_even() {
        for p in [single_slit(), multi_slit(), LaunchProfile::gaussian(1.3)] {
            let r0 = eval_profile(&p, 0.0).unwrap();
            for i in 0..400 {
                let x = i as f64 * 0.0173;
                let d = eval_profile(&p, x).unwrap() - eval_profile(&p, -x).unwrap();
                assert!(d.abs() <= 1e-12 * r0, "{p:?} at {x}");
            }
        }
    }

    #[test]
    fn centered_comb_without_pairs_is_a_gaussian() {
        let p = LaunchProfile::CenteredComb {
            a: 0.7,
            b: 0.0,
            q: 1.4,
            m: 3,
            x_c: 0.5,
        };
        for i in -50..=50 {
            let x = i as f64 * 0.07;
            let expected = 0.7 * (-(1.4f64 * 1.4) * x * x).exp();
            assert!((eval_profile(&p, x).unwrap() - expected).abs() <= 1e-15);
        }
    }

    #[test]
    fn sampled_profile_range() {
        let p = LaunchProfile::Sampled {
            points: vec![[-1.0, 0.0], [0.0, 1.0], [1.0, 0.0]],
        };
        assert_eq!(eval_profile(&p, 0.0).unwrap(), 1.0);
        assert!(eval_profile(&p, 0.5).unwrap() > 0.0);
        assert!(matches!(eval_profile(&p, 1.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn gaussian_launch_front() {
        let mut c = ScenarioConfig::new("t", 1e-4, LaunchProfile::gaussian(1.0), (-6.0, 6.0), 1.0);
        c.n_rays = 5;
        c.amp_floor = 0.0;
        let f = build_launch_front(&c).unwrap();
        let xs = [-6.0, -3.0, 0.0, 3.0, 6.0];
        for (r, x) in f.rays.iter().zip(xs) {
            assert_eq!(r.x, x);
            assert_eq!(r.amp, (-x * x).exp());
            assert_eq!((r.z, r.px, r.pz), (0.0, 0.0, 1.0));
        }
        assert_eq!(f.t, 0.0);
    }

    #[test]
    fn launch_floor_clamps_tails() {
        let mut c = ScenarioConfig::new("t", 1e-4, LaunchProfile::gaussian(1.0), (-6.0, 6.0), 1.0);
        c.n_rays = 5;
        let f = build_launch_front(&c).unwrap();
        assert_eq!(f.rays[0].amp, 1e-12);
        assert_eq!(f.rays[1].amp, (-9.0f64).exp());
    }

    #[test]
    fn symmetric_launch_front() {
        let c = ScenarioConfig::new("t", 1e-4, multi_slit(), (-3.5, 3.5), 1.0);
        let f = build_launch_front(&c).unwrap();
        let n = f.len();
        for j in 0..n {
            assert_eq!(f.rays[j].x, -f.rays[n - 1 - j].x);
            assert_eq!(f.rays[j].amp, f.rays[n - 1 - j].amp);
        }
    }

    #[test]
    fn zero_profile_rejected() {
        let mut c = ScenarioConfig::new(
            "t",
            1e-4,
            LaunchProfile::Sampled {
                points: vec![[-1.0, 0.0], [1.0, 0.0]],
            },
            (-1.0, 1.0),
            1.0,
        );
        c.n_rays = 5;
        assert!(matches!(build_launch_front(&c), Err(Error::ZeroAmplitude)));
    }
}
