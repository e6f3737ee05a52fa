//! The meridian ODE of rotational surfaces and shooting for cmc spheres.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::curve::{ProfileCurve, ProfileSample, Topology};
use crate::cmc_family::CmcSphere;
use crate::error::{require_positive, Error, Result};
use crate::numerics::{integrate, OdeOptions, OdeState};

/// `(u̇, v̇, σ̇) = (cosσ, (2u)⁻¹√(4u²+u⁴) sinσ, 2H − sinσ/u)` for `u > 0`.
pub fn ode_rhs(u: f64, _v: f64, sigma: f64, h: f64) -> Result<[f64; 3]> {
    if !(u > 0.0) {
        return Err(Error::InvalidParameter {
            name: "u",
            value: u,
            reason: "the meridian ODE is singular on the axis; start from pole_start",
        });
    }
    let (s, c) = sigma.sin_cos();
    Ok([c, 0.5 * (4.0 + u * u).sqrt() * s, 2.0 * h - s / u])
}

/// Pole offset used by [`generate_cmc_profile`].
pub fn pole_offset(h: f64) -> f64 {
    1e-8 * (1.0 / h).max(1.0)
}

/// Leading terms of the pole series: at arclength `ε` from the axis point
/// `(0, v0)`, `u = ε`, `σ = Hε`, `v = v0 + Hε²/2`.
pub fn pole_start(h: f64, v0: f64, eps: f64) -> OdeState {
    OdeState::new(eps, vec![eps, v0 + 0.5 * h * eps * eps, h * eps])
}

/// Sampling and tolerance for [`generate_cmc_profile_with`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileOptions {
    /// Closure and consistency tolerance; the ODE runs at `tol·10⁻³` (floored at 10⁻¹³).
    pub tol: f64,
    /// Number of uniform arclength samples on the whole meridian.
    pub samples: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            samples: 2001,
        }
    }
}

/// Shooting diagnostics beside the sampled curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShootingReport {
    /// Arclength from the pole to the equator (`σ = π/2`).
    pub equator_s: f64,
    pub equator_u: f64,
    /// Largest deviation between the forward-integrated second half and the mirror image.
    pub mirror_defect: f64,
    pub rhs_evaluations: usize,
}

/// Cmc sphere meridian for mean curvature `h` with default options.
pub fn generate_cmc_profile(h: f64, tol: f64) -> Result<ProfileCurve> {
    let opts = ProfileOptions {
        tol,
        ..ProfileOptions::default()
    };
    generate_cmc_profile_with(h, &opts).map(|(c, _)| c)
}

/// Integrates from the regularized pole to the equator, continues into the
/// second half to confirm the reflection symmetry, and samples the mirrored
/// meridian uniformly in arclength.
pub fn generate_cmc_profile_with(
    h: f64,
    opts: &ProfileOptions,
) -> Result<(ProfileCurve, ShootingReport)> {
    require_positive("H", h)?;
    require_positive("tol", opts.tol)?;
    if opts.samples < 5 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: opts.samples as f64,
            reason: "need at least 5 samples",
        });
    }
    let v0 = CmcSphere::new(h)?.profile(0.0).h;
    let eps = pole_offset(h);
    let ode = OdeOptions::with_tol((opts.tol * 1e-3).max(1e-13));
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let (s, c) = y[2].sin_cos();
        dy[0] = c;
        dy[1] = 0.5 * (4.0 + y[0] * y[0]).sqrt() * s;
        dy[2] = 2.0 * h - s / y[0];
    };
    let horizon = 100.0 / h;
    let first = integrate(
        rhs,
        &pole_start(h, v0, eps),
        horizon,
        &ode,
        Some(|_: f64, y: &[f64]| y[2] - FRAC_PI_2),
        &[],
    )?;
    let eq = first.event.clone().ok_or_else(|| {
        Error::ClosureFailure(format!("no equator (σ = π/2) before s = {horizon}"))
    })?;
    let (se, ue, ve) = (eq.s, eq.y[0], eq.y[1]);

    let second = integrate(
        rhs,
        &eq,
        2.0 * se,
        &ode,
        Some(move |_: f64, y: &[f64]| y[0] - 0.25 * ue),
        &[],
    )?;
    let mut mirror_defect: f64 = 0.0;
    for st in &second.states {
        let back = 2.0 * se - st.s;
        if back < eps {
            continue;
        }
        let m = first
            .eval(back)
            .ok_or_else(|| Error::ClosureFailure("mirror point outside trajectory".into()))?;
        mirror_defect = mirror_defect
            .max((st.y[0] - m[0]).abs())
            .max((st.y[1] - (2.0 * ve - m[1])).abs())
            .max((st.y[2] - (std::f64::consts::PI - m[2])).abs());
    }
    if !(mirror_defect <= opts.tol.max(1e-9)) {
        return Err(Error::ClosureFailure(format!(
            "second half departs from the mirror image by {mirror_defect:e}"
        )));
    }

    let half = |s: f64| -> Result<[f64; 3]> {
        if s <= eps {
            return Ok([s, v0 + 0.5 * h * s * s, h * s]);
        }
        let y = first
            .eval(s.min(se))
            .ok_or_else(|| Error::ClosureFailure(format!("no dense output at s = {s}")))?;
        Ok([y[0], y[1], y[2]])
    };
    let n = opts.samples;
    let len = 2.0 * se;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let s = len * k as f64 / (n - 1) as f64;
        let (u, v, sigma) = if s <= se {
            let y = half(s)?;
            (y[0], y[1], y[2])
        } else {
            let y = half(len - s)?;
            (y[0], 2.0 * ve - y[1], std::f64::consts::PI - y[2])
        };
        samples.push(ProfileSample {
            s,
            u: if k == 0 || k == n - 1 { 0.0 } else { u },
            v,
            sigma: if k == 0 {
                0.0
            } else if k == n - 1 {
                std::f64::consts::PI
            } else {
                sigma
            },
        });
    }
    let report = ShootingReport {
        equator_s: se,
        equator_u: ue,
        mirror_defect,
        rhs_evaluations: first.rhs_evaluations + second.rhs_evaluations,
    };
    Ok((ProfileCurve::new(samples, Topology::Sphere)?, report))
}

/// Largest distance (in the `(u, v)` coordinates) from the samples to the
/// closed-form meridian `{(ρ(r), h(r))}` of `S_H`.
pub fn closed_form_distance(curve: &ProfileCurve, h: f64) -> Result<f64> {
    let sphere = CmcSphere::new(h)?;
    let at = |t: f64| {
        let p = sphere.profile(if t >= 1.0 {
            f64::INFINITY
        } else {
            t / (1.0 - t)
        });
        (p.rho, p.h)
    };
    let mut worst: f64 = 0.0;
    for p in curve.samples() {
        let d2 = |t: f64| {
            let (rho, hh) = at(t);
            (rho - p.u).powi(2) + (hh - p.v).powi(2)
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if at(mid).1 < p.v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let seed = 0.5 * (lo + hi);
        let t = golden_min(&d2, (seed - 1e-3).max(0.0), (seed + 1e-3).min(1.0));
        worst = worst.max(d2(t).min(d2(seed)).sqrt());
    }
    Ok(worst)
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if b - a < 1e-16 {
            break;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_values() {
        let d = ode_rhs(0.7, 0.0, FRAC_PI_2, 1.0).unwrap();
        assert!(d[0].abs() < 1e-16);
        assert!((d[1] - 0.5 * (4.0f64 + 0.49).sqrt()).abs() < 1e-15);
        assert!((d[2] - (2.0 - 1.0 / 0.7)).abs() < 1e-15);
        assert!(ode_rhs(0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn equator_radius_is_inverse_h() {
        let (_, rep) = generate_cmc_profile_with(2.0, &ProfileOptions::default()).unwrap();
        assert!((rep.equator_u - 0.5).abs() < 1e-9, "{}", rep.equator_u);
        assert!((rep.equator_s - std::f64::consts::PI / 4.0).abs() < 1e-9);
    }

    #[test]
    fn matches_closed_form() {
        for h in [0.5, 3.0] {
            let c = generate_cmc_profile(h, 1e-10).unwrap();
            let d = closed_form_distance(&c, h).unwrap();
            assert!(d < 1e-7, "H={h}: {d:e}");
        }
    }

    #[test]
    fn closed_form_distance_detects_offsets() {
        let c = generate_cmc_profile(1.0, 1e-10).unwrap();
        let shifted: Vec<ProfileSample> = c
            .samples()
            .iter()
            .map(|p| ProfileSample {
                v: p.v + 1e-3,
                ..*p
            })
            .collect();
        let c2 = ProfileCurve::new(shifted, Topology::Sphere).unwrap();
        let d = closed_form_distance(&c2, 1.0).unwrap();
        assert!(d > 1e-4);
    }
}
