//! Pointwise geometry and integral functionals of a sampled meridian.
//!
//! All integrals are over the full rotation: with `dμ = ½√(4u²+u⁴) dθ ds`,
//! `∫ f dμ = π ∫ f √(4u²+u⁴) ds`.

use std::f64::consts::PI;

use serde::Serialize;

use super::curve::ProfileCurve;
use super::topology::{closure_and_topology, require_closed, TOPOLOGY_TOL};
use crate::error::{Error, Result};
use crate::numerics::{derivative_uniform, integrate_uniform};

/// Per-sample geometry of the rotation surface.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryFields {
    pub s: Vec<f64>,
    pub sigma_dot: Vec<f64>,
    /// `sinσ/u`, continued by `σ̇` at axis endpoints.
    pub sin_over_u: Vec<f64>,
    /// `H = ½(σ̇ + sinσ/u)`.
    pub mean_curvature: Vec<f64>,
    /// `n₃ = 2u cosσ / √(4u²+u⁴)`.
    pub n3: Vec<f64>,
    /// `½√(4u²+u⁴)`, the area density per `dθ ds`.
    pub area_density: Vec<f64>,
    /// `σ̇ − sinσ/u`.
    pub reduced: Vec<f64>,
}

pub fn geometry_fields(curve: &ProfileCurve) -> Result<GeometryFields> {
    let h = curve.uniform_step()?;
    let sigma = curve.sigma();
    let sigma_dot = derivative_uniform(&sigma, h)?;
    let p = curve.samples();
    let n = p.len();
    let mut f = GeometryFields {
        s: curve.s(),
        sigma_dot: sigma_dot.clone(),
        sin_over_u: vec![0.0; n],
        mean_curvature: vec![0.0; n],
        n3: vec![0.0; n],
        area_density: vec![0.0; n],
        reduced: vec![0.0; n],
    };
    for (k, q) in p.iter().enumerate() {
        let endpoint = k == 0 || k == n - 1;
        let sou = if q.u > TOPOLOGY_TOL || (!endpoint && q.u > 0.0) {
            q.sigma.sin() / q.u
        } else if endpoint {
            sigma_dot[k]
        } else {
            return Err(Error::InvalidCurve(format!("u = 0 at interior sample {k}")));
        };
        let root = (4.0 + q.u * q.u).sqrt();
        f.sin_over_u[k] = sou;
        f.mean_curvature[k] = 0.5 * (sigma_dot[k] + sou);
        f.n3[k] = 2.0 * q.sigma.cos() / root;
        f.area_density[k] = 0.5 * q.u * root;
        f.reduced[k] = sigma_dot[k] - sou;
    }
    Ok(f)
}

/// `∫ g dμ` over the rotation surface from per-sample values of `g`.
fn surface_integral(f: &GeometryFields, h: f64, g: impl Fn(usize) -> f64) -> f64 {
    let vals: Vec<f64> = (0..f.s.len()).map(|k| g(k) * f.area_density[k]).collect();
    2.0 * PI * integrate_uniform(&vals, h)
}

/// `E = ¼∫(H² − n₃²/4) dμ`.
pub fn energy_direct(curve: &ProfileCurve) -> Result<f64> {
    require_closed(curve)?;
    let f = geometry_fields(curve)?;
    Ok(energy_direct_of(&f, curve.uniform_step()?))
}

fn energy_direct_of(f: &GeometryFields, h: f64) -> f64 {
    0.25 * surface_integral(f, h, |k| {
        f.mean_curvature[k].powi(2) - 0.25 * f.n3[k].powi(2)
    })
}

/// `E = (π/16)∫(σ̇ − sinσ/u)² √(4u²+u⁴) ds + πχ/2`.
pub fn energy_reduced(curve: &ProfileCurve) -> Result<f64> {
    let chi = require_closed(curve)?;
    let f = geometry_fields(curve)?;
    Ok(energy_reduced_of(&f, curve.uniform_step()?, chi))
}

fn energy_reduced_of(f: &GeometryFields, h: f64, chi: i32) -> f64 {
    0.0625 * surface_integral(f, h, |k| f.reduced[k].powi(2)) + 0.5 * PI * chi as f64
}

/// `Im ∫UV = ¼∫H n₃ dμ`; vanishes on closed surfaces.
pub fn energy_imaginary(curve: &ProfileCurve) -> Result<f64> {
    require_closed(curve)?;
    let f = geometry_fields(curve)?;
    Ok(energy_imag_of(&f, curve.uniform_step()?))
}

fn energy_imag_of(f: &GeometryFields, h: f64) -> f64 {
    0.25 * surface_integral(f, h, |k| f.mean_curvature[k] * f.n3[k])
}

/// `W = ∫(H² + ¼ − n₃²) dμ`.
pub fn willmore_direct(curve: &ProfileCurve) -> Result<f64> {
    require_closed(curve)?;
    let f = geometry_fields(curve)?;
    Ok(willmore_of(&f, curve.uniform_step()?))
}

fn willmore_of(f: &GeometryFields, h: f64) -> f64 {
    surface_integral(f, h, |k| {
        f.mean_curvature[k].powi(2) + 0.25 - f.n3[k].powi(2)
    })
}

/// `∫K̂ dμ` with `K̂ = ¼ − n₃²`.
pub fn int_khat(curve: &ProfileCurve) -> Result<f64> {
    require_closed(curve)?;
    let f = geometry_fields(curve)?;
    Ok(surface_integral(&f, curve.uniform_step()?, |k| {
        0.25 - f.n3[k].powi(2)
    }))
}

/// `(π∫√(4u²+u⁴) ds, π|∮u² dv|)`; `(0, 0)` for a curve of zero length.
pub fn area_and_volume(curve: &ProfileCurve) -> Result<(f64, f64)> {
    if curve.len() < 2 {
        return Ok((0.0, 0.0));
    }
    let d = closure_and_topology(curve);
    if let Some((i, j)) = d.self_intersection {
        return Err(Error::SelfIntersection(i, j));
    }
    require_closed(curve)?;
    let f = geometry_fields(curve)?;
    let h = curve.uniform_step()?;
    Ok((area_of(&f, h), volume_of(curve, h)?))
}

fn area_of(f: &GeometryFields, h: f64) -> f64 {
    surface_integral(f, h, |_| 1.0)
}

fn volume_of(curve: &ProfileCurve, h: f64) -> Result<f64> {
    let u = curve.u();
    let dv = derivative_uniform(&curve.v(), h)?;
    let vals: Vec<f64> = u.iter().zip(&dv).map(|(u, d)| u * u * d).collect();
    Ok(PI * integrate_uniform(&vals, h).abs())
}

/// A value with a discretization error estimate (difference to the
/// half-resolution evaluation; `NaN` when the curve is too coarse).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RevolutionReport {
    #[serde(rename = "E_direct")]
    pub e_direct: Estimate,
    #[serde(rename = "E_reduced")]
    pub e_reduced: Estimate,
    #[serde(rename = "E_imag")]
    pub e_imag: Estimate,
    #[serde(rename = "W")]
    pub willmore: Estimate,
    pub area: Estimate,
    pub volume: Estimate,
    pub chi: i32,
}

struct Values([f64; 6]);

fn values(curve: &ProfileCurve, chi: i32) -> Result<Values> {
    let h = curve.uniform_step()?;
    let f = geometry_fields(curve)?;
    Ok(Values([
        energy_direct_of(&f, h),
        energy_reduced_of(&f, h, chi),
        energy_imag_of(&f, h),
        willmore_of(&f, h),
        area_of(&f, h),
        volume_of(curve, h)?,
    ]))
}

/// Every functional of a closed meridian with error estimates.
pub fn revolution_report(curve: &ProfileCurve) -> Result<RevolutionReport> {
    let chi = require_closed(curve)?;
    if let Some((i, j)) = closure_and_topology(curve).self_intersection {
        return Err(Error::SelfIntersection(i, j));
    }
    let fine = values(curve, chi)?;
    let n = curve.len();
    let coarse = if n % 2 == 1 && n >= 11 {
        let half: Vec<_> = curve.samples().iter().step_by(2).copied().collect();
        let c = ProfileCurve::new(half, curve.topology())?;
        Some(values(&c, chi)?)
    } else {
        None
    };
    let est = |i: usize| Estimate {
        value: fine.0[i],
        err: coarse
            .as_ref()
            .map_or(f64::NAN, |c| (fine.0[i] - c.0[i]).abs()),
    };
    Ok(RevolutionReport {
        e_direct: est(0),
        e_reduced: est(1),
        e_imag: est(2),
        willmore: est(3),
        area: est(4),
        volume: est(5),
        chi,
    })
}

#[cfg(test)]
mod tests {
    use super::super::curve::{ProfileSample, Topology};
    use super::super::shooting::generate_cmc_profile;
    use super::*;
    use crate::cmc_family::{CmcSphere, Mode};

    #[test]
    fn cmc_profile_energy_is_pi() {
        for h in [0.5, 2.0] {
            let c = generate_cmc_profile(h, 1e-10).unwrap();
            let ed = energy_direct(&c).unwrap();
            let er = energy_reduced(&c).unwrap();
            assert!((ed - PI).abs() < 1e-7, "H={h}: {ed}");
            assert!((er - PI).abs() < 1e-9, "H={h}: {er}");
            assert!(energy_imaginary(&c).unwrap().abs() < 1e-7);
        }
    }

    #[test]
    fn cmc_profile_has_constant_mean_curvature() {
        let c = generate_cmc_profile(1.5, 1e-10).unwrap();
        let f = geometry_fields(&c).unwrap();
        for k in 0..c.len() {
            assert!(
                (f.mean_curvature[k] - 1.5).abs() < 1e-6,
                "{k}: {}",
                f.mean_curvature[k]
            );
            assert!(f.reduced[k].abs() < 1e-6);
        }
        assert!((f.n3[0] - 1.0).abs() < 1e-12);
        assert!((f.n3[c.len() - 1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn area_volume_and_willmore_match_the_family() {
        let h = 0.5;
        let c = generate_cmc_profile(h, 1e-10).unwrap();
        let s = CmcSphere::new(h).unwrap();
        let (a, v) = area_and_volume(&c).unwrap();
        assert!((a - s.area(Mode::ClosedForm).unwrap().value).abs() < 1e-6);
        assert!((v - s.volume(Mode::ClosedForm).unwrap().value).abs() < 1e-6);
        let w = willmore_direct(&c).unwrap();
        assert!((w - s.willmore(Mode::Quadrature).unwrap().value).abs() < 1e-6);
        let k = int_khat(&c).unwrap();
        assert!((k - s.int_khat_closed_form()).abs() < 1e-6);
    }

    #[test]
    fn zero_length_curve() {
        let c = ProfileCurve::new(
            vec![ProfileSample {
                s: 0.0,
                u: 0.0,
                v: 0.0,
                sigma: 0.0,
            }],
            Topology::Sphere,
        )
        .unwrap();
        assert_eq!(area_and_volume(&c).unwrap(), (0.0, 0.0));
        let e = energy_direct(&c).unwrap_err();
        assert!(e.to_string().contains("open meridian"));
    }

    #[test]
    fn report_carries_error_estimates() {
        let c = generate_cmc_profile(1.0, 1e-10).unwrap();
        let r = revolution_report(&c).unwrap();
        assert_eq!(r.chi, 2);
        assert!(r.e_direct.err < 1e-6);
        assert!(r.area.err.is_finite());
    }
}
