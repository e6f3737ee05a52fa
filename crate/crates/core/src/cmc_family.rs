//! The rotationally symmetric cmc spheres `S_H` of `Nil` in closed form.
//!
//! The sphere is parametrized by a conformal radial coordinate `r ∈ [0, ∞]`
//! (south pole at `r = 0`, equator at `r = 1`) and the rotation angle.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{require_positive, Result};
use crate::numerics::{integrate_semi_infinite_with, QuadOptions, QuadratureResult};

/// Quadrature settings used for every family integral.
pub const FAMILY_QUAD: QuadOptions = QuadOptions {
    abs_tol: 1e-15,
    rel_tol: 1e-12,
    max_subdivisions: 4000,
};

/// How a family functional is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ClosedForm,
    Quadrature,
}

/// Cylindrical data of the generating curve at one value of `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereProfilePoint {
    pub r: f64,
    pub rho: f64,
    pub psi: f64,
    pub h: f64,
}

/// `d/dr` of the profile functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileDerivative {
    pub rho: f64,
    pub psi: f64,
    pub h: f64,
}

/// The sphere `S_H` of constant mean curvature `H > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmcSphere {
    #[serde(rename = "H")]
    h: f64,
    #[serde(skip)]
    quad: QuadOptions,
}

/// Third frame component of the unit normal at radial parameter `r`.
pub fn n3_of_r(r: f64) -> f64 {
    if r.is_infinite() {
        return 1.0;
    }
    let r2 = r * r;
    (r2 - 1.0) / (r2 + 1.0)
}

fn closed_form(value: f64) -> QuadratureResult {
    QuadratureResult {
        value,
        err_estimate: 0.0,
        evaluations: 1,
    }
}

impl CmcSphere {
    pub fn new(h: f64) -> Result<Self> {
        require_positive("H", h)?;
        Ok(Self {
            h,
            quad: FAMILY_QUAD,
        })
    }

    /// Replaces the quadrature settings (default [`FAMILY_QUAD`]).
    pub fn with_quadrature(self, quad: QuadOptions) -> Self {
        Self { quad, ..self }
    }

    pub fn quadrature(&self) -> QuadOptions {
        self.quad
    }

    pub fn mean_curvature(&self) -> f64 {
        self.h
    }

    /// `(r² − 1)² + 4H²(r² + 1)²`, the common denominator of the family.
    fn denom(&self, r: f64) -> f64 {
        let r2 = r * r;
        (r2 - 1.0).powi(2) + 4.0 * self.h * self.h * (r2 + 1.0).powi(2)
    }

    /// `π/2 − arctan((4H² − 1)/(4H))`, the angle appearing in every closed form.
    pub fn theta(&self) -> f64 {
        let h = self.h;
        FRAC_PI_2 - ((4.0 * h * h - 1.0) / (4.0 * h)).atan()
    }

    /// Conformal factor `e^{2α}` of the induced metric `e^{2α}(dr² + r²dθ²)`.
    pub fn conformal_factor(&self, r: f64) -> f64 {
        if r.is_infinite() {
            return 0.0;
        }
        let h2 = self.h * self.h;
        let d = self.denom(r);
        16.0 * (1.0 + 4.0 * h2) * (1.0 + r * r).powi(2) / (d * d)
    }

    pub fn profile(&self, r: f64) -> SphereProfilePoint {
        let h = self.h;
        let h2 = h * h;
        if r.is_infinite() {
            return SphereProfilePoint {
                r,
                rho: 0.0,
                psi: FRAC_PI_2,
                h: (1.0 + 4.0 * h2) / (4.0 * h2) * FRAC_PI_2,
            };
        }
        let r2 = r * r;
        let rho = 4.0 * r / self.denom(r).sqrt();
        let hden =
            (r2 - 1.0).powi(2) + 16.0 * h2 * h2 * (1.0 + r2).powi(2) + 8.0 * h2 * (1.0 + r2 * r2);
        let height = (1.0 + 4.0 * h2) / (4.0 * h2)
            * (-4.0 * h * (1.0 - r2 + 4.0 * h2 * (1.0 + r2)) / hden
                + ((r2 - 1.0 + 4.0 * h2 * (r2 + 1.0)) / (4.0 * h)).atan());
        let psi = ((4.0 * h2 - 1.0 + (1.0 + 4.0 * h2) * r2) / (4.0 * h)).atan();
        SphereProfilePoint {
            r,
            rho,
            psi,
            h: height,
        }
    }

    pub fn profile_derivative(&self, r: f64) -> ProfileDerivative {
        let h = self.h;
        let h2 = h * h;
        let r2 = r * r;
        let d = self.denom(r);
        let dd = 4.0 * r * (r2 - 1.0) + 16.0 * h2 * r * (r2 + 1.0);
        ProfileDerivative {
            rho: 4.0 / d.sqrt() - 2.0 * r * dd / d.powf(1.5),
            psi: 8.0 * h * r / d,
            h: 16.0 * h * (1.0 + 4.0 * h2) * r * (1.0 + r2).powi(2) / (d * d),
        }
    }

    fn integrate(&self, f: impl Fn(f64) -> f64) -> Result<QuadratureResult> {
        integrate_semi_infinite_with(f, &self.quad)
    }

    pub fn area(&self, mode: Mode) -> Result<QuadratureResult> {
        let h = self.h;
        match mode {
            Mode::ClosedForm => Ok(closed_form(
                2.0 * PI * (1.0 / (h * h) + (1.0 + 4.0 * h * h) / (4.0 * h.powi(3)) * self.theta()),
            )),
            Mode::Quadrature => {
                let q = self.integrate(|r| r * self.conformal_factor(r))?;
                Ok(scale(q, 2.0 * PI))
            }
        }
    }

    pub fn volume(&self, mode: Mode) -> Result<QuadratureResult> {
        let h = self.h;
        let h2 = h * h;
        match mode {
            Mode::ClosedForm => Ok(closed_form(
                PI / (16.0 * h2 * h2)
                    * (4.0 * h * (4.0 * h2 + 3.0)
                        - (4.0 * h2 + 1.0) * (4.0 * h2 - 3.0) * self.theta()),
            )),
            Mode::Quadrature => {
                let q = self.integrate(|r| {
                    let d = self.denom(r);
                    256.0 * h * (1.0 + 4.0 * h2) * r.powi(3) * (1.0 + r * r).powi(2) / (d * d * d)
                })?;
                Ok(scale(q, PI))
            }
        }
    }

    /// `V − 4π/H + (4H² − 3)/(8H)·A` from the quadrature modes.
    pub fn isoperimetric_residual(&self) -> Result<f64> {
        self.isoperimetric_residual_with(4.0 * PI / self.h)
    }

    /// Same combination with the constant `2π/H`, the value consistent with the
    /// closed forms for area and volume.
    pub fn isoperimetric_residual_corrected(&self) -> Result<f64> {
        self.isoperimetric_residual_with(2.0 * PI / self.h)
    }

    fn isoperimetric_residual_with(&self, constant: f64) -> Result<f64> {
        let h = self.h;
        let a = self.area(Mode::Quadrature)?.value;
        let v = self.volume(Mode::Quadrature)?.value;
        Ok(v - constant + (4.0 * h * h - 3.0) / (8.0 * h) * a)
    }

    /// `E = (π/2)∫(H² − n₃²/4) e^{2α} r dr`.
    pub fn spinor_energy(&self) -> Result<QuadratureResult> {
        let h2 = self.h * self.h;
        let q = self.integrate(|r| {
            let n3 = n3_of_r(r);
            (h2 - 0.25 * n3 * n3) * self.conformal_factor(r) * r
        })?;
        Ok(scale(q, FRAC_PI_2))
    }

    /// `∫ K̂ dμ` with `K̂ = 1/4 − n₃²`.
    pub fn int_khat(&self) -> Result<QuadratureResult> {
        let q = self.integrate(|r| {
            let n3 = n3_of_r(r);
            (0.25 - n3 * n3) * self.conformal_factor(r) * r
        })?;
        Ok(scale(q, 2.0 * PI))
    }

    /// `16π − (4H² − 1/4)·A(H)`, the closed-form value of `∫ K̂ dμ`.
    pub fn int_khat_closed_form(&self) -> f64 {
        16.0 * PI
            - (4.0 * self.h * self.h - 0.25)
                * self.area(Mode::ClosedForm).expect("closed form").value
    }

    /// `W = ∫(H² + K̂) dμ`.
    pub fn willmore(&self, mode: Mode) -> Result<QuadratureResult> {
        let h = self.h;
        let h2 = h * h;
        match mode {
            Mode::ClosedForm => Ok(closed_form(
                10.0 * PI + PI / (2.0 * h2)
                    - PI * (1.0 + 4.0 * h2) * (3.0 * h2 - 0.25) / (2.0 * h2 * h) * self.theta(),
            )),
            Mode::Quadrature => {
                let q = self.integrate(|r| {
                    let n3 = n3_of_r(r);
                    (h2 + 0.25 - n3 * n3) * self.conformal_factor(r) * r
                })?;
                Ok(scale(q, 2.0 * PI))
            }
        }
    }
}

fn scale(q: QuadratureResult, c: f64) -> QuadratureResult {
    QuadratureResult {
        value: c * q.value,
        err_estimate: c.abs() * q.err_estimate,
        evaluations: q.evaluations,
    }
}

pub fn conformal_factor(h: f64, r: f64) -> Result<f64> {
    Ok(CmcSphere::new(h)?.conformal_factor(r))
}

pub fn profile(h: f64, r: f64) -> Result<SphereProfilePoint> {
    Ok(CmcSphere::new(h)?.profile(r))
}

pub fn area(h: f64, mode: Mode) -> Result<QuadratureResult> {
    CmcSphere::new(h)?.area(mode)
}

pub fn volume(h: f64, mode: Mode) -> Result<QuadratureResult> {
    CmcSphere::new(h)?.volume(mode)
}

pub fn isoperimetric_residual(h: f64) -> Result<f64> {
    CmcSphere::new(h)?.isoperimetric_residual()
}

pub fn spinor_energy(h: f64) -> Result<QuadratureResult> {
    CmcSphere::new(h)?.spinor_energy()
}

pub fn willmore(h: f64, mode: Mode) -> Result<QuadratureResult> {
    CmcSphere::new(h)?.willmore(mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_component() {
        assert_eq!(n3_of_r(0.0), -1.0);
        assert_eq!(n3_of_r(1.0), 0.0);
        assert!((n3_of_r(1e6) - 1.0).abs() < 1e-11);
        assert_eq!(n3_of_r(f64::INFINITY), 1.0);
    }

    #[test]
    fn conformal_factor_values() {
        assert!((conformal_factor(0.5, 0.0).unwrap() - 8.0).abs() < 1e-14);
        for h in [0.3, 1.0, 2.5] {
            // at the equator the denominator collapses to (16H²)²
            let direct = 16.0 * (1.0 + 4.0 * h * h) * 4.0 / (16.0f64 * h * h).powi(2);
            assert!((conformal_factor(h, 1.0).unwrap() - direct).abs() < 1e-13 * direct);
        }
        assert!(conformal_factor(0.0, 1.0).is_err());
    }

    #[test]
    fn equator_values_at_half() {
        let p = profile(0.5, 1.0).unwrap();
        assert!((p.rho - 2.0).abs() < 1e-15);
        assert!((p.psi - PI / 4.0).abs() < 1e-15);
        assert!((p.h - (PI / 2.0 - 1.0)).abs() < 1e-15);
        assert!(profile(-1.0, 1.0).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = CmcSphere::new(0.7).unwrap();
        for r in [0.2, 0.9, 1.0, 1.7, 4.0] {
            let e = 1e-5;
            let (a, b) = (s.profile(r + e), s.profile(r - e));
            let d = s.profile_derivative(r);
            assert!(((a.rho - b.rho) / (2.0 * e) - d.rho).abs() < 1e-8);
            assert!(((a.psi - b.psi) / (2.0 * e) - d.psi).abs() < 1e-8);
            assert!(((a.h - b.h) / (2.0 * e) - d.h).abs() < 1e-8);
        }
    }

    #[test]
    fn half_area_spot_value() {
        let a = area(0.5, Mode::ClosedForm).unwrap().value;
        assert!((a - (8.0 * PI + 4.0 * PI * PI)).abs() < 1e-12);
        let q = area(0.5, Mode::Quadrature).unwrap().value;
        assert!((a - q).abs() < 1e-9);
    }

    #[test]
    fn corrected_isoperimetric_relation_holds() {
        for h in [0.1, 1.0, 10.0] {
            let s = CmcSphere::new(h).unwrap();
            assert!(s.isoperimetric_residual_corrected().unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn energy_is_pi() {
        for h in [0.1, 1.0, 10.0] {
            assert!((spinor_energy(h).unwrap().value - PI).abs() < 1e-8);
        }
    }

    #[test]
    fn willmore_closed_form_matches_quadrature() {
        for h in [0.5, 1.0, 2.0] {
            let c = willmore(h, Mode::ClosedForm).unwrap().value;
            let q = willmore(h, Mode::Quadrature).unwrap().value;
            assert!((c - q).abs() < 1e-8, "H={h}: {c} vs {q}");
        }
    }
}
