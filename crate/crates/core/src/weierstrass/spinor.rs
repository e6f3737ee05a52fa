//! Pointwise algebra of the spinor representation.

use num_complex::Complex64;

use super::chart::ImmersionJet;
use crate::error::{Error, Result};
use crate::nil_geometry::{cart_to_frame, FrameVector};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The potentials `U = V` of the Dirac system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValue {
    pub u: Complex64,
    pub v: Complex64,
}

/// Components `Z_k` of `f⁻¹ f_z` in the left-invariant frame, with `∂ = ½(∂x − i∂y)`.
pub fn frame_components(jet: &ImmersionJet) -> Result<[Complex64; 3]> {
    let p = jet.point;
    let ax = cart_to_frame(p, jet.dx[0], jet.dx[1], jet.dx[2]);
    let ay = cart_to_frame(p, jet.dy[0], jet.dy[1], jet.dy[2]);
    let z = [
        0.5 * Complex64::new(ax.a1, -ay.a1),
        0.5 * Complex64::new(ax.a2, -ay.a2),
        0.5 * Complex64::new(ax.a3, -ay.a3),
    ];
    if z.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::DegenerateNode(format!(
            "f_z = 0 at ({}, {}, {})",
            p.x, p.y, p.z
        )));
    }
    Ok(z)
}

/// `|Z₁² + Z₂² + Z₃²|` relative to `Σ|Z_k|²`.
pub fn isotropy_defect(z: &[Complex64; 3]) -> f64 {
    let s = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    let n: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    if n == 0.0 {
        0.0
    } else {
        s.norm() / n
    }
}

/// `Z(ψ)`.
pub fn z_from_spinor(psi1: Complex64, psi2: Complex64) -> [Complex64; 3] {
    let p2b = psi2.conj();
    [
        0.5 * I * (p2b * p2b + psi1 * psi1),
        0.5 * (p2b * p2b - psi1 * psi1),
        psi1 * p2b,
    ]
}

/// Recover `(ψ₁, ψ₂)` up to a common sign from an isotropic triple.
///
/// `ψ₁² = −(Z₂ + iZ₁)` and `ψ̄₂² = Z₂ − iZ₁`; the relative sign is the one
/// that reproduces `Z₃ = ψ₁ψ̄₂`.
pub fn spinor_from_z(z: &[Complex64; 3], tol: f64) -> Result<(Complex64, Complex64)> {
    let defect = isotropy_defect(z);
    if !(defect <= tol) {
        return Err(Error::IsotropyViolated(defect));
    }
    let psi1 = (-(z[1] + I * z[0])).sqrt();
    let mut p2b = (z[1] - I * z[0]).sqrt();
    if (psi1 * p2b - z[2]).norm() > (psi1 * p2b + z[2]).norm() {
        p2b = -p2b;
    }
    Ok((psi1, p2b.conj()))
}

/// `e^α = |ψ₁|² + |ψ₂|²`.
pub fn exp_alpha(psi1: Complex64, psi2: Complex64) -> f64 {
    psi1.norm_sqr() + psi2.norm_sqr()
}

/// Unit normal in the left-invariant frame.
pub fn normal(psi1: Complex64, psi2: Complex64) -> FrameVector {
    let ea = exp_alpha(psi1, psi2);
    let p = psi1 * psi2;
    let pb = p.conj();
    let a1 = (I * (p - pb)).re;
    let a2 = -(p + pb).re;
    let a3 = psi2.norm_sqr() - psi1.norm_sqr();
    FrameVector::new(a1 / ea, a2 / ea, a3 / ea)
}

/// `U = V = (H/2)e^α + (i/4)(|ψ₂|² − |ψ₁|²)`.
pub fn potential(h: f64, psi1: Complex64, psi2: Complex64) -> PotentialValue {
    let u = Complex64::new(
        0.5 * h * exp_alpha(psi1, psi2),
        0.25 * (psi2.norm_sqr() - psi1.norm_sqr()),
    );
    PotentialValue { u, v: u }
}

/// `Ã = A + Z₃²/(2H + i)`.
pub fn atilde(a: Complex64, z3: Complex64, h: f64) -> Complex64 {
    a + z3 * z3 / Complex64::new(2.0 * h, 1.0)
}
