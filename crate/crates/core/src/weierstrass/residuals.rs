//! Pointwise residuals of the representation identities.

use num_complex::Complex64;
use serde::Serialize;

use super::grid::{FieldOps, SpinorGrid};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Per-node residual fields (NaN where not evaluable).
#[derive(Debug, Clone)]
pub struct ResidualFields {
    /// `max(|∂ψ₂ + Uψ₁|, |∂̄ψ₁ − Vψ₂|)`.
    pub dirac: Vec<f64>,
    /// `|∂ψ₁ − (α_z ψ₁ + A e^{−α} ψ₂ − (i/2) ψ₁² ψ̄₂)|`.
    pub derivational_psi1: Vec<f64>,
    /// `|∂̄ψ₂ − (−Ā e^{−α} ψ₁ + α_z̄ ψ₂ − (i/2) ψ̄₁ ψ₂²)|`.
    pub derivational_psi2: Vec<f64>,
    /// `|∂n₃ − ((−H + i/2) Z₃ − 2e^{−2α} A Z̄₃)|`.
    pub normal_derivative: Vec<f64>,
    /// `|e^{2α}(1 − n₃²) − 4|Z₃|²| / e^{2α}`.
    pub metric: Vec<f64>,
    /// `|∂Z̄₃ − (2H − i)|Z₃|² n₃/(1 − n₃²)|`.
    pub z3_derivative: Vec<f64>,
    /// `|∂n₃ − (−H + i/2 + (1 − n₃²)/(4H + 2i)) Z₃|`, valid where `Ã = 0`.
    pub normal_derivative_cmc: Vec<f64>,
    /// `|Ã|`.
    pub atilde: Vec<f64>,
    /// `||n| − 1|`.
    pub normal_unit: Vec<f64>,
    /// `|Z₁² + Z₂² + Z₃²|`.
    pub isotropy: Vec<f64>,
}

/// Sup norms of [`ResidualFields`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    pub dirac: f64,
    pub derivational_psi1: f64,
    pub derivational_psi2: f64,
    pub normal_derivative: f64,
    pub metric: f64,
    pub z3_derivative: f64,
    pub normal_derivative_cmc: f64,
    pub atilde: f64,
    pub normal_unit: f64,
    pub isotropy: f64,
    pub evaluated_nodes: usize,
}

impl IdentityResiduals {
    /// `(name, value)` pairs in a fixed order.
    pub fn named(&self) -> [(&'static str, f64); 10] {
        [
            ("dirac", self.dirac),
            ("derivational_psi1", self.derivational_psi1),
            ("derivational_psi2", self.derivational_psi2),
            ("normal_derivative", self.normal_derivative),
            ("metric", self.metric),
            ("z3_derivative", self.z3_derivative),
            ("normal_derivative_cmc", self.normal_derivative_cmc),
            ("atilde", self.atilde),
            ("normal_unit", self.normal_unit),
            ("isotropy", self.isotropy),
        ]
    }
}

fn sup(values: &[f64], keep: &dyn Fn(usize) -> bool) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|(k, v)| v.is_finite() && keep(*k))
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max)
}

impl ResidualFields {
    /// Sup norms over nodes accepted by `keep`.
    pub fn sup_where(&self, keep: &dyn Fn(usize) -> bool) -> IdentityResiduals {
        let evaluated_nodes = (0..self.dirac.len())
            .filter(|k| {
                keep(*k) && self.derivational_psi1[*k].is_finite() && self.dirac[*k].is_finite()
            })
            .count();
        IdentityResiduals {
            dirac: sup(&self.dirac, keep),
            derivational_psi1: sup(&self.derivational_psi1, keep),
            derivational_psi2: sup(&self.derivational_psi2, keep),
            normal_derivative: sup(&self.normal_derivative, keep),
            metric: sup(&self.metric, keep),
            z3_derivative: sup(&self.z3_derivative, keep),
            normal_derivative_cmc: sup(&self.normal_derivative_cmc, keep),
            atilde: sup(&self.atilde, keep),
            normal_unit: sup(&self.normal_unit, keep),
            isotropy: sup(&self.isotropy, keep),
            evaluated_nodes,
        }
    }

    pub fn sup(&self) -> IdentityResiduals {
        self.sup_where(&|_| true)
    }
}

/// Residual fields of every identity on a dressed grid.
pub fn identity_residual_fields(grid: &SpinorGrid) -> Result<ResidualFields> {
    if !grid.dressed {
        return Err(Error::MissingField("dressing (U, A, H)"));
    }
    let n = grid.chart.len();
    let alpha_c: Vec<Complex64> = grid.alpha.iter().map(|a| Complex64::new(*a, 0.0)).collect();
    let n3 = grid.n3();
    let n3_c: Vec<Complex64> = n3.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let z3_bar: Vec<Complex64> = grid.z3.iter().map(|z| z.conj()).collect();

    let d_psi1 = grid.d_z(&grid.psi1, true);
    let dbar_psi1 = grid.d_zbar(&grid.psi1, true);
    let d_psi2 = grid.d_z(&grid.psi2, true);
    let dbar_psi2 = grid.d_zbar(&grid.psi2, true);
    let d_alpha = grid.d_z(&alpha_c, false);
    let dbar_alpha = grid.d_zbar(&alpha_c, false);
    let d_n3 = grid.d_z(&n3_c, false);
    let d_z3_bar = grid.d_z(&z3_bar, false);

    let mut f = ResidualFields {
        dirac: vec![f64::NAN; n],
        derivational_psi1: vec![f64::NAN; n],
        derivational_psi2: vec![f64::NAN; n],
        normal_derivative: vec![f64::NAN; n],
        metric: vec![f64::NAN; n],
        z3_derivative: vec![f64::NAN; n],
        normal_derivative_cmc: vec![f64::NAN; n],
        atilde: vec![f64::NAN; n],
        normal_unit: vec![f64::NAN; n],
        isotropy: vec![f64::NAN; n],
    };
    for k in 0..n {
        if !grid.valid[k] {
            continue;
        }
        let (p1, p2) = (grid.psi1[k], grid.psi2[k]);
        let (u, v) = (grid.u[k], grid.u[k]);
        let a = grid.a[k];
        let h = grid.h[k];
        let ea = grid.alpha[k].exp();
        let e2a = ea * ea;
        let z3 = grid.z3[k];
        let m = n3[k];
        f.dirac[k] = (d_psi2[k] + u * p1)
            .norm()
            .max((dbar_psi1[k] - v * p2).norm());
        f.derivational_psi1[k] =
            (d_psi1[k] - (d_alpha[k] * p1 + a / ea * p2 - 0.5 * I * p1 * p1 * p2.conj())).norm();
        f.derivational_psi2[k] = (dbar_psi2[k]
            - (-a.conj() / ea * p1 + dbar_alpha[k] * p2 - 0.5 * I * p1.conj() * p2 * p2))
            .norm();
        f.normal_derivative[k] =
            (d_n3[k] - ((-h + 0.5 * I) * z3 - 2.0 / e2a * a * z3.conj())).norm();
        f.metric[k] = (e2a * (1.0 - m * m) - 4.0 * z3.norm_sqr()).abs() / e2a;
        f.z3_derivative[k] = (d_z3_bar[k]
            - Complex64::new(2.0 * h, -1.0) * z3.norm_sqr() * m / (1.0 - m * m))
            .norm();
        let coef = -h + 0.5 * I + (1.0 - m * m) / Complex64::new(4.0 * h, 2.0);
        f.normal_derivative_cmc[k] = (d_n3[k] - coef * z3).norm();
        f.atilde[k] = grid.atilde[k].norm();
        f.normal_unit[k] = (grid.normal[k].norm() - 1.0).abs();
        let (z1, z2) = (grid.z1[k], grid.z2[k]);
        f.isotropy[k] = (z1 * z1 + z2 * z2 + z3 * z3).norm();
    }
    Ok(f)
}

/// Sup norms of every identity residual on a dressed grid.
pub fn identity_residuals(grid: &SpinorGrid) -> Result<IdentityResiduals> {
    Ok(identity_residual_fields(grid)?.sup())
}

/// `Δn₃ + 2n₃|∇n₃|²/(1 − n₃²)` from values and flat derivatives at one point.
pub fn main_equation_pointwise(n3: f64, n3_x: f64, n3_y: f64, laplacian: f64) -> Result<f64> {
    if !(n3.abs() < 1.0) {
        return Err(Error::InvalidParameter {
            name: "n3",
            value: n3,
            reason: "|n3| = 1 is a coordinate singularity of the main equation",
        });
    }
    Ok(laplacian + 2.0 * n3 * (n3_x * n3_x + n3_y * n3_y) / (1.0 - n3 * n3))
}

/// Finite-difference residual of the main equation for a sampled `n₃` field;
/// NaN where `|n₃| ≥ 1` or the stencil is unavailable.
pub fn main_equation_residual(ops: &FieldOps, n3: &[f64]) -> Result<Vec<f64>> {
    if n3.len() != ops.chart.len() {
        return Err(Error::IndexOutOfRange(format!(
            "field has {} values for {} nodes",
            n3.len(),
            ops.chart.len()
        )));
    }
    let masked: Vec<f64> = n3
        .iter()
        .map(|v| if v.abs() < 1.0 { *v } else { f64::NAN })
        .collect();
    let c: Vec<Complex64> = masked.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let nx = ops.partial(&c, 0, false);
    let ny = ops.partial(&c, 1, false);
    let lap = ops.laplacian(&masked);
    Ok((0..n3.len())
        .map(|k| main_equation_pointwise(masked[k], nx[k].re, ny[k].re, lap[k]).unwrap_or(f64::NAN))
        .collect())
}

/// `e^{2α} = 4/(1 − n₃²) · (16H² + 4)/(4H² + n₃²)² · |∂n₃|²`.
pub fn metric_from_n3(n3: f64, dn3_dz: Complex64, h: f64) -> Result<f64> {
    crate::error::require_positive("H", h)?;
    if !(n3.abs() < 1.0) {
        return Err(Error::InvalidParameter {
            name: "n3",
            value: n3,
            reason: "metric reconstruction needs |n3| < 1",
        });
    }
    let d2 = dn3_dz.norm_sqr();
    if !(d2 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dn3_dz",
            value: d2,
            reason: "vanishing derivative of n3 (umbilic point)",
        });
    }
    let h2 = h * h;
    Ok(4.0 / (1.0 - n3 * n3) * (16.0 * h2 + 4.0) / (4.0 * h2 + n3 * n3).powi(2) * d2)
}

/// [`metric_from_n3`] over a sampled field, with `∂n₃` by finite differences.
pub fn metric_from_n3_field(ops: &FieldOps, n3: &[f64], h: f64) -> Result<Vec<f64>> {
    crate::error::require_positive("H", h)?;
    let c: Vec<Complex64> = n3.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let d = ops.d_z(&c, false);
    Ok(n3
        .iter()
        .zip(&d)
        .map(|(m, dz)| metric_from_n3(*m, *dz, h).unwrap_or(f64::NAN))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::chart::{Chart, CmcSphereImmersion};
    use super::*;

    #[test]
    fn constant_field_has_zero_residual() {
        let chart = Chart::planar_square(1.0, 11).unwrap();
        let ops = FieldOps::new(chart, 4).unwrap();
        let r = main_equation_residual(&ops, &vec![0.3; chart.len()]).unwrap();
        assert!(r.iter().filter(|v| v.is_finite()).all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn linear_field() {
        // n3 = x: Δ = 0, |∇|² = 1, residual 2x/(1 − x²)
        let chart = Chart::planar(-0.5, 0.5, -0.5, 0.5, 21, 21).unwrap();
        let ops = FieldOps::new(chart, 2).unwrap();
        let n3: Vec<f64> = (0..chart.len())
            .map(|k| chart.node(chart.coords(k).0, 0).0)
            .collect();
        let r = main_equation_residual(&ops, &n3).unwrap();
        for (k, v) in r.iter().enumerate() {
            if v.is_finite() {
                let x = n3[k];
                assert!((v - 2.0 * x / (1.0 - x * x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn metric_reconstruction_with_exact_derivative() {
        let h = 0.5;
        let s = crate::cmc_family::CmcSphere::new(h).unwrap();
        for (x, y) in [(0.3, 0.2), (1.0, 0.5), (-0.7, 1.1)] {
            let z = Complex64::new(x, y);
            let r2 = z.norm_sqr();
            let n3 = (r2 - 1.0) / (r2 + 1.0);
            let dn3 = 2.0 * z.conj() / (r2 + 1.0).powi(2);
            let m = metric_from_n3(n3, dn3, h).unwrap();
            let e = s.conformal_factor(r2.sqrt());
            assert!((m - e).abs() < 1e-10 * e);
        }
    }

    #[test]
    fn sphere_identities_hold() {
        let imm = CmcSphereImmersion::new(0.6).unwrap();
        let chart = Chart::planar(0.3, 1.3, -0.5, 0.5, 41, 41).unwrap();
        let mut g = SpinorGrid::from_immersion(chart, &imm, Some(0.6), 4).unwrap();
        g.dress().unwrap();
        let r = identity_residuals(&g).unwrap();
        for (name, v) in r.named() {
            assert!(v < 1e-5, "{name} = {v}");
        }
        assert!(r.metric < 1e-12);
    }
}
