//! The Heisenberg group `Nil` with the left-invariant metric
//! `dx^2 + dy^2 + (dz - x dy)^2`.
//!
//! Points are stored in the matrix coordinates `(x, y, z)` of the unitriangular
//! parametrization. The left-invariant orthonormal frame is
//! `e1 = d/dx`, `e2 = d/dy + x d/dz`, `e3 = d/dz`, with `[e1, e2] = e3`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A point of `Nil` in matrix coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NilPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl NilPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Group product `self * other` of the unitriangular matrices.
    pub fn mul(&self, other: &NilPoint) -> NilPoint {
        NilPoint {
            x: self.x + other.x,
            y: self.y + other.y,
            z: self.z + other.z + self.x * other.y,
        }
    }

    pub fn inverse(&self) -> NilPoint {
        NilPoint {
            x: -self.x,
            y: -self.y,
            z: self.x * self.y - self.z,
        }
    }
}

/// Cylindrical coordinates `(rho, phi, h)`. `phi` is never reduced modulo 2π.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CylPoint {
    pub rho: f64,
    pub phi: f64,
    pub h: f64,
}

impl CylPoint {
    pub fn new(rho: f64, phi: f64, h: f64) -> Result<Self> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: rho,
                reason: "cylindrical radius must be finite and non-negative",
            });
        }
        Ok(Self { rho, phi, h })
    }
}

/// Components of a tangent vector in the cylindrical coordinate basis
/// `(d/drho, d/dphi, d/dh)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CylTangent {
    pub d_rho: f64,
    pub d_phi: f64,
    pub d_h: f64,
}

impl CylTangent {
    pub const RHO: CylTangent = CylTangent {
        d_rho: 1.0,
        d_phi: 0.0,
        d_h: 0.0,
    };
    pub const PHI: CylTangent = CylTangent {
        d_rho: 0.0,
        d_phi: 1.0,
        d_h: 0.0,
    };
    pub const H: CylTangent = CylTangent {
        d_rho: 0.0,
        d_phi: 0.0,
        d_h: 1.0,
    };

    pub fn new(d_rho: f64, d_phi: f64, d_h: f64) -> Self {
        Self { d_rho, d_phi, d_h }
    }
}

/// Components in the left-invariant frame `e1, e2, e3`, which is orthonormal.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameVector {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl FrameVector {
    pub const ZERO: FrameVector = FrameVector {
        a1: 0.0,
        a2: 0.0,
        a3: 0.0,
    };

    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self { a1, a2, a3 }
    }

    /// The basis vector `e_i`, `i` in `1..=3`.
    pub fn basis(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Self::new(1.0, 0.0, 0.0)),
            2 => Ok(Self::new(0.0, 1.0, 0.0)),
            3 => Ok(Self::new(0.0, 0.0, 1.0)),
            _ => Err(Error::IndexOutOfRange(format!(
                "frame index {i} not in 1..=3"
            ))),
        }
    }

    pub fn dot(&self, other: &FrameVector) -> f64 {
        self.a1 * other.a1 + self.a2 * other.a2 + self.a3 * other.a3
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn component(&self, i: usize) -> Result<f64> {
        match i {
            1 => Ok(self.a1),
            2 => Ok(self.a2),
            3 => Ok(self.a3),
            _ => Err(Error::IndexOutOfRange(format!(
                "frame index {i} not in 1..=3"
            ))),
        }
    }
}

impl Add for FrameVector {
    type Output = FrameVector;
    fn add(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.a1 + o.a1, self.a2 + o.a2, self.a3 + o.a3)
    }
}

impl Sub for FrameVector {
    type Output = FrameVector;
    fn sub(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.a1 - o.a1, self.a2 - o.a2, self.a3 - o.a3)
    }
}

impl Neg for FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        FrameVector::new(-self.a1, -self.a2, -self.a3)
    }
}

impl Mul<FrameVector> for f64 {
    type Output = FrameVector;
    fn mul(self, v: FrameVector) -> FrameVector {
        FrameVector::new(self * v.a1, self * v.a2, self * v.a3)
    }
}

/// `x = rho cos phi`, `y = rho sin phi`, `z = (rho^2/2) cos phi sin phi + h`.
pub fn cyl_to_cart(p: CylPoint) -> NilPoint {
    let (s, c) = p.phi.sin_cos();
    NilPoint {
        x: p.rho * c,
        y: p.rho * s,
        z: 0.5 * p.rho * p.rho * c * s + p.h,
    }
}

/// Bilinear form of `ds^2 = drho^2 - rho^2 dh dphi + rho^2 (4 + rho^2)/4 dphi^2 + dh^2`.
pub fn metric_cyl(p: CylPoint, a: CylTangent, b: CylTangent) -> f64 {
    let r2 = p.rho * p.rho;
    let g_phiphi = 0.25 * r2 * (4.0 + r2);
    let g_hphi = -0.5 * r2;
    a.d_rho * b.d_rho
        + g_phiphi * a.d_phi * b.d_phi
        + g_hphi * (a.d_h * b.d_phi + a.d_phi * b.d_h)
        + a.d_h * b.d_h
}

/// Frame components of a Cartesian tangent vector `(dx, dy, dz)` based at `p`,
/// read off the left-invariant coframe `(dx, dy, dz - x dy)`.
pub fn cart_to_frame(p: NilPoint, dx: f64, dy: f64, dz: f64) -> FrameVector {
    FrameVector::new(dx, dy, dz - p.x * dy)
}

/// The Cartesian form of the metric at `p` on two Cartesian tangent vectors.
pub fn metric_cart(p: NilPoint, a: [f64; 3], b: [f64; 3]) -> f64 {
    cart_to_frame(p, a[0], a[1], a[2]).dot(&cart_to_frame(p, b[0], b[1], b[2]))
}

/// Lie bracket of frame vectors: `[e1, e2] = e3`, every other pair commutes.
pub fn lie_bracket(i: usize, j: usize) -> Result<FrameVector> {
    FrameVector::basis(i)?;
    FrameVector::basis(j)?;
    Ok(match (i, j) {
        (1, 2) => FrameVector::new(0.0, 0.0, 1.0),
        (2, 1) => FrameVector::new(0.0, 0.0, -1.0),
        _ => FrameVector::ZERO,
    })
}

/// `∇_{e_i} e_j` for the left-invariant frame; the table is constant.
pub fn levi_civita(i: usize, j: usize) -> Result<FrameVector> {
    FrameVector::basis(i)?;
    FrameVector::basis(j)?;
    Ok(match (i, j) {
        (1, 2) => FrameVector::new(0.0, 0.0, 0.5),
        (2, 1) => FrameVector::new(0.0, 0.0, -0.5),
        (1, 3) | (3, 1) => FrameVector::new(0.0, -0.5, 0.0),
        (2, 3) | (3, 2) => FrameVector::new(0.5, 0.0, 0.0),
        _ => FrameVector::ZERO,
    })
}

/// Covariant derivative `∇_X Y` of two constant-coefficient frame fields.
pub fn covariant_frame(x: FrameVector, y: FrameVector) -> FrameVector {
    let xs = [x.a1, x.a2, x.a3];
    let ys = [y.a1, y.a2, y.a3];
    let mut out = FrameVector::ZERO;
    for (i, xi) in xs.iter().enumerate() {
        for (j, yj) in ys.iter().enumerate() {
            // indices are in range by construction
            let g = levi_civita(i + 1, j + 1).expect("frame index");
            out = out + (xi * yj) * g;
        }
    }
    out
}

/// Sectional curvature of `Nil` along a tangent plane whose unit normal has
/// third frame component `n3`: `1/4 - n3^2`.
pub fn tangent_sectional_curvature(n3: f64) -> Result<f64> {
    if !(n3.abs() <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "n3",
            value: n3,
            reason: "third component of a unit normal must satisfy |n3| <= 1",
        });
    }
    Ok(0.25 - n3 * n3)
}

/// Riemannian volume density in `(rho, phi, h)`: `sqrt(det g) = rho`.
pub fn volume_density_cyl(rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "cylindrical radius must be non-negative",
        });
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn cyl_to_cart_examples() {
        let p = cyl_to_cart(CylPoint::new(0.0, 1.3, 5.0).unwrap());
        assert_eq!(p, NilPoint::new(0.0, 0.0, 5.0));
        let p = cyl_to_cart(CylPoint::new(1.0, 0.0, 0.0).unwrap());
        assert_eq!(p, NilPoint::new(1.0, 0.0, 0.0));
        let p = cyl_to_cart(CylPoint::new(1.0, FRAC_PI_4, 0.0).unwrap());
        let s = 0.5_f64.sqrt();
        assert!((p.x - s).abs() < 1e-15 && (p.y - s).abs() < 1e-15);
        assert!((p.z - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cyl_point_rejects_negative_radius() {
        assert!(CylPoint::new(-1e-3, 0.0, 0.0).is_err());
    }

    #[test]
    fn metric_cyl_examples() {
        let p = CylPoint::new(2.0, 0.7, -1.0).unwrap();
        assert_eq!(metric_cyl(p, CylTangent::RHO, CylTangent::RHO), 1.0);
        assert_eq!(metric_cyl(p, CylTangent::PHI, CylTangent::PHI), 8.0);
        assert_eq!(metric_cyl(p, CylTangent::PHI, CylTangent::H), -2.0);
        assert_eq!(metric_cyl(p, CylTangent::H, CylTangent::H), 1.0);
    }

    #[test]
    fn levi_civita_table() {
        assert_eq!(levi_civita(1, 3).unwrap(), FrameVector::new(0.0, -0.5, 0.0));
        assert_eq!(levi_civita(3, 3).unwrap(), FrameVector::ZERO);
        assert!(levi_civita(0, 1).is_err());
        assert!(levi_civita(1, 4).is_err());
    }

    #[test]
    fn levi_civita_is_metric_and_torsion_free() {
        for i in 1..=3 {
            for j in 1..=3 {
                let t = levi_civita(i, j).unwrap() - levi_civita(j, i).unwrap();
                assert_eq!(t, lie_bracket(i, j).unwrap(), "torsion at ({i},{j})");
                for k in 1..=3 {
                    let ej = FrameVector::basis(j).unwrap();
                    let ek = FrameVector::basis(k).unwrap();
                    let m =
                        levi_civita(i, j).unwrap().dot(&ek) + ej.dot(&levi_civita(i, k).unwrap());
                    assert_eq!(m, 0.0, "metric compatibility at ({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn koszul_formula_reproduces_table() {
        // With an orthonormal constant frame:
        // 2<∇_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>
        for i in 1..=3 {
            for j in 1..=3 {
                for k in 1..=3 {
                    let (ei, ej, ek) = (
                        FrameVector::basis(i).unwrap(),
                        FrameVector::basis(j).unwrap(),
                        FrameVector::basis(k).unwrap(),
                    );
                    let rhs = lie_bracket(i, j).unwrap().dot(&ek)
                        - lie_bracket(j, k).unwrap().dot(&ei)
                        + lie_bracket(k, i).unwrap().dot(&ej);
                    let lhs = 2.0 * levi_civita(i, j).unwrap().dot(&ek);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn covariant_derivative_of_e3_along_normal_is_horizontal() {
        let n = FrameVector::new(0.3, -0.4, (1.0f64 - 0.25).sqrt());
        let d = covariant_frame(n, FrameVector::basis(3).unwrap());
        assert_eq!(d, FrameVector::new(0.5 * n.a2, -0.5 * n.a1, 0.0));
        assert!(n.dot(&d).abs() < 1e-16);
    }

    #[test]
    fn sectional_curvature_values() {
        assert_eq!(tangent_sectional_curvature(0.0).unwrap(), 0.25);
        assert_eq!(tangent_sectional_curvature(1.0).unwrap(), -0.75);
        assert_eq!(tangent_sectional_curvature(-1.0).unwrap(), -0.75);
        assert_eq!(tangent_sectional_curvature(0.5).unwrap(), 0.0);
        assert!(tangent_sectional_curvature(1.0 + 1e-9).is_err());
    }

    #[test]
    fn volume_density_values() {
        assert_eq!(volume_density_cyl(0.0).unwrap(), 0.0);
        assert_eq!(volume_density_cyl(2.0).unwrap(), 2.0);
        assert!(volume_density_cyl(-0.1).is_err());
    }

    #[test]
    fn volume_density_is_sqrt_of_metric_determinant() {
        for &rho in &[0.0, 0.3, 1.0, 2.0, 7.5] {
            let p = CylPoint::new(rho, 0.4, 0.1).unwrap();
            let b = [CylTangent::RHO, CylTangent::PHI, CylTangent::H];
            let g = |i: usize, j: usize| metric_cyl(p, b[i], b[j]);
            let det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
            assert!((det.sqrt() - volume_density_cyl(rho).unwrap()).abs() < 1e-12 * (1.0 + rho));
        }
    }

    #[test]
    fn frame_is_orthonormal_in_cartesian_form() {
        // e1 = d/dx, e2 = d/dy + x d/dz, e3 = d/dz
        let p = NilPoint::new(1.7, -0.4, 3.0);
        let e = [[1.0, 0.0, 0.0], [0.0, 1.0, p.x], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((metric_cart(p, e[i], e[j]) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn group_law_is_associative_with_inverse() {
        let a = NilPoint::new(0.3, -1.2, 2.0);
        let b = NilPoint::new(-0.7, 0.5, 1.1);
        let c = NilPoint::new(2.0, 0.25, -3.0);
        let l = a.mul(&b).mul(&c);
        let r = a.mul(&b.mul(&c));
        assert!((l.z - r.z).abs() < 1e-14);
        let id = a.mul(&a.inverse());
        assert!(id.x.abs() < 1e-15 && id.y.abs() < 1e-15 && id.z.abs() < 1e-15);
    }

    #[test]
    fn phi_is_not_normalized() {
        let a = cyl_to_cart(CylPoint::new(1.5, 0.3, 0.2).unwrap());
        let b = cyl_to_cart(CylPoint::new(1.5, 0.3 + 4.0 * PI, 0.2).unwrap());
        assert!((a.x - b.x).abs() < 1e-14 && (a.z - b.z).abs() < 1e-14);
        assert_eq!(CylPoint::new(1.0, 9.0, 0.0).unwrap().phi, 9.0);
    }
}
