//! Discrete conformal charts and immersions sampled on them.

use num_complex::Complex64;

use crate::cmc_family::CmcSphere;
use crate::error::{Error, Result};
use crate::nil_geometry::{cyl_to_cart, CylPoint, NilPoint};

/// Geometry of the parameter domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    /// Rectangle in the plane `z = x + iy`; nodes within three steps of
    /// `z = 0` are excluded.
    Planar,
    /// Cylinder `ζ = ξ + iθ` with `z = e^ζ`, periodic in `θ ∈ [0, 2π)`.
    Cylinder,
}

/// Rectangular node lattice; node `(i, j)` sits at `(x0 + i·step_x, y0 + j·step_y)`
/// and is stored at index `i·ny + j`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Chart {
    pub kind: ChartKind,
    pub x0: f64,
    pub y0: f64,
    pub nx: usize,
    pub ny: usize,
    pub step_x: f64,
    pub step_y: f64,
}

impl Chart {
    pub fn planar(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 || !(x1 > x0) || !(y1 > y0) {
            return Err(Error::GridTooCoarse(format!(
                "planar chart needs at least 2x2 nodes on a non-empty rectangle, got {nx}x{ny}"
            )));
        }
        Ok(Self {
            kind: ChartKind::Planar,
            x0,
            y0,
            nx,
            ny,
            step_x: (x1 - x0) / (nx - 1) as f64,
            step_y: (y1 - y0) / (ny - 1) as f64,
        })
    }

    /// Square `[-half, half]²` with `n × n` nodes.
    pub fn planar_square(half: f64, n: usize) -> Result<Self> {
        Self::planar(-half, half, -half, half, n, n)
    }

    pub fn cylinder(xi0: f64, xi1: f64, nxi: usize, ntheta: usize) -> Result<Self> {
        if nxi < 2 || ntheta < 4 || !(xi1 > xi0) {
            return Err(Error::GridTooCoarse(format!(
                "cylinder chart needs at least 2x4 nodes, got {nxi}x{ntheta}"
            )));
        }
        Ok(Self {
            kind: ChartKind::Cylinder,
            x0: xi0,
            y0: 0.0,
            nx: nxi,
            ny: ntheta,
            step_x: (xi1 - xi0) / (nxi - 1) as f64,
            step_y: std::f64::consts::TAU / ntheta as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.ny, idx % self.ny)
    }

    /// Chart coordinates of a node.
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x0 + i as f64 * self.step_x,
            self.y0 + j as f64 * self.step_y,
        )
    }

    pub fn periodic_y(&self) -> bool {
        self.kind == ChartKind::Cylinder
    }

    /// Planar point `z` for chart coordinates `(x, y)`, and `dz/d(chart)`.
    pub fn to_plane(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        match self.kind {
            ChartKind::Planar => (Complex64::new(x, y), Complex64::new(1.0, 0.0)),
            ChartKind::Cylinder => {
                let z = Complex64::new(x, y).exp();
                (z, z)
            }
        }
    }

    /// Whether a node is excluded a priori (the coordinate singularity at `z = 0`).
    pub fn excluded(&self, i: usize, j: usize) -> bool {
        match self.kind {
            ChartKind::Planar => {
                let (x, y) = self.node(i, j);
                x.hypot(y) < 3.0 * self.step_x.max(self.step_y)
            }
            ChartKind::Cylinder => false,
        }
    }

    /// Index of the node nearest the chart centre, used as the continuation seed.
    pub fn center(&self) -> usize {
        self.index(self.nx / 2, self.ny / 2)
    }

    /// Cartesian derivatives of `f` along the chart coordinates, given those along
    /// the planar coordinates at the same point.
    pub fn pull_back_jet(&self, jet: ImmersionJet, dzdc: Complex64) -> ImmersionJet {
        // ∂/∂ξ = Re(dz/dζ)∂x + Im(dz/dζ)∂y, ∂/∂θ = −Im(dz/dζ)∂x + Re(dz/dζ)∂y
        let (a, b) = (dzdc.re, dzdc.im);
        let mut dx = [0.0; 3];
        let mut dy = [0.0; 3];
        for k in 0..3 {
            dx[k] = a * jet.dx[k] + b * jet.dy[k];
            dy[k] = -b * jet.dx[k] + a * jet.dy[k];
        }
        ImmersionJet {
            point: jet.point,
            dx,
            dy,
        }
    }
}

/// Position and first Cartesian partial derivatives of an immersion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImmersionJet {
    pub point: NilPoint,
    pub dx: [f64; 3],
    pub dy: [f64; 3],
}

/// A map from the plane `z = x + iy` into `Nil`.
pub trait Immersion {
    /// `None` where the map is not defined.
    fn jet(&self, x: f64, y: f64) -> Option<ImmersionJet>;

    /// Mean curvature when known in closed form.
    fn mean_curvature(&self) -> Option<f64> {
        None
    }
}

/// The sphere `S_H` in the chart `w = 1/z`: the point `z` maps to the profile
/// at `R = 1/|z|` rotated by `ψ(R) − arg z`.
///
/// In this chart `n₃ = (|z|² − 1)/(|z|² + 1)` and `e^{2α}` equals the family's
/// conformal factor at `|z|`.
#[derive(Debug, Clone, Copy)]
pub struct CmcSphereImmersion {
    pub sphere: CmcSphere,
}

impl CmcSphereImmersion {
    pub fn new(h: f64) -> Result<Self> {
        Ok(Self {
            sphere: CmcSphere::new(h)?,
        })
    }

    pub fn point(&self, x: f64, y: f64) -> NilPoint {
        let r = x.hypot(y);
        let big_r = 1.0 / r;
        let p = self.sphere.profile(big_r);
        let phi = p.psi - y.atan2(x);
        cyl_to_cart(CylPoint {
            rho: p.rho,
            phi,
            h: p.h,
        })
    }
}

impl Immersion for CmcSphereImmersion {
    fn jet(&self, x: f64, y: f64) -> Option<ImmersionJet> {
        let r2 = x * x + y * y;
        if !(r2 > 0.0) || !r2.is_finite() {
            return None;
        }
        let r = r2.sqrt();
        let big_r = 1.0 / r;
        let p = self.sphere.profile(big_r);
        let d = self.sphere.profile_derivative(big_r);
        let r3 = r2 * r;
        let (rx, ry) = (-x / r3, -y / r3);
        let (tx, ty) = (-y / r2, x / r2);
        let phi = p.psi - y.atan2(x);
        let (s, c) = phi.sin_cos();
        let rho = p.rho;
        let cart = |d_rho: f64, d_phi: f64, d_h: f64| {
            [
                c * d_rho - rho * s * d_phi,
                s * d_rho + rho * c * d_phi,
                rho * c * s * d_rho + 0.5 * rho * rho * (c * c - s * s) * d_phi + d_h,
            ]
        };
        let dx = cart(d.rho * rx, d.psi * rx - tx, d.h * rx);
        let dy = cart(d.rho * ry, d.psi * ry - ty, d.h * ry);
        let point = cyl_to_cart(CylPoint { rho, phi, h: p.h });
        Some(ImmersionJet { point, dx, dy })
    }

    fn mean_curvature(&self) -> Option<f64> {
        Some(self.sphere.mean_curvature())
    }
}

/// An immersion given only by its position map; derivatives come from a
/// fourth-order central difference with the given step.
pub struct FnImmersion<F> {
    pub map: F,
    pub step: f64,
    pub mean_curvature: Option<f64>,
}

impl<F: Fn(f64, f64) -> Option<NilPoint>> FnImmersion<F> {
    pub fn new(map: F, step: f64) -> Self {
        Self {
            map,
            step,
            mean_curvature: None,
        }
    }
}

impl<F: Fn(f64, f64) -> Option<NilPoint>> Immersion for FnImmersion<F> {
    fn jet(&self, x: f64, y: f64) -> Option<ImmersionJet> {
        let h = self.step;
        let point = (self.map)(x, y)?;
        let arr = |p: NilPoint| [p.x, p.y, p.z];
        let mut dx = [0.0; 3];
        let mut dy = [0.0; 3];
        let w = [
            (-2.0, 1.0 / 12.0),
            (-1.0, -2.0 / 3.0),
            (1.0, 2.0 / 3.0),
            (2.0, -1.0 / 12.0),
        ];
        for (off, c) in w {
            let px = arr((self.map)(x + off * h, y)?);
            let py = arr((self.map)(x, y + off * h)?);
            for k in 0..3 {
                dx[k] += c * px[k] / h;
                dy[k] += c * py[k] / h;
            }
        }
        Some(ImmersionJet { point, dx, dy })
    }

    fn mean_curvature(&self) -> Option<f64> {
        self.mean_curvature
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_jet_matches_differences() {
        let imm = CmcSphereImmersion::new(0.7).unwrap();
        let fd = FnImmersion::new(|x, y| Some(imm.point(x, y)), 1e-4);
        for (x, y) in [(0.6, 0.3), (-1.2, 0.4), (0.05, -0.9)] {
            let a = imm.jet(x, y).unwrap();
            let b = fd.jet(x, y).unwrap();
            for k in 0..3 {
                assert!((a.dx[k] - b.dx[k]).abs() < 1e-8, "dx[{k}] at ({x},{y})");
                assert!((a.dy[k] - b.dy[k]).abs() < 1e-8, "dy[{k}] at ({x},{y})");
            }
        }
        assert!(imm.jet(0.0, 0.0).is_none());
    }

    #[test]
    fn chart_indexing() {
        let c = Chart::planar(0.0, 1.0, -1.0, 1.0, 5, 9).unwrap();
        assert_eq!(c.len(), 45);
        assert_eq!(c.coords(c.index(3, 7)), (3, 7));
        assert_eq!(c.node(4, 8), (1.0, 1.0));
        assert!(Chart::planar(0.0, 1.0, 0.0, 1.0, 1, 5).is_err());
        let cyl = Chart::cylinder(-1.0, 1.0, 11, 16).unwrap();
        assert!(cyl.periodic_y());
        assert!((cyl.step_y * 16.0 - std::f64::consts::TAU).abs() < 1e-15);
    }
}
