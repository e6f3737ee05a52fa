//! Spinor data sampled on a chart, with finite-difference calculus.

use std::collections::VecDeque;

use num_complex::Complex64;

use super::chart::{Chart, Immersion};
use super::spinor::{exp_alpha, frame_components, isotropy_defect, normal, spinor_from_z};
use crate::error::{Error, Result};
use crate::nil_geometry::FrameVector;
use crate::numerics::{central_first, central_second};

/// Relative isotropy defect above which an immersion is declared non-conformal.
pub const ISOTROPY_TOL: f64 = 1e-8;

/// Nodes with `|ψ_i| < SPINOR_FLOOR·e^{α/2}` block sign continuation and are masked.
pub const SPINOR_FLOOR: f64 = 1e-6;

const NAN: Complex64 = Complex64::new(f64::NAN, f64::NAN);

/// Per-node representation data on a chart.
///
/// Masked nodes carry NaN in every field; derivatives whose stencil touches a
/// masked node or leaves the chart are NaN as well.
#[derive(Debug, Clone)]
pub struct SpinorGrid {
    pub chart: Chart,
    /// Finite-difference order used for every derivative (2 or 4).
    pub order: usize,
    pub valid: Vec<bool>,
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
    /// `α` with `e^α = |ψ₁|² + |ψ₂|²`.
    pub alpha: Vec<f64>,
    pub z1: Vec<Complex64>,
    pub z2: Vec<Complex64>,
    pub z3: Vec<Complex64>,
    pub normal: Vec<FrameVector>,
    /// Mean curvature; NaN until supplied or recovered by dressing.
    pub h: Vec<f64>,
    pub u: Vec<Complex64>,
    pub a: Vec<Complex64>,
    pub atilde: Vec<Complex64>,
    pub supplied_h: Option<f64>,
    pub dressed: bool,
    /// Sign picked up by spinor fields across the periodic seam of a cylinder
    /// chart (`-1` when the spinor bundle is twisted along the loop).
    pub seam_sign: f64,
}

impl SpinorGrid {
    /// Sample `imm` on `chart`, recover `ψ` with continuous square roots, and
    /// fill `α`, `Z` and the normal.
    pub fn from_immersion(
        chart: Chart,
        imm: &dyn Immersion,
        h: Option<f64>,
        order: usize,
    ) -> Result<Self> {
        FieldOps::new(chart, order)?;
        if let Some(hv) = h {
            crate::error::require_positive("H", hv)?;
        }
        let n = chart.len();
        let mut grid = Self {
            chart,
            order,
            valid: vec![false; n],
            psi1: vec![NAN; n],
            psi2: vec![NAN; n],
            alpha: vec![f64::NAN; n],
            z1: vec![NAN; n],
            z2: vec![NAN; n],
            z3: vec![NAN; n],
            normal: vec![FrameVector::new(f64::NAN, f64::NAN, f64::NAN); n],
            h: vec![h.unwrap_or(f64::NAN); n],
            u: vec![NAN; n],
            a: vec![NAN; n],
            atilde: vec![NAN; n],
            supplied_h: h,
            dressed: false,
            seam_sign: 1.0,
        };
        let mut worst_isotropy = 0.0f64;
        for idx in 0..n {
            let (i, j) = chart.coords(idx);
            if chart.excluded(i, j) {
                continue;
            }
            let (x, y) = chart.node(i, j);
            let (zp, dzdc) = chart.to_plane(x, y);
            let Some(jet) = imm.jet(zp.re, zp.im) else {
                continue;
            };
            let jet = chart.pull_back_jet(jet, dzdc);
            let Ok(z) = frame_components(&jet) else {
                continue;
            };
            worst_isotropy = worst_isotropy.max(isotropy_defect(&z));
            let Ok((p1, p2)) = spinor_from_z(&z, f64::INFINITY) else {
                continue;
            };
            let ea = exp_alpha(p1, p2);
            if p1.norm().min(p2.norm()) < SPINOR_FLOOR * ea.sqrt() || !(ea > 0.0) {
                continue;
            }
            grid.valid[idx] = true;
            grid.psi1[idx] = p1;
            grid.psi2[idx] = p2;
            grid.z1[idx] = z[0];
            grid.z2[idx] = z[1];
            grid.z3[idx] = z[2];
        }
        if worst_isotropy > ISOTROPY_TOL {
            return Err(Error::IsotropyViolated(worst_isotropy));
        }
        grid.continue_signs()?;
        for idx in 0..n {
            if grid.valid[idx] {
                let (p1, p2) = (grid.psi1[idx], grid.psi2[idx]);
                grid.alpha[idx] = exp_alpha(p1, p2).ln();
                grid.normal[idx] = normal(p1, p2);
            } else {
                grid.mask(idx);
            }
        }
        Ok(grid)
    }

    fn mask(&mut self, idx: usize) {
        self.valid[idx] = false;
        self.psi1[idx] = NAN;
        self.psi2[idx] = NAN;
        self.alpha[idx] = f64::NAN;
        self.z1[idx] = NAN;
        self.z2[idx] = NAN;
        self.z3[idx] = NAN;
        self.normal[idx] = FrameVector::new(f64::NAN, f64::NAN, f64::NAN);
        self.h[idx] = f64::NAN;
        self.u[idx] = NAN;
        self.a[idx] = NAN;
        self.atilde[idx] = NAN;
    }

    /// Breadth-first sign propagation from the node nearest the centre.
    fn continue_signs(&mut self) -> Result<()> {
        let c = self.chart;
        let n = c.len();
        let (ci, cj) = c.coords(c.center());
        let seed = (0..n).filter(|&k| self.valid[k]).min_by(|&a, &b| {
            let d = |k: usize| {
                let (i, j) = c.coords(k);
                (i as f64 - ci as f64).powi(2) + (j as f64 - cj as f64).powi(2)
            };
            d(a).total_cmp(&d(b))
        });
        let Some(seed) = seed else {
            return Err(Error::GridTooCoarse("no valid node on the chart".into()));
        };
        let mut seen = vec![false; n];
        seen[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(k) = queue.pop_front() {
            let (i, j) = c.coords(k);
            let mut nbrs = Vec::with_capacity(4);
            if i > 0 {
                nbrs.push(c.index(i - 1, j));
            }
            if i + 1 < c.nx {
                nbrs.push(c.index(i + 1, j));
            }
            if j > 0 {
                nbrs.push(c.index(i, j - 1));
            }
            if j + 1 < c.ny {
                nbrs.push(c.index(i, j + 1));
            }
            for m in nbrs {
                if seen[m] || !self.valid[m] {
                    continue;
                }
                self.align(m, k);
                seen[m] = true;
                queue.push_back(m);
            }
        }
        for k in 0..n {
            if !seen[k] {
                self.valid[k] = false;
            }
        }
        if c.periodic_y() {
            let mut votes = 0i64;
            for i in 0..c.nx {
                let (a, b) = (c.index(i, c.ny - 1), c.index(i, 0));
                if self.valid[a] && self.valid[b] {
                    let same = (self.psi1[a] - self.psi1[b]).norm_sqr()
                        + (self.psi2[a] - self.psi2[b]).norm_sqr();
                    let flip = (self.psi1[a] + self.psi1[b]).norm_sqr()
                        + (self.psi2[a] + self.psi2[b]).norm_sqr();
                    votes += if same <= flip { 1 } else { -1 };
                }
            }
            self.seam_sign = if votes >= 0 { 1.0 } else { -1.0 };
        }
        Ok(())
    }

    fn align(&mut self, m: usize, parent: usize) {
        let same = (self.psi1[m] - self.psi1[parent]).norm_sqr()
            + (self.psi2[m] - self.psi2[parent]).norm_sqr();
        let flip = (self.psi1[m] + self.psi1[parent]).norm_sqr()
            + (self.psi2[m] + self.psi2[parent]).norm_sqr();
        if flip < same {
            self.psi1[m] = -self.psi1[m];
            self.psi2[m] = -self.psi2[m];
        }
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    pub fn masked_count(&self) -> usize {
        self.chart.len() - self.valid_count()
    }

    /// `e^{α}` per node.
    pub fn exp_alpha(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| a.exp()).collect()
    }

    pub fn n3(&self) -> Vec<f64> {
        self.normal.iter().map(|n| n.a3).collect()
    }

    /// Finite-difference operators bound to this grid's chart, order and seam.
    pub fn ops(&self) -> FieldOps {
        FieldOps {
            chart: self.chart,
            order: self.order,
            seam_sign: self.seam_sign,
        }
    }

    pub fn d_z(&self, f: &[Complex64], spinorial: bool) -> Vec<Complex64> {
        self.ops().d_z(f, spinorial)
    }

    pub fn d_zbar(&self, f: &[Complex64], spinorial: bool) -> Vec<Complex64> {
        self.ops().d_zbar(f, spinorial)
    }

    pub fn partial(&self, f: &[Complex64], axis: usize, spinorial: bool) -> Vec<Complex64> {
        self.ops().partial(f, axis, spinorial)
    }

    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        self.ops().laplacian(f)
    }

    pub fn integrate(&self, f: &[Complex64]) -> Complex64 {
        self.ops().integrate(f)
    }

    /// Sup norm over nodes where the field is finite; `None` if there are none.
    pub fn sup_norm(values: &[f64]) -> Option<f64> {
        values
            .iter()
            .filter(|v| v.is_finite())
            .map(|v| v.abs())
            .reduce(f64::max)
    }
}

/// Finite-difference and quadrature operators on a chart.
#[derive(Debug, Clone, Copy)]
pub struct FieldOps {
    pub chart: Chart,
    pub order: usize,
    pub seam_sign: f64,
}

impl FieldOps {
    pub fn new(chart: Chart, order: usize) -> Result<Self> {
        central_first(order)?;
        let min = order + 1;
        if chart.nx < min || chart.ny < min {
            return Err(Error::GridTooCoarse(format!(
                "{}x{} nodes cannot carry an order-{order} stencil",
                chart.nx, chart.ny
            )));
        }
        Ok(Self {
            chart,
            order,
            seam_sign: 1.0,
        })
    }

    /// Stencil application along one axis; `spinorial` fields change sign across
    /// a twisted periodic seam.
    fn apply(
        &self,
        f: &[Complex64],
        axis: usize,
        weights: &[f64],
        scale: f64,
        spinorial: bool,
    ) -> Vec<Complex64> {
        let c = &self.chart;
        let k = (weights.len() / 2) as isize;
        let mut out = vec![NAN; c.len()];
        for idx in 0..c.len() {
            let (i, j) = c.coords(idx);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut ok = true;
            for (w_idx, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let off = w_idx as isize - k;
                let (val, sign) = if axis == 0 {
                    let ii = i as isize + off;
                    if ii < 0 || ii >= c.nx as isize {
                        ok = false;
                        break;
                    }
                    (f[c.index(ii as usize, j)], 1.0)
                } else {
                    let jj = j as isize + off;
                    if jj >= 0 && jj < c.ny as isize {
                        (f[c.index(i, jj as usize)], 1.0)
                    } else if c.periodic_y() {
                        let wrapped = jj.rem_euclid(c.ny as isize) as usize;
                        let sign = if spinorial { self.seam_sign } else { 1.0 };
                        (f[c.index(i, wrapped)], sign)
                    } else {
                        ok = false;
                        break;
                    }
                };
                acc += val * (w * sign);
            }
            if ok {
                out[idx] = acc / scale;
            }
        }
        out
    }

    fn step(&self, axis: usize) -> f64 {
        if axis == 0 {
            self.chart.step_x
        } else {
            self.chart.step_y
        }
    }

    /// First partial along chart axis 0 (`x`/`ξ`) or 1 (`y`/`θ`).
    pub fn partial(&self, f: &[Complex64], axis: usize, spinorial: bool) -> Vec<Complex64> {
        let w = central_first(self.order).expect("order validated by the caller");
        self.apply(f, axis, w, self.step(axis), spinorial)
    }

    pub fn second_partial(&self, f: &[Complex64], axis: usize, spinorial: bool) -> Vec<Complex64> {
        let w = central_second(self.order).expect("order validated by the caller");
        let h = self.step(axis);
        self.apply(f, axis, w, h * h, spinorial)
    }

    /// `∂f = ½(f_x − i f_y)`.
    pub fn d_z(&self, f: &[Complex64], spinorial: bool) -> Vec<Complex64> {
        let fx = self.partial(f, 0, spinorial);
        let fy = self.partial(f, 1, spinorial);
        fx.iter()
            .zip(&fy)
            .map(|(a, b)| 0.5 * (a - Complex64::i() * b))
            .collect()
    }

    /// `∂̄f = ½(f_x + i f_y)`.
    pub fn d_zbar(&self, f: &[Complex64], spinorial: bool) -> Vec<Complex64> {
        let fx = self.partial(f, 0, spinorial);
        let fy = self.partial(f, 1, spinorial);
        fx.iter()
            .zip(&fy)
            .map(|(a, b)| 0.5 * (a + Complex64::i() * b))
            .collect()
    }

    /// Flat Laplacian `f_xx + f_yy = 4∂∂̄f` of a real field.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let fc: Vec<Complex64> = f.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        let fxx = self.second_partial(&fc, 0, false);
        let fyy = self.second_partial(&fc, 1, false);
        fxx.iter().zip(&fyy).map(|(a, b)| (a + b).re).collect()
    }

    /// `∫ f dx dy` over the chart by product rules (end-corrected trapezoid on
    /// open axes, plain trapezoid on the periodic axis). Non-finite nodes
    /// contribute nothing.
    pub fn integrate(&self, f: &[Complex64]) -> Complex64 {
        let c = &self.chart;
        let wx = axis_weights(c.nx, c.step_x, false);
        let wy = axis_weights(c.ny, c.step_y, c.periodic_y());
        let mut acc = Complex64::new(0.0, 0.0);
        for idx in 0..c.len() {
            let v = f[idx];
            if v.re.is_finite() && v.im.is_finite() {
                let (i, j) = c.coords(idx);
                acc += v * (wx[i] * wy[j]);
            }
        }
        acc
    }
}

fn axis_weights(n: usize, h: f64, periodic: bool) -> Vec<f64> {
    if periodic {
        return vec![h; n];
    }
    let mut w = vec![h; n];
    if n >= 6 {
        let end = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
        for k in 0..3 {
            w[k] = end[k] * h;
            w[n - 1 - k] = end[k] * h;
        }
    } else {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::super::chart::CmcSphereImmersion;
    use super::*;

    #[test]
    fn planar_sphere_grid_is_consistent() {
        let imm = CmcSphereImmersion::new(0.5).unwrap();
        let chart = Chart::planar_square(1.5, 31).unwrap();
        let g = SpinorGrid::from_immersion(chart, &imm, Some(0.5), 4).unwrap();
        assert!(g.masked_count() > 0, "pole disk must be masked");
        for k in 0..chart.len() {
            if !g.valid[k] {
                continue;
            }
            let (i, j) = chart.coords(k);
            let (x, y) = chart.node(i, j);
            let r2 = x * x + y * y;
            assert!((g.normal[k].a3 - (r2 - 1.0) / (r2 + 1.0)).abs() < 1e-12);
            let e2a = imm.sphere.conformal_factor(r2.sqrt());
            assert!(((2.0 * g.alpha[k]).exp() - e2a).abs() < 1e-11 * e2a);
            assert!((g.psi1[k] * g.psi2[k].conj() - g.z3[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn signs_are_continuous() {
        let imm = CmcSphereImmersion::new(1.0).unwrap();
        let chart = Chart::planar_square(1.2, 25).unwrap();
        let g = SpinorGrid::from_immersion(chart, &imm, None, 2).unwrap();
        let d = g.partial(&g.psi1, 0, true);
        let worst = d
            .iter()
            .filter(|v| v.re.is_finite())
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        // a sign jump would show up as a difference quotient of order |ψ|/step
        assert!(worst < 10.0, "{worst}");
    }

    #[test]
    fn cylinder_seam_is_twisted() {
        let imm = CmcSphereImmersion::new(1.0).unwrap();
        let chart = Chart::cylinder(-3.0, 3.0, 41, 32).unwrap();
        let g = SpinorGrid::from_immersion(chart, &imm, Some(1.0), 4).unwrap();
        assert_eq!(g.masked_count(), 0);
        assert_eq!(g.seam_sign, -1.0);
    }
}
