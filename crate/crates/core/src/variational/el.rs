//! Euler–Lagrange residual of the spinor energy and the pointwise
//! criticality identities of cmc data.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::weierstrass::{
    common_nodes, observed_order, refinement_ladder, sphere_patch_grid, FieldOps, SpinorGrid,
};

/// Per-node Euler–Lagrange data; masked nodes hold `NaN`.
#[derive(Debug, Clone, Serialize)]
pub struct ElResidualField {
    /// `ΔH + 2H(H² − K) + 2e^{−4α}(AZ̄₃² + ĀZ₃²)`.
    pub residual: Vec<f64>,
    /// `ΔH = 4e^{−2α}∂∂̄H`.
    pub laplace_h: Vec<f64>,
    /// Gauss curvature of the induced metric, `−4e^{−2α}∂∂̄α`.
    pub intrinsic_curvature: Vec<f64>,
    /// `K = K_int − K̂`, `K̂ = ¼ − n₃²`: the determinant of the shape operator.
    pub extrinsic_curvature: Vec<f64>,
    /// `2e^{−4α}(AZ̄₃² + ĀZ₃²)`.
    pub hopf_term: Vec<f64>,
}

impl ElResidualField {
    pub fn sup(&self) -> Option<f64> {
        SpinorGrid::sup_norm(&self.residual)
    }

    /// Sup norm over the nodes accepted by `keep`.
    pub fn sup_where(&self, keep: &dyn Fn(usize) -> bool) -> Option<f64> {
        self.residual
            .iter()
            .enumerate()
            .filter(|(k, v)| keep(*k) && v.is_finite())
            .map(|(_, v)| v.abs())
            .reduce(f64::max)
    }

    /// Number of nodes with a finite residual.
    pub fn evaluated(&self) -> usize {
        self.residual.iter().filter(|v| v.is_finite()).count()
    }
}

/// Residual from raw fields on a chart.
pub fn el_residual_fields(
    ops: &FieldOps,
    h: &[f64],
    alpha: &[f64],
    n3: &[f64],
    a: &[Complex64],
    z3: &[Complex64],
) -> Result<ElResidualField> {
    let n = ops.chart.len();
    if [h.len(), alpha.len(), n3.len(), a.len(), z3.len()]
        .iter()
        .any(|&l| l != n)
    {
        return Err(Error::InvalidParameter {
            name: "fields",
            value: n as f64,
            reason: "every field must have one value per chart node",
        });
    }
    let lap_h = ops.laplacian(h);
    let lap_alpha = ops.laplacian(alpha);
    let mut out = ElResidualField {
        residual: vec![f64::NAN; n],
        laplace_h: vec![f64::NAN; n],
        intrinsic_curvature: vec![f64::NAN; n],
        extrinsic_curvature: vec![f64::NAN; n],
        hopf_term: vec![f64::NAN; n],
    };
    for k in 0..n {
        let e2a = (2.0 * alpha[k]).exp();
        let lh = lap_h[k] / e2a;
        let k_int = -lap_alpha[k] / e2a;
        let k_ext = k_int - (0.25 - n3[k] * n3[k]);
        let hopf = 4.0 * (a[k] * z3[k].conj() * z3[k].conj()).re / (e2a * e2a);
        let r = lh + 2.0 * h[k] * (h[k] * h[k] - k_ext) + hopf;
        if r.is_finite() {
            out.residual[k] = r;
            out.laplace_h[k] = lh;
            out.intrinsic_curvature[k] = k_int;
            out.extrinsic_curvature[k] = k_ext;
            out.hopf_term[k] = hopf;
        }
    }
    Ok(out)
}

/// Euler–Lagrange residual of a dressed grid.
pub fn el_residual(grid: &SpinorGrid) -> Result<ElResidualField> {
    if !grid.dressed {
        return Err(Error::MissingField("A (grid not dressed)"));
    }
    let mask = |v: f64, k: usize| if grid.valid[k] { v } else { f64::NAN };
    let h: Vec<f64> = grid
        .h
        .iter()
        .enumerate()
        .map(|(k, v)| mask(*v, k))
        .collect();
    let alpha: Vec<f64> = grid
        .alpha
        .iter()
        .enumerate()
        .map(|(k, v)| mask(*v, k))
        .collect();
    el_residual_fields(&grid.ops(), &h, &alpha, &grid.n3(), &grid.a, &grid.z3)
}

/// Euler–Lagrange residual sup norms on three nested refinements of the
/// sphere patch, measured on the nodes of the coarsest level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElStudy {
    pub grids: [usize; 3],
    pub sup: [f64; 3],
    pub orders: [f64; 2],
}

pub fn el_study(h: f64, n: usize, order: usize) -> Result<ElStudy> {
    let grids = refinement_ladder(n);
    let mut sup = [0.0; 3];
    for (l, &m) in grids.iter().enumerate() {
        let g = sphere_patch_grid(h, m, order)?;
        let keep = common_nodes(g.chart, n, order / 2);
        sup[l] = el_residual(&g)?.sup_where(&keep).unwrap_or(f64::NAN);
    }
    Ok(ElStudy {
        grids,
        sup,
        orders: [
            observed_order(sup[0], sup[1]),
            observed_order(sup[1], sup[2]),
        ],
    })
}

/// The two terms of the Euler–Lagrange integrand for `Ã = 0` data and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalityIdentities {
    /// `2H(H² − K)` with `K = H² − 4e^{−4α}|A|²`.
    pub gauss_term: f64,
    /// `2e^{−4α}(AZ̄₃² + ĀZ₃²)`.
    pub hopf_term: f64,
    /// `gauss_term + hopf_term` (the residual with `ΔH = 0`).
    pub sum: f64,
    /// `|gauss_term − 8e^{−4α}H|Z₃|⁴/(4H²+1)|`.
    pub gauss_closed_form: f64,
    /// `|(AZ̄₃² + ĀZ₃²) + 4H|Z₃|⁴/(4H²+1)|`.
    pub hopf_closed_form: f64,
    /// Largest magnitude entering either term, including `2|H|(H² + |K|)`
    /// from the subtraction `H² − K`; the defects are rounding-level relative
    /// to it.
    pub scale: f64,
}

impl CriticalityIdentities {
    /// Largest of the three defects relative to `max(1, scale)`.
    pub fn worst_relative(&self) -> f64 {
        let s = self.scale.max(1.0);
        self.sum
            .abs()
            .max(self.gauss_closed_form)
            .max(self.hopf_closed_form)
            / s
    }
}

/// Evaluates both terms for `A = −Z₃²/(2H + i)` at a point.
pub fn criticality_identities(h: f64, z3: Complex64, alpha: f64) -> CriticalityIdentities {
    let a = -z3 * z3 / Complex64::new(2.0 * h, 1.0);
    let e4a = (-4.0 * alpha).exp();
    let k = h * h - 4.0 * e4a * a.norm_sqr();
    let gauss = 2.0 * h * (h * h - k);
    let pairing = a * z3.conj() * z3.conj() + a.conj() * z3 * z3;
    let hopf = 2.0 * e4a * pairing.re;
    let q = z3.norm_sqr() * z3.norm_sqr() / (4.0 * h * h + 1.0);
    CriticalityIdentities {
        gauss_term: gauss,
        hopf_term: hopf,
        sum: gauss + hopf,
        gauss_closed_form: (gauss - 8.0 * e4a * h * q).abs(),
        hopf_closed_form: (pairing.re + 4.0 * h * q).abs() + pairing.im.abs(),
        scale: gauss
            .abs()
            .max(hopf.abs())
            .max(pairing.norm())
            .max(2.0 * h.abs() * (h * h + k.abs())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weierstrass::{Chart, CmcSphereImmersion};

    fn sphere_grid(h: f64, n: usize) -> SpinorGrid {
        let imm = CmcSphereImmersion::new(h).unwrap();
        let chart = Chart::planar(0.3, 1.3, -0.5, 0.5, n, n).unwrap();
        let mut g = SpinorGrid::from_immersion(chart, &imm, Some(h), 4).unwrap();
        g.dress().unwrap();
        g
    }

    #[test]
    fn cmc_residual_converges_at_fourth_order() {
        let r1 = el_residual(&sphere_grid(0.7, 21)).unwrap().sup().unwrap();
        let r2 = el_residual(&sphere_grid(0.7, 41)).unwrap().sup().unwrap();
        let order = (r1 / r2).log2();
        assert!(r2 < 1e-4, "{r2}");
        assert!((order - 4.0).abs() < 0.3, "{order}");
    }

    #[test]
    fn synthetic_trivial_data() {
        let chart = Chart::planar(0.0, 1.0, 0.0, 1.0, 9, 9).unwrap();
        let ops = FieldOps::new(chart, 2).unwrap();
        let n = chart.len();
        let h: f64 = 0.8;
        // Flat conformal factor: K_int = 0, so K = n₃² − ¼; pick n₃² = ¼ + H².
        let n3 = vec![(0.25 + h * h).sqrt(); n];
        let zero = vec![Complex64::new(0.0, 0.0); n];
        let r = el_residual_fields(&ops, &vec![h; n], &vec![0.0; n], &n3, &zero, &zero).unwrap();
        assert!(r.sup().unwrap() < 1e-12);
    }

    #[test]
    fn perturbed_conformal_factor_is_not_critical() {
        let g = sphere_grid(0.7, 41);
        let base = el_residual(&g).unwrap().sup().unwrap();
        let c = g.chart;
        let alpha: Vec<f64> = (0..c.len())
            .map(|k| {
                let (i, j) = c.coords(k);
                let (x, y) = c.node(i, j);
                let r2 = (x - 0.8).powi(2) + y * y;
                g.alpha[k] + 0.01 * (-r2 / 0.05).exp()
            })
            .collect();
        let r = el_residual_fields(&g.ops(), &g.h, &alpha, &g.n3(), &g.a, &g.z3).unwrap();
        let s = r.sup().unwrap();
        assert!(s > 100.0 * base && s > 1e-3 && s < 1.0, "{s} vs {base}");
    }

    #[test]
    fn study_orders() {
        let st = el_study(0.7, 11, 2).unwrap();
        assert!(st.orders.iter().all(|o| (o - 2.0).abs() < 0.3), "{st:?}");
    }

    #[test]
    fn criticality_terms_cancel() {
        let t = criticality_identities(0.9, Complex64::new(0.4, -1.1), 0.3);
        assert!(t.worst_relative() < 1e-14, "{t:?}");
        let z = criticality_identities(2.0, Complex64::new(0.0, 0.0), -1.0);
        assert_eq!((z.gauss_term, z.hopf_term), (0.0, 0.0));
    }
}
