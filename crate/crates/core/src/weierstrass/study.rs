//! Refinement studies of the identity residuals on a patch of a cmc sphere chart.

use serde::Serialize;

use super::chart::{Chart, CmcSphereImmersion};
use super::grid::{FieldOps, SpinorGrid};
use super::residuals::{
    identity_residual_fields, main_equation_pointwise, main_equation_residual, IdentityResiduals,
};
use crate::cmc_family::n3_of_r;
use crate::error::Result;

/// `[x0, x1, y0, y1]` of the planar patch used by refinement studies; it keeps
/// clear of the pole `z = 0` and contains part of the equator `|z| = 1`.
pub const SPHERE_PATCH: [f64; 4] = [0.3, 1.3, -0.5, 0.5];

/// Node counts per axis `n, 2n − 1, 4n − 3`: each level halves the step and
/// contains every node of the previous one.
pub fn refinement_ladder(n: usize) -> [usize; 3] {
    [n, 2 * n - 1, 4 * n - 3]
}

/// `log₂(coarse/fine)` for a halved step.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

pub fn sphere_patch_chart(n: usize) -> Result<Chart> {
    let [x0, x1, y0, y1] = SPHERE_PATCH;
    Chart::planar(x0, x1, y0, y1, n, n)
}

/// Dressed grid of the cmc sphere `S_H` on [`SPHERE_PATCH`] with `n × n` nodes.
pub fn sphere_patch_grid(h: f64, n: usize, order: usize) -> Result<SpinorGrid> {
    let imm = CmcSphereImmersion::new(h)?;
    let mut g = SpinorGrid::from_immersion(sphere_patch_chart(n)?, &imm, Some(h), order)?;
    g.dress()?;
    Ok(g)
}

/// Selects the nodes of `chart` that coincide with nodes of the `coarse_n × coarse_n`
/// lattice at least `margin` coarse steps away from the boundary, so that every
/// level of a ladder is measured on the same point set.
pub fn common_nodes(chart: Chart, coarse_n: usize, margin: usize) -> impl Fn(usize) -> bool {
    let stride = (chart.nx - 1) / (coarse_n - 1);
    move |k| {
        let (i, j) = chart.coords(k);
        let inside =
            |t: usize| t.is_multiple_of(stride) && t / stride >= margin && t / stride + margin < coarse_n;
        inside(i) && inside(j)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityStudy {
    #[serde(rename = "H")]
    pub h: f64,
    pub order: usize,
    pub grids: [usize; 3],
    pub residuals: [IdentityResiduals; 3],
    /// Finite-difference main-equation residual of the exact `n₃` field.
    pub main_equation_fd: [f64; 3],
    /// Main-equation residual with analytic derivatives, sup over each level.
    pub main_equation_analytic: [f64; 3],
}

impl IdentityStudy {
    /// `(name, [coarse, middle, fine], [order₁, order₂])` for every identity and
    /// the finite-difference main equation.
    pub fn table(&self) -> Vec<(&'static str, [f64; 3], [f64; 2])> {
        let names = self.residuals[0].named();
        let mut rows: Vec<_> = (0..names.len())
            .map(|q| {
                let v = [0, 1, 2].map(|l| self.residuals[l].named()[q].1);
                (
                    names[q].0,
                    v,
                    [observed_order(v[0], v[1]), observed_order(v[1], v[2])],
                )
            })
            .collect();
        let m = self.main_equation_fd;
        rows.push((
            "main_equation_fd",
            m,
            [observed_order(m[0], m[1]), observed_order(m[1], m[2])],
        ));
        rows
    }
}

/// Residual sup norms of every identity on three nested refinements of
/// [`SPHERE_PATCH`], measured on the nodes of the coarsest level.
pub fn identity_study(h: f64, n: usize, order: usize) -> Result<IdentityStudy> {
    let grids = refinement_ladder(n);
    let margin = order / 2;
    let mut residuals = Vec::with_capacity(3);
    let mut main_fd = [0.0; 3];
    let mut analytic = [0.0f64; 3];
    for (l, &m) in grids.iter().enumerate() {
        let g = sphere_patch_grid(h, m, order)?;
        let keep = common_nodes(g.chart, n, margin);
        residuals.push(identity_residual_fields(&g)?.sup_where(&keep));
        let chart = g.chart;
        let n3: Vec<f64> = (0..chart.len())
            .map(|k| {
                let (i, j) = chart.coords(k);
                let (x, y) = chart.node(i, j);
                n3_of_r((x * x + y * y).sqrt())
            })
            .collect();
        let fd = main_equation_residual(&FieldOps::new(chart, order)?, &n3)?;
        main_fd[l] = fd
            .iter()
            .enumerate()
            .filter(|(k, v)| keep(*k) && v.is_finite())
            .fold(0.0f64, |acc, (_, v)| acc.max(v.abs()));
        for k in 0..chart.len() {
            let (i, j) = chart.coords(k);
            let (x, y) = chart.node(i, j);
            analytic[l] = analytic[l].max(main_equation_analytic(x, y)?.abs());
        }
    }
    Ok(IdentityStudy {
        h,
        order,
        grids,
        residuals: [residuals[0], residuals[1], residuals[2]],
        main_equation_fd: main_fd,
        main_equation_analytic: analytic,
    })
}

/// Main-equation residual of `n₃ = (r² − 1)/(r² + 1)` at `(x, y)` with exact derivatives.
pub fn main_equation_analytic(x: f64, y: f64) -> Result<f64> {
    let r2 = x * x + y * y;
    let q = r2 + 1.0;
    let n3 = (r2 - 1.0) / q;
    let g = 4.0 / (q * q);
    let lap = 8.0 * (1.0 - r2) / (q * q * q);
    main_equation_pointwise(n3, g * x, g * y, lap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn common_nodes_match_the_coarse_lattice() {
        let coarse = sphere_patch_chart(11).unwrap();
        let fine = sphere_patch_chart(41).unwrap();
        let keep_c = common_nodes(coarse, 11, 2);
        let keep_f = common_nodes(fine, 11, 2);
        let pc: Vec<(f64, f64)> = (0..coarse.len())
            .filter(|k| keep_c(*k))
            .map(|k| {
                let (i, j) = coarse.coords(k);
                coarse.node(i, j)
            })
            .collect();
        let pf: Vec<(f64, f64)> = (0..fine.len())
            .filter(|k| keep_f(*k))
            .map(|k| {
                let (i, j) = fine.coords(k);
                fine.node(i, j)
            })
            .collect();
        assert_eq!(pc.len(), 49);
        for (a, b) in pc.iter().zip(&pf) {
            assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_main_equation_vanishes() {
        for (x, y) in [(0.3, 0.1), (1.2, -0.4), (0.9, 0.0)] {
            assert!(main_equation_analytic(x, y).unwrap().abs() < 1e-13);
        }
    }
}
