//! Potentials, Hopf data and mean curvature on a spinor grid.

use num_complex::Complex64;

use super::grid::SpinorGrid;
use super::spinor::{atilde, potential};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

impl SpinorGrid {
    /// Fill `U = V`, `A`, `Ã`, and `H` (recovered from the Dirac system when it
    /// was not supplied).
    pub fn dress(&mut self) -> Result<()> {
        if self.valid_count() == 0 {
            return Err(Error::MissingField("psi"));
        }
        if self.supplied_h.is_none() {
            self.h = self.recover_mean_curvature();
        }
        let n = self.chart.len();
        let psi2_bar: Vec<Complex64> = self.psi2.iter().map(|p| p.conj()).collect();
        let d_psi1 = self.d_z(&self.psi1, true);
        let d_psi2_bar = self.d_z(&psi2_bar, true);
        for k in 0..n {
            if !self.valid[k] {
                continue;
            }
            let (p1, p2b) = (self.psi1[k], psi2_bar[k]);
            let h = self.h[k];
            self.u[k] = potential(h, p1, self.psi2[k]).u;
            self.a[k] = p2b * d_psi1[k] - p1 * d_psi2_bar[k] + I * p1 * p1 * p2b * p2b;
            self.atilde[k] = atilde(self.a[k], self.z3[k], h);
        }
        self.dressed = true;
        Ok(())
    }

    /// `H = 2 Re(U) e^{−α}` with `U` the least-squares solution of
    /// `∂ψ₂ = −Uψ₁`, `∂̄ψ₁ = Uψ₂`.
    pub fn recover_mean_curvature(&self) -> Vec<f64> {
        let d_psi2 = self.d_z(&self.psi2, true);
        let dbar_psi1 = self.d_zbar(&self.psi1, true);
        (0..self.chart.len())
            .map(|k| {
                let (p1, p2) = (self.psi1[k], self.psi2[k]);
                let ea = p1.norm_sqr() + p2.norm_sqr();
                let u = (-p1.conj() * d_psi2[k] + p2.conj() * dbar_psi1[k]) / ea;
                let h = 2.0 * u.re / ea;
                if h.is_finite() {
                    h
                } else {
                    f64::NAN
                }
            })
            .collect()
    }

    /// `∫ UV dx dy` over the chart (the spinor energy when the chart covers a
    /// closed surface up to negligible tails).
    pub fn energy_integral(&self) -> Result<Complex64> {
        if !self.dressed {
            return Err(Error::MissingField("U (grid not dressed)"));
        }
        let uv: Vec<Complex64> = self.u.iter().map(|u| u * u).collect();
        Ok(self.integrate(&uv))
    }
}

/// Dressed copy of `grid`.
pub fn dressing(grid: &SpinorGrid) -> Result<SpinorGrid> {
    let mut g = grid.clone();
    g.dress()?;
    Ok(g)
}
