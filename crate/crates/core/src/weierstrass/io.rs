//! CSV dump of a spinor grid.

use std::io::Write;

use super::grid::SpinorGrid;
use crate::error::Result;

/// Column names of the grid dump, in order.
pub const GRID_COLUMNS: [&str; 21] = [
    "x",
    "y",
    "psi1_re",
    "psi1_im",
    "psi2_re",
    "psi2_im",
    "Z1_re",
    "Z1_im",
    "Z2_re",
    "Z2_im",
    "Z3_re",
    "Z3_im",
    "A_re",
    "A_im",
    "Atilde_re",
    "Atilde_im",
    "alpha",
    "n1",
    "n2",
    "n3",
    "H",
];

/// One row per node; masked nodes are written with `NaN` fields.
pub fn write_grid_csv<W: Write>(grid: &SpinorGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GRID_COLUMNS)?;
    let c = &grid.chart;
    for k in 0..c.len() {
        let (i, j) = c.coords(k);
        let (x, y) = c.node(i, j);
        let n = grid.normal[k];
        let vals = [
            x,
            y,
            grid.psi1[k].re,
            grid.psi1[k].im,
            grid.psi2[k].re,
            grid.psi2[k].im,
            grid.z1[k].re,
            grid.z1[k].im,
            grid.z2[k].re,
            grid.z2[k].im,
            grid.z3[k].re,
            grid.z3[k].im,
            grid.a[k].re,
            grid.a[k].im,
            grid.atilde[k].re,
            grid.atilde[k].im,
            grid.alpha[k],
            n.a1,
            n.a2,
            n.a3,
            grid.h[k],
        ];
        w.write_record(vals.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
