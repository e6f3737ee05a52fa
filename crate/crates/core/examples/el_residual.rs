//! Euler–Lagrange residual on sphere charts: zero up to discretization error,
//! and clearly nonzero once the conformal factor is disturbed.
//!
//! `cargo run --release --example el_residual`

use nil_willmore::variational::{el_residual, el_residual_fields, el_study};
use nil_willmore::weierstrass::sphere_patch_grid;

fn main() -> nil_willmore::Result<()> {
    for order in [2, 4] {
        let st = el_study(0.7, 21, order)?;
        println!(
            "order {order}: sup {:?}, observed orders {:.3?}",
            st.sup, st.orders
        );
    }
    let g = sphere_patch_grid(0.7, 41, 4)?;
    let base = el_residual(&g)?.sup().unwrap_or(f64::NAN);
    let c = g.chart;
    let alpha: Vec<f64> = (0..c.len())
        .map(|k| {
            let (i, j) = c.coords(k);
            let (x, y) = c.node(i, j);
            g.alpha[k] + 0.01 * (-((x - 0.8).powi(2) + y * y) / 0.05).exp()
        })
        .collect();
    let bumped = el_residual_fields(&g.ops(), &g.h, &alpha, &g.n3(), &g.a, &g.z3)?;
    println!(
        "sphere: {base:.2e}, bumped conformal factor: {:.2e}",
        bumped.sup().unwrap_or(f64::NAN)
    );
    Ok(())
}
