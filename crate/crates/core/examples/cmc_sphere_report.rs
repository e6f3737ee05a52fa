//! Closed forms against quadrature for the cmc sphere family.
//!
//! `cargo run --release --example cmc_sphere_report`

use std::f64::consts::PI;

use nil_willmore::cmc_family::{CmcSphere, Mode};

fn main() -> nil_willmore::Result<()> {
    println!(
        "{:>6} {:>14} {:>10} {:>14} {:>10} {:>10} {:>12}",
        "H", "A", "dA", "V", "dV", "E-pi", "W"
    );
    for h in [0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let s = CmcSphere::new(h)?;
        let a = s.area(Mode::ClosedForm)?.value;
        let v = s.volume(Mode::ClosedForm)?.value;
        let da = (s.area(Mode::Quadrature)?.value - a).abs() / a;
        let dv = (s.volume(Mode::Quadrature)?.value - v).abs() / v;
        let e = s.spinor_energy()?.value;
        let w = s.willmore(Mode::Quadrature)?.value;
        println!(
            "{h:>6} {a:>14.8} {da:>10.1e} {v:>14.8} {dv:>10.1e} {:>10.1e} {w:>12.8}",
            e - PI
        );
    }
    let s = CmcSphere::new(0.5)?;
    println!(
        "\nH = 1/2: A = {:.12} (8π + 4π² = {:.12}), V = {:.12}",
        s.area(Mode::ClosedForm)?.value,
        8.0 * PI + 4.0 * PI * PI,
        s.volume(Mode::ClosedForm)?.value
    );
    println!(
        "isoperimetric residual with 4π/H: {:.6}, with 2π/H: {:.1e}",
        s.isoperimetric_residual()?,
        s.isoperimetric_residual_corrected()?
    );
    Ok(())
}
