//! The Willmore-type functional of cmc spheres in `S² × ℝ` equals 16π.
//!
//! `cargo run --release --example s2xr_willmore`

use std::f64::consts::PI;

use nil_willmore::cmc_family::Mode;
use nil_willmore::s2xr::willmore_type_value;

fn main() -> nil_willmore::Result<()> {
    for h in [0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 16.0] {
        let c = willmore_type_value(h, Mode::ClosedForm)?;
        let q = willmore_type_value(h, Mode::Quadrature)?;
        println!(
            "h={h:<5} closed-16π={:>9.1e} profile-16π={:>9.1e}",
            c - 16.0 * PI,
            q - 16.0 * PI
        );
    }
    Ok(())
}
