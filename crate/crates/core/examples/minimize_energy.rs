//! Descent from a perturbed cmc sphere back to the minimum `E = π`.
//!
//! `cargo run --release --example minimize_energy -- [H] [amplitude] [mode]`

use std::f64::consts::PI;

use nil_willmore::revolution::generate_cmc_profile;
use nil_willmore::variational::{minimize_energy, perturb, MinimizeOptions};

fn main() -> nil_willmore::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let h: f64 = args.first().map_or(1.0, |s| s.parse().expect("H"));
    let amp: f64 = args.get(1).map_or(0.05, |s| s.parse().expect("amplitude"));
    let mode: u32 = args.get(2).map_or(2, |s| s.parse().expect("mode"));
    let start = perturb(&generate_cmc_profile(h, 1e-10)?, amp, mode, 0)?;
    let out = minimize_energy(&start, &MinimizeOptions::default())?;
    for r in &out.trace.rows {
        println!(
            "{:>4} E-π={:>10.3e} violation={:.1e} step={:.2e}",
            r.iter,
            r.energy - PI,
            r.violation,
            r.step
        );
    }
    println!(
        "status {:?}, monotone {}",
        out.status,
        out.trace.is_monotone()
    );
    Ok(())
}
