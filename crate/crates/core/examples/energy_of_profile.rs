//! Functionals of a meridian: a cmc sphere, a perturbed sphere and a torus.
//!
//! `cargo run --release --example energy_of_profile [profile.csv]`

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;

use nil_willmore::revolution::{
    generate_cmc_profile, revolution_report, ProfileCurve, RevolutionReport, Topology,
};
use nil_willmore::variational::perturb;

fn show(label: &str, r: &RevolutionReport) {
    println!(
        "{label:<22} chi={} E_direct={:.10} E_reduced={:.10} E_imag={:.1e} W={:.8} area={:.8} volume={:.8}",
        r.chi, r.e_direct.value, r.e_reduced.value, r.e_imag.value, r.willmore.value, r.area.value, r.volume.value
    );
}

fn main() -> nil_willmore::Result<()> {
    if let Some(path) = std::env::args().nth(1) {
        let curve = ProfileCurve::read_csv(BufReader::new(File::open(&path)?))?;
        show(&path, &revolution_report(&curve)?);
        return Ok(());
    }
    let sphere = generate_cmc_profile(1.0, 1e-10)?;
    show("cmc sphere H=1", &revolution_report(&sphere)?);
    show(
        "perturbed, mode 3",
        &revolution_report(&perturb(&sphere, 0.05, 3, 0)?)?,
    );
    // A circle of radius 0.5 about (1.5, 0) in B, traced by the B-arclength.
    let torus = ProfileCurve::from_parametric(
        |t| {
            let a = 2.0 * PI * t;
            (
                1.5 + 0.5 * a.cos(),
                0.5 * a.sin(),
                -PI * a.sin(),
                PI * a.cos(),
            )
        },
        801,
        Topology::Torus,
    )?;
    show("torus", &revolution_report(&torus)?);
    Ok(())
}
