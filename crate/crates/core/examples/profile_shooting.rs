//! Shooting cmc sphere meridians and comparing them with the closed form.
//!
//! `cargo run --release --example profile_shooting`

use nil_willmore::revolution::{closed_form_distance, generate_cmc_profile_with, ProfileOptions};

fn main() -> nil_willmore::Result<()> {
    let opts = ProfileOptions::default();
    println!(
        "{:>6} {:>12} {:>12} {:>10} {:>10}",
        "H", "length", "equator u", "mirror", "distance"
    );
    for h in [0.1, 0.3, 1.0, 3.0, 10.0] {
        let (curve, rep) = generate_cmc_profile_with(h, &opts)?;
        let d = closed_form_distance(&curve, h)?;
        println!(
            "{h:>6} {:>12.9} {:>12.9} {:>10.1e} {:>10.1e}",
            curve.length(),
            rep.equator_u,
            rep.mirror_defect,
            d
        );
    }
    let (curve, _) = generate_cmc_profile_with(
        1.0,
        &ProfileOptions {
            samples: 11,
            ..opts
        },
    )?;
    println!();
    curve.write_csv(std::io::stdout().lock())?;
    Ok(())
}
