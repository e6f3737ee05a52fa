//! Identity residuals of the spinor representation on a chart of a cmc
//! sphere, under two grid refinements.
//!
//! `cargo run --release --example weierstrass_identities -- [H] [grid] [order]`

use nil_willmore::weierstrass::identity_study;

fn main() -> nil_willmore::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let h: f64 = args.first().map_or(0.7, |s| s.parse().expect("H"));
    let n: usize = args.get(1).map_or(21, |s| s.parse().expect("grid"));
    let order: usize = args.get(2).map_or(4, |s| s.parse().expect("order"));
    let st = identity_study(h, n, order)?;
    println!("H = {h}, grids {:?}, stencil order {order}", st.grids);
    println!(
        "{:<24} {:>10} {:>10} {:>10} {:>6} {:>6}",
        "identity", "r0", "r1", "r2", "p01", "p12"
    );
    for (name, r, p) in st.table() {
        println!(
            "{name:<24} {:>10.2e} {:>10.2e} {:>10.2e} {:>6.2} {:>6.2}",
            r[0], r[1], r[2], p[0], p[1]
        );
    }
    println!(
        "main equation, analytic derivatives: {:.1e}",
        st.main_equation_analytic[2]
    );
    Ok(())
}
