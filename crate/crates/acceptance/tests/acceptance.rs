//! Acceptance criteria 1–14 at their stated tolerances.
//!
//! Runs without the libtest harness: one `PASS`/`FAIL` line per criterion,
//! then a nonzero exit status if any criterion failed.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nil_willmore::cli::criticality_sweep;
use nil_willmore::cmc_family::{CmcSphere, Mode};
use nil_willmore::revolution::{
    closed_form_distance, energy_direct, energy_reduced, generate_cmc_profile, geometry_fields,
    ProfileCurve,
};
use nil_willmore::s2xr::{closed_forms, generate_sphere, willmore_type_value};
use nil_willmore::variational::{el_study, minimize_energy, perturb, MinimizeOptions};
use nil_willmore::weierstrass::{identity_study, Chart, CmcSphereImmersion, SpinorGrid};
use nil_willmore_acceptance::{run, Criterion, Outcome};

fn quad(h: f64) -> CmcSphere {
    CmcSphere::new(h).unwrap()
}

fn c01_energy_is_pi() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for h in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let t = Instant::now();
        let e = quad(h).spinor_energy().unwrap().value;
        slowest = slowest.max(t.elapsed());
        worst = worst.max((e - PI).abs());
    }
    (
        worst < 1e-8 && slowest < Duration::from_secs(1),
        format!("max |E - pi| = {worst:.2e}, slowest evaluation {slowest:?}"),
    )
}

fn c02_isoperimetric() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_2pi = 0.0f64;
    for h in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let s = quad(h);
        worst = worst.max(s.isoperimetric_residual().unwrap().abs());
        worst_2pi = worst_2pi.max(s.isoperimetric_residual_corrected().unwrap().abs());
    }
    (
        worst < 1e-8,
        format!("max |residual| = {worst:.6e} with 4pi/H (with 2pi/H: {worst_2pi:.2e})"),
    )
}

fn c03_closed_vs_quadrature() -> Outcome {
    let (lo, hi) = (0.05f64.ln(), 50f64.ln());
    let mut worst = 0.0f64;
    for k in 0..20 {
        let h = (lo + (hi - lo) * k as f64 / 19.0).exp();
        let s = quad(h);
        for (c, q) in [
            (s.area(Mode::ClosedForm), s.area(Mode::Quadrature)),
            (s.volume(Mode::ClosedForm), s.volume(Mode::Quadrature)),
        ] {
            let (c, q) = (c.unwrap().value, q.unwrap().value);
            worst = worst.max(((c - q) / c).abs());
        }
    }
    let s = quad(0.5);
    let da = (s.area(Mode::Quadrature).unwrap().value - (8.0 * PI + 4.0 * PI * PI)).abs();
    let v = s.volume(Mode::Quadrature).unwrap().value;
    let dv = (v - (12.0 * PI + 2.0 * PI * PI)).abs();
    (
        worst < 1e-8 && da < 1e-8 && dv < 1e-8,
        format!(
            "relative agreement {worst:.2e}; |A(1/2) - (8pi+4pi^2)| = {da:.2e}; \
             |V(1/2) - (12pi+2pi^2)| = {dv:.6e} (V(1/2) = {v:.12}, 8pi+2pi^2 = {:.12})",
            8.0 * PI + 2.0 * PI * PI
        ),
    )
}

fn c04_euclidean_limit() -> Outcome {
    let h = 100.0;
    let s = quad(h);
    let a = s.area(Mode::Quadrature).unwrap().value;
    let v = s.volume(Mode::Quadrature).unwrap().value;
    let ra = (h * h * a / (4.0 * PI) - 1.0).abs();
    let rv = (h.powi(3) * v / (4.0 * PI / 3.0) - 1.0).abs();
    (
        ra < 0.01 && rv < 0.02,
        format!("area ratio off by {ra:.2e}, volume ratio off by {rv:.2e}"),
    )
}

/// Seeded corpus of perturbed spheres shared by criteria 5 and 6.
fn corpus() -> Vec<ProfileCurve> {
    (1..=20u64)
        .map(|seed| {
            let h = [0.2, 0.5, 1.0, 2.0, 5.0][(seed % 5) as usize];
            let amp = 0.02 + 0.005 * (seed % 7) as f64;
            let mode = 2 + (seed % 4) as u32;
            perturb(&generate_cmc_profile(h, 1e-10).unwrap(), amp, mode, seed).unwrap()
        })
        .collect()
}

fn cmc_profiles() -> Vec<ProfileCurve> {
    [0.2, 0.5, 1.0, 2.0, 5.0]
        .iter()
        .map(|h| generate_cmc_profile(*h, 1e-10).unwrap())
        .collect()
}

fn reduced_sup(c: &ProfileCurve) -> f64 {
    geometry_fields(c)
        .unwrap()
        .reduced
        .iter()
        .fold(0.0, |m, r| m.max(r.abs()))
}

fn c05_reduction_identity() -> Outcome {
    let gap = |c: &ProfileCurve| (energy_direct(c).unwrap() - energy_reduced(c).unwrap()).abs();
    let cmc = cmc_profiles().iter().map(gap).fold(0.0, f64::max);
    let pert = corpus().iter().map(gap).fold(0.0, f64::max);
    (
        cmc < 1e-6 && pert < 1e-6,
        format!("max |E_direct - E_reduced|: cmc {cmc:.2e}, perturbed {pert:.2e}"),
    )
}

fn c06_lower_bound() -> Outcome {
    let pert = corpus();
    let min_excess = pert
        .iter()
        .map(|c| energy_direct(c).unwrap() - PI)
        .fold(f64::INFINITY, f64::min);
    let cmc_sup = cmc_profiles().iter().map(reduced_sup).fold(0.0, f64::max);
    let pert_sup = pert.iter().map(reduced_sup).fold(f64::INFINITY, f64::min);
    (
        min_excess >= -1e-9 && cmc_sup < 1e-6 && pert_sup >= 1e-6,
        format!(
            "min E - pi over corpus {min_excess:.2e}; reduced sup: cmc max {cmc_sup:.2e}, perturbed min {pert_sup:.2e}"
        ),
    )
}

fn c07_ode_vs_closed_form() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..5 {
        let h = 10f64.powf(-1.0 + 0.5 * k as f64);
        let c = generate_cmc_profile(h, 1e-10).unwrap();
        worst = worst.max(closed_form_distance(&c, h).unwrap());
    }
    let el = t.elapsed();
    (
        worst < 1e-6 && el < Duration::from_secs(10),
        format!("max distance {worst:.2e}, total {el:?}"),
    )
}

const FD_IDENTITIES: [&str; 7] = [
    "dirac",
    "derivational_psi1",
    "derivational_psi2",
    "normal_derivative",
    "z3_derivative",
    "normal_derivative_cmc",
    "atilde",
];

fn c08_identity_suite() -> Outcome {
    let mut worst_gap = 0.0f64;
    let mut metric = 0.0f64;
    for order in [2usize, 4] {
        for h in [0.5, 1.0] {
            let st = identity_study(h, 21, order).unwrap();
            for (name, v, o) in st.table() {
                if FD_IDENTITIES.contains(&name) {
                    for p in o {
                        worst_gap = worst_gap.max((p - order as f64).abs());
                    }
                }
                if name == "metric" {
                    metric = metric.max(v[0]).max(v[1]).max(v[2]);
                }
            }
        }
    }
    (
        worst_gap < 0.3 && metric < 1e-12,
        format!("worst |observed - nominal order| {worst_gap:.3}, metric identity {metric:.2e}"),
    )
}

fn c09_main_equation() -> Outcome {
    let mut analytic = 0.0f64;
    let mut gap = 0.0f64;
    for order in [2usize, 4] {
        let st = identity_study(0.5, 21, order).unwrap();
        analytic = analytic.max(st.main_equation_analytic.iter().fold(0.0, |m, v| m.max(*v)));
        let (_, _, o) = st
            .table()
            .into_iter()
            .find(|r| r.0 == "main_equation_fd")
            .unwrap();
        gap = gap
            .max((o[0] - order as f64).abs())
            .max((o[1] - order as f64).abs());
    }
    (
        analytic < 1e-8 && gap < 0.3,
        format!("analytic residual {analytic:.2e}, worst order gap {gap:.3}"),
    )
}

fn c10_euler_lagrange() -> Outcome {
    let mut gap = 0.0f64;
    for order in [2usize, 4] {
        let st = el_study(0.7, 21, order).unwrap();
        gap = gap
            .max((st.orders[0] - order as f64).abs())
            .max((st.orders[1] - order as f64).abs());
    }
    let worst = criticality_sweep(10_000, 1);
    (
        gap < 0.3 && worst <= 1e-13,
        format!("worst order gap {gap:.3}; pointwise identities worst relative defect {worst:.2e}"),
    )
}

fn c11_minimizer() -> Outcome {
    let start = perturb(&generate_cmc_profile(1.0, 1e-10).unwrap(), 0.05, 2, 0).unwrap();
    let out = minimize_energy(&start, &MinimizeOptions::default()).unwrap();
    let iters = out.trace.rows.len() - 1;
    let e = out.final_energy();
    (
        e < PI + 1e-4 && iters <= 500 && out.trace.is_monotone(),
        format!(
            "final E - pi = {:.2e} after {iters} iterations ({:?}), monotone {}",
            e - PI,
            out.status,
            out.trace.is_monotone()
        ),
    )
}

fn c12_s2xr() -> Outcome {
    let mut dev = 0.0f64;
    let mut agree = 0.0f64;
    for h in [0.25, 0.5, 1.0, 2.0, 4.0] {
        dev = dev.max((willmore_type_value(h, Mode::ClosedForm).unwrap() - 16.0 * PI).abs());
        dev = dev.max((willmore_type_value(h, Mode::Quadrature).unwrap() - 16.0 * PI).abs());
        let (a, k) = generate_sphere(h, 1e-10).unwrap().area_and_int_khat();
        let (ac, kc) = closed_forms(h).unwrap();
        agree = agree.max((a - ac).abs()).max((k - kc).abs());
    }
    (
        dev < 1e-6 && agree < 1e-6,
        format!("max |W - 16pi| {dev:.2e}, closed forms vs profiles {agree:.2e}"),
    )
}

fn c13_imaginary_part() -> Outcome {
    let h = 0.5;
    let imm = CmcSphereImmersion::new(h).unwrap();
    let mut ims = Vec::new();
    for (xi, nx, nt) in [(6.0, 97usize, 64usize), (9.0, 193, 128), (12.0, 385, 256)] {
        let chart = Chart::cylinder(-xi, xi + 0.37, nx, nt).unwrap();
        let mut g = SpinorGrid::from_immersion(chart, &imm, Some(h), 4).unwrap();
        g.dress().unwrap();
        ims.push(g.energy_integral().unwrap().im.abs());
    }
    let decreasing = ims.windows(2).all(|w| w[1] < w[0]);
    (
        decreasing && ims[2] < 1e-6,
        format!(
            "|Im| on three refinements: {:.2e}, {:.2e}, {:.2e}",
            ims[0], ims[1], ims[2]
        ),
    )
}

fn c14_willmore_reading() -> Outcome {
    let mut worst = 0.0f64;
    let mut vals = Vec::new();
    for h in [0.5, 1.0, 2.0] {
        let s = quad(h);
        let q = s.willmore(Mode::Quadrature).unwrap().value;
        let c = s.willmore(Mode::ClosedForm).unwrap().value;
        worst = worst.max((q - c).abs());
        vals.push(format!("W({h}) = {q:.12}"));
    }
    (
        worst < 1e-8,
        format!(
            "{}; closed form (2H^3 reading) max deviation {worst:.2e}",
            vals.join(", ")
        ),
    )
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("energy of the cmc spheres is pi", c01_energy_is_pi),
        ("isoperimetric relation", c02_isoperimetric),
        (
            "closed forms vs quadrature, spot values",
            c03_closed_vs_quadrature,
        ),
        ("Euclidean limit", c04_euclidean_limit),
        ("direct vs reduced energy", c05_reduction_identity),
        ("lower bound on perturbed spheres", c06_lower_bound),
        ("shooting ODE vs closed form", c07_ode_vs_closed_form),
        ("representation identity suite", c08_identity_suite),
        ("main equation", c09_main_equation),
        (
            "Euler-Lagrange residual and pointwise identities",
            c10_euler_lagrange,
        ),
        ("descent minimizer", c11_minimizer),
        ("S2xR Willmore-type value", c12_s2xr),
        ("imaginary part of the energy integral", c13_imaginary_part),
        ("Willmore closed form", c14_willmore_reading),
    ];
    if run(&criteria) > 0 {
        std::process::exit(1);
    }
}
