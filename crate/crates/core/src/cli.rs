//! Command-line front end.
//!
//! Every subcommand builds a [`Report`] and writes it as CSV (default) or
//! JSON (`--json`) to stdout or `--out`. Exit codes: 0 when every in-command
//! assertion passes, 1 on an assertion failure or a numerical failure, 2 on a
//! usage error or rejected input.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cmc_family::{CmcSphere, Mode};
use crate::error::{Error, Result};
use crate::numerics::QuadOptions;
use crate::report::{format_f64, Assertion, Cell, Report};
use crate::revolution::{
    closed_form_distance, energy_direct, energy_reduced, generate_cmc_profile_with,
    revolution_report, ProfileCurve, ProfileOptions, Topology,
};
use crate::s2xr::{closed_forms, generate_sphere_with, SphereOptions};
use crate::variational::{criticality_identities, el_study, minimize_energy, MinimizeOptions};
use crate::weierstrass::{identity_study, sphere_patch_grid, write_grid_csv};

#[derive(Debug, Parser)]
#[command(
    name = "nil-willmore",
    version,
    about = "Reports and checks for cmc spheres in Nil and the spinor energy"
)]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Emit the JSON mirror of the report instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form and quadrature values of the cmc sphere family.
    CmcReport {
        /// Mean curvatures, comma separated.
        #[arg(long = "H", value_delimiter = ',', required = true)]
        h: Vec<f64>,
        /// Relative tolerance of the adaptive quadrature.
        #[arg(long, default_value_t = 1e-10)]
        quad_tol: f64,
    },
    /// Representation identities on a sphere chart under two refinements.
    VerifyIdentities {
        #[arg(long = "H")]
        h: f64,
        /// Nodes per axis of the coarsest grid.
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 4, value_parser = parse_order)]
        order: usize,
        /// Write the coarsest grid as CSV.
        #[arg(long, value_name = "FILE")]
        dump: Option<PathBuf>,
    },
    /// Shoot a cmc sphere meridian and compare it with the closed form.
    ProfileOde {
        #[arg(long = "H")]
        h: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 2001)]
        samples: usize,
        /// Write the generated meridian here.
        #[arg(long, value_name = "FILE")]
        curve: Option<PathBuf>,
    },
    /// Functionals of a meridian read from a profile CSV.
    Energy {
        #[arg(long, value_name = "FILE")]
        profile: PathBuf,
    },
    /// Descent of the energy from a sphere meridian.
    Minimize {
        #[arg(long, value_name = "FILE")]
        profile: PathBuf,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        /// Highest sine mode of the angle perturbation.
        #[arg(long, default_value_t = 16)]
        modes: usize,
        /// Write the final meridian here.
        #[arg(long, value_name = "FILE")]
        curve: Option<PathBuf>,
        /// Write the bare descent trace here.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
    },
    /// Willmore-type functional of the cmc spheres of S²×ℝ.
    S2xrReport {
        /// Curvature sums, comma separated.
        #[arg(long = "h", value_delimiter = ',', required = true)]
        h: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 2001)]
        samples: usize,
    },
    /// Euler–Lagrange residual on sphere charts and the pointwise criticality identities.
    ElResidual {
        #[arg(long = "H")]
        h: f64,
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 4, value_parser = parse_order)]
        order: usize,
        /// Random inputs for the pointwise identities.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_order(s: &str) -> std::result::Result<usize, String> {
    match s {
        "2" => Ok(2),
        "4" => Ok(4),
        _ => Err(format!("order must be 2 or 4, got `{s}`")),
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}

/// 2 for rejected input, 1 for failures of a computation on valid input.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. }
        | Error::MissingField(_)
        | Error::OpenMeridian(_)
        | Error::SelfIntersection(..)
        | Error::InvalidCurve(_)
        | Error::MalformedCsv(_)
        | Error::GridTooCoarse(_)
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let report = match &cli.command {
        Command::CmcReport { h, quad_tol } => cmc_report(h, *quad_tol)?,
        Command::VerifyIdentities {
            h,
            grid,
            order,
            dump,
        } => verify_identities(*h, *grid, *order, dump.as_deref())?,
        Command::ProfileOde {
            h,
            tol,
            samples,
            curve,
        } => profile_ode(*h, *tol, *samples, curve.as_deref())?,
        Command::Energy { profile } => energy(profile)?,
        Command::Minimize {
            profile,
            iters,
            modes,
            curve,
            trace,
        } => minimize(profile, *iters, *modes, curve.as_deref(), trace.as_deref())?,
        Command::S2xrReport { h, tol, samples } => s2xr_report(h, *tol, *samples)?,
        Command::ElResidual {
            h,
            grid,
            order,
            samples,
            seed,
        } => el_residual(*h, *grid, *order, *samples, *seed)?,
    };
    emit(&report, &cli.output)?;
    for a in report.failures() {
        eprintln!(
            "FAIL {}: value={} tolerance={}",
            a.name,
            format_f64(a.value),
            format_f64(a.tolerance)
        );
    }
    Ok(report.exit_code())
}

fn emit(report: &Report, out: &OutputArgs) -> Result<()> {
    let mut sink: Box<dyn Write> = match &out.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    if out.json {
        report.write_json(&mut sink)?;
    } else {
        report.write_csv(&mut sink)?;
    }
    sink.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn list(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Tolerance of every cmc-report assertion.
pub const CMC_TOL: f64 = 1e-8;

/// Per-`H` table of the sphere family; `H` values are evaluated in parallel.
pub fn cmc_report(hs: &[f64], quad_tol: f64) -> Result<Report> {
    let quad = QuadOptions::relative(quad_tol);
    let rows: Vec<[f64; 10]> = hs
        .par_iter()
        .map(|&h| {
            let s = CmcSphere::new(h)?.with_quadrature(quad);
            let a_c = s.area(Mode::ClosedForm)?.value;
            let a_q = s.area(Mode::Quadrature)?;
            let v_c = s.volume(Mode::ClosedForm)?.value;
            let v_q = s.volume(Mode::Quadrature)?;
            let e = s.spinor_energy()?;
            let w = s.willmore(Mode::Quadrature)?;
            let iso = s.isoperimetric_residual()?;
            let iso2 = s.isoperimetric_residual_corrected()?;
            let err = a_q
                .err_estimate
                .max(v_q.err_estimate)
                .max(e.err_estimate)
                .max(w.err_estimate);
            Ok([
                h, a_c, a_q.value, v_c, v_q.value, e.value, w.value, iso, err, iso2,
            ])
        })
        .collect::<Result<_>>()?;
    let mut r = Report::new(
        "cmc-report",
        &[
            "H",
            "A_closed",
            "A_quad",
            "V_closed",
            "V_quad",
            "E",
            "W_quad",
            "iso_residual",
            "err",
        ],
    );
    r.param("H", list(hs))
        .tolerance("quad_tol", quad_tol)
        .tolerance("energy", CMC_TOL)
        .tolerance("closed_vs_quad_relative", CMC_TOL)
        .tolerance("isoperimetric", CMC_TOL);
    for v in &rows {
        let h = v[0];
        r.row(v[..9].iter().map(|x| Cell::Num(*x)).collect());
        r.assert(Assertion::below(
            format!("E=pi [H={h}]"),
            (v[5] - PI).abs(),
            CMC_TOL,
        ));
        r.assert(Assertion::below(
            format!("A closed=quad [H={h}]"),
            ((v[1] - v[2]) / v[1]).abs(),
            CMC_TOL,
        ));
        r.assert(Assertion::below(
            format!("V closed=quad [H={h}]"),
            ((v[3] - v[4]) / v[3]).abs(),
            CMC_TOL,
        ));
        r.assert(Assertion::below(
            format!("isoperimetric 4pi/H [H={h}]"),
            v[7].abs(),
            CMC_TOL,
        ));
        r.assert(Assertion::below(
            format!("isoperimetric 2pi/H [H={h}]"),
            v[9].abs(),
            CMC_TOL,
        ));
    }
    Ok(r)
}

/// Exact identities are asserted below this at every level.
pub const EXACT_TOL: f64 = 1e-12;
/// Largest admissible gap between observed and nominal order.
pub const ORDER_TOL: f64 = 0.3;
const EXACT_IDENTITIES: [&str; 3] = ["metric", "normal_unit", "isotropy"];

pub fn verify_identities(h: f64, grid: usize, order: usize, dump: Option<&Path>) -> Result<Report> {
    let st = identity_study(h, grid, order)?;
    if let Some(p) = dump {
        write_grid_csv(&sphere_patch_grid(h, grid, order)?, create(p)?)?;
    }
    let mut r = Report::new(
        "verify-identities",
        &[
            "identity",
            "kind",
            "residual_0",
            "residual_1",
            "residual_2",
            "order_01",
            "order_12",
        ],
    );
    r.param("H", h)
        .param("grid", grid)
        .param("grids", st.grids.map(|g| g.to_string()).join(","))
        .param("order", order)
        .tolerance("order", ORDER_TOL)
        .tolerance("exact", EXACT_TOL)
        .tolerance("main_equation_analytic", CMC_TOL);
    let mut table = st.table();
    let a = st.main_equation_analytic;
    table.push(("main_equation_analytic", a, [f64::NAN, f64::NAN]));
    for (name, v, o) in table {
        let exact = EXACT_IDENTITIES.contains(&name) || name == "main_equation_analytic";
        let kind = if exact { "exact" } else { "fd" };
        r.row(vec![
            name.into(),
            kind.into(),
            v[0].into(),
            v[1].into(),
            v[2].into(),
            o[0].into(),
            o[1].into(),
        ]);
        if name == "main_equation_analytic" {
            r.assert(Assertion::below(name, v[0].max(v[1]).max(v[2]), CMC_TOL));
        } else if exact {
            r.assert(Assertion::below(name, v[0].max(v[1]).max(v[2]), EXACT_TOL));
        } else {
            let gap = (o[0] - order as f64).abs().max((o[1] - order as f64).abs());
            r.assert(Assertion::below(format!("order {name}"), gap, ORDER_TOL));
        }
    }
    Ok(r)
}

/// Point-set distance bound for generated cmc meridians.
pub const PROFILE_TOL: f64 = 1e-6;

pub fn profile_ode(h: f64, tol: f64, samples: usize, curve_out: Option<&Path>) -> Result<Report> {
    let (curve, rep) = generate_cmc_profile_with(h, &ProfileOptions { tol, samples })?;
    let dist = closed_form_distance(&curve, h)?;
    let e = energy_direct(&curve)?;
    let er = energy_reduced(&curve)?;
    if let Some(p) = curve_out {
        curve.write_csv(create(p)?)?;
    }
    let mut r = Report::new(
        "profile-ode",
        &[
            "H",
            "samples",
            "length",
            "equator_s",
            "equator_u",
            "mirror_defect",
            "closed_form_distance",
            "E_direct",
            "E_reduced",
        ],
    );
    r.param("H", h)
        .param("samples", samples)
        .tolerance("ode_tol", tol)
        .tolerance("closed_form_distance", PROFILE_TOL);
    r.row(vec![
        h.into(),
        samples.into(),
        curve.length().into(),
        rep.equator_s.into(),
        rep.equator_u.into(),
        rep.mirror_defect.into(),
        dist.into(),
        e.into(),
        er.into(),
    ]);
    r.assert(Assertion::below(
        format!("closed-form distance [H={h}]"),
        dist,
        PROFILE_TOL,
    ));
    Ok(r)
}

fn read_profile(path: &Path) -> Result<ProfileCurve> {
    ProfileCurve::read_csv(BufReader::new(File::open(path)?))
}

/// Bound on `|E_direct − E_reduced|`.
pub const IDENTITY_TOL: f64 = 1e-6;
/// Slack of the lower bound `E ≥ π` on spheres.
pub const LOWER_BOUND_SLACK: f64 = 1e-9;

pub fn energy(path: &Path) -> Result<Report> {
    let curve = read_profile(path)?;
    let rep = revolution_report(&curve)?;
    let mut r = Report::new("energy", &["quantity", "value", "err"]);
    r.param("profile", path.display())
        .param("topology", curve.topology())
        .param("samples", curve.len())
        .tolerance("E_direct_vs_E_reduced", IDENTITY_TOL)
        .tolerance("lower_bound_slack", LOWER_BOUND_SLACK);
    for (name, est) in [
        ("E_direct", rep.e_direct),
        ("E_reduced", rep.e_reduced),
        ("E_imag", rep.e_imag),
        ("W", rep.willmore),
        ("area", rep.area),
        ("volume", rep.volume),
    ] {
        r.row(vec![name.into(), est.value.into(), est.err.into()]);
    }
    r.row(vec!["chi".into(), Cell::Int(rep.chi as i64), 0.0.into()]);
    r.assert(Assertion::below(
        "E_direct=E_reduced",
        (rep.e_direct.value - rep.e_reduced.value).abs(),
        IDENTITY_TOL,
    ));
    if curve.topology() == Topology::Sphere {
        r.assert(Assertion::at_least(
            "E>=pi",
            rep.e_direct.value,
            PI - LOWER_BOUND_SLACK,
        ));
    }
    Ok(r)
}

pub fn minimize(
    path: &Path,
    iters: usize,
    modes: usize,
    curve_out: Option<&Path>,
    trace_out: Option<&Path>,
) -> Result<Report> {
    let curve = read_profile(path)?;
    let opts = MinimizeOptions {
        max_iters: iters,
        modes,
        ..MinimizeOptions::default()
    };
    let out = minimize_energy(&curve, &opts)?;
    if let Some(p) = curve_out {
        out.curve.write_csv(create(p)?)?;
    }
    if let Some(p) = trace_out {
        out.trace.write_csv(create(p)?)?;
    }
    eprintln!(
        "status: {:?} after {} accepted steps",
        out.status,
        out.trace.rows.len().saturating_sub(1)
    );
    let mut r = Report::new("minimize", &["iter", "E", "violation", "step"]);
    r.param("profile", path.display())
        .param("iters", iters)
        .param("modes", modes)
        .tolerance("energy", opts.tol_energy)
        .tolerance("closure", opts.tol_closure)
        .tolerance("gradient", opts.tol_gradient)
        .tolerance("fd_step", opts.fd_step)
        .tolerance("lower_bound_slack", LOWER_BOUND_SLACK);
    for t in &out.trace.rows {
        r.row(vec![
            t.iter.into(),
            t.energy.into(),
            t.violation.into(),
            t.step.into(),
        ]);
    }
    let rises = out
        .trace
        .rows
        .windows(2)
        .map(|w| w[1].energy - w[0].energy)
        .fold(0.0f64, f64::max);
    r.assert(Assertion::below("trace monotone", rises, f64::MIN_POSITIVE));
    let last = out.trace.rows.last().map_or(f64::NAN, |t| t.violation);
    r.assert(Assertion::below(
        "closure",
        last,
        opts.tol_closure * (1.0 + f64::EPSILON),
    ));
    r.assert(Assertion::at_least(
        "E>=pi",
        out.final_energy(),
        PI - LOWER_BOUND_SLACK,
    ));
    Ok(r)
}

/// Bound on `|W − 16π|` and on closed form vs quadrature.
pub const S2XR_TOL: f64 = 1e-6;

pub fn s2xr_report(hs: &[f64], tol: f64, samples: usize) -> Result<Report> {
    let opts = SphereOptions { tol, samples };
    let rows: Vec<[f64; 6]> = hs
        .par_iter()
        .map(|&h| {
            let (area, khat) = generate_sphere_with(h, &opts)?.area_and_int_khat();
            let (area_c, khat_c) = closed_forms(h)?;
            let w = h * h * area + khat + area;
            let err = (area - area_c).abs().max((khat - khat_c).abs());
            Ok([h, area, khat, w, (w - 16.0 * PI).abs(), err])
        })
        .collect::<Result<_>>()?;
    let mut r = Report::new(
        "s2xr-report",
        &["h", "area", "int_khat", "willmore_type", "deviation", "err"],
    );
    r.param("h", list(hs))
        .param("samples", samples)
        .tolerance("ode_tol", tol)
        .tolerance("deviation", S2XR_TOL)
        .tolerance("closed_vs_quad", S2XR_TOL);
    for v in &rows {
        r.row(v.iter().map(|x| Cell::Num(*x)).collect());
        r.assert(Assertion::below(
            format!("willmore_type=16pi [h={}]", v[0]),
            v[4],
            S2XR_TOL,
        ));
        r.assert(Assertion::below(
            format!("closed=quad [h={}]", v[0]),
            v[5],
            S2XR_TOL,
        ));
    }
    Ok(r)
}

/// Bound on the relative defect of the pointwise criticality identities.
pub const CRITICALITY_TOL: f64 = 1e-13;

/// Worst relative defect of [`criticality_identities`] over `n` seeded random
/// inputs: `H` log-uniform in `[0.05, 20]`, `Z₃` in `[−3, 3]²`, `α` in `[−2, 2]`.
pub fn criticality_sweep(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let h = (rng.random_range(0.05f64.ln()..20f64.ln())).exp();
            let z3 = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let alpha = rng.random_range(-2.0..2.0);
            criticality_identities(h, z3, alpha).worst_relative()
        })
        .fold(0.0, f64::max)
}

pub fn el_residual(h: f64, grid: usize, order: usize, samples: usize, seed: u64) -> Result<Report> {
    let st = el_study(h, grid, order)?;
    let worst = criticality_sweep(samples, seed);
    let mut r = Report::new("el-residual", &["grid", "sup_residual", "observed_order"]);
    r.param("H", h)
        .param("grid", grid)
        .param("order", order)
        .param("samples", samples)
        .param("seed", seed)
        .tolerance("order", ORDER_TOL)
        .tolerance("criticality_relative", CRITICALITY_TOL);
    let orders = [f64::NAN, st.orders[0], st.orders[1]];
    for l in 0..3 {
        r.row(vec![st.grids[l].into(), st.sup[l].into(), orders[l].into()]);
    }
    let gap = (st.orders[0] - order as f64)
        .abs()
        .max((st.orders[1] - order as f64).abs());
    r.assert(Assertion::below("order el_residual", gap, ORDER_TOL));
    r.assert(Assertion::below(
        "criticality identities",
        worst,
        CRITICALITY_TOL,
    ));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["nil-willmore", "cmc-report", "--bogus"]), 2);
        assert_eq!(
            run([
                "nil-willmore",
                "verify-identities",
                "--H",
                "1",
                "--grid",
                "11",
                "--order",
                "3"
            ]),
            2
        );
        assert_eq!(run(["nil-willmore"]), 2);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(run(["nil-willmore", "--help"]), 0);
    }

    #[test]
    fn cmc_report_columns_and_assertions() {
        let r = cmc_report(&[0.5, 2.0], 1e-10).unwrap();
        assert_eq!(
            r.columns,
            [
                "H",
                "A_closed",
                "A_quad",
                "V_closed",
                "V_quad",
                "E",
                "W_quad",
                "iso_residual",
                "err"
            ]
        );
        assert_eq!(r.rows.len(), 2);
        let failed: Vec<_> = r.failures().map(|a| a.name.as_str()).collect();
        assert_eq!(
            failed,
            ["isoperimetric 4pi/H [H=0.5]", "isoperimetric 4pi/H [H=2]"]
        );
    }

    #[test]
    fn criticality_sweep_is_tiny() {
        assert!(criticality_sweep(2000, 3) < CRITICALITY_TOL);
    }

    #[test]
    fn el_report_passes() {
        let r = el_residual(0.8, 11, 2, 100, 1).unwrap();
        assert!(r.passed(), "{:?}", r.assertions);
    }
}
