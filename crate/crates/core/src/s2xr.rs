//! Constant mean curvature spheres of revolution in `S² × ℝ`.
//!
//! Meridians live in `B = {(x, y) : y ∈ [0, π]}` with `x` the `ℝ` coordinate
//! and `y` the polar angle on `S²`; `σ` is the angle with the `x`-axis and the
//! rotation orbits have length `2π sin y`, so `dμ = sin y dθ ds`. A sphere
//! leaves the axis `y = 0` perpendicularly (`σ = π/2`), turns until its
//! tangent is horizontal (`σ = π`), and is completed by reflection in the
//! line through that point; it returns to the axis with `σ = 3π/2`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::cmc_family::Mode;
use crate::error::{require_positive, Error, Result};
use crate::numerics::{derivative_uniform, integrate, integrate_uniform, OdeOptions, OdeState};
use crate::revolution::{read_profile_csv, write_profile_csv};

/// Endpoint tolerance of the closure test.
pub const CLOSURE_TOL: f64 = 1e-6;

/// `(ẋ, ẏ, σ̇) = (cosσ, sinσ, h + cot y cosσ)` for `y ∈ (0, π)`.
pub fn pedrosa_rhs(_x: f64, y: f64, sigma: f64, h: f64) -> Result<[f64; 3]> {
    if !(y > 0.0 && y < PI) {
        return Err(Error::InvalidParameter {
            name: "y",
            value: y,
            reason: "the meridian ODE is singular at y = 0 and y = π",
        });
    }
    let (s, c) = sigma.sin_cos();
    Ok([c, s, h + c / y.tan()])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S2RSample {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
}

/// Uniformly sampled sphere meridian with mean curvature parameter `h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S2RProfile {
    pub samples: Vec<S2RSample>,
    pub h: f64,
}

impl S2RProfile {
    pub fn step(&self) -> f64 {
        let n = self.samples.len();
        (self.samples[n - 1].s - self.samples[0].s) / (n - 1) as f64
    }

    /// Both ends on the axis (`y = 0` or `y = π`) with a tangent orthogonal to it.
    pub fn is_closed(&self) -> bool {
        let on_axis = |p: &S2RSample| {
            (p.y.min(PI - p.y)) <= CLOSURE_TOL && p.sigma.cos().abs() <= CLOSURE_TOL
        };
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => self.samples.len() > 1 && on_axis(a) && on_axis(b),
            _ => false,
        }
    }

    /// `σ̇ − cot y cosσ` per sample, continued by `2σ̇` on the axis.
    pub fn mean_curvature(&self) -> Result<Vec<f64>> {
        let sigma: Vec<f64> = self.samples.iter().map(|p| p.sigma).collect();
        let d = derivative_uniform(&sigma, self.step())?;
        Ok(self
            .samples
            .iter()
            .zip(&d)
            .map(|(p, ds)| {
                if p.y.min(PI - p.y) <= CLOSURE_TOL {
                    2.0 * ds
                } else {
                    ds - p.sigma.cos() / p.y.tan()
                }
            })
            .collect())
    }

    /// `K̂ = sin²σ` per sample.
    pub fn khat(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.sigma.sin().powi(2)).collect()
    }

    /// `(2π∫ sin y ds, 2π∫ sin²σ sin y ds)`.
    pub fn area_and_int_khat(&self) -> (f64, f64) {
        let h = self.step();
        let a: Vec<f64> = self.samples.iter().map(|p| p.y.sin()).collect();
        let k: Vec<f64> = self
            .samples
            .iter()
            .map(|p| p.y.sin() * p.sigma.sin().powi(2))
            .collect();
        (
            2.0 * PI * integrate_uniform(&a, h),
            2.0 * PI * integrate_uniform(&k, h),
        )
    }

    /// `# space=s2xr`, header `s,x,y,sigma`, one row per sample.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows = self.samples.iter().map(|p| [p.s, p.x, p.y, p.sigma]);
        write_profile_csv(out, "space=s2xr", ["s", "x", "y", "sigma"], rows)
    }

    /// Reads [`S2RProfile::write_csv`] output; `h` is recovered as the median
    /// of the pointwise mean curvature.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let (meta, rows) = read_profile_csv(input, ["s", "x", "y", "sigma"])?;
        match meta.iter().find(|(k, _)| k == "space") {
            Some((_, v)) if v == "s2xr" => {}
            Some((_, v)) => return Err(Error::MalformedCsv(format!("space `{v}` is not s2xr"))),
            None => return Err(Error::MissingField("space")),
        }
        if let Some(k) = rows.windows(2).position(|w| w[1][0] <= w[0][0]) {
            return Err(Error::MalformedCsv(format!(
                "s is not strictly increasing at data row {}",
                k + 2
            )));
        }
        let samples: Vec<S2RSample> = rows
            .iter()
            .map(|r| S2RSample {
                s: r[0],
                x: r[1],
                y: r[2],
                sigma: r[3],
            })
            .collect();
        let mut p = S2RProfile {
            samples,
            h: f64::NAN,
        };
        let mut hs = p.mean_curvature()?;
        hs.sort_by(f64::total_cmp);
        p.h = hs[hs.len() / 2];
        Ok(p)
    }
}

/// Sampling and tolerance of [`generate_sphere_with`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SphereOptions {
    pub tol: f64,
    pub samples: usize,
}

impl Default for SphereOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            samples: 2001,
        }
    }
}

pub fn generate_sphere(h: f64, tol: f64) -> Result<S2RProfile> {
    generate_sphere_with(
        h,
        &SphereOptions {
            tol,
            ..SphereOptions::default()
        },
    )
}

/// Shoots from the pole `y = ε` with `σ = π/2 + hε/2`, `x = −hε²/4` to the
/// horizontal tangent and reflects.
pub fn generate_sphere_with(h: f64, opts: &SphereOptions) -> Result<S2RProfile> {
    require_positive("h", h)?;
    require_positive("tol", opts.tol)?;
    if opts.samples < 5 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: opts.samples as f64,
            reason: "need at least 5 samples",
        });
    }
    let eps = 1e-8;
    let series = |s: f64| [-0.25 * h * s * s, s, FRAC_PI_2 + 0.5 * h * s];
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let (s, c) = y[2].sin_cos();
        dy[0] = c;
        dy[1] = s;
        dy[2] = h + c / y[1].tan();
    };
    let ode = OdeOptions::with_tol((opts.tol * 1e-3).max(1e-13));
    let traj = integrate(
        rhs,
        &OdeState::new(eps, series(eps).to_vec()),
        4.0 * PI,
        &ode,
        Some(|_: f64, y: &[f64]| y[2] - PI),
        &[],
    )?;
    let eq = traj
        .event
        .clone()
        .ok_or_else(|| Error::ClosureFailure("tangent never becomes horizontal".into()))?;
    let (se, xe) = (eq.s, eq.y[0]);
    if !(eq.y[1] < PI) {
        return Err(Error::ClosureFailure(format!(
            "meridian left B: y = {}",
            eq.y[1]
        )));
    }
    let half = |s: f64| -> Result<[f64; 3]> {
        if s <= eps {
            return Ok(series(s));
        }
        let y = traj
            .eval(s.min(se))
            .ok_or_else(|| Error::ClosureFailure(format!("no dense output at s = {s}")))?;
        Ok([y[0], y[1], y[2]])
    };
    let n = opts.samples;
    let len = 2.0 * se;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let s = len * k as f64 / (n - 1) as f64;
        let (x, y, sigma) = if s <= se {
            let p = half(s)?;
            (p[0], p[1], p[2])
        } else {
            let p = half(len - s)?;
            (2.0 * xe - p[0], p[1], 2.0 * PI - p[2])
        };
        samples.push(S2RSample { s, x, y, sigma });
    }
    samples[0].y = 0.0;
    samples[n - 1].y = 0.0;
    let profile = S2RProfile { samples, h };
    if !profile.is_closed() {
        return Err(Error::ClosureFailure(
            "sampled meridian does not close on the axis".into(),
        ));
    }
    Ok(profile)
}

/// `(area, ∫K̂ dμ)` in closed form, with `L = ln((√(1+h²)+1)/(√(1+h²)−1))`.
pub fn closed_forms(h: f64) -> Result<(f64, f64)> {
    require_positive("h", h)?;
    let q = (1.0 + h * h).sqrt();
    let l = ((q + 1.0) / (q - 1.0)).ln();
    let h2 = h * h;
    let area = 4.0 * PI * (2.0 / (1.0 + h2) + h2 * (1.0 + h2).powf(-1.5) * l);
    let int_khat = 4.0 * PI * (2.0 - h2 / q * l);
    Ok((area, int_khat))
}

/// `∫(H² + K̂ + 1) dμ = h²·area + ∫K̂ + area`.
pub fn willmore_type_value(h: f64, mode: Mode) -> Result<f64> {
    let (area, khat) = match mode {
        Mode::ClosedForm => closed_forms(h)?,
        Mode::Quadrature => generate_sphere(h, 1e-10)?.area_and_int_khat(),
    };
    Ok(h * h * area + khat + area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_substitutions() {
        let d = pedrosa_rhs(0.0, FRAC_PI_2, 0.3, 1.7).unwrap();
        assert!((d[2] - 1.7).abs() < 1e-15);
        let d = pedrosa_rhs(0.0, 1.0, FRAC_PI_2, 0.4).unwrap();
        assert!(d[0].abs() < 1e-16 && (d[1] - 1.0).abs() < 1e-16 && (d[2] - 0.4).abs() < 1e-15);
        assert!(pedrosa_rhs(0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn closed_form_spot_values() {
        let (a, k) = closed_forms(1.0).unwrap();
        let l = 2.0 * (1.0 + 2f64.sqrt()).ln();
        assert!((a - 4.0 * PI * (1.0 + l / (2.0 * 2f64.sqrt()))).abs() < 1e-12);
        assert!((k - 4.0 * PI * (2.0 - l / 2f64.sqrt())).abs() < 1e-12);
        assert!((a - 20.40).abs() < 0.01 && (k - 9.47).abs() < 0.01);
    }

    #[test]
    fn generated_sphere_matches_closed_forms() {
        for h in [0.5, 2.0] {
            let p = generate_sphere(h, 1e-10).unwrap();
            let (a, k) = p.area_and_int_khat();
            let (ac, kc) = closed_forms(h).unwrap();
            assert!(
                (a - ac).abs() < 1e-6 && (k - kc).abs() < 1e-6,
                "h={h}: {a} {ac} {k} {kc}"
            );
            for hh in p.mean_curvature().unwrap() {
                assert!((hh - h).abs() < 1e-6, "{hh}");
            }
        }
    }

    #[test]
    fn willmore_type_is_16_pi() {
        for h in [0.25, 1.0, 4.0] {
            let w = willmore_type_value(h, Mode::ClosedForm).unwrap();
            assert!((w - 16.0 * PI).abs() < 1e-9, "{w}");
        }
    }

    #[test]
    fn area_decreases_for_large_h() {
        let mut prev = f64::INFINITY;
        for k in 0..40 {
            let h = 1.0 + 0.5 * k as f64;
            let (a, _) = closed_forms(h).unwrap();
            assert!(a < prev);
            prev = a;
        }
        let h: f64 = 200.0;
        let (a, _) = closed_forms(h).unwrap();
        assert!((a * h * h / (16.0 * PI) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn csv_round_trip() {
        let p = generate_sphere_with(
            1.0,
            &SphereOptions {
                tol: 1e-10,
                samples: 101,
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf.clone())
            .unwrap()
            .starts_with("# space=s2xr\ns,x,y,sigma\n"));
        let back = S2RProfile::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.samples, p.samples);
        assert!((back.h - 1.0).abs() < 1e-6);
    }
}
