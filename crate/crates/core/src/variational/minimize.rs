//! Descent of the reduced energy over closed sphere meridians.
//!
//! The angle function is `σ = σ₀ + Σ_{k=2}^{K} c_k sin(kπs/L) + c₁ sin(πs/L)`,
//! where `σ₀` is the initial angle and `c₁` is fixed by the closure condition
//! `∫cosσ ds = 0` at every evaluation. The free coefficients are updated by
//! BFGS with central-difference gradients and Armijo backtracking.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::perturb::{close_sphere, require_sphere, Closed};
use crate::error::{Error, Result};
use crate::revolution::{energy_reduced, self_intersection, ProfileCurve};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Highest sine mode `K`.
    pub modes: usize,
    /// Stop when an accepted step changes `E` by less than this.
    pub tol_energy: f64,
    /// Largest admissible closure violation `|u(L)|` at acceptance.
    pub tol_closure: f64,
    /// Stop when the gradient norm drops below this.
    pub tol_gradient: f64,
    pub fd_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            modes: 16,
            tol_energy: 1e-13,
            tol_closure: 1e-10,
            tol_gradient: 1e-9,
            fd_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    #[serde(rename = "E")]
    pub energy: f64,
    pub violation: f64,
    pub step: f64,
}

/// Accepted iterates of a descent run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct DescentTrace {
    pub rows: Vec<TraceRow>,
}

impl DescentTrace {
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].energy <= w[0].energy)
    }

    /// Header `iter,E,violation,step`, one row per accepted iterate.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "E", "violation", "step"])?;
        for r in &self.rows {
            w.write_record([
                r.iter.to_string(),
                r.energy.to_string(),
                r.violation.to_string(),
                r.step.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimizeStatus {
    Converged,
    LineSearchFailure,
    IterationBudget,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeOutcome {
    pub curve: ProfileCurve,
    pub trace: DescentTrace,
    pub status: MinimizeStatus,
    pub coefficients: Vec<f64>,
}

impl MinimizeOutcome {
    pub fn converged(&self) -> bool {
        self.status == MinimizeStatus::Converged
    }

    pub fn final_energy(&self) -> f64 {
        self.trace.rows.last().map_or(f64::NAN, |r| r.energy)
    }
}

struct Problem {
    s: Vec<f64>,
    sigma0: Vec<f64>,
    basis: Vec<Vec<f64>>,
    v0: f64,
}

struct Point {
    c: Vec<f64>,
    closed: Closed,
    energy: f64,
}

impl Problem {
    fn sigma(&self, c: &[f64]) -> Vec<f64> {
        let mut out = self.sigma0.clone();
        for (ck, b) in c.iter().zip(&self.basis) {
            for (o, bk) in out.iter_mut().zip(b) {
                *o += ck * bk;
            }
        }
        out
    }

    fn evaluate(&self, c: &[f64], bump_guess: f64) -> Option<(Closed, f64)> {
        let closed = close_sphere(&self.s, &self.sigma(c), self.v0, bump_guess).ok()?;
        let e = energy_reduced(&closed.curve).ok()?;
        e.is_finite().then_some((closed, e))
    }

    fn energy(&self, c: &[f64], bump_guess: f64) -> f64 {
        self.evaluate(c, bump_guess)
            .map_or(f64::INFINITY, |(_, e)| e)
    }

    fn gradient(&self, x: &Point, step: f64) -> Option<Vec<f64>> {
        let g: Vec<f64> = (0..x.c.len())
            .into_par_iter()
            .map(|i| {
                let mut cp = x.c.clone();
                let mut cm = x.c.clone();
                cp[i] += step;
                cm[i] -= step;
                (self.energy(&cp, x.closed.bump) - self.energy(&cm, x.closed.bump)) / (2.0 * step)
            })
            .collect();
        g.iter().all(|v| v.is_finite()).then_some(g)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes the reduced energy starting from a closed sphere meridian.
///
/// Trial points whose meridian cannot be closed, touches the axis or
/// intersects itself are rejected by the line search.
pub fn minimize_energy(initial: &ProfileCurve, opts: &MinimizeOptions) -> Result<MinimizeOutcome> {
    require_sphere(initial)?;
    if opts.modes < 2 {
        return Err(Error::InvalidParameter {
            name: "modes",
            value: opts.modes as f64,
            reason: "need at least mode 2",
        });
    }
    let s = initial.s();
    let (s0, len) = (s[0], initial.length());
    let basis: Vec<Vec<f64>> = (2..=opts.modes)
        .map(|k| {
            s.iter()
                .map(|t| (k as f64 * PI * (t - s0) / len).sin())
                .collect()
        })
        .collect();
    let prob = Problem {
        s,
        sigma0: initial.sigma(),
        basis,
        v0: initial.samples()[0].v,
    };
    let dim = opts.modes - 1;
    let (closed, energy) = prob
        .evaluate(&vec![0.0; dim], 0.0)
        .ok_or_else(|| Error::ClosureFailure("initial meridian cannot be re-closed".into()))?;
    let mut x = Point {
        c: vec![0.0; dim],
        closed,
        energy,
    };
    let mut trace = DescentTrace {
        rows: vec![TraceRow {
            iter: 0,
            energy: x.energy,
            violation: x.closed.violation,
            step: 0.0,
        }],
    };
    let mut hinv = identity(dim);
    let mut status = MinimizeStatus::IterationBudget;
    let mut grad = prob.gradient(&x, opts.fd_step).ok_or_else(|| {
        Error::ClosureFailure("gradient stencil leaves the admissible set".into())
    })?;
    for iter in 1..=opts.max_iters {
        if dot(&grad, &grad).sqrt() < opts.tol_gradient && x.closed.violation <= opts.tol_closure {
            status = MinimizeStatus::Converged;
            break;
        }
        let mut dir: Vec<f64> = hinv.iter().map(|row| -dot(row, &grad)).collect();
        if dot(&dir, &grad) >= 0.0 {
            hinv = identity(dim);
            dir = grad.iter().map(|g| -g).collect();
        }
        let Some((next, alpha)) = line_search(&prob, &x, &grad, &dir) else {
            if hinv != identity(dim) {
                hinv = identity(dim);
                continue;
            }
            status = MinimizeStatus::LineSearchFailure;
            break;
        };
        let step = alpha * dot(&dir, &dir).sqrt();
        let de = x.energy - next.energy;
        let Some(g_next) = prob.gradient(&next, opts.fd_step) else {
            status = MinimizeStatus::LineSearchFailure;
            break;
        };
        let sk: Vec<f64> = next.c.iter().zip(&x.c).map(|(a, b)| a - b).collect();
        let yk: Vec<f64> = g_next.iter().zip(&grad).map(|(a, b)| a - b).collect();
        bfgs_update(&mut hinv, &sk, &yk);
        x = next;
        grad = g_next;
        trace.rows.push(TraceRow {
            iter,
            energy: x.energy,
            violation: x.closed.violation,
            step,
        });
        if de.abs() < opts.tol_energy && x.closed.violation <= opts.tol_closure {
            status = MinimizeStatus::Converged;
            break;
        }
    }
    Ok(MinimizeOutcome {
        curve: x.closed.curve,
        trace,
        status,
        coefficients: x.c,
    })
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn line_search(prob: &Problem, x: &Point, grad: &[f64], dir: &[f64]) -> Option<(Point, f64)> {
    let slope = dot(grad, dir);
    let mut alpha = 1.0;
    for _ in 0..60 {
        let c: Vec<f64> = x.c.iter().zip(dir).map(|(a, d)| a + alpha * d).collect();
        if let Some((closed, e)) = prob.evaluate(&c, x.closed.bump) {
            if e <= x.energy + 1e-4 * alpha * slope
                && e <= x.energy
                && self_intersection(&closed.curve).is_none()
            {
                return Some((
                    Point {
                        c,
                        closed,
                        energy: e,
                    },
                    alpha,
                ));
            }
        }
        alpha *= 0.5;
    }
    None
}

fn bfgs_update(hinv: &mut [Vec<f64>], s: &[f64], y: &[f64]) {
    let sy = dot(s, y);
    if !(sy > 1e-300) {
        return;
    }
    let n = s.len();
    let hy: Vec<f64> = hinv.iter().map(|row| dot(row, y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            hinv[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::perturb::perturb;
    use super::*;
    use crate::revolution::{
        closure_and_topology, generate_cmc_profile, geometry_fields, ProfileOptions,
    };

    fn cmc(h: f64) -> ProfileCurve {
        let opts = ProfileOptions {
            tol: 1e-10,
            samples: 801,
        };
        crate::revolution::generate_cmc_profile_with(h, &opts)
            .unwrap()
            .0
    }

    #[test]
    fn cmc_start_terminates_immediately() {
        let c = generate_cmc_profile(1.0, 1e-10).unwrap();
        let out = minimize_energy(&c, &MinimizeOptions::default()).unwrap();
        assert!(out.converged());
        assert_eq!(out.trace.rows.len(), 1);
        assert!((out.final_energy() - PI).abs() < 1e-9);
    }

    #[test]
    fn descends_back_to_the_cmc_sphere() {
        let start = perturb(&cmc(1.0), 0.05, 2, 0).unwrap();
        let out = minimize_energy(&start, &MinimizeOptions::default()).unwrap();
        assert!(out.trace.is_monotone());
        assert!(out.final_energy() < PI + 1e-4, "{}", out.final_energy());
        let f = geometry_fields(&out.curve).unwrap();
        let sup = f.reduced.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(sup < 1e-3, "{sup}");
        assert_eq!(closure_and_topology(&out.curve).chi, Some(2));
    }

    #[test]
    fn trace_csv_header() {
        let t = DescentTrace {
            rows: vec![TraceRow {
                iter: 0,
                energy: 3.5,
                violation: 0.0,
                step: 0.0,
            }],
        };
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "iter,E,violation,step\n0,3.5,0,0\n"
        );
    }
}
