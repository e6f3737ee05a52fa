//! Dormand–Prince 5(4) integration with dense output and terminal events.

use crate::error::{Error, Result};

/// A point of a trajectory: independent variable and state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeState {
    pub s: f64,
    pub y: Vec<f64>,
}

impl OdeState {
    pub fn new(s: f64, y: Vec<f64>) -> Self {
        Self { s, y }
    }

    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.y.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Upper bound on |step|; `f64::INFINITY` disables it.
    pub max_step: f64,
    pub initial_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self::with_tol(1e-10)
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rel_tol: tol,
            abs_tol: tol,
            max_steps: 200_000,
            max_step: f64::INFINITY,
            initial_step: None,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Quartic continuous extension over one accepted step.
#[derive(Debug, Clone)]
struct Segment {
    s0: f64,
    h: f64,
    r: [Vec<f64>; 5],
}

impl Segment {
    fn eval(&self, s: f64) -> Vec<f64> {
        let th = (s - self.s0) / self.h;
        let th1 = 1.0 - th;
        (0..self.r[0].len())
            .map(|i| {
                let r = &self.r;
                r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])))
            })
            .collect()
    }
}

/// Accepted steps of an integration together with their dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Step endpoints, starting with the initial state.
    pub states: Vec<OdeState>,
    /// Set when a terminal event stopped the integration; equals the last state.
    pub event: Option<OdeState>,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    segments: Vec<Segment>,
}

impl Trajectory {
    pub fn start(&self) -> &OdeState {
        &self.states[0]
    }

    pub fn end(&self) -> &OdeState {
        self.states
            .last()
            .expect("trajectory holds its initial state")
    }

    /// Dense-output value at `s`, or `None` outside the integrated range.
    pub fn eval(&self, s: f64) -> Option<Vec<f64>> {
        let (a, b) = (self.start().s, self.end().s);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if !(s >= lo && s <= hi) {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.start().y.clone());
        }
        let forward = b >= a;
        // segments are ordered along the direction of integration
        let idx = self.segments.partition_point(|seg| {
            if forward {
                seg.s0 + seg.h < s
            } else {
                seg.s0 + seg.h > s
            }
        });
        let seg = &self.segments[idx.min(self.segments.len() - 1)];
        Some(seg.eval(s))
    }
}

fn rms_norm(v: &[f64], sc: &[f64]) -> f64 {
    let n = v.len().max(1) as f64;
    (v.iter().zip(sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n).sqrt()
}

struct Stepper<'a, F> {
    rhs: &'a mut F,
    n: usize,
    evaluations: usize,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl<F: FnMut(f64, &[f64], &mut [f64])> Stepper<'_, F> {
    fn call(&mut self, s: f64, y: &[f64], slot: usize) {
        let mut out = std::mem::take(&mut self.k[slot]);
        (self.rhs)(s, y, &mut out);
        self.k[slot] = out;
        self.evaluations += 1;
    }

    /// One trial step from (s, y) with `k[0] = f(s, y)` already populated.
    /// Returns the new state and the embedded error vector.
    fn step(&mut self, s: f64, y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let stage = |tmp: &mut Vec<f64>, k: &[Vec<f64>; 7], coeffs: &[(usize, f64)]| {
            for i in 0..n {
                let mut acc = 0.0;
                for &(j, c) in coeffs {
                    acc += c * k[j][i];
                }
                tmp[i] = y[i] + h * acc;
            }
        };
        let mut tmp = std::mem::take(&mut self.tmp);
        stage(&mut tmp, &self.k, &[(0, A21)]);
        self.call(s + C2 * h, &tmp, 1);
        stage(&mut tmp, &self.k, &[(0, A31), (1, A32)]);
        self.call(s + C3 * h, &tmp, 2);
        stage(&mut tmp, &self.k, &[(0, A41), (1, A42), (2, A43)]);
        self.call(s + C4 * h, &tmp, 3);
        stage(&mut tmp, &self.k, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
        self.call(s + C5 * h, &tmp, 4);
        stage(
            &mut tmp,
            &self.k,
            &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)],
        );
        self.call(s + h, &tmp, 5);
        let mut y1 = vec![0.0; n];
        stage(
            &mut y1,
            &self.k,
            &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)],
        );
        self.call(s + h, &y1, 6);
        let k = &self.k;
        let err = (0..n)
            .map(|i| {
                h * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i])
            })
            .collect();
        self.tmp = tmp;
        (y1, err)
    }

    fn segment(&self, s0: f64, y0: &[f64], y1: &[f64], h: f64) -> Segment {
        let k = &self.k;
        let n = self.n;
        let r1 = y0.to_vec();
        let r2: Vec<f64> = (0..n).map(|i| y1[i] - y0[i]).collect();
        let r3: Vec<f64> = (0..n).map(|i| h * k[0][i] - r2[i]).collect();
        let r4: Vec<f64> = (0..n).map(|i| r2[i] - h * k[6][i] - r3[i]).collect();
        let r5: Vec<f64> = (0..n)
            .map(|i| {
                h * (D1 * k[0][i]
                    + D3 * k[2][i]
                    + D4 * k[3][i]
                    + D5 * k[4][i]
                    + D6 * k[5][i]
                    + D7 * k[6][i])
            })
            .collect();
        Segment {
            s0,
            h,
            r: [r1, r2, r3, r4, r5],
        }
    }
}

/// Integrate `y' = rhs(s, y)` from `y0` to `s_end` with per-step tolerance `tol`.
pub fn ode_solve<F>(rhs: F, y0: &OdeState, s_end: f64, tol: f64) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    crate::error::require_positive("tol", tol)?;
    integrate(
        rhs,
        y0,
        s_end,
        &OdeOptions::with_tol(tol),
        None::<fn(f64, &[f64]) -> f64>,
        &[],
    )
}

/// General driver.
///
/// `event`: integration stops at the first sign change of `g(s, y)`; the
/// crossing is located on the dense output and then landed with a genuine step.
/// `stops`: abscissae that accepted steps must hit exactly (monotone along the
/// direction of integration); useful for sampling without interpolation error.
pub fn integrate<F, G>(
    mut rhs: F,
    y0: &OdeState,
    s_end: f64,
    opts: &OdeOptions,
    mut event: Option<G>,
    stops: &[f64],
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    G: FnMut(f64, &[f64]) -> f64,
{
    if !y0.is_finite() || !s_end.is_finite() {
        return Err(Error::InvalidParameter {
            name: "y0",
            value: y0.s,
            reason: "initial state and end point must be finite",
        });
    }
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: opts.rel_tol.min(opts.abs_tol),
            reason: "tolerances must be positive",
        });
    }
    let n = y0.y.len();
    let dir = if s_end >= y0.s { 1.0 } else { -1.0 };
    let mut traj = Trajectory {
        states: vec![y0.clone()],
        event: None,
        rejected_steps: 0,
        rhs_evaluations: 0,
        segments: Vec::new(),
    };
    if s_end == y0.s {
        return Ok(traj);
    }
    let mut st = Stepper {
        rhs: &mut rhs,
        n,
        evaluations: 0,
        k: std::array::from_fn(|_| vec![0.0; n]),
        tmp: vec![0.0; n],
    };
    let mut s = y0.s;
    let mut y = y0.y.clone();
    st.call(s, &y, 0);
    if st.k[0].iter().any(|v| !v.is_finite()) {
        return Err(Error::StepUnderflow { s });
    }
    let scale = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(x, z)| opts.abs_tol + opts.rel_tol * x.abs().max(z.abs()))
            .collect()
    };
    let span = (s_end - s).abs();
    let mut h = match opts.initial_step {
        Some(h0) => h0.abs(),
        None => {
            let sc = scale(&y, &y);
            let d0 = rms_norm(&y, &sc);
            let d1 = rms_norm(&st.k[0], &sc);
            let h0 = if d0 < 1e-5 || d1 < 1e-5 {
                1e-6
            } else {
                0.01 * d0 / d1
            };
            let h0 = h0.min(span);
            let y1: Vec<f64> = (0..n).map(|i| y[i] + dir * h0 * st.k[0][i]).collect();
            let mut f1 = vec![0.0; n];
            (st.rhs)(s + dir * h0, &y1, &mut f1);
            st.evaluations += 1;
            let df: Vec<f64> = (0..n).map(|i| f1[i] - st.k[0][i]).collect();
            let d2 = rms_norm(&df, &sc) / h0;
            let h1 = if d1.max(d2) <= 1e-15 || !d2.is_finite() {
                (h0 * 1e-3).max(1e-6)
            } else {
                (0.01 / d1.max(d2)).powf(0.2)
            };
            (100.0 * h0).min(h1)
        }
    };
    h = h.min(opts.max_step).min(span);
    let mut g_prev = event.as_mut().map(|g| g(s, &y));
    let mut stop_idx = 0usize;
    let mut last_rejected = false;
    let mut steps = 0usize;
    loop {
        while stop_idx < stops.len() && dir * (stops[stop_idx] - s) <= 0.0 {
            stop_idx += 1;
        }
        let remaining = (s_end - s).abs();
        let mut target_end = false;
        let mut hh = h;
        if hh >= remaining {
            hh = remaining;
            target_end = true;
        }
        let mut hit_stop = None;
        if stop_idx < stops.len() {
            let to_stop = (stops[stop_idx] - s).abs();
            if hh >= to_stop && to_stop < remaining {
                hh = to_stop;
                hit_stop = Some(stops[stop_idx]);
                target_end = false;
            }
        }
        if hh <= 16.0 * f64::EPSILON * s.abs().max(1.0) {
            return Err(Error::StepUnderflow { s });
        }
        if steps >= opts.max_steps {
            return Err(Error::StepBudgetExhausted { s, steps });
        }
        steps += 1;
        let hs = dir * hh;
        let (y1, err) = st.step(s, &y, hs);
        let finite = y1.iter().all(|v| v.is_finite()) && st.k[6].iter().all(|v| v.is_finite());
        let en = if finite {
            let sc = scale(&y, &y1);
            err.iter()
                .zip(&sc)
                .map(|(e, c)| (e / c).abs())
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        if en > 1.0 || !en.is_finite() {
            traj.rejected_steps += 1;
            let fac = if en.is_finite() {
                (0.9 * en.powf(-0.2)).max(0.2)
            } else {
                0.25
            };
            h = hh * fac;
            last_rejected = true;
            continue;
        }
        let s1 = if target_end {
            s_end
        } else if let Some(p) = hit_stop {
            p
        } else {
            s + hs
        };
        let seg = st.segment(s, &y, &y1, s1 - s);
        if let (Some(g), Some(gp)) = (event.as_mut(), g_prev) {
            let g1 = g(s1, &y1);
            if gp != 0.0 && (g1 == 0.0 || g1.signum() != gp.signum()) {
                let s_ev = locate_root(|x| g(x, &seg.eval(x)), s, s1, gp, g1);
                let (y_ev, _) = st.step(s, &y, s_ev - s);
                let seg = st.segment(s, &y, &y_ev, s_ev - s);
                traj.segments.push(seg);
                let ev = OdeState::new(s_ev, y_ev);
                traj.states.push(ev.clone());
                traj.event = Some(ev);
                traj.rhs_evaluations = st.evaluations;
                return Ok(traj);
            }
            g_prev = Some(g1);
        }
        traj.segments.push(seg);
        s = s1;
        y = y1;
        traj.states.push(OdeState::new(s, y.clone()));
        if target_end {
            traj.rhs_evaluations = st.evaluations;
            return Ok(traj);
        }
        let k7 = std::mem::take(&mut st.k[6]);
        st.k[6] = std::mem::replace(&mut st.k[0], k7);
        let mut fac = if en == 0.0 {
            10.0
        } else {
            (0.9 * en.powf(-0.2)).clamp(0.2, 10.0)
        };
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        // a step shortened to hit a stop should not shrink the next one
        let base = if hit_stop.is_some() { h.max(hh) } else { hh };
        h = (base * fac).min(opts.max_step);
    }
}

/// Illinois-modified regula falsi on a bracketing interval.
fn locate_root<G: FnMut(f64) -> f64>(
    mut g: G,
    mut a: f64,
    mut b: f64,
    mut ga: f64,
    mut gb: f64,
) -> f64 {
    if gb == 0.0 {
        return b;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * gb - b * ga) / (gb - ga);
        let c = if c.is_finite() && (c - a) * (c - b) < 0.0 {
            c
        } else {
            0.5 * (a + b)
        };
        let gc = g(c);
        if gc == 0.0 {
            return c;
        }
        if gc.signum() == gb.signum() {
            b = c;
            gb = gc;
            if side == -1 {
                ga *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            ga = gc;
            if side == 1 {
                gb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1e-300) {
            break;
        }
    }
    if ga.abs() < gb.abs() {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn exponential_growth() {
        let tr = ode_solve(
            |_, y, d| d[0] = y[0],
            &OdeState::new(0.0, vec![1.0]),
            1.0,
            1e-10,
        )
        .unwrap();
        assert_eq!(tr.end().s, 1.0);
        assert!((tr.end().y[0] - E).abs() < 1e-9);
        let mid = tr.eval(0.5).unwrap();
        assert!((mid[0] - 0.5f64.exp()).abs() < 1e-9);
        assert!(tr.eval(1.5).is_none());
    }

    #[test]
    fn unit_circle_closes() {
        // x' = cos θ, y' = sin θ, θ' = 1 traces a unit circle of length 2π
        let rhs = |_: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[2].cos();
            d[1] = y[2].sin();
            d[2] = 1.0;
        };
        let tr = ode_solve(
            rhs,
            &OdeState::new(0.0, vec![0.0, 0.0, 0.0]),
            2.0 * PI,
            1e-12,
        )
        .unwrap();
        let end = &tr.end().y;
        assert!(end[0].abs() < 1e-10 && end[1].abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        let tr = ode_solve(
            |_, y, d| d[0] = y[0],
            &OdeState::new(1.0, vec![E]),
            0.0,
            1e-11,
        )
        .unwrap();
        assert!((tr.end().y[0] - 1.0).abs() < 1e-10);
        assert!((tr.eval(0.25).unwrap()[0] - 0.25f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn event_stops_at_crossing() {
        let rhs = |_: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = -y[0];
        };
        let tr = integrate(
            rhs,
            &OdeState::new(0.0, vec![1.0, 0.0]),
            10.0,
            &OdeOptions::with_tol(1e-12),
            Some(|_: f64, y: &[f64]| y[0]),
            &[],
        )
        .unwrap();
        let ev = tr.event.expect("cos crosses zero");
        assert!((ev.s - PI / 2.0).abs() < 1e-10);
        assert!(ev.y[0].abs() < 1e-11);
    }

    #[test]
    fn stops_are_hit_exactly() {
        let stops: Vec<f64> = (1..=10).map(|i| i as f64 * 0.1).collect();
        let tr = integrate(
            |_, y: &[f64], d: &mut [f64]| d[0] = -y[0],
            &OdeState::new(0.0, vec![1.0]),
            1.0,
            &OdeOptions::with_tol(1e-10),
            None::<fn(f64, &[f64]) -> f64>,
            &stops,
        )
        .unwrap();
        for p in &stops {
            assert!(tr.states.iter().any(|st| st.s == *p), "missing stop {p}");
        }
    }

    #[test]
    fn singularity_reports_underflow() {
        // y' = y² blows up at s = 1
        let err = ode_solve(
            |_, y, d| d[0] = y[0] * y[0],
            &OdeState::new(0.0, vec![1.0]),
            2.0,
            1e-10,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::StepUnderflow { .. } | Error::StepBudgetExhausted { .. }
        ));
    }

    #[test]
    fn budget_exhaustion() {
        let opts = OdeOptions {
            max_steps: 5,
            ..OdeOptions::with_tol(1e-12)
        };
        let err = integrate(
            |_, y: &[f64], d: &mut [f64]| d[0] = (50.0 * y[0]).cos(),
            &OdeState::new(0.0, vec![0.0]),
            100.0,
            &opts,
            None::<fn(f64, &[f64]) -> f64>,
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, Error::StepBudgetExhausted { steps: 5, .. }));
    }

    #[test]
    fn deterministic() {
        let run = || {
            ode_solve(
                |s, y, d| d[0] = (s * y[0]).sin() + 1.0,
                &OdeState::new(0.0, vec![0.3]),
                3.0,
                1e-9,
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.states, b.states);
    }
}
