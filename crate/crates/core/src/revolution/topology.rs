//! Closure, topology classification and self-intersection of meridians.

use serde::Serialize;

use super::curve::{ProfileCurve, Topology};
use crate::error::{Error, Result};
use crate::numerics::derivative_uniform;

/// Endpoint and periodicity tolerance.
pub const TOPOLOGY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct ClosureDiagnostics {
    pub detected: Option<Topology>,
    pub chi: Option<i32>,
    pub length: f64,
    pub start_u: f64,
    pub start_sin_sigma: f64,
    pub end_u: f64,
    pub end_sin_sigma: f64,
    /// `max(|Δu|, |Δv|, |sin(Δσ/2)|)` between the first and last sample.
    pub periodic_gap: f64,
    pub min_interior_u: f64,
    /// `sup |u̇ − cosσ|` with `u̇` by finite differences; `None` for
    /// non-uniform or very short samplings.
    pub kinematic_residual: Option<f64>,
    pub self_intersection: Option<(usize, usize)>,
    pub failure: Option<String>,
}

impl ClosureDiagnostics {
    pub fn is_closed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks the curve invariants and classifies it as a sphere (`χ = 2`) or a
/// torus (`χ = 0`). Never fails; problems are reported in `failure`.
pub fn closure_and_topology(curve: &ProfileCurve) -> ClosureDiagnostics {
    let p = curve.samples();
    let n = p.len();
    let length = curve.length();
    let mut d = ClosureDiagnostics {
        detected: None,
        chi: None,
        length,
        start_u: p.first().map_or(f64::NAN, |q| q.u),
        start_sin_sigma: p.first().map_or(f64::NAN, |q| q.sigma.sin().abs()),
        end_u: p.last().map_or(f64::NAN, |q| q.u),
        end_sin_sigma: p.last().map_or(f64::NAN, |q| q.sigma.sin().abs()),
        periodic_gap: f64::NAN,
        min_interior_u: f64::NAN,
        kinematic_residual: None,
        self_intersection: None,
        failure: None,
    };
    if n < 2 || !(length > 0.0) {
        d.failure = Some("open meridian: zero length".into());
        return d;
    }
    let (a, b) = (p[0], p[n - 1]);
    d.periodic_gap = (b.u - a.u)
        .abs()
        .max((b.v - a.v).abs())
        .max((0.5 * (b.sigma - a.sigma)).sin().abs());
    d.min_interior_u = p[1..n - 1]
        .iter()
        .map(|q| q.u)
        .fold(f64::INFINITY, f64::min);
    if let Ok(h) = curve.uniform_step() {
        if let Ok(du) = derivative_uniform(&curve.u(), h) {
            d.kinematic_residual = Some(
                du.iter()
                    .zip(p)
                    .map(|(x, q)| (x - q.sigma.cos()).abs())
                    .fold(0.0, f64::max),
            );
        }
    }
    let on_axis = |u: f64, sin: f64| u <= TOPOLOGY_TOL && sin <= TOPOLOGY_TOL;
    let detected = if on_axis(d.start_u, d.start_sin_sigma) && on_axis(d.end_u, d.end_sin_sigma) {
        Some(Topology::Sphere)
    } else if d.periodic_gap <= TOPOLOGY_TOL && p.iter().all(|q| q.u > TOPOLOGY_TOL) {
        Some(Topology::Torus)
    } else {
        None
    };
    d.self_intersection = self_intersection(curve);
    match detected {
        None => {
            d.failure = Some(format!(
                "open meridian: ends at u = {} and u = {} (periodic gap {:e})",
                d.start_u, d.end_u, d.periodic_gap
            ));
        }
        Some(t) => {
            d.detected = Some(t);
            d.chi = Some(t.euler_characteristic());
            if t == Topology::Sphere && !(d.min_interior_u > 0.0) {
                d.failure = Some("meridian touches the axis at an interior sample".into());
            } else if t != curve.topology() {
                d.failure = Some(format!(
                    "topology tag `{}` but the samples close as a {t}",
                    curve.topology()
                ));
            }
        }
    }
    d
}

/// `Ok(χ)` for a closed curve, `Err(OpenMeridian)` otherwise.
pub(crate) fn require_closed(curve: &ProfileCurve) -> Result<i32> {
    let d = closure_and_topology(curve);
    match (d.failure, d.chi) {
        (None, Some(chi)) => Ok(chi),
        (Some(msg), _) => match msg.strip_prefix("open meridian: ") {
            Some(rest) => Err(Error::OpenMeridian(rest.to_string())),
            None => Err(Error::InvalidCurve(msg)),
        },
        (None, None) => Err(Error::OpenMeridian("unclassified".into())),
    }
}

const BLOCK: usize = 32;

/// First pair of non-adjacent meridian segments that cross, in the `(u, v)` plane.
pub fn self_intersection(curve: &ProfileCurve) -> Option<(usize, usize)> {
    let pts: Vec<(f64, f64)> = curve.samples().iter().map(|q| (q.u, q.v)).collect();
    let m = pts.len().saturating_sub(1);
    if m < 3 {
        return None;
    }
    let periodic = curve.topology() == Topology::Torus;
    let boxes: Vec<[f64; 4]> = (0..m)
        .step_by(BLOCK)
        .map(|start| {
            let end = (start + BLOCK).min(m);
            pts[start..=end].iter().fold(
                [
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                ],
                |b, &(u, v)| [b[0].min(u), b[1].max(u), b[2].min(v), b[3].max(v)],
            )
        })
        .collect();
    for (bi, ba) in boxes.iter().enumerate() {
        for (bj, bb) in boxes.iter().enumerate().skip(bi) {
            if ba[1] < bb[0] || bb[1] < ba[0] || ba[3] < bb[2] || bb[3] < ba[2] {
                continue;
            }
            for i in bi * BLOCK..((bi + 1) * BLOCK).min(m) {
                let j0 = if bi == bj { i + 2 } else { bj * BLOCK };
                for j in j0..((bj + 1) * BLOCK).min(m) {
                    if periodic && i == 0 && j == m - 1 {
                        continue;
                    }
                    if segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                        return Some((i, j));
                    }
                }
            }
        }
    }
    None
}

fn segments_cross(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let orient = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| {
        (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
    };
    let (d1, d2) = (orient(q1, q2, p1), orient(q1, q2, p2));
    let (d3, d4) = (orient(p1, p2, q1), orient(p1, p2, q2));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}
