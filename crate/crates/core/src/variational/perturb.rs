//! Closed sphere meridians rebuilt from an angle function, and smooth
//! perturbations of them.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::cumulative_uniform;
use crate::revolution::{closure_and_topology, ProfileCurve, ProfileSample, Topology};

/// Newton tolerance on `u(L)` relative to the meridian length.
const CLOSURE_TOL: f64 = 1e-14;

/// A sphere meridian rebuilt from `σ` plus the closing amplitude used.
#[derive(Debug, Clone)]
pub(crate) struct Closed {
    pub curve: ProfileCurve,
    pub bump: f64,
    pub violation: f64,
}

/// Adds `c·sin(πs/L)` to `sigma` with `c` chosen so that `u(L) = ∫cosσ = 0`,
/// then integrates `u̇ = cosσ`, `v̇ = ½√(4+u²) sinσ` from `(0, v0)`.
pub(crate) fn close_sphere(s: &[f64], sigma: &[f64], v0: f64, bump_guess: f64) -> Result<Closed> {
    let n = s.len();
    let len = s[n - 1] - s[0];
    let h = len / (n - 1) as f64;
    let shape: Vec<f64> = s.iter().map(|t| (PI * (t - s[0]) / len).sin()).collect();
    let end_u = |c: f64| -> (f64, f64) {
        let cos: Vec<f64> = (0..n).map(|k| (sigma[k] + c * shape[k]).cos()).collect();
        let dsin: Vec<f64> = (0..n)
            .map(|k| -(sigma[k] + c * shape[k]).sin() * shape[k])
            .collect();
        (
            *cumulative_uniform(&cos, h).last().unwrap(),
            *cumulative_uniform(&dsin, h).last().unwrap(),
        )
    };
    let mut c = bump_guess;
    let mut converged = false;
    let mut g = f64::NAN;
    for _ in 0..50 {
        let (val, slope) = end_u(c);
        g = val;
        if val.abs() <= CLOSURE_TOL * len {
            converged = true;
            break;
        }
        if !(slope.abs() > 0.0) || !slope.is_finite() {
            break;
        }
        let step = (val / slope).clamp(-0.5, 0.5);
        c -= step;
    }
    if !converged {
        return Err(Error::ClosureFailure(format!(
            "cannot close the meridian: u(L) = {g:e}"
        )));
    }
    let sig: Vec<f64> = (0..n).map(|k| sigma[k] + c * shape[k]).collect();
    let cos: Vec<f64> = sig.iter().map(|x| x.cos()).collect();
    let mut u = cumulative_uniform(&cos, h);
    let violation = u[n - 1].abs();
    u[0] = 0.0;
    u[n - 1] = 0.0;
    if let Some(k) = u[1..n - 1].iter().position(|x| !(*x > 0.0)) {
        return Err(Error::ClosureFailure(format!(
            "meridian crosses the axis at sample {}",
            k + 1
        )));
    }
    let vdot: Vec<f64> = (0..n)
        .map(|k| 0.5 * (4.0 + u[k] * u[k]).sqrt() * sig[k].sin())
        .collect();
    let v = cumulative_uniform(&vdot, h);
    let samples = (0..n)
        .map(|k| ProfileSample {
            s: s[k],
            u: u[k],
            v: v0 + v[k],
            sigma: sig[k],
        })
        .collect();
    Ok(Closed {
        curve: ProfileCurve::new(samples, Topology::Sphere)?,
        bump: c,
        violation,
    })
}

/// Requires a closed sphere with uniform sampling and at least five samples.
pub(crate) fn require_sphere(curve: &ProfileCurve) -> Result<f64> {
    if curve.topology() != Topology::Sphere {
        return Err(Error::InvalidCurve("a sphere meridian is required".into()));
    }
    let d = closure_and_topology(curve);
    if let Some(msg) = d.failure {
        return Err(Error::InvalidCurve(msg));
    }
    if curve.len() < 5 {
        return Err(Error::InvalidCurve("need at least 5 samples".into()));
    }
    curve.uniform_step()
}

/// `σ ← σ + a·sin(mπs/L)`, re-closed and re-integrated.
///
/// `seed = 0` gives the pure mode; any other seed mixes in modes
/// `1..=m+3` with weights drawn uniformly from `[−¼, ¼]`. Mode 1 is the
/// closing direction itself and is rejected, as is mode 0.
pub fn perturb(curve: &ProfileCurve, amplitude: f64, mode: u32, seed: u64) -> Result<ProfileCurve> {
    require_sphere(curve)?;
    if mode < 2 {
        return Err(Error::InvalidParameter {
            name: "mode",
            value: mode as f64,
            reason: "modes 0 and 1 are not admissible perturbations (mode 1 is removed by closure)",
        });
    }
    if !amplitude.is_finite() {
        return Err(Error::InvalidParameter {
            name: "amplitude",
            value: amplitude,
            reason: "must be finite",
        });
    }
    if amplitude == 0.0 {
        return Ok(curve.clone());
    }
    let mut weights = vec![0.0; mode as usize + 4];
    weights[mode as usize] = 1.0;
    if seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (k, w) in weights.iter_mut().enumerate().skip(1) {
            if k != mode as usize {
                *w = rng.random_range(-0.25..=0.25);
            }
        }
    }
    let s = curve.s();
    let (s0, len) = (s[0], curve.length());
    let sigma: Vec<f64> = curve
        .samples()
        .iter()
        .map(|p| {
            let t = PI * (p.s - s0) / len;
            p.sigma
                + amplitude
                    * weights
                        .iter()
                        .enumerate()
                        .map(|(k, w)| w * (k as f64 * t).sin())
                        .sum::<f64>()
        })
        .collect();
    let closed = close_sphere(&s, &sigma, curve.samples()[0].v, 0.0)?;
    let d = closure_and_topology(&closed.curve);
    if let Some((i, j)) = d.self_intersection {
        return Err(Error::SelfIntersection(i, j));
    }
    Ok(closed.curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revolution::{energy_direct, energy_reduced, generate_cmc_profile};

    #[test]
    fn zero_amplitude_is_identity() {
        let c = generate_cmc_profile(1.0, 1e-10).unwrap();
        assert_eq!(perturb(&c, 0.0, 2, 7).unwrap(), c);
    }

    #[test]
    fn perturbed_sphere_is_closed_with_larger_energy() {
        let c = generate_cmc_profile(1.0, 1e-10).unwrap();
        let p = perturb(&c, 0.05, 2, 0).unwrap();
        let d = closure_and_topology(&p);
        assert!(d.is_closed(), "{:?}", d.failure);
        assert_eq!(d.chi, Some(2));
        let e = energy_direct(&p).unwrap();
        assert!(e > PI + 1e-5, "{e}");
        assert!((e - energy_reduced(&p).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn energy_excess_is_quadratic() {
        let c = generate_cmc_profile(1.0, 1e-10).unwrap();
        let ex: Vec<f64> = [0.01, 0.02, 0.04]
            .iter()
            .map(|a| energy_reduced(&perturb(&c, *a, 2, 0).unwrap()).unwrap() - PI)
            .collect();
        assert!((ex[1] / ex[0] / 4.0 - 1.0).abs() < 0.1, "{ex:?}");
        assert!((ex[2] / ex[1] / 4.0 - 1.0).abs() < 0.1, "{ex:?}");
    }

    #[test]
    fn low_modes_are_rejected() {
        let c = generate_cmc_profile(1.0, 1e-10).unwrap();
        assert!(perturb(&c, 0.05, 1, 0).is_err());
        assert!(perturb(&c, 0.05, 0, 0).is_err());
    }

    #[test]
    fn seeds_are_reproducible_and_distinct() {
        let c = generate_cmc_profile(0.5, 1e-10).unwrap();
        let a = perturb(&c, 0.05, 3, 11).unwrap();
        let b = perturb(&c, 0.05, 3, 11).unwrap();
        let d = perturb(&c, 0.05, 3, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, d);
    }
}
