//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Value of an integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-13,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            ..Self::default()
        }
    }

    /// Pure relative control, for integrals whose magnitude spans many decades.
    pub fn relative(tol: f64) -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: tol,
            ..Self::default()
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn check(x: f64, fx: f64) -> Result<f64> {
    if fx.is_finite() {
        Ok(fx)
    } else {
        Err(Error::NonFiniteIntegrand { abscissa: x })
    }
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = check(center, f(center))?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = kronrod.abs();
    let mut fv = [0.0f64; 14];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = check(center - dx, f(center - dx))?;
        let f2 = check(center + dx, f(center + dx))?;
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_k * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (1.0f64).min((200.0 * err / res_asc).powf(1.5));
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { a, b, value, err })
}

/// Adaptive quadrature of `f` over `[a, b]`.
///
/// Panels are bisected in order of decreasing error estimate until the summed
/// estimate falls below `max(abs_tol, rel_tol * |value|)`.
pub fn integrate_interval_with<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter {
            name: "b",
            value: b,
            reason: "integration bounds must be finite with a <= b",
        });
    }
    if !(opts.abs_tol >= 0.0 && opts.rel_tol >= 0.0) || (opts.abs_tol == 0.0 && opts.rel_tol == 0.0)
    {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: opts.abs_tol,
            reason: "tolerances must be non-negative and not both zero",
        });
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            err_estimate: 0.0,
            evaluations: 1,
        });
    }
    let first = gk15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut total = first.value;
    let mut total_err = first.err;
    heap.push(first);
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if heap.len() >= opts.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                partial: total,
                err_estimate: total_err,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval has collapsed to adjacent floats
            return Err(Error::QuadratureNonConvergence {
                partial: total,
                err_estimate: total_err,
                evaluations,
            });
        }
        let left = gk15(&mut f, worst.a, mid)?;
        let right = gk15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        // resum periodically to bound drift in the running totals
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let err_estimate: f64 = heap.iter().map(|p| p.err).sum();
    Ok(QuadratureResult {
        value,
        err_estimate,
        evaluations,
    })
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn integrate_interval<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    crate::error::require_positive("tol", tol)?;
    integrate_interval_with(f, a, b, &QuadOptions::absolute(tol))
}

/// `∫_0^∞ f` through the substitution `r = t / (1 - t)`, `t ∈ [0, 1)`.
pub fn integrate_semi_infinite_with<F: FnMut(f64) -> f64>(
    mut f: F,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    let mapped = |t: f64| {
        let w = 1.0 - t;
        let r = t / w;
        f(r) / (w * w)
    };
    integrate_interval_with(mapped, 0.0, 1.0, opts).map_err(|e| match e {
        Error::NonFiniteIntegrand { abscissa } => Error::NonFiniteIntegrand {
            abscissa: abscissa / (1.0 - abscissa),
        },
        other => other,
    })
}

pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(f: F, tol: f64) -> Result<QuadratureResult> {
    crate::error::require_positive("tol", tol)?;
    integrate_semi_infinite_with(f, &QuadOptions::absolute(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_and_sine() {
        let r = integrate_interval(|_| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        assert!(r.evaluations >= 1 && r.err_estimate >= 0.0);
        let r = integrate_interval(f64::sin, 0.0, PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn exact_on_polynomials() {
        for deg in [0, 5, 11, 17, 22] {
            let r = integrate_interval(|x: f64| x.powi(deg), -1.0, 1.0, 1e-12).unwrap();
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            assert!((r.value - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn semi_infinite_rational() {
        let r = integrate_semi_infinite(|x| 2.0 * x / (1.0 + x * x).powi(2), 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = integrate_semi_infinite(|x| 4.0 * x / (1.0 + x * x).powi(3), 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nan_names_the_abscissa() {
        let err = integrate_semi_infinite(
            |x| {
                if x > 2.0 {
                    f64::NAN
                } else {
                    1.0 / (1.0 + x).powi(3)
                }
            },
            1e-10,
        )
        .unwrap_err();
        match err {
            Error::NonFiniteIntegrand { abscissa } => {
                assert!(abscissa > 2.0 && abscissa.is_finite())
            }
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn budget_exhaustion_carries_partial_estimate() {
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_subdivisions: 3,
        };
        let err = integrate_interval_with(|x: f64| (1.0 / (x + 1e-9)).sin(), 0.0, 1.0, &opts)
            .unwrap_err();
        match err {
            Error::QuadratureNonConvergence {
                partial,
                err_estimate,
                ..
            } => {
                assert!(partial.is_finite() && err_estimate > 1e-14)
            }
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn rejects_reversed_bounds_and_bad_tol() {
        assert!(integrate_interval(|x| x, 1.0, 0.0, 1e-10).is_err());
        assert!(integrate_interval(|x| x, 0.0, 1.0, 0.0).is_err());
    }
}
