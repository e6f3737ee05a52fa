//! Finite-difference stencils and uniform-grid calculus on sampled data.

use crate::error::{Error, Result};

/// Central first-derivative weights for offsets `-k..=k`, to be divided by the step.
pub fn central_first(order: usize) -> Result<&'static [f64]> {
    match order {
        2 => Ok(&[-0.5, 0.0, 0.5]),
        4 => Ok(&[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0]),
        _ => Err(bad_order(order)),
    }
}

/// Central second-derivative weights for offsets `-k..=k`, to be divided by the step squared.
pub fn central_second(order: usize) -> Result<&'static [f64]> {
    match order {
        2 => Ok(&[1.0, -2.0, 1.0]),
        4 => Ok(&[-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0]),
        _ => Err(bad_order(order)),
    }
}

fn bad_order(order: usize) -> Error {
    Error::InvalidParameter {
        name: "order",
        value: order as f64,
        reason: "stencil order must be 2 or 4",
    }
}

/// Jacobian estimate `J[i][j] = ∂f_i/∂x_j`.
pub type Jacobian = Vec<Vec<f64>>;

fn raw_jacobian<F: FnMut(&[f64]) -> Vec<f64>>(
    f: &mut F,
    x: &[f64],
    weights: &[f64],
    step: f64,
) -> (Jacobian, f64) {
    let k = weights.len() / 2;
    let mut cols = Vec::with_capacity(x.len());
    let mut fmax = 0.0f64;
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        let mut col: Vec<f64> = Vec::new();
        for (idx, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let off = idx as f64 - k as f64;
            xp[j] = x[j] + off * step;
            let fx = f(&xp);
            if col.is_empty() {
                col = vec![0.0; fx.len()];
            }
            for (c, v) in col.iter_mut().zip(&fx) {
                *c += w * v;
                fmax = fmax.max(v.abs());
            }
        }
        xp[j] = x[j];
        cols.push(col.into_iter().map(|c| c / step).collect::<Vec<f64>>());
    }
    let m = cols.first().map_or(0, Vec::len);
    let jac = (0..m)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    (jac, fmax)
}

/// Central-difference Jacobian of `f` at `x`.
///
/// A second evaluation at twice the step gives a Richardson estimate of the
/// truncation error; when the round-off bound `ε·max|f|/step` exceeds it and
/// is not negligible relative to the derivative, the step is rejected.
pub fn finite_difference<F>(mut f: F, x: &[f64], order: usize, step: f64) -> Result<Jacobian>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let weights = central_first(order)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "step",
            value: step,
            reason: "finite-difference step must be positive",
        });
    }
    let (jac, fmax) = raw_jacobian(&mut f, x, weights, step);
    let (jac2, _) = raw_jacobian(&mut f, x, weights, 2.0 * step);
    let amplification: f64 = weights.iter().map(|w| w.abs()).sum();
    let roundoff = f64::EPSILON * fmax * amplification / step;
    let denom = (1u32 << order) as f64 - 1.0;
    let jmax = jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let jscale = if jmax > 0.0 { jmax } else { 1.0 };
    for (r1, r2) in jac.iter().zip(&jac2) {
        for (a, b) in r1.iter().zip(r2) {
            let trunc = (a - b).abs() / denom;
            let rel = roundoff / jscale;
            if roundoff > trunc && rel > 1e-8 && roundoff > 1e-14 {
                return Err(Error::CancellationDominated { step });
            }
        }
    }
    Ok(jac)
}

/// Scalar convenience wrapper around [`finite_difference`].
pub fn derivative<F: FnMut(f64) -> f64>(mut f: F, x: f64, order: usize, step: f64) -> Result<f64> {
    let jac = finite_difference(|p| vec![f(p[0])], &[x], order, step)?;
    Ok(jac[0][0])
}

/// Fourth-order first derivative of uniformly spaced samples, one-sided at the ends.
pub fn derivative_uniform(values: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 5 {
        return Err(Error::InvalidCurve(format!(
            "need at least 5 samples for a 4th-order derivative, got {n}"
        )));
    }
    let f = values;
    let mut d = vec![0.0; n];
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    let m = n - 1;
    d[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4])
        / (12.0 * h);
    d[m - 1] =
        (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) / (12.0 * h);
    Ok(d)
}

/// Integral of uniformly spaced samples by the end-corrected (Gregory) trapezoid
/// rule, exact for cubics; plain trapezoid below six samples.
pub fn integrate_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    if n < 6 {
        let inner: f64 = values[1..n - 1].iter().sum();
        return h * (inner + 0.5 * (values[0] + values[n - 1]));
    }
    const END: [f64; 3] = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    let mut acc = 0.0;
    for (i, v) in values.iter().enumerate() {
        let w = if i < 3 {
            END[i]
        } else if i >= n - 3 {
            END[n - 1 - i]
        } else {
            1.0
        };
        acc += w * v;
    }
    h * acc
}

/// Running integral `F[i] = ∫_0^{s_i} f` of uniformly spaced samples using
/// local cubics on each interval.
pub fn cumulative_uniform(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
        }
        return out;
    }
    let f = values;
    for i in 0..n - 1 {
        let piece = if i == 0 {
            9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
        } else if i == n - 2 {
            f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]
        } else {
            -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]
        };
        out[i + 1] = out[i] + h * piece / 24.0;
    }
    out
}
