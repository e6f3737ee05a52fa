//! Sampled meridians in the quotient half-plane and their CSV form.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_interval_with, QuadOptions};

/// Relative tolerance under which a sampling is treated as uniform.
pub const UNIFORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Sphere,
    Torus,
}

impl Topology {
    pub fn euler_characteristic(self) -> i32 {
        match self {
            Topology::Sphere => 2,
            Topology::Torus => 0,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Sphere => "sphere",
            Topology::Torus => "torus",
        })
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sphere" => Ok(Topology::Sphere),
            "torus" => Ok(Topology::Torus),
            other => Err(Error::MalformedCsv(format!("unknown topology `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub s: f64,
    pub u: f64,
    pub v: f64,
    pub sigma: f64,
}

/// Generating curve `(u(s), v(s), σ(s))` of a surface of revolution, with
/// `u = ρ`, `v = h` and `σ` the angle to `∂/∂u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    samples: Vec<ProfileSample>,
    topology: Topology,
}

impl ProfileCurve {
    /// Validates finiteness, `u ≥ 0` and strictly increasing `s`.
    pub fn new(samples: Vec<ProfileSample>, topology: Topology) -> Result<Self> {
        for (k, p) in samples.iter().enumerate() {
            if !(p.s.is_finite() && p.u.is_finite() && p.v.is_finite() && p.sigma.is_finite()) {
                return Err(Error::InvalidCurve(format!("non-finite sample {k}")));
            }
            if p.u < 0.0 {
                return Err(Error::InvalidCurve(format!(
                    "u = {} < 0 at sample {k}",
                    p.u
                )));
            }
        }
        if let Some(k) = samples.windows(2).position(|w| w[1].s <= w[0].s) {
            return Err(Error::InvalidCurve(format!(
                "arclength not strictly increasing at sample {}",
                k + 1
            )));
        }
        Ok(Self { samples, topology })
    }

    /// Build from column vectors.
    pub fn from_columns(
        s: &[f64],
        u: &[f64],
        v: &[f64],
        sigma: &[f64],
        topology: Topology,
    ) -> Result<Self> {
        let n = s.len();
        if u.len() != n || v.len() != n || sigma.len() != n {
            return Err(Error::InvalidCurve("column lengths differ".into()));
        }
        let samples = (0..n)
            .map(|k| ProfileSample {
                s: s[k],
                u: u[k],
                v: v[k],
                sigma: sigma[k],
            })
            .collect();
        Self::new(samples, topology)
    }

    pub fn samples(&self) -> &[ProfileSample] {
        &self.samples
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn length(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.s - a.s,
            _ => 0.0,
        }
    }

    pub fn s(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.s).collect()
    }

    pub fn u(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.u).collect()
    }

    pub fn v(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.v).collect()
    }

    pub fn sigma(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.sigma).collect()
    }

    /// Common spacing of a uniform sampling.
    pub fn uniform_step(&self) -> Result<f64> {
        let n = self.samples.len();
        if n < 2 {
            return Err(Error::InvalidCurve("fewer than two samples".into()));
        }
        let h = self.length() / (n - 1) as f64;
        let s0 = self.samples[0].s;
        for (k, p) in self.samples.iter().enumerate() {
            if (p.s - (s0 + k as f64 * h)).abs() > UNIFORM_TOL * h {
                return Err(Error::InvalidCurve(format!(
                    "non-uniform arclength sampling at sample {k}; resample first"
                )));
            }
        }
        Ok(h)
    }

    /// Uniform resampling with `n` points by local cubic interpolation.
    pub fn resample(&self, n: usize) -> Result<Self> {
        let m = self.samples.len();
        if m < 4 || n < 2 {
            return Err(Error::InvalidCurve(
                "resampling needs at least 4 input and 2 output samples".into(),
            ));
        }
        let s = self.s();
        let cols = [self.u(), self.v(), self.sigma()];
        let (s0, len) = (s[0], self.length());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let t = if k == n - 1 {
                s[m - 1]
            } else {
                s0 + len * k as f64 / (n - 1) as f64
            };
            let hi = s.partition_point(|&x| x <= t).clamp(2, m - 1);
            let lo = hi.saturating_sub(2).min(m - 4);
            let nodes = &s[lo..lo + 4];
            let w = lagrange_weights(nodes, t);
            let at = |c: &Vec<f64>| (0..4).map(|i| w[i] * c[lo + i]).sum::<f64>();
            out.push(ProfileSample {
                s: t,
                u: at(&cols[0]).max(0.0),
                v: at(&cols[1]),
                sigma: at(&cols[2]),
            });
        }
        Self::new(out, self.topology)
    }

    /// Uniform arclength sampling of a regular parametric curve
    /// `t ↦ (u, v, u', v')`, `t ∈ [0, 1]`; `σ` is continuous (unwrapped).
    pub fn from_parametric<F>(curve: F, samples: usize, topology: Topology) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64, f64, f64),
    {
        if samples < 5 {
            return Err(Error::InvalidCurve("need at least 5 samples".into()));
        }
        let speed = |t: f64| {
            let (u, _, du, dv) = curve(t);
            (du * du + 4.0 * dv * dv / (4.0 + u * u)).sqrt()
        };
        let opts = QuadOptions::absolute(1e-13);
        let panels = samples - 1;
        let mut t_knots = Vec::with_capacity(samples);
        let mut s_knots = Vec::with_capacity(samples);
        t_knots.push(0.0);
        s_knots.push(0.0);
        for k in 1..=panels {
            let (a, b) = ((k - 1) as f64 / panels as f64, k as f64 / panels as f64);
            let piece = integrate_interval_with(speed, a, b, &opts)?.value;
            t_knots.push(b);
            s_knots.push(s_knots[k - 1] + piece);
        }
        let total = s_knots[panels];
        if !(total > 0.0) {
            return Err(Error::InvalidCurve(
                "parametric curve has zero length".into(),
            ));
        }
        let mut out = Vec::with_capacity(samples);
        let mut prev_sigma: Option<f64> = None;
        for k in 0..samples {
            let target = total * k as f64 / panels as f64;
            let t = invert_arclength(&speed, &t_knots, &s_knots, target, &opts)?;
            let (u, v, du, dv) = curve(t);
            let mut sigma = (2.0 * dv / (4.0 + u * u).sqrt()).atan2(du);
            if let Some(p) = prev_sigma {
                sigma += std::f64::consts::TAU * ((p - sigma) / std::f64::consts::TAU).round();
            }
            prev_sigma = Some(sigma);
            out.push(ProfileSample {
                s: target,
                u: u.max(0.0),
                v,
                sigma,
            });
        }
        Self::new(out, topology)
    }

    /// `# topology=…` line, header `s,u,v,sigma`, one row per sample.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows = self.samples.iter().map(|p| [p.s, p.u, p.v, p.sigma]);
        write_profile_csv(
            out,
            &format!("topology={}", self.topology),
            ["s", "u", "v", "sigma"],
            rows,
        )
    }

    /// Reads the format of [`ProfileCurve::write_csv`]. A missing topology line
    /// is an error.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let (meta, rows) = read_profile_csv(input, ["s", "u", "v", "sigma"])?;
        let topology = meta
            .iter()
            .find_map(|(k, v)| (k == "topology").then(|| v.parse::<Topology>()))
            .ok_or(Error::MissingField("topology"))??;
        let samples: Vec<ProfileSample> = rows
            .into_iter()
            .map(|r| ProfileSample {
                s: r[0],
                u: r[1],
                v: r[2],
                sigma: r[3],
            })
            .collect();
        if let Some(k) = samples.windows(2).position(|w| w[1].s <= w[0].s) {
            return Err(Error::MalformedCsv(format!(
                "s is not strictly increasing at data row {}",
                k + 2
            )));
        }
        Self::new(samples, topology)
    }
}

fn lagrange_weights(nodes: &[f64], t: f64) -> [f64; 4] {
    let mut w = [1.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                w[i] *= (t - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
    }
    w
}

fn invert_arclength<F: Fn(f64) -> f64>(
    speed: &F,
    t_knots: &[f64],
    s_knots: &[f64],
    target: f64,
    opts: &QuadOptions,
) -> Result<f64> {
    let k = s_knots
        .partition_point(|&s| s < target)
        .clamp(1, s_knots.len() - 1);
    let (ta, tb, sa) = (t_knots[k - 1], t_knots[k], s_knots[k - 1]);
    if target <= sa {
        return Ok(ta);
    }
    let (mut lo, mut hi) = (ta, tb);
    let mut t = ta + (tb - ta) * (target - sa) / (s_knots[k] - sa);
    for _ in 0..100 {
        let g = sa + integrate_interval_with(speed, ta, t, opts)?.value - target;
        if g.abs() < 1e-14 {
            break;
        }
        if g > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let newton = t - g / speed(t);
        t = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(t)
}

/// Shared writer for four-column profile files with one metadata line.
pub(crate) fn write_profile_csv<W: Write, I: IntoIterator<Item = [f64; 4]>>(
    mut out: W,
    meta: &str,
    header: [&str; 4],
    rows: I,
) -> Result<()> {
    writeln!(out, "# {meta}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

type Metadata = Vec<(String, String)>;

/// Shared reader: `#`-lines become `key=value` metadata; the header must match.
pub(crate) fn read_profile_csv<R: BufRead>(
    input: R,
    header: [&str; 4],
) -> Result<(Metadata, Vec<[f64; 4]>)> {
    let mut meta = Vec::new();
    let mut body = String::new();
    for line in input.lines() {
        let line = line?;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        } else if !trimmed.is_empty() {
            body.push_str(trimmed);
            body.push('\n');
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes());
    let got: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if got != header {
        return Err(Error::MalformedCsv(format!(
            "expected header `{}`, found `{}`",
            header.join(","),
            got.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(Error::MalformedCsv(format!(
                "data row {} has {} fields",
                k + 1,
                rec.len()
            )));
        }
        let mut row = [0.0; 4];
        for (j, field) in rec.iter().enumerate() {
            row[j] = field.trim().parse().map_err(|_| {
                Error::MalformedCsv(format!("data row {}: `{field}` is not a number", k + 1))
            })?;
        }
        rows.push(row);
    }
    Ok((meta, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(n: usize) -> ProfileCurve {
        ProfileCurve::from_parametric(
            |t| {
                let a = 2.0 * PI * t;
                (
                    2.0 + 0.5 * a.cos(),
                    0.5 * a.sin(),
                    -PI * a.sin(),
                    PI * a.cos(),
                )
            },
            n,
            Topology::Torus,
        )
        .unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let c = circle(33);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# topology=torus\ns,u,v,sigma\n"));
        let back = ProfileCurve::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn reader_rejects_non_monotone_s() {
        let text = "# topology=sphere\ns,u,v,sigma\n0,0,0,0\n1,1,0,1\n0.5,0,0,3\n";
        assert!(matches!(
            ProfileCurve::read_csv(text.as_bytes()),
            Err(Error::MalformedCsv(_))
        ));
    }

    #[test]
    fn reader_rejects_bad_header_and_missing_topology() {
        let bad = "# topology=sphere\ns,x,y,sigma\n0,0,0,0\n";
        assert!(matches!(
            ProfileCurve::read_csv(bad.as_bytes()),
            Err(Error::MalformedCsv(_))
        ));
        let missing = "s,u,v,sigma\n0,0,0,0\n";
        assert!(matches!(
            ProfileCurve::read_csv(missing.as_bytes()),
            Err(Error::MissingField(_))
        ));
    }

    #[test]
    fn parametric_samples_are_unit_speed() {
        let c = circle(1601);
        let h = c.uniform_step().unwrap();
        for w in c.samples().windows(2) {
            let (a, b) = (w[0], w[1]);
            let um = 0.5 * (a.u + b.u);
            let chord = ((b.u - a.u).powi(2) + 4.0 * (b.v - a.v).powi(2) / (4.0 + um * um)).sqrt();
            assert!((chord - h).abs() < 1e-5 * h, "{chord} {h}");
        }
        let first = c.samples()[0];
        let last = *c.samples().last().unwrap();
        assert!((last.sigma - first.sigma - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn resample_preserves_the_curve() {
        let c = circle(201);
        let r = c.resample(401).unwrap();
        assert!(r.uniform_step().is_ok());
        let fine = circle(401);
        for (a, b) in r.samples().iter().zip(fine.samples()) {
            assert!(
                (a.u - b.u).abs() < 1e-6 && (a.v - b.v).abs() < 1e-6,
                "{a:?} {b:?}"
            );
        }
    }
}
