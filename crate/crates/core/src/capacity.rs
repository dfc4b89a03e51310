//! Conformal radius of the Siegel disk of `P_θ` from the logarithmic
//! capacity of its inverted boundary.
//!
//! If `U ∋ 0` is the disk and `V` the image of `ℂ \ U` under `z ↦ 1/z`, the
//! conformal radius of `U` at 0 is `1/cap(∂V)`. The capacity is estimated
//! by the discrete transfinite diameter of greedily selected Leja points.
//! Boundary points come from the critical orbit, which accumulates on the
//! boundary for bounded-type rotation numbers; the result is a heuristic
//! oracle, not a certified bound.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::cfrac::{cf_expand, Angle};
use crate::powerseries::{multiplier, to_c64};
use crate::{Error, Result};

/// Largest partial quotient accepted by [`siegel_boundary_sample`].
pub const DEFAULT_QUOTIENT_CAP: u64 = 50;
pub const DEFAULT_COUNT: usize = 50_000;
pub const DEFAULT_BURNIN: usize = 1_000;
pub const DEFAULT_LEJA_POINTS: usize = 1_000;
/// Orbits leaving this disk are rejected.
pub const ESCAPE_RADIUS: f64 = 4.0;
/// Pairs closer than this make a sample degenerate.
pub const MIN_SEPARATION: f64 = 1e-12;
pub const MIN_COUNT: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundarySample {
    pub points: Vec<Complex64>,
    pub source: String,
    /// Number of leading iterates dropped.
    pub burnin: usize,
}

impl BoundarySample {
    pub fn synthetic(points: Vec<Complex64>, source: impl Into<String>) -> Self {
        BoundarySample { points, source: source.into(), burnin: 0 }
    }

    /// `count` equispaced points on the circle `|z − c| = ρ`.
    pub fn circle(center: Complex64, radius: f64, count: usize) -> Self {
        let points = (0..count)
            .map(|k| center + Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / count as f64))
            .collect();
        BoundarySample::synthetic(points, format!("circle({center},{radius})"))
    }

    /// CSV with header `re,im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Precondition(format!("csv write failed: {e}"));
        w.write_record(["re", "im"]).map_err(err)?;
        for z in &self.points {
            w.write_record([format!("{:e}", z.re), format!("{:e}", z.im)]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::Precondition(format!("csv write failed: {e}")))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R, source: impl Into<String>) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut points = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("sample csv: {e}")))?;
            let field = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::Parse(format!("sample csv line {}: bad column {i}", line + 2)))
            };
            points.push(Complex64::new(field(0)?, field(1)?));
        }
        Ok(BoundarySample::synthetic(points, source))
    }
}

/// Transfinite-diameter estimate and derived conformal radius.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityEstimate {
    pub transfinite_diameter: f64,
    /// Discrete logarithmic energy of the uniform measure on the points.
    pub energy: f64,
    pub n_points_used: usize,
    /// `1/transfinite_diameter`
    pub conformal_radius: f64,
    /// Relative change of the diameter between the first `n/2` and all `n`
    /// Leja points.
    pub spread: f64,
}

/// Largest partial quotient of `θ`, over the whole expansion for quadratic
/// angles and over the computable prefix for real ones.
fn max_quotient(theta: &Angle) -> Result<Option<u64>> {
    let mut depth = 64;
    loop {
        let cf = cf_expand(theta, depth)?;
        if cf.terminated {
            return Ok(None);
        }
        if let Some(sup) = cf.quotient_sup() {
            return Ok(Some(sup.to_u64().unwrap_or(u64::MAX)));
        }
        if !matches!(theta.frac(), Angle::Quadratic(_)) || depth >= 1 << 14 {
            let m = cf.partial_quotients.iter().max().and_then(|a| a.to_u64()).unwrap_or(u64::MAX);
            return Ok(Some(m));
        }
        depth *= 2;
    }
}

/// Forward critical orbit of `P_θ(z) = λz + z²` from `−λ/2`, with the first
/// `burnin` iterates dropped.
pub fn siegel_boundary_sample(theta: &Angle, count: usize, burnin: usize, quotient_cap: u64) -> Result<BoundarySample> {
    if count < MIN_COUNT {
        return Err(Error::Precondition(format!("need at least {MIN_COUNT} points, got {count}")));
    }
    match max_quotient(theta)? {
        None => return Err(Error::BoundedTypeRequired { found: "rational angle".into(), cap: quotient_cap }),
        Some(m) if m > quotient_cap => {
            return Err(Error::BoundedTypeRequired { found: format!("partial quotient {m}"), cap: quotient_cap })
        }
        Some(_) => {}
    }
    let lam = to_c64(&multiplier(theta, 64)?);
    let mut z = -lam / 2.0;
    let mut points = Vec::with_capacity(count);
    for step in 0..burnin + count {
        z = lam * z + z * z;
        let m = z.norm();
        if !(m <= ESCAPE_RADIUS) {
            return Err(Error::OrbitEscaped { step: step + 1, modulus: m });
        }
        if step >= burnin {
            points.push(z);
        }
    }
    Ok(BoundarySample { points, source: format!("critical orbit of P at θ={theta}"), burnin })
}

/// `u = 1/(z − center)` pointwise.
pub fn invert_about(sample: &BoundarySample, center: Complex64) -> Result<BoundarySample> {
    let mut points = Vec::with_capacity(sample.points.len());
    for z in &sample.points {
        let d = z - center;
        if d.norm() < 1e-9 {
            return Err(Error::CenterOnBoundary { distance: d.norm() });
        }
        points.push(d.inv());
    }
    Ok(BoundarySample { points, source: format!("inverted({}) about {center}", sample.source), burnin: sample.burnin })
}

/// Andrew's monotone chain; returns hull vertex indices.
fn convex_hull(points: &[Complex64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a].re.total_cmp(&points[b].re).then(points[a].im.total_cmp(&points[b].im)).then(a.cmp(&b))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| {
        let (o, a, b) = (points[o], points[a], points[b]);
        (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
    };
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let seq: Box<dyn Iterator<Item = &usize>> = if pass == 0 { Box::new(idx.iter()) } else { Box::new(idx.iter().rev()) };
        for &p in seq {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Greedy Leja selection of `n` points: the farthest pair first, then
/// repeatedly the point maximizing the sum of log-distances to those
/// already chosen (lowest index on ties).
pub fn leja_fekete(sample: &BoundarySample, n: usize) -> Result<Vec<Complex64>> {
    let pts = &sample.points;
    if n > pts.len() {
        return Err(Error::Precondition(format!("asked for {n} points from a sample of {}", pts.len())));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if pts.len() == 1 {
        return Ok(pts.clone());
    }
    let hull = convex_hull(pts);
    let mut best = (0usize, 0usize, -1.0f64);
    for (k, &i) in hull.iter().enumerate() {
        for &j in &hull[k + 1..] {
            let d = (pts[i] - pts[j]).norm();
            let (a, b) = (i.min(j), i.max(j));
            if d > best.2 || (d == best.2 && (a, b) < (best.0, best.1)) {
                best = (a, b, d);
            }
        }
    }
    if best.2 < MIN_SEPARATION {
        return Err(Error::DegenerateSample("all points coincide".into()));
    }
    let mut chosen = vec![best.0, best.1];
    let mut score = vec![0.0f64; pts.len()];
    let update = |score: &mut [f64], c: usize| {
        for (s, z) in score.iter_mut().zip(pts) {
            let d = (z - pts[c]).norm();
            *s += if d < MIN_SEPARATION { f64::NEG_INFINITY } else { d.ln() };
        }
    };
    update(&mut score, best.0);
    update(&mut score, best.1);
    while chosen.len() < n.max(2) {
        let mut arg = None;
        let mut top = f64::NEG_INFINITY;
        for (i, &s) in score.iter().enumerate() {
            if s > top {
                top = s;
                arg = Some(i);
            }
        }
        let Some(k) = arg else {
            return Err(Error::DegenerateSample(format!("only {} distinct points", chosen.len())));
        };
        chosen.push(k);
        update(&mut score, k);
    }
    chosen.truncate(n);
    Ok(chosen.into_iter().map(|i| pts[i]).collect())
}

/// `d_n = exp((2/(n(n−1))) Σ_{i<j} log|z_i − z_j|)`.
pub fn transfinite_diameter(points: &[Complex64]) -> Result<CapacityEstimate> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Precondition(format!("need at least 3 points, got {n}")));
    }
    let mean_log = |m: usize| -> Result<f64> {
        let mut s = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                let d = (points[i] - points[j]).norm();
                if d < MIN_SEPARATION {
                    return Err(Error::DegenerateSample(format!("points {i} and {j} coincide")));
                }
                s += d.ln();
            }
        }
        Ok(2.0 * s / (m * (m - 1)) as f64)
    };
    let full = mean_log(n)?;
    let half = if n >= 6 { mean_log(n / 2)? } else { full };
    let diameter = full.exp();
    Ok(CapacityEstimate {
        transfinite_diameter: diameter,
        energy: -full,
        n_points_used: n,
        conformal_radius: 1.0 / diameter,
        spread: (half - full).exp_m1().abs(),
    })
}

/// Conformal radius at `center` of the domain bounded by `sample`.
pub fn conformal_radius_of_sample(sample: &BoundarySample, center: Complex64, n: usize) -> Result<CapacityEstimate> {
    let inverted = invert_about(sample, center)?;
    let pts = leja_fekete(&inverted, n)?;
    transfinite_diameter(&pts)
}

/// Sample, invert about 0, select Leja points, measure.
pub fn conformal_radius_capacity(theta: &Angle, count: usize, burnin: usize, n: usize) -> Result<CapacityEstimate> {
    let sample = siegel_boundary_sample(theta, count, burnin, DEFAULT_QUOTIENT_CAP)?;
    conformal_radius_of_sample(&sample, Complex64::new(0.0, 0.0), n)
}
