//! Scans and identity checks built from the other modules.
//!
//! Every scan returns a [`ScanReport`]: one row per sample, a summary that
//! can be recomputed from the rows, and the parameters that produced it.
//! Scans run in parallel over samples; results are collected in input order
//! so the output bytes do not depend on scheduling.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::brjuno::{brjuno_b, yoccoz_y, SumStatus};
use crate::cfrac::Angle;
use crate::families::{dstar_germ, geyer_germ, perturbed, quad_germ, FamilySpec, PERTURBATION};
use crate::powerseries::{hadamard_radius, linearize, GermSeries, RadiusEstimate};
use crate::{Error, Result};

/// Version of the JSON summary layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Acceptance thresholds. The constants marked "bring-up" are empirical:
/// they were measured on the default grids with the default truncations
/// and rounded up, since only the existence of the constants is known.
///
/// Measured at bring-up (golden / seeded grids, `bits = 53`):
/// `|Δ| ≈ 1e−15` for `λ(z + z³/4)` at `N = 1024`; `S ∈ [0.28, 1.33]` over 50
/// angles at `N = 4096`; z + z³ centered quantity in `[−0.07, 0.41]` and
/// z + z⁴ in `[−0.20, 0.01]` over 30 angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `|Δ(r)|` for `f = λz`.
    pub trivial_delta: f64,
    /// Bring-up: `|Δ(r)|` for the nontrivial whitelist germs.
    pub harmonic_delta: f64,
    /// Bring-up: `|S|` over the conjecture grid.
    pub conjecture_band: f64,
    /// Relative gap between the Hadamard and capacity radii.
    pub radius_cross: f64,
    /// Bring-up: `|log R̂ + Y((d−1)θ)/(d−1)|` over the z + z^d grid.
    pub dstar_band: f64,
    /// Relative error allowed in `log R(geyer) = (d−1) log R(dstar)`.
    pub dstar_relation: f64,
    /// Relative change of the fitted lemma constant under grid doubling.
    pub lemma_stability: f64,
    /// Largest fraction of flagged rows before a run counts as failed.
    pub flagged_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            trivial_delta: 1e-6,
            harmonic_delta: 1e-8,
            conjecture_band: 2.0,
            radius_cross: 0.05,
            dstar_band: 1.0,
            dstar_relation: 0.05,
            lemma_stability: 0.10,
            flagged_fraction: 0.10,
        }
    }
}

/// Parameters that identify a run, hashed into every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub schema_version: u32,
    pub crate_version: String,
    pub config: serde_json::Value,
    /// SHA-256 of the canonical JSON of `config`.
    pub config_hash: String,
}

impl Provenance {
    pub fn of<T: Serialize>(config: &T) -> Self {
        // serde_json::Value keeps object keys sorted, so this is canonical
        let value = serde_json::to_value(config).unwrap_or(serde_json::Value::Null);
        let text = serde_json::to_string(&value).unwrap_or_default();
        let hash = Sha256::digest(text.as_bytes());
        let config_hash = hash.iter().map(|b| format!("{b:02x}")).collect();
        Provenance { schema_version: SCHEMA_VERSION, crate_version: env!("CARGO_PKG_VERSION").into(), config: value, config_hash }
    }
}

/// One sample. Column meaning per scan:
///
/// | scan | `y` | `b` | `log_r` | `s` |
/// |---|---|---|---|---|
/// | conjecture | `Y(θ)` | `B(θ)` | `log R̂(P_θ)` | `Y + log R̂` |
/// | z + z^d | `Y((d−1)θ)` | `Y(θ)` | `log R̂(f_θ)` | `log R̂ + Y((d−1)θ)/(d−1)` |
/// | lemma | `Y(θ)` | `Y(mθ)` | – | `Y(θ) − Y(mθ)` |
/// | harmonicity | – | – | circle average | `Δ(r)` |
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub theta: String,
    pub family: String,
    pub param: String,
    pub y: f64,
    pub y_tail: f64,
    pub b: f64,
    pub log_r: f64,
    /// Uncertainty of `s` (log scale).
    pub uncertainty: f64,
    pub s: f64,
    /// Empty when the row is valid.
    pub flag: String,
    /// Scan-specific additional columns, written after the fixed ones.
    pub extra: BTreeMap<String, f64>,
}

impl ScanRow {
    /// A row with every numeric column unset.
    pub fn new(theta: &Angle, family: impl Into<String>, param: impl Into<String>) -> Self {
        ScanRow {
            theta: theta.to_string(),
            family: family.into(),
            param: param.into(),
            y: f64::NAN,
            y_tail: f64::NAN,
            b: f64::NAN,
            log_r: f64::NAN,
            uncertainty: f64::NAN,
            s: f64::NAN,
            flag: String::new(),
            extra: BTreeMap::new(),
        }
    }

    pub fn flagged(mut self, why: impl Into<String>) -> Self {
        self.flag = why.into();
        self
    }

    pub fn is_flagged(&self) -> bool {
        !self.flag.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub min_s: f64,
    pub max_s: f64,
    pub row_count: usize,
    pub flagged: usize,
    /// Fitted or derived constants, by name.
    pub fitted: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub kind: String,
    pub rows: Vec<ScanRow>,
    pub summary: Summary,
    pub provenance: Provenance,
}

impl ScanReport {
    pub fn new(kind: &str, rows: Vec<ScanRow>, fitted: BTreeMap<String, f64>, provenance: Provenance) -> Self {
        let summary = summarize(&rows, fitted);
        ScanReport { kind: kind.into(), rows, summary, provenance }
    }

    pub fn flagged_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.summary.flagged as f64 / self.rows.len() as f64
        }
    }

    /// CSV with a leading `# config_hash=…` comment carrying the config.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Precondition(format!("write failed: {e}"));
        writeln!(out, "# kind={} config_hash={} config={}", self.kind, self.provenance.config_hash, self.provenance.config)
            .map_err(io)?;
        let mut keys: Vec<&String> = self.rows.iter().flat_map(|r| r.extra.keys()).collect();
        keys.sort();
        keys.dedup();
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Precondition(format!("csv write failed: {e}"));
        let mut header: Vec<String> =
            ["theta", "family", "param", "y", "y_tail", "b", "log_r", "uncertainty", "s", "flag"].map(String::from).to_vec();
        header.extend(keys.iter().map(|k| k.to_string()));
        w.write_record(&header).map_err(err)?;
        let num = |x: f64| if x.is_nan() { String::new() } else { format!("{x:.15e}") };
        for r in &self.rows {
            let mut rec = vec![
                r.theta.clone(),
                r.family.clone(),
                r.param.clone(),
                num(r.y),
                num(r.y_tail),
                num(r.b),
                num(r.log_r),
                num(r.uncertainty),
                num(r.s),
                r.flag.clone(),
            ];
            rec.extend(keys.iter().map(|k| r.extra.get(*k).map_or_else(String::new, |x| num(*x))));
            w.write_record(&rec).map_err(err)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    /// `{schema_version, kind, config, config_hash, summary, row_count, flags}`.
    pub fn summary_json(&self) -> serde_json::Value {
        let flags: Vec<serde_json::Value> = self
            .rows
            .iter()
            .filter(|r| r.is_flagged())
            .map(|r| serde_json::json!({"theta": r.theta, "param": r.param, "flag": r.flag}))
            .collect();
        let finite = |x: f64| if x.is_finite() { serde_json::json!(x) } else { serde_json::Value::Null };
        let fitted: serde_json::Map<String, serde_json::Value> =
            self.summary.fitted.iter().map(|(k, v)| (k.clone(), finite(*v))).collect();
        serde_json::json!({
            "schema_version": self.provenance.schema_version,
            "crate_version": self.provenance.crate_version,
            "kind": self.kind,
            "config": self.provenance.config,
            "config_hash": self.provenance.config_hash,
            "summary": {
                "min_s": finite(self.summary.min_s),
                "max_s": finite(self.summary.max_s),
                "flagged": self.summary.flagged,
                "fitted": fitted,
            },
            "row_count": self.rows.len(),
            "flags": flags,
        })
    }
}

/// Recomputes the summary from rows.
pub fn summarize(rows: &[ScanRow], fitted: BTreeMap<String, f64>) -> Summary {
    let valid = rows.iter().filter(|r| !r.is_flagged() && r.s.is_finite());
    let (min_s, max_s) = valid.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.s), hi.max(r.s)));
    Summary { min_s, max_s, row_count: rows.len(), flagged: rows.iter().filter(|r| r.is_flagged()).count(), fitted }
}

/// Purely periodic quadratic irrationals `[0; (a₁, …, a_p)]` with
/// `1 ≤ p ≤ max_period` and `1 ≤ a_i ≤ max_quotient`. The first `k` angles
/// do not depend on `count`.
pub fn sample_quadratic_angles(count: usize, seed: u64, max_period: usize, max_quotient: u64) -> Vec<Angle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let p = rng.gen_range(1..=max_period);
            let period: Vec<u64> = (0..p).map(|_| rng.gen_range(1..=max_quotient)).collect();
            Angle::from_cf(&[], &period).expect("positive quotients give an irrational")
        })
        .collect()
}

pub const SAMPLE_MAX_PERIOD: usize = 8;
pub const SAMPLE_MAX_QUOTIENT: u64 = 12;

/// `log R̂` of `f` from `n` coefficients.
pub fn log_radius(f: &GermSeries, n: usize, bits: u32) -> Result<RadiusEstimate> {
    let l = linearize(f, n, bits)?;
    hadamard_radius(&l, crate::powerseries::DEFAULT_WINDOW)
}

fn error_flag(e: &Error) -> String {
    match e {
        Error::Resonance(n) => format!("resonance at n={n}"),
        Error::PrecisionExhausted { .. } => "precision exhausted".into(),
        other => other.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureParams {
    pub thetas: Vec<String>,
    pub n: usize,
    pub bits: u32,
    pub depth: usize,
}

/// Per angle: `Y`, `B`, `log R̂(P_θ)` and `S = Y + log R̂`. Rational angles
/// are flagged with infinite `Y` and no radius.
pub fn conjecture_scan(thetas: &[Angle], n: usize, bits: u32, depth: usize) -> ScanReport {
    let params = ConjectureParams { thetas: thetas.iter().map(Angle::to_string).collect(), n, bits, depth };
    let rows: Vec<ScanRow> = thetas.par_iter().map(|t| conjecture_row(t, n, bits, depth)).collect();
    let mut fitted = BTreeMap::new();
    let s = summarize(&rows, BTreeMap::new());
    fitted.insert("band_width".into(), s.max_s - s.min_s);
    ScanReport::new("scan-conjecture", rows, fitted, Provenance::of(&params))
}

fn conjecture_row(theta: &Angle, n: usize, bits: u32, depth: usize) -> ScanRow {
    let mut row = ScanRow::new(theta, "quad", format!("N={n}"));
    let y = match yoccoz_y(theta, depth) {
        Ok(y) => y,
        Err(e) => return row.flagged(error_flag(&e)),
    };
    row.y = y.midpoint();
    row.y_tail = y.tail_bound;
    match y.status {
        SumStatus::Infinite => {
            row.y = f64::INFINITY;
            return row.flagged("infinite Y (rational angle)");
        }
        SumStatus::Undecidable => return row.flagged("Y undecidable at stored precision"),
        SumStatus::Finite => {}
    }
    if let Ok(b) = brjuno_b(theta, depth) {
        row.b = b.midpoint();
    }
    let est = quad_germ(theta, 64).and_then(|f| log_radius(&f, n, bits));
    match est {
        Ok(r) if !r.infinite => {
            row.log_r = r.log_value;
            row.uncertainty = r.log_uncertainty() + 0.5 * y.tail_bound;
            row.s = row.y + r.log_value;
            row
        }
        Ok(_) => row.flagged("radius estimate infinite"),
        Err(e) => row.flagged(error_flag(&e)),
    }
}

/// Trapezoidal average of `log R̂(f + az²)` over `M` points of `|a| = r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleAverage {
    pub r: f64,
    pub m: usize,
    pub mean: f64,
    /// Mean of the per-point log uncertainties.
    pub uncertainty: f64,
    pub flagged: usize,
    pub values: Vec<f64>,
}

pub fn circle_average(f: &GermSeries, r: f64, m: usize, n: usize, bits: u32) -> Result<CircleAverage> {
    if m < 16 {
        return Err(Error::Precondition(format!("need at least 16 circle points, got {m}")));
    }
    if !(r > 0.0) {
        return Err(Error::Precondition(format!("radius must be positive, got {r}")));
    }
    let per_point: Vec<Option<RadiusEstimate>> = (0..m)
        .into_par_iter()
        .map(|k| {
            let a = Complex64::from_polar(r, TAU * k as f64 / m as f64);
            log_radius(&perturbed(f, a), n, bits).ok().filter(|e| !e.infinite)
        })
        .collect();
    let flagged = per_point.iter().filter(|e| e.is_none()).count();
    if flagged * 10 > m {
        return Err(Error::TooManyFlagged { flagged, total: m });
    }
    let ok: Vec<&RadiusEstimate> = per_point.iter().flatten().collect();
    let mean = ok.iter().map(|e| e.log_value).sum::<f64>() / ok.len() as f64;
    let uncertainty = ok.iter().map(|e| e.log_uncertainty()).sum::<f64>() / ok.len() as f64;
    let values = per_point.iter().map(|e| e.as_ref().map_or(f64::NAN, |e| e.log_value)).collect();
    Ok(CircleAverage { r, m, mean, uncertainty, flagged, values })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicParams {
    pub theta: String,
    pub family: String,
    pub radii: Vec<f64>,
    pub m: usize,
    pub n: usize,
    pub bits: u32,
}

/// `Δ(r) = ⟨log R̂(f_a)⟩_{|a|=r} + log r − log R̂(P_θ)` for each radius;
/// `uncertainty` combines the circle and the `P_θ` uncertainties.
pub fn harmonicity_check(family: FamilySpec, theta: &Angle, radii: &[f64], m: usize, n: usize, bits: u32) -> Result<ScanReport> {
    if let Some(r) = radii.iter().find(|&&r| !(r > PERTURBATION.outer_radius)) {
        return Err(Error::Precondition(format!("radius {r} is not above {}", PERTURBATION.outer_radius)));
    }
    let params = HarmonicParams { theta: theta.to_string(), family: family.to_string(), radii: radii.to_vec(), m, n, bits };
    let f = family.build(theta, n, 128)?;
    let p = log_radius(&quad_germ(theta, 64)?, n, bits)?;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut row = ScanRow::new(theta, family.to_string(), format!("r={r}"));
        match circle_average(&f, r, m, n, bits) {
            Ok(avg) => {
                row.log_r = avg.mean;
                row.s = avg.mean + r.ln() - p.log_value;
                row.uncertainty = avg.uncertainty + p.log_uncertainty();
                row.extra.insert("flagged_points".into(), avg.flagged as f64);
            }
            Err(e) => row = row.flagged(error_flag(&e)),
        }
        rows.push(row);
    }
    let mut fitted = BTreeMap::new();
    fitted.insert("log_r_quadratic".into(), p.log_value);
    fitted.insert("max_abs_delta".into(), rows.iter().filter(|r| !r.is_flagged()).map(|r| r.s.abs()).fold(0.0, f64::max));
    Ok(ScanReport::new("check-harmonic", rows, fitted, Provenance::of(&params)))
}

/// Outcome of comparing `log R̂(f)` with its circle average.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FatouOutcome {
    pub family: String,
    pub theta: String,
    pub log_r: f64,
    pub average: f64,
    pub uncertainty: f64,
    /// `log R̂(f) − average + uncertainty`; negative means a violation.
    pub slack: f64,
    pub holds: bool,
}

/// `log R̂(f) ≥ ⟨log R̂(f_a)⟩_{|a|=r}` up to the combined uncertainty, for
/// germs univalent on the unit disk.
pub fn fatou_check(family: FamilySpec, theta: &Angle, r: f64, m: usize, n: usize, bits: u32) -> Result<FatouOutcome> {
    if !family.is_univalent_whitelisted() {
        return Err(Error::Precondition(format!("{family} is not on the univalent whitelist")));
    }
    let f = family.build(theta, n, 128)?;
    let own = log_radius(&f, n, bits)?;
    let avg = circle_average(&f, r, m, n, bits)?;
    let (log_r, unc) = if own.infinite { (f64::INFINITY, avg.uncertainty) } else { (own.log_value, avg.uncertainty + own.log_uncertainty()) };
    let slack = log_r - avg.mean + unc;
    Ok(FatouOutcome {
        family: family.to_string(),
        theta: theta.to_string(),
        log_r,
        average: avg.mean,
        uncertainty: unc,
        slack,
        holds: slack >= 0.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FatouParams {
    pub cases: Vec<(String, String)>,
    pub r: f64,
    pub m: usize,
    pub n: usize,
    pub bits: u32,
}

/// [`fatou_check`] over several `(family, θ)` pairs; rows with a violation
/// are flagged. `s` is the slack and `log_r` the germ's own radius.
pub fn fatou_report(cases: &[(FamilySpec, Angle)], r: f64, m: usize, n: usize, bits: u32) -> ScanReport {
    let params = FatouParams { cases: cases.iter().map(|(f, t)| (f.to_string(), t.to_string())).collect(), r, m, n, bits };
    let rows = cases
        .iter()
        .map(|(fam, theta)| {
            let mut row = ScanRow::new(theta, fam.to_string(), format!("r={r}"));
            match fatou_check(*fam, theta, r, m, n, bits) {
                Ok(o) => {
                    row.log_r = o.log_r;
                    row.s = o.slack;
                    row.uncertainty = o.uncertainty;
                    row.extra.insert("average".into(), o.average);
                    if !o.holds {
                        row = row.flagged("inequality violated");
                    }
                }
                Err(e) => row = row.flagged(error_flag(&e)),
            }
            row
        })
        .collect();
    ScanReport::new("check-fatou", rows, BTreeMap::new(), Provenance::of(&params))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DstarParams {
    pub d: u32,
    pub thetas: Vec<String>,
    pub n: usize,
    pub bits: u32,
    pub depth: usize,
}

/// For `f_θ = λ(z + z^d)`: `s = log R̂(f_θ) + Y((d−1)θ)/(d−1)`, plus the
/// one-sided quantity `log R̂ + Y(θ)` and the relative error of
/// `log R̂(geyer_{(d−1)θ}) = (d−1) log R̂(f_θ)`.
pub fn dstar_bounds_scan(d: u32, thetas: &[Angle], n: usize, bits: u32, depth: usize) -> Result<ScanReport> {
    if d < 3 {
        return Err(Error::Precondition(format!("z + z^d scan needs d ≥ 3, got {d}")));
    }
    let params = DstarParams { d, thetas: thetas.iter().map(Angle::to_string).collect(), n, bits, depth };
    let rows: Vec<ScanRow> = thetas.par_iter().map(|t| dstar_row(d, t, n, bits, depth)).collect();
    let mut fitted = BTreeMap::new();
    let valid: Vec<&ScanRow> = rows.iter().filter(|r| !r.is_flagged()).collect();
    let max_rel = valid.iter().filter_map(|r| r.extra.get("relation_error")).fold(0.0f64, |a, &b| a.max(b));
    fitted.insert("max_relation_error".into(), max_rel);
    let one_sided: Vec<f64> = valid.iter().filter_map(|r| r.extra.get("log_r_plus_y").copied()).collect();
    if !one_sided.is_empty() {
        let lo = one_sided.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = one_sided.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        fitted.insert("one_sided_spread".into(), hi - lo);
        fitted.insert("one_sided_min".into(), lo);
    }
    Ok(ScanReport::new("scan-dstar", rows, fitted, Provenance::of(&params)))
}

fn dstar_row(d: u32, theta: &Angle, n: usize, bits: u32, depth: usize) -> ScanRow {
    let mut row = ScanRow::new(theta, format!("dstar:{d}"), format!("N={n}"));
    let inner = || -> Result<ScanRow> {
        let mut row = row.clone();
        let dt = theta.mul_mod1(u64::from(d - 1))?;
        let y_dt = yoccoz_y(&dt, depth)?;
        let y_t = yoccoz_y(theta, depth)?;
        if !y_dt.is_finite() || !y_t.is_finite() {
            return Ok(row.flagged("Y not finite"));
        }
        let r = log_radius(&dstar_germ(d, theta, 64)?, n, bits)?;
        if r.infinite {
            return Ok(row.flagged("radius estimate infinite"));
        }
        let k = f64::from(d - 1);
        row.y = y_dt.midpoint();
        row.y_tail = y_dt.tail_bound;
        row.b = y_t.midpoint();
        row.log_r = r.log_value;
        row.s = r.log_value + row.y / k;
        row.uncertainty = r.log_uncertainty() + y_dt.tail_bound / k;
        row.extra.insert("log_r_plus_y".into(), r.log_value + row.b);
        let g = log_radius(&geyer_germ(d, &dt, 64)?, n, bits)?;
        if !g.infinite {
            row.extra.insert("log_r_geyer".into(), g.log_value);
            row.extra.insert("relation_error".into(), ((g.log_value - k * r.log_value) / (k * r.log_value)).abs());
        }
        Ok(row)
    };
    match inner() {
        Ok(r) => r,
        Err(e) => {
            row.flag = error_flag(&e);
            row
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaParams {
    pub thetas: Vec<String>,
    pub ms: Vec<u64>,
    pub depth: usize,
}

/// Gaps `Y(θ) − Y(mθ)` over the grid, the smallest `C ≥ 0` with
/// `gap ≤ C log(2m)` everywhere, and the number of rows exceeding it.
pub fn lemma_scan(thetas: &[Angle], ms: &[u64], depth: usize) -> ScanReport {
    let params = LemmaParams { thetas: thetas.iter().map(Angle::to_string).collect(), ms: ms.to_vec(), depth };
    let per_theta: Vec<Vec<ScanRow>> = thetas.par_iter().map(|t| lemma_rows(t, ms, depth)).collect();
    let rows: Vec<ScanRow> = per_theta.into_iter().flatten().collect();
    let c = rows
        .iter()
        .filter(|r| !r.is_flagged())
        .filter_map(|r| r.extra.get("ratio").copied())
        .fold(0.0f64, f64::max);
    let violations = rows
        .iter()
        .filter(|r| !r.is_flagged())
        .filter(|r| r.s > c * r.extra.get("log_2m").copied().unwrap_or(f64::INFINITY) + r.uncertainty)
        .count();
    let mut fitted = BTreeMap::new();
    fitted.insert("c".into(), c);
    fitted.insert("violations".into(), violations as f64);
    ScanReport::new("check-lemma", rows, fitted, Provenance::of(&params))
}

fn lemma_rows(theta: &Angle, ms: &[u64], depth: usize) -> Vec<ScanRow> {
    let base = match yoccoz_y(theta, depth) {
        Ok(y) if y.is_finite() => y,
        Ok(_) => return ms.iter().map(|m| ScanRow::new(theta, "", format!("m={m}")).flagged("Y not finite")).collect(),
        Err(e) => return ms.iter().map(|m| ScanRow::new(theta, "", format!("m={m}")).flagged(error_flag(&e))).collect(),
    };
    ms.iter()
        .map(|&m| {
            let mut row = ScanRow::new(theta, "", format!("m={m}"));
            row.y = base.midpoint();
            row.y_tail = base.tail_bound;
            let ym = theta.mul_mod1(m).and_then(|t| yoccoz_y(&t, depth));
            match ym {
                Ok(ym) if ym.is_finite() => {
                    row.b = ym.midpoint();
                    row.s = row.y - row.b;
                    row.uncertainty = 0.5 * (base.tail_bound + ym.tail_bound);
                    let log_2m = (2.0 * m as f64).ln();
                    row.extra.insert("log_2m".into(), log_2m);
                    row.extra.insert("ratio".into(), row.s / log_2m);
                    row
                }
                Ok(_) => row.flagged("Y(mθ) not finite"),
                Err(e) => row.flagged(error_flag(&e)),
            }
        })
        .collect()
}
