//! `siegel`: batch driver for the siegel-lab experiments.
//!
//! Exit status: 0 on success, 1 when a check fails, the flagged fraction
//! exceeds its threshold or the computation errors, 2 on a config error.

mod config;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use siegel_lab::brjuno::{brjuno_b, yoccoz_y};
use siegel_lab::capacity::conformal_radius_capacity;
use siegel_lab::cfrac::Angle;
use siegel_lab::experiments::{
    conjecture_scan, dstar_bounds_scan, fatou_report, harmonicity_check, lemma_scan, log_radius,
    sample_quadratic_angles, Provenance, ScanReport, ScanRow, SAMPLE_MAX_PERIOD, SAMPLE_MAX_QUOTIENT,
};
use siegel_lab::families::{semiconjugacy_residual, FamilySpec, PERTURBATION};
use siegel_lab::powerseries::linearize;

use config::{Command, Flags, RunConfig};

#[derive(Parser)]
#[command(name = "siegel", version, about = "Brjuno functions, linearization series and Siegel-disk radii")]
struct Cli {
    #[command(subcommand)]
    command: Wrapped,
}

// Flags are attached to every variant; `Command` stays a plain enum for
// serialization.
#[derive(clap::Subcommand)]
enum Wrapped {
    /// Y(θ) and B(θ) with tail bounds.
    Brjuno(Flags),
    /// Coefficient dump of the linearizing series.
    Linearize(Flags),
    /// Hadamard radius of the linearizing series.
    Radius(Flags),
    /// Conformal radius of the quadratic Siegel disk by capacity.
    Capacity(Flags),
    /// S = Y + log R̂ over sampled angles.
    ScanConjecture(Flags),
    /// Circle averages of log R̂(f + az²) against log R̂(P_θ).
    CheckHarmonic(Flags),
    /// log R̂(f) against its circle average on the univalent whitelist.
    CheckFatou(Flags),
    /// Y(θ) − Y(mθ) against C log(2m).
    CheckLemma(Flags),
    /// log R̂ + Y((d−1)θ)/(d−1) for λ(z + z^d).
    ScanDstar(Flags),
    /// Semi-conjugacy residual of the unicritical and geyer germs.
    Semiconj(Flags),
}

impl Wrapped {
    fn split(self) -> (Command, Flags) {
        match self {
            Wrapped::Brjuno(f) => (Command::Brjuno, f),
            Wrapped::Linearize(f) => (Command::Linearize, f),
            Wrapped::Radius(f) => (Command::Radius, f),
            Wrapped::Capacity(f) => (Command::Capacity, f),
            Wrapped::ScanConjecture(f) => (Command::ScanConjecture, f),
            Wrapped::CheckHarmonic(f) => (Command::CheckHarmonic, f),
            Wrapped::CheckFatou(f) => (Command::CheckFatou, f),
            Wrapped::CheckLemma(f) => (Command::CheckLemma, f),
            Wrapped::ScanDstar(f) => (Command::ScanDstar, f),
            Wrapped::Semiconj(f) => (Command::Semiconj, f),
        }
    }
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<siegel_lab::Error> for Failure {
    fn from(e: siegel_lab::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

/// What a subcommand produced.
enum Output {
    Report { report: ScanReport, failed: Option<String> },
    Coefficients { csv: Vec<u8>, json: serde_json::Value },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = cli.command.split();
    match run(command, &flags) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(why)) => {
            eprintln!("siegel {}: {why}", command.name());
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("siegel {}: config error: {msg}", command.name());
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("siegel {}: {msg}", command.name());
            ExitCode::from(1)
        }
    }
}

/// Runs one subcommand and writes its artifacts. `Ok(Some(reason))` means
/// the artifacts were written but the run counts as failed.
fn run(command: Command, flags: &Flags) -> Result<Option<String>, Failure> {
    let cfg = RunConfig::resolve(command, flags).map_err(Failure::Config)?;
    let thetas = parse_angles(&cfg.theta)?;
    let families = parse_families(&cfg.family)?;
    let snapshot = Snapshot { command, config: &cfg };
    let provenance = Provenance::of(&snapshot);
    let output = dispatch(command, &cfg, thetas, families, provenance)?;
    match output {
        Output::Report { mut report, failed } => {
            report.provenance = Provenance::of(&snapshot);
            let limit = cfg.tolerances.flagged_fraction;
            let too_many = (report.flagged_fraction() > limit)
                .then(|| format!("{} of {} rows flagged (limit {limit})", report.summary.flagged, report.rows.len()));
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            let mut json = serde_json::to_vec_pretty(&report.summary_json()).expect("json values serialize");
            json.push(b'\n');
            emit(&cfg, &csv, &json)?;
            Ok(failed.or(too_many))
        }
        Output::Coefficients { csv, json } => {
            let mut j = serde_json::to_vec_pretty(&json).expect("json values serialize");
            j.push(b'\n');
            emit(&cfg, &csv, &j)?;
            Ok(None)
        }
    }
}

#[derive(serde::Serialize)]
struct Snapshot<'a> {
    command: Command,
    config: &'a RunConfig,
}

fn emit(cfg: &RunConfig, csv: &[u8], json: &[u8]) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Run(format!("write failed: {e}"));
    match &cfg.out {
        Some(prefix) => {
            let with = |ext: &str| {
                let mut p = prefix.clone().into_os_string();
                p.push(ext);
                std::path::PathBuf::from(p)
            };
            let mut f = BufWriter::new(File::create(with(".csv")).map_err(io)?);
            f.write_all(csv).map_err(io)?;
            f.flush().map_err(io)?;
            std::fs::write(with(".json"), json).map_err(io)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(csv).map_err(io)?;
        }
    }
    Ok(())
}

fn parse_angles(descriptors: &[String]) -> Result<Vec<Angle>, Failure> {
    descriptors.iter().map(|t| Angle::parse(t).map_err(|e| Failure::Config(format!("--theta {t:?}: {e}")))).collect()
}

fn parse_families(descriptors: &[String]) -> Result<Vec<FamilySpec>, Failure> {
    descriptors.iter().map(|t| t.parse().map_err(|e| Failure::Config(format!("--family {t:?}: {e}")))).collect()
}

fn first_or_golden(thetas: &[Angle]) -> Angle {
    thetas.first().cloned().unwrap_or_else(Angle::golden)
}

fn angles_or_sample(cfg: &RunConfig, thetas: Vec<Angle>) -> Vec<Angle> {
    if thetas.is_empty() {
        sample_quadratic_angles(cfg.samples(), cfg.seed, SAMPLE_MAX_PERIOD, SAMPLE_MAX_QUOTIENT)
    } else {
        thetas
    }
}

fn report(report: ScanReport) -> Output {
    Output::Report { report, failed: None }
}

fn dispatch(
    command: Command,
    cfg: &RunConfig,
    thetas: Vec<Angle>,
    families: Vec<FamilySpec>,
    provenance: Provenance,
) -> Result<Output, Failure> {
    let tol = &cfg.tolerances;
    let n = cfg.n();
    Ok(match command {
        Command::Brjuno => {
            let thetas = if thetas.is_empty() { vec![Angle::golden()] } else { thetas };
            let rows = thetas.iter().map(|t| brjuno_row(t, cfg.depth)).collect();
            report(ScanReport::new("brjuno", rows, BTreeMap::new(), provenance))
        }
        Command::Linearize => {
            let theta = first_or_golden(&thetas);
            let family = families.first().copied().unwrap_or(FamilySpec::Quad);
            let f = family.build(&theta, n, cfg.bits.max(64))?;
            let l = linearize(&f, n, cfg.bits)?;
            let mut csv = Vec::new();
            writeln!(csv, "# kind=linearize config_hash={} config={}", provenance.config_hash, provenance.config)
                .expect("writing to a vector");
            l.write_csv(&mut csv)?;
            let json = serde_json::json!({
                "schema_version": provenance.schema_version,
                "crate_version": provenance.crate_version,
                "kind": "linearize",
                "config": provenance.config,
                "config_hash": provenance.config_hash,
                "summary": {"valid": l.valid, "requested": n},
                "row_count": l.valid,
                "flags": l.flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect::<Vec<_>>(),
            });
            Output::Coefficients { csv, json }
        }
        Command::Radius => {
            let theta = first_or_golden(&thetas);
            let family = families.first().copied().unwrap_or(FamilySpec::Quad);
            let f = family.build(&theta, n, cfg.bits.max(64))?;
            let est = log_radius(&f, n, cfg.bits)?;
            let mut row = ScanRow::new(&theta, family.to_string(), format!("N={n}"));
            row.log_r = est.log_value;
            row.uncertainty = est.log_uncertainty();
            row.extra.insert("radius".into(), est.value);
            row.extra.insert("log_slope_radius".into(), est.log_slope_value);
            row.extra.insert("window_lo".into(), est.window.0 as f64);
            row.extra.insert("window_hi".into(), est.window.1 as f64);
            row.extra.insert("infinite".into(), f64::from(u8::from(est.infinite)));
            report(ScanReport::new("radius", vec![row], BTreeMap::new(), provenance))
        }
        Command::Capacity => {
            let theta = first_or_golden(&thetas);
            let est = conformal_radius_capacity(&theta, cfg.capacity_count, cfg.capacity_burnin, cfg.capacity_points)?;
            let mut row = ScanRow::new(&theta, "quad", format!("points={}", est.n_points_used));
            row.log_r = est.conformal_radius.ln();
            row.uncertainty = (1.0 + est.spread).ln();
            row.extra.insert("conformal_radius".into(), est.conformal_radius);
            row.extra.insert("transfinite_diameter".into(), est.transfinite_diameter);
            row.extra.insert("energy".into(), est.energy);
            row.extra.insert("spread".into(), est.spread);
            report(ScanReport::new("capacity", vec![row], BTreeMap::new(), provenance))
        }
        Command::ScanConjecture => {
            let r = conjecture_scan(&angles_or_sample(cfg, thetas), n, cfg.bits, cfg.depth);
            let band = tol.conjecture_band;
            let failed = r
                .rows
                .iter()
                .find(|row| !row.is_flagged() && row.s.abs() > band)
                .map(|row| format!("|S| = {:.4} above band {band} at {}", row.s.abs(), row.theta));
            Output::Report { report: r, failed }
        }
        Command::CheckHarmonic => {
            let theta = first_or_golden(&thetas);
            let families = if families.is_empty() { vec![FamilySpec::Cubic] } else { families };
            let outer = PERTURBATION.outer_radius;
            if let Some(r) = cfg.radii.iter().find(|&&r| !(r > outer)) {
                return Err(Failure::Config(format!("radius {r} is not above {outer}")));
            }
            let mut rows = Vec::new();
            let mut fitted = BTreeMap::new();
            let mut failed = None;
            for fam in families {
                let r = harmonicity_check(fam, &theta, &cfg.radii, cfg.m, n, cfg.bits)?;
                let limit = if fam == FamilySpec::Linear { tol.trivial_delta } else { tol.harmonic_delta };
                if let Some(row) = r.rows.iter().find(|row| !row.is_flagged() && row.s.abs() > limit) {
                    failed.get_or_insert(format!("|Δ| = {:.3e} above {limit} for {} at {}", row.s.abs(), fam, row.param));
                }
                for (k, v) in r.summary.fitted {
                    fitted.insert(format!("{fam}:{k}"), v);
                }
                rows.extend(r.rows);
            }
            Output::Report { report: ScanReport::new("check-harmonic", rows, fitted, provenance), failed }
        }
        Command::CheckFatou => {
            let cases: Vec<(FamilySpec, Angle)> = if families.is_empty() {
                vec![
                    (FamilySpec::Linear, Angle::golden()),
                    (FamilySpec::MobiusPole, Angle::golden()),
                    (FamilySpec::Cubic, Angle::silver()),
                ]
            } else {
                let theta = first_or_golden(&thetas);
                families.into_iter().map(|f| (f, theta.clone())).collect()
            };
            if let Some((f, _)) = cases.iter().find(|(f, _)| !f.is_univalent_whitelisted()) {
                return Err(Failure::Config(format!("family {f} is not on the univalent whitelist")));
            }
            let r = fatou_report(&cases, cfg.radii.first().copied().unwrap_or(11.0), cfg.m, n, cfg.bits);
            let failed = r.rows.iter().find(|row| row.is_flagged()).map(|row| format!("{}: {}", row.family, row.flag));
            Output::Report { report: r, failed }
        }
        Command::CheckLemma => {
            let ms: Vec<u64> = (1..=cfg.m_max).collect();
            let r = lemma_scan(&angles_or_sample(cfg, thetas), &ms, cfg.depth);
            let v = r.summary.fitted.get("violations").copied().unwrap_or(0.0);
            let failed = (v > 0.0).then(|| format!("{v} violations of the fitted constant"));
            Output::Report { report: r, failed }
        }
        Command::ScanDstar => {
            let d = cfg.degree.first().copied().unwrap_or(3);
            let r = dstar_bounds_scan(d, &angles_or_sample(cfg, thetas), n, cfg.bits, cfg.depth)?;
            let rel = r.summary.fitted.get("max_relation_error").copied().unwrap_or(0.0);
            let band = tol.dstar_band;
            let failed = r
                .rows
                .iter()
                .find(|row| !row.is_flagged() && row.s.abs() > band)
                .map(|row| format!("centered quantity {:.4} outside band {band} at {}", row.s, row.theta))
                .or_else(|| (rel > tol.dstar_relation).then(|| format!("radius relation error {rel:.4} above {}", tol.dstar_relation)));
            Output::Report { report: r, failed }
        }
        Command::Semiconj => {
            let thetas = if thetas.is_empty() { vec![Angle::golden()] } else { thetas };
            let degrees = if cfg.degree.is_empty() { (2..=8).collect() } else { cfg.degree.clone() };
            let mut rows = Vec::new();
            for t in &thetas {
                for &d in &degrees {
                    let mut row = ScanRow::new(t, format!("unicritical:{d}"), format!("d={d}"));
                    match semiconjugacy_residual(d, t, n) {
                        Ok(res) => row.s = res,
                        Err(e) => row = row.flagged(e.to_string()),
                    }
                    rows.push(row);
                }
            }
            report(ScanReport::new("semiconj", rows, BTreeMap::new(), provenance))
        }
    })
}

fn brjuno_row(theta: &Angle, depth: usize) -> ScanRow {
    let mut row = ScanRow::new(theta, "", format!("depth={depth}"));
    match (yoccoz_y(theta, depth), brjuno_b(theta, depth)) {
        (Ok(y), Ok(b)) => {
            row.y = if y.is_finite() { y.midpoint() } else { f64::INFINITY };
            row.y_tail = y.tail_bound;
            row.b = if b.is_finite() { b.midpoint() } else { f64::INFINITY };
            row.extra.insert("b_tail".into(), b.tail_bound);
            row.extra.insert("depth_used".into(), y.depth_used as f64);
            row
        }
        (Err(e), _) | (_, Err(e)) => row.flagged(e.to_string()),
    }
}
