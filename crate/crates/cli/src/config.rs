//! Run configuration: file values, overridden by flags, then defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use siegel_lab::experiments::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Brjuno,
    Linearize,
    Radius,
    Capacity,
    ScanConjecture,
    CheckHarmonic,
    CheckFatou,
    CheckLemma,
    ScanDstar,
    Semiconj,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Brjuno => "brjuno",
            Command::Linearize => "linearize",
            Command::Radius => "radius",
            Command::Capacity => "capacity",
            Command::ScanConjecture => "scan-conjecture",
            Command::CheckHarmonic => "check-harmonic",
            Command::CheckFatou => "check-fatou",
            Command::CheckLemma => "check-lemma",
            Command::ScanDstar => "scan-dstar",
            Command::Semiconj => "semiconj",
        }
    }

    fn default_n(self) -> usize {
        match self {
            Command::CheckHarmonic | Command::CheckFatou => 1024,
            Command::Semiconj => 64,
            _ => 4096,
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Command::CheckLemma => 200,
            Command::ScanDstar => 30,
            _ => 50,
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the defaults of [`RunConfig`].
#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// Angle descriptor (`golden`, `silver`, `p/q`, `quad:u,v,D,w`, decimal); repeatable.
    #[arg(long)]
    pub theta: Vec<String>,
    /// Germ family (`quad`, `linear`, `cubic`, `mobius-pole`, `dstar:d`, …); repeatable.
    #[arg(long)]
    pub family: Vec<String>,
    /// Number of series coefficients.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Working precision of the linearizer in bits (≤ 53 uses doubles).
    #[arg(long)]
    pub bits: Option<u32>,
    /// Continued-fraction depth for Y and B.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Points on each averaging circle.
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Averaging radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<f64>,
    /// Output prefix: writes `<out>.csv` and `<out>.json`. Stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for sampled angles.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sampled angles when no `--theta` is given.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Degree for `scan-dstar` and `semiconj`.
    #[arg(long)]
    pub degree: Vec<u32>,
    /// Largest multiplier for `check-lemma`.
    #[arg(long)]
    pub m_max: Option<u64>,
    /// TOML or JSON file with any of the keys of the resolved config.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved configuration. This is what reports embed and hash.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub theta: Vec<String>,
    pub family: Vec<String>,
    /// Subcommand default when absent: 1024 for circle checks, 64 for
    /// `semiconj`, 4096 otherwise.
    pub n: Option<usize>,
    pub bits: u32,
    pub depth: usize,
    pub m: usize,
    pub radii: Vec<f64>,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Subcommand default when absent: 200 for `check-lemma`, 30 for
    /// `scan-dstar`, 50 otherwise.
    pub samples: Option<usize>,
    pub degree: Vec<u32>,
    pub m_max: u64,
    pub capacity_count: usize,
    pub capacity_burnin: usize,
    pub capacity_points: usize,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            theta: Vec::new(),
            family: Vec::new(),
            n: None,
            bits: 53,
            depth: 64,
            m: 64,
            radii: vec![11.0, 12.0, 15.0],
            out: None,
            seed: 0,
            samples: None,
            degree: Vec::new(),
            m_max: 64,
            capacity_count: siegel_lab::capacity::DEFAULT_COUNT,
            capacity_burnin: siegel_lab::capacity::DEFAULT_BURNIN,
            capacity_points: siegel_lab::capacity::DEFAULT_LEJA_POINTS,
            tolerances: Tolerances::default(),
        }
    }
}

pub fn load_file(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    } else {
        toml::from_str(&text).map_err(|e| format!("{}:\n{e}", path.display()))
    }
}

impl RunConfig {
    /// File (if any) overridden by flags, with subcommand defaults filled in.
    pub fn resolve(command: Command, flags: &Flags) -> Result<RunConfig, String> {
        let mut c = match &flags.config {
            Some(p) => load_file(p)?,
            None => RunConfig::default(),
        };
        if !flags.theta.is_empty() {
            c.theta = flags.theta.clone();
        }
        if !flags.family.is_empty() {
            c.family = flags.family.clone();
        }
        if !flags.radii.is_empty() {
            c.radii = flags.radii.clone();
        }
        if !flags.degree.is_empty() {
            c.degree = flags.degree.clone();
        }
        c.n = flags.n.or(c.n).or(Some(command.default_n()));
        c.samples = flags.samples.or(c.samples).or(Some(command.default_samples()));
        c.bits = flags.bits.unwrap_or(c.bits);
        c.depth = flags.depth.unwrap_or(c.depth);
        c.m = flags.m.unwrap_or(c.m);
        c.seed = flags.seed.unwrap_or(c.seed);
        c.m_max = flags.m_max.unwrap_or(c.m_max);
        if flags.out.is_some() {
            c.out = flags.out.clone();
        }
        if c.bits < 2 {
            return Err(format!("bits must be at least 2, got {}", c.bits));
        }
        if c.m_max < 1 {
            return Err("m_max must be at least 1".into());
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n.unwrap_or(4096)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(50)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let err = toml::from_str::<RunConfig>("bits = 64\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"));
        assert!(serde_json::from_str::<RunConfig>(r#"{"bits": 64, "bogus": 1}"#).is_err());
    }

    #[test]
    fn flags_override_defaults() {
        let flags = Flags { n: Some(128), bits: Some(64), ..Flags::default() };
        let c = RunConfig::resolve(Command::Radius, &flags).unwrap();
        assert_eq!((c.n, c.bits, c.depth), (Some(128), 64, 64));
        let c = RunConfig::resolve(Command::CheckHarmonic, &Flags::default()).unwrap();
        assert_eq!(c.n, Some(1024));
    }

    #[test]
    fn partial_tolerances_keep_defaults() {
        let c: RunConfig = toml::from_str("[tolerances]\nconjecture_band = 4.0\n").unwrap();
        assert_eq!(c.tolerances.conjecture_band, 4.0);
        assert_eq!(c.tolerances.flagged_fraction, Tolerances::default().flagged_fraction);
    }
}
