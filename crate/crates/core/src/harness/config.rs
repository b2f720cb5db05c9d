//! Run configuration, loaded from TOML.
//!
//! ```toml
//! scheme = "sesav2"          # sesav1 | sesav2 | sav1 | sav2 | esav1 | esav2
//! potential = "double-well"  # double-well | flory-huggins | zero
//! theta = 0.8                # Flory-Huggins only
//! theta_c = 1.6
//! length = 1.0               # domain side L
//! points = 128               # M
//! eps = 0.01
//! kappa = "lip"              # number, "lip" or "half-lip"
//! tau = 0.01
//! delta_offset = 0.01        # SAV: delta = C0 |Omega| + offset
//! t_end = 5.0                # or n_steps = 500, exactly one of them
//! seed = 42
//! stride = 1                 # record every `stride` steps (and the last)
//! steady_tol = 1e-8          # optional: stop once |dE_h| < tol
//! mbp_tol = 1e-12
//! energy_rel_tol = 1e-10
//!
//! [initial]
//! kind = "uniform_random"    # smooth_sine | uniform_random | constant
//! low = -0.8
//! high = 0.8
//!
//! [output]
//! csv = "run.csv"
//! snapshot_dir = "snapshots"
//! snapshot_stride = 100      # 0: final snapshot only
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::{Potential, PotentialKind};
use crate::schemes::SchemeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialName {
    DoubleWell,
    FloryHuggins,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KappaName {
    #[serde(rename = "lip")]
    Lipschitz,
    #[serde(rename = "half-lip")]
    HalfLipschitz,
}

/// Stabilizing constant, either literal or relative to `max |f'|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaSpec {
    Value(f64),
    Named(KappaName),
}

impl KappaSpec {
    pub fn resolve(&self, model: &Potential) -> f64 {
        match *self {
            KappaSpec::Value(k) => k,
            KappaSpec::Named(KappaName::Lipschitz) => model.lipschitz(),
            KappaSpec::Named(KappaName::HalfLipschitz) => 0.5 * model.lipschitz(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialSpec {
    /// `0.1 sin(2 pi x / L) sin(2 pi y / L)`.
    SmoothSine,
    /// i.i.d. uniform on `[low, high]`, see [`super::initial`].
    UniformRandom { low: f64, high: f64 },
    Constant { value: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub snapshot_dir: Option<PathBuf>,
    #[serde(default)]
    pub snapshot_stride: usize,
}

impl OutputSpec {
    /// Resolves relative paths against `dir`.
    pub fn rebased(&self, dir: &Path) -> OutputSpec {
        let join = |p: &Option<PathBuf>| p.as_ref().map(|p| dir.join(p));
        OutputSpec {
            csv: join(&self.csv),
            snapshot_dir: join(&self.snapshot_dir),
            snapshot_stride: self.snapshot_stride,
        }
    }
}

fn default_length() -> f64 {
    1.0
}
fn default_theta() -> f64 {
    0.8
}
fn default_theta_c() -> f64 {
    1.6
}
fn default_delta_offset() -> f64 {
    0.01
}
fn default_seed() -> u64 {
    42
}
fn default_stride() -> usize {
    1
}
fn default_mbp_tol() -> f64 {
    1e-12
}
fn default_energy_rel_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: SchemeId,
    pub potential: PotentialName,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_theta_c")]
    pub theta_c: f64,
    #[serde(default = "default_length")]
    pub length: f64,
    pub points: usize,
    pub eps: f64,
    pub kappa: KappaSpec,
    pub tau: f64,
    #[serde(default = "default_delta_offset")]
    pub delta_offset: f64,
    pub t_end: Option<f64>,
    pub n_steps: Option<usize>,
    pub initial: InitialSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    pub steady_tol: Option<f64>,
    #[serde(default = "default_mbp_tol")]
    pub mbp_tol: f64,
    #[serde(default = "default_energy_rel_tol")]
    pub energy_rel_tol: f64,
    #[serde(default)]
    pub output: OutputSpec,
}

impl<'de> Deserialize<'de> for SchemeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for SchemeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl RunConfig {
    /// Minimal config; every optional field at its default.
    pub fn new(
        scheme: SchemeId,
        potential: PotentialName,
        points: usize,
        eps: f64,
        kappa: KappaSpec,
        tau: f64,
        initial: InitialSpec,
    ) -> Self {
        RunConfig {
            scheme,
            potential,
            theta: default_theta(),
            theta_c: default_theta_c(),
            length: default_length(),
            points,
            eps,
            kappa,
            tau,
            delta_offset: default_delta_offset(),
            t_end: None,
            n_steps: Some(1),
            initial,
            seed: default_seed(),
            stride: default_stride(),
            steady_tol: None,
            mbp_tol: default_mbp_tol(),
            energy_rel_tol: default_energy_rel_tol(),
            output: OutputSpec::default(),
        }
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = Some(t_end);
        self.n_steps = None;
        self
    }

    pub fn with_n_steps(mut self, n: usize) -> Self {
        self.n_steps = Some(n);
        self.t_end = None;
        self
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        Self::from_table(table)
    }

    pub fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match (self.t_end, self.n_steps) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::Config("set exactly one of t_end and n_steps".into()))
            }
            (Some(t), None) if !(t >= 0.0 && t.is_finite()) => {
                return Err(Error::Config(format!("t_end must be nonnegative, got {t}")))
            }
            _ => {}
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        if let InitialSpec::UniformRandom { low, high } = self.initial {
            if !(low < high) {
                return Err(Error::Config(format!("need low < high, got [{low}, {high}]")));
            }
        }
        if let KappaSpec::Value(k) = self.kappa {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::Config(format!("kappa must be nonnegative, got {k}")));
            }
        }
        self.grid()?;
        self.model()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.length, self.points)
    }

    pub fn model(&self) -> Result<Potential> {
        let kind = match self.potential {
            PotentialName::DoubleWell => PotentialKind::DoubleWell,
            PotentialName::FloryHuggins => PotentialKind::FloryHuggins {
                theta: self.theta,
                theta_c: self.theta_c,
            },
            PotentialName::Zero => PotentialKind::Zero,
        };
        Potential::from_kind(kind)
    }

    /// `n_steps`, or `round(t_end / tau)`.
    pub fn steps(&self) -> usize {
        match (self.n_steps, self.t_end) {
            (Some(n), _) => n,
            (None, Some(t)) => (t / self.tau).round() as usize,
            (None, None) => 0,
        }
    }
}

/// Applies `key=value` overrides to a parsed TOML table, left to right.
///
/// Dotted keys address nested tables (`initial.kind=constant`). Values are
/// parsed as TOML literals and fall back to plain strings.
pub fn apply_overrides(table: &mut toml::Table, overrides: &[(String, String)]) -> Result<()> {
    for (key, raw) in overrides {
        let parts: Vec<&str> = key.split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::Config(format!("malformed override key `{key}`")));
        }
        let value = parse_literal(raw);
        let mut cur = &mut *table;
        for part in &parts[..parts.len() - 1] {
            let entry = cur
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            cur = match entry {
                toml::Value::Table(t) => t,
                _ => return Err(Error::Config(format!("`{part}` in `{key}` is not a table"))),
            };
        }
        cur.insert(parts[parts.len() - 1].to_string(), value);
    }
    Ok(())
}

fn parse_literal(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
scheme = "sesav1"
potential = "double-well"
points = 1
eps = 0.01
kappa = 2
tau = 0.1
n_steps = 1

[initial]
kind = "constant"
value = 0.5
"#;

    #[test]
    fn parses_basic_config() {
        let cfg = RunConfig::from_toml_str(BASIC).unwrap();
        assert_eq!(cfg.scheme, SchemeId::Sesav1);
        assert_eq!(cfg.kappa, KappaSpec::Value(2.0));
        assert_eq!(cfg.initial, InitialSpec::Constant { value: 0.5 });
        assert_eq!(cfg.steps(), 1);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.stride, 1);
    }

    #[test]
    fn symbolic_kappa_resolves_per_potential() {
        let text = BASIC.replace("kappa = 2", "kappa = \"half-lip\"")
            .replace("double-well", "flory-huggins");
        let cfg = RunConfig::from_toml_str(&text).unwrap();
        let model = cfg.model().unwrap();
        assert!((cfg.kappa.resolve(&model) - 0.5 * model.lipschitz()).abs() < 1e-15);
    }

    #[test]
    fn rejects_both_or_neither_duration() {
        let both = BASIC.replace("n_steps = 1", "n_steps = 1\nt_end = 1.0");
        assert!(RunConfig::from_toml_str(&both).is_err());
        let neither = BASIC.replace("n_steps = 1", "");
        assert!(RunConfig::from_toml_str(&neither).is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_schemes() {
        assert!(RunConfig::from_toml_str(&BASIC.replace("eps", "epsilon")).is_err());
        assert!(RunConfig::from_toml_str(&BASIC.replace("sesav1", "ifrk4")).is_err());
    }

    #[test]
    fn t_end_rounds_to_steps() {
        let cfg = RunConfig::from_toml_str(&BASIC.replace("n_steps = 1", "t_end = 0.30000000000000004"))
            .unwrap();
        assert_eq!(cfg.steps(), 3);
    }

    #[test]
    fn overrides_apply_left_to_right() {
        let mut table: toml::Table = BASIC.parse().unwrap();
        let ov = vec![
            ("scheme".to_string(), "sav1".to_string()),
            ("scheme".to_string(), "sesav2".to_string()),
            ("initial.value".to_string(), "0.25".to_string()),
            ("kappa".to_string(), "lip".to_string()),
        ];
        apply_overrides(&mut table, &ov).unwrap();
        let cfg = RunConfig::from_table(table).unwrap();
        assert_eq!(cfg.scheme, SchemeId::Sesav2);
        assert_eq!(cfg.initial, InitialSpec::Constant { value: 0.25 });
        assert_eq!(cfg.kappa, KappaSpec::Named(KappaName::Lipschitz));
    }

    #[test]
    fn malformed_override_key() {
        let mut table: toml::Table = BASIC.parse().unwrap();
        let ov = vec![("initial..value".to_string(), "1".to_string())];
        assert!(apply_overrides(&mut table, &ov).is_err());
        let ov = vec![("eps.x".to_string(), "1".to_string())];
        assert!(apply_overrides(&mut table, &ov).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::from_toml_str(BASIC).unwrap();
        let back = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, back);
    }
}
