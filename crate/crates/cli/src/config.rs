//! Run configuration: line-oriented `key = value` files, overridden by flags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use scurve_core::family::Family;
use scurve_core::potential::ContourClass;
use scurve_core::quaddiff::{TraceOptions, TrajectoryKind};
use scurve_core::quintic::Branch;
use serde::Serialize;
use thiserror::Error;

/// Environment variable naming a config file used when `--config` is absent.
pub const CONFIG_ENV: &str = "SCURVE_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}:{line}: expected `key = value`, got {text:?}")]
    Syntax { origin: String, line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("config key {key}: cannot parse {value:?}: {reason}")]
    Value { key: String, value: String, reason: String },
    #[error("config key {key} must be positive, got {value}")]
    NotPositive { key: String, value: f64 },
    #[error("no output format selected")]
    NoFormats,
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        })
    }
}

/// Keys accepted in files and via `--set`, with their defaults.
const DEFAULTS: &[(&str, &str)] = &[
    ("angle", "0"),
    ("capture_tol", "1e-5"),
    ("class", "3,1"),
    ("criteria", "1,2,3,4,5,6,7,8,9,10"),
    ("digits", "auto"),
    ("drift_tol", "1e-7"),
    ("emit", "json,csv,svg"),
    ("family", "cubic"),
    ("K", "0"),
    ("kind", "horizontal"),
    ("max_n", "24"),
    ("n", "16"),
    ("out", "scurve-out"),
    ("phase_tie_tol", "1e-9"),
    ("seed", "0"),
    ("sweep_points", "50"),
    ("zero", "1"),
];

/// Verbatim config file, echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSource {
    pub path: String,
    pub text: String,
}

/// Settings as `key -> value` strings, layered defaults < file < flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
    source: Option<ConfigSource>,
}

impl Settings {
    pub fn defaults() -> Self {
        Self {
            values: DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            source: None,
        }
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    origin: origin.to_string(),
                    line: i + 1,
                    text: raw.to_string(),
                });
            };
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text, &path.display().to_string())?;
        self.source = Some(ConfigSource {
            path: path.display().to_string(),
            text,
        });
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !DEFAULTS.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).expect("every key has a default")
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        let v = self.get(key);
        v.parse().map_err(|e: T::Err| ConfigError::Value {
            key: key.to_string(),
            value: v.to_string(),
            reason: e.to_string(),
        })
    }

    fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.parse(key)?;
        if !(v > 0.0) {
            return Err(ConfigError::NotPositive { key: key.to_string(), value: v });
        }
        Ok(v)
    }

    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let formats: BTreeSet<Format> = self
            .get("emit")
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.parse().map_err(|reason| ConfigError::Value {
                    key: "emit".into(),
                    value: s.to_string(),
                    reason,
                })
            })
            .collect::<Result<_, _>>()?;
        if formats.is_empty() {
            return Err(ConfigError::NoFormats);
        }
        let digits = match self.get("digits") {
            "auto" => None,
            _ => Some(self.parse::<u32>("digits")?),
        };
        let criteria = self
            .get("criteria")
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim().parse::<u8>().map_err(|e| ConfigError::Value {
                    key: "criteria".into(),
                    value: s.to_string(),
                    reason: e.to_string(),
                })
            })
            .collect::<Result<BTreeSet<u8>, _>>()?;
        let kind = match self.get("kind") {
            "horizontal" => TrajectoryKind::Horizontal,
            "vertical" => TrajectoryKind::Vertical,
            other => {
                return Err(ConfigError::Value {
                    key: "kind".into(),
                    value: other.into(),
                    reason: "expected horizontal or vertical".into(),
                })
            }
        };
        Ok(RunConfig {
            family: self.family()?,
            digits,
            n: self.parse("n")?,
            max_n: self.parse("max_n")?,
            tolerances: Tolerances {
                drift: self.positive("drift_tol")?,
                capture: self.positive("capture_tol")?,
                phase_tie: self.positive("phase_tie_tol")?,
            },
            out: PathBuf::from(self.get("out")),
            formats,
            seed: self.parse("seed")?,
            sweep_points: self.parse("sweep_points")?,
            criteria,
            zero: self.parse("zero")?,
            angle: self.parse("angle")?,
            kind,
            echo: ConfigEcho {
                source: self.source.clone(),
                resolved: self.values.iter().map(|(k, v)| format!("{k}={v}")).collect(),
            },
        })
    }

    fn family(&self) -> Result<Family, ConfigError> {
        match self.get("family") {
            "cubic" => Ok(Family::Cubic { k: self.parse("K")? }),
            "quintic" => Ok(Family::Quintic(parse_class(self.get("class"))?)),
            other => Err(ConfigError::Value {
                key: "family".into(),
                value: other.into(),
                reason: "expected cubic or quintic".into(),
            }),
        }
    }
}

/// `"3,1"` or `"4,5"`.
pub fn parse_class(s: &str) -> Result<Branch, ConfigError> {
    let err = |reason: String| ConfigError::Value {
        key: "class".into(),
        value: s.into(),
        reason,
    };
    let (a, b) = s.split_once(',').ok_or_else(|| err("expected j,k".into()))?;
    let from = a.trim().parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?;
    let to = b.trim().parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?;
    Branch::from_class(ContourClass::new(from, to)).map_err(|e| err(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Level-set drift allowed on traced trajectories, per `1 + arclength`.
    pub drift: f64,
    /// Capture radius factor around zeros of `Q`.
    pub capture: f64,
    /// Half-width in `K` of the critical band.
    pub phase_tie: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub source: Option<ConfigSource>,
    /// Every setting after layering, as `key=value`, sorted by key.
    pub resolved: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: Family,
    /// `None`: `max(50, 6n)` per degree (60 for the acceptance suite).
    pub digits: Option<u32>,
    pub n: usize,
    pub max_n: usize,
    pub tolerances: Tolerances,
    pub out: PathBuf,
    pub formats: BTreeSet<Format>,
    pub seed: u64,
    pub sweep_points: usize,
    pub criteria: BTreeSet<u8>,
    pub zero: usize,
    pub angle: usize,
    pub kind: TrajectoryKind,
    pub echo: ConfigEcho,
}

impl RunConfig {
    pub fn trace_options(&self) -> TraceOptions {
        TraceOptions {
            capture_factor: self.tolerances.capture,
            drift_tol: self.tolerances.drift,
            ..TraceOptions::default()
        }
    }

    pub fn emits(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let c = Settings::defaults().resolve().unwrap();
        assert_eq!(c.family, Family::Cubic { k: 0.0 });
        assert_eq!(c.formats.len(), 3);
        assert_eq!(c.tolerances.drift, 1e-7);
        assert_eq!(c.criteria.len(), 10);
        assert!(c.digits.is_none());
    }

    #[test]
    fn later_layers_win() {
        let mut s = Settings::defaults();
        s.apply_text("# comment\nfamily = quintic\nclass=4,5\n\ndrift_tol = 1e-9 # trailing\n", "test")
            .unwrap();
        s.set("drift_tol", "1e-15").unwrap();
        let c = s.resolve().unwrap();
        assert_eq!(c.family, Family::Quintic(Branch::Second));
        assert_eq!(c.tolerances.drift, 1e-15);
    }

    #[test]
    fn bad_input_is_reported() {
        let mut s = Settings::defaults();
        assert!(matches!(s.apply_text("no equals sign", "t"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(s.set("colour", "red"), Err(ConfigError::UnknownKey(_))));
        s.set("drift_tol", "-1").unwrap();
        assert!(matches!(s.resolve(), Err(ConfigError::NotPositive { .. })));
        let mut s = Settings::defaults();
        s.set("emit", "").unwrap();
        assert!(matches!(s.resolve(), Err(ConfigError::NoFormats)));
        assert!(parse_class("2,1").is_err());
    }
}
