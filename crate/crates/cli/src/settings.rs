//! Merging of the key = value config file with command-line flags, and
//! translation into an experiment spec.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use inexact_krylov::harness::{ExperimentSpec, MethodId, ProblemSource, TableFormat};
use inexact_krylov::oracle::OracleKind;
use inexact_krylov::solvers::Mode;
use inexact_krylov::{Error, Result};

pub const KEYS: [&str; 13] = [
    "problem",
    "eps",
    "method",
    "mode",
    "oracle",
    "reorth",
    "delay",
    "kmax",
    "seed",
    "perturb-estimates",
    "out",
    "format",
    "audit",
];

/// Raw values per key. `problem` may hold several entries; every other key
/// keeps its last assignment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings(BTreeMap<String, Vec<String>>);

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_file_str(text: &str) -> Result<Self> {
        let mut s = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = k.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("line {}: unknown key '{}'", i + 1, k.trim())));
            }
            s.push(&key, v.trim().to_string());
        }
        Ok(s)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse_file_str(&text)
    }

    pub fn push(&mut self, key: &str, value: String) {
        let slot = self.0.entry(key.to_string()).or_default();
        if key != "problem" {
            slot.clear();
        }
        slot.push(value);
    }

    /// Values of `other` replace those of `self` key by key.
    pub fn overridden_by(mut self, other: Settings) -> Self {
        for (k, v) in other.0 {
            self.0.insert(k, v);
        }
        self
    }

    fn last(&self, key: &str) -> Option<&str> {
        self.0.get(key).and_then(|v| v.last()).map(String::as_str)
    }

    fn all(&self, key: &str) -> &[String] {
        self.0.get(key).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// What to run and where to write it.
#[derive(Clone, Debug)]
pub struct Plan {
    pub spec: ExperimentSpec,
    pub format: TableFormat,
    pub out: Option<PathBuf>,
    pub audit: bool,
}

fn list<T>(raw: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).ok_or_else(|| Error::Config(format!("invalid {what} '{s}'"))))
        .collect()
}

fn flag(raw: Option<&str>, key: &str) -> Result<Option<bool>> {
    raw.map(|v| match v.to_ascii_lowercase().as_str() {
        "" | "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("invalid {key} '{v}' (expected true or false)"))),
    })
    .transpose()
}

fn single<T: std::str::FromStr>(raw: Option<&str>, key: &str) -> Result<Option<T>> {
    raw.map(|v| v.trim().parse().map_err(|_| Error::Config(format!("invalid {key} '{v}'")))).transpose()
}

impl Plan {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let problems = s.all("problem").iter().map(|p| p.parse()).collect::<Result<Vec<ProblemSource>>>()?;
        if problems.is_empty() {
            return Err(Error::Config("no --problem given".into()));
        }
        let eps_list = match s.last("eps") {
            Some(raw) => list(raw, "eps", |e| e.parse().ok())?,
            None => vec![1e-3],
        };
        let mut spec = ExperimentSpec::new(problems, eps_list);

        if let Some(raw) = s.last("method") {
            spec.methods = if raw.trim().eq_ignore_ascii_case("all") {
                MethodId::ALL.to_vec()
            } else {
                list(raw, "method", |m| m.parse().ok())?
            };
        }
        if flag(s.last("reorth"), "reorth")? == Some(true) {
            spec.methods = spec.methods.iter().map(|m| m.with_reorth()).collect();
        }
        if let Some(raw) = s.last("mode") {
            spec.mode = match raw.trim().to_ascii_lowercase().as_str() {
                "theoretical" => Mode::Theoretical,
                "practical" => Mode::Practical,
                _ => return Err(Error::Config(format!("invalid mode '{raw}' (theoretical or practical)"))),
            };
        }
        if let Some(raw) = s.last("oracle") {
            spec.oracle = match raw.trim().to_ascii_lowercase().as_str() {
                "continuous" => OracleKind::Continuous,
                "multiprecision" | "multi-precision" => OracleKind::MultiPrecision,
                _ => {
                    return Err(Error::Config(format!(
                        "invalid oracle '{raw}' (continuous or multiprecision)"
                    )))
                }
            };
        }
        if let Some(d) = single(s.last("delay"), "delay")? {
            spec.delay = d;
        }
        spec.k_max_user = single(s.last("kmax"), "kmax")?;
        if let Some(raw) = s.last("seed") {
            spec.seeds = list(raw, "seed", |v| v.parse().ok())?;
        }
        if let Some(p) = flag(s.last("perturb-estimates"), "perturb-estimates")? {
            spec.perturb_estimates = p;
        }
        spec.validate()?;

        Ok(Self {
            spec,
            format: s.last("format").unwrap_or("csv").parse()?,
            out: s.last("out").map(PathBuf::from),
            audit: flag(s.last("audit"), "audit")?.unwrap_or(false),
        })
    }
}
