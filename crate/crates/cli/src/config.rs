//! Scenario configuration: defaults, then a JSON config file, then flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use momentumlab::convex::Vector;
use momentumlab::sampling::direction_set;
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

/// Either a number of extra probe directions (added to `±e_i`) or an
/// explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Directions {
    Count(usize),
    List(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Directions>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    /// Spin for `su2-spin-j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    /// Largest frequency for `torus-poisson`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Truncation levels for the truncation families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    /// Sampling radii for `fock-rotation-rkhs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Truncation level of the matrix oracle for `fock-rotation-rkhs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    /// Number of random polytopes for `random-polytope-convex`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytopes: Option<usize>,
    /// Number of membership queries for `random-polytope-convex`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queries: Option<usize>,
}

/// Flag values that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub n_samples: Option<usize>,
    pub tolerances: Vec<(String, f64)>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Parses `name=value` with a positive finite value.
pub fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = value.trim().parse().map_err(|_| format!("tolerance {name:?} is not a number"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("tolerance {name:?} must be positive and finite"));
    }
    Ok((name.trim().to_string(), v))
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn named(scenario: &str) -> Self {
        Self { scenario: scenario.to_string(), ..Self::default() }
    }

    pub fn apply(mut self, o: Overrides) -> Self {
        if let Some(s) = o.scenario {
            self.scenario = s;
        }
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.n_samples.is_some() {
            self.n_samples = o.n_samples;
        }
        for (k, v) in o.tolerances {
            self.tolerances.insert(k, v);
        }
        if o.output.is_some() {
            self.output = o.output;
        }
        if o.format.is_some() {
            self.format = o.format;
        }
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn n_samples_or(&self, default: usize) -> Result<usize, CliError> {
        positive("n_samples", self.n_samples.unwrap_or(default))
    }

    /// Probe directions of dimension `d`.
    pub fn directions_or(&self, d: usize, default_extra: usize) -> Result<Vec<Vector>, CliError> {
        match &self.directions {
            None => Ok(direction_set(d, default_extra, self.seed())),
            Some(Directions::Count(k)) => Ok(direction_set(d, *k, self.seed())),
            Some(Directions::List(list)) => {
                if list.is_empty() {
                    return usage("directions list is empty");
                }
                list.iter()
                    .map(|v| {
                        if v.len() != d {
                            return usage(format!("direction {v:?} should have {d} components"));
                        }
                        Vector::try_new(v.clone()).map_err(|e| CliError::Usage(e.to_string()))
                    })
                    .collect()
            }
        }
    }

    /// Rejects parameters that the scenario does not read.
    pub fn only(&self, allowed: &[&str]) -> Result<(), CliError> {
        let present = [
            ("n_samples", self.n_samples.is_some()),
            ("directions", self.directions.is_some()),
            ("j", self.j.is_some()),
            ("n_max", self.n_max.is_some()),
            ("levels", self.levels.is_some()),
            ("radii", self.radii.is_some()),
            ("truncation", self.truncation.is_some()),
            ("polytopes", self.polytopes.is_some()),
            ("queries", self.queries.is_some()),
        ];
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return usage(format!("scenario {} does not take parameter {name:?}", self.scenario));
            }
        }
        Ok(())
    }
}

pub fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return usage(format!("{name} must be positive"));
    }
    Ok(v)
}

/// Tolerances of one scenario: declared names with defaults, overridden by
/// the config.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckTolerances(BTreeMap<String, f64>);

impl CheckTolerances {
    pub fn resolve(defaults: &[(&str, f64)], overrides: &BTreeMap<String, f64>) -> Result<Self, CliError> {
        let mut map: BTreeMap<String, f64> = defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (k, v) in overrides {
            if !map.contains_key(k) {
                let known: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
                return usage(format!("unknown tolerance {k:?}; this scenario knows {}", known.join(", ")));
            }
            if !(*v > 0.0 && v.is_finite()) {
                return usage(format!("tolerance {k:?} must be positive and finite"));
            }
            map.insert(k.clone(), *v);
        }
        Ok(Self(map))
    }

    pub fn get(&self, name: &str) -> f64 {
        *self.0.get(name).unwrap_or_else(|| panic!("tolerance {name} is not declared"))
    }
}
