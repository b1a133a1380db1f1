//! Run configuration: defaults, a sectioned key/value manifest file, and
//! command-line overrides. Flags win over the file, the file over defaults.

use epqn_core::error::{Error, Result};
use epqn_core::poisson::PhiBc;
use epqn_core::scenarios::Scenario;
use epqn_core::tableaux::DoubleButcherTableau;
use epqn_core::{Scenario64, Tableau64};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Settings shared by every subcommand; unset options fall back to the
/// scenario defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub scenario: String,
    pub scheme: String,
    pub tableau: String,
    pub n: Option<Vec<usize>>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub cfl: Option<f64>,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub dt_max: Option<f64>,
    pub bc_phi: Option<String>,
    pub out: PathBuf,
    pub record_every: usize,
    // sweep settings
    pub n_list: Option<Vec<usize>>,
    pub lambda_list: Option<Vec<f64>>,
    pub tableau_list: Option<Vec<String>>,
    pub well_prepared: bool,
    pub steps: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            scenario: "case1".into(),
            scheme: "penalized".into(),
            tableau: "DP2A242".into(),
            n: None,
            lambda: None,
            gamma: None,
            cfl: None,
            t_final: None,
            dt: None,
            dt_max: None,
            bc_phi: None,
            out: PathBuf::from("out"),
            record_every: 1,
            n_list: None,
            lambda_list: None,
            tableau_list: None,
            well_prepared: false,
            steps: 2,
        }
    }
}

impl Settings {
    /// Apply one `key = value` pair (manifest line or flag equivalent).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::config(format!("bad value '{value}' for key '{what}'"));
        match key {
            "scenario" => self.scenario = value.to_string(),
            "scheme" => self.scheme = value.to_string(),
            "tableau" => self.tableau = value.to_string(),
            "n" => self.n = Some(parse_usize_list(value).ok_or_else(|| bad("n"))?),
            "lambda" => self.lambda = Some(value.parse().map_err(|_| bad("lambda"))?),
            "gamma" => self.gamma = Some(value.parse().map_err(|_| bad("gamma"))?),
            "cfl" => self.cfl = Some(value.parse().map_err(|_| bad("cfl"))?),
            "t_final" => self.t_final = Some(value.parse().map_err(|_| bad("t_final"))?),
            "dt" => self.dt = Some(value.parse().map_err(|_| bad("dt"))?),
            "dt_max" => self.dt_max = Some(value.parse().map_err(|_| bad("dt_max"))?),
            "bc_phi" => self.bc_phi = Some(value.to_string()),
            "out" => self.out = PathBuf::from(value),
            "record_every" => self.record_every = value.parse().map_err(|_| bad("record_every"))?,
            "n_list" => self.n_list = Some(parse_usize_list(value).ok_or_else(|| bad("n_list"))?),
            "lambda_list" => {
                self.lambda_list = Some(parse_f64_list(value).ok_or_else(|| bad("lambda_list"))?)
            }
            "tableau_list" => {
                self.tableau_list = Some(value.split(',').map(|s| s.trim().to_string()).collect())
            }
            "well_prepared" => {
                self.well_prepared = value.parse().map_err(|_| bad("well_prepared"))?
            }
            "steps" => self.steps = value.parse().map_err(|_| bad("steps"))?,
            other => return Err(Error::config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Load a manifest file: `key = value` lines, `#` comments, optional
    /// `[section]` headers. Top-level keys and the section named for the
    /// subcommand apply; other sections are ignored.
    pub fn apply_file(&mut self, path: &Path, section: &str) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config '{}': {e}", path.display())))?;
        for (sect, key, value) in parse_manifest(&text)? {
            if sect.is_empty() || sect == section {
                self.set(&key, &value)?;
            }
        }
        Ok(())
    }

    /// Materialize the scenario with all overrides applied.
    pub fn scenario(&self) -> Result<Scenario64> {
        let lambda = self.lambda.unwrap_or(1e-4);
        let mut sc = Scenario::by_name(&self.scenario, lambda)?;
        if let Some(g) = self.gamma {
            sc.gamma = g;
        }
        if let Some(c) = self.cfl {
            sc.cfl = c;
        }
        if let Some(t) = self.t_final {
            sc.t_final = t;
        }
        if self.dt.is_some() {
            sc.fixed_dt = self.dt;
        }
        if let Some(bc) = &self.bc_phi {
            sc.bc_phi = match bc.as_str() {
                "periodic" => PhiBc::Periodic,
                "dirichlet0" => PhiBc::DirichletZero,
                other => {
                    return Err(Error::config(format!(
                        "bc_phi must be 'periodic' or 'dirichlet0', got '{other}'"
                    )))
                }
            };
        }
        Ok(sc)
    }

    /// Resolve the tableau: a builtin name, or a path to a tableau file.
    pub fn tableau(&self) -> Result<Tableau64> {
        load_tableau(&self.tableau)
    }
}

pub fn load_tableau(name_or_path: &str) -> Result<Tableau64> {
    if let Ok(t) = DoubleButcherTableau::builtin(name_or_path) {
        return Ok(t);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read tableau '{name_or_path}': {e}")))?;
        return DoubleButcherTableau::from_text(&text);
    }
    Err(Error::UnknownTableau(name_or_path.to_string()))
}

fn parse_usize_list(s: &str) -> Option<Vec<usize>> {
    let v: Option<Vec<usize>> = s.split([',', 'x']).map(|w| w.trim().parse().ok()).collect();
    v.filter(|v| !v.is_empty())
}

fn parse_f64_list(s: &str) -> Option<Vec<f64>> {
    let v: Option<Vec<f64>> = s.split(',').map(|w| w.trim().parse().ok()).collect();
    v.filter(|v| !v.is_empty())
}

/// Parse the manifest into `(section, key, value)` triples, in order.
fn parse_manifest(text: &str) -> Result<Vec<(String, String, String)>> {
    let mut out = Vec::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(format!(
                "config line {} is not 'key = value': '{raw}'",
                lineno + 1
            )));
        };
        out.push((
            section.clone(),
            key.trim().to_string(),
            value.trim().to_string(),
        ));
    }
    Ok(out)
}

/// Flat `key=value` map of the resolved configuration, recorded as a comment
/// line in every CSV so that outputs are self-describing.
pub fn describe(settings: &Settings, scenario: &Scenario64, n: &[usize]) -> String {
    let mut kv = BTreeMap::new();
    kv.insert("scenario", scenario.name.clone());
    kv.insert("scheme", settings.scheme.clone());
    kv.insert("tableau", settings.tableau.clone());
    kv.insert(
        "n",
        n.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join("x"),
    );
    kv.insert("lambda", format!("{:e}", scenario.lambda));
    kv.insert("gamma", format!("{:e}", scenario.gamma));
    kv.insert("cfl", format!("{:e}", scenario.cfl));
    kv.insert("t_final", format!("{:e}", scenario.t_final));
    kv.insert(
        "dt",
        scenario
            .fixed_dt
            .map(|d| format!("{d:e}"))
            .unwrap_or_else(|| "cfl".into()),
    );
    kv.insert(
        "bc_phi",
        match scenario.bc_phi {
            PhiBc::Periodic => "periodic".into(),
            PhiBc::DirichletZero => "dirichlet0".into(),
        },
    );
    kv.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}
