//! Scenario configuration files (TOML).
//!
//! Top-level keys set defaults; each `[scenario.<id>]` table is one cell:
//!
//! ```toml
//! seed = 7
//! n_obs = 20000
//! n_pairs = 200
//!
//! [scenario.skewn_tight]
//! family = "skewnormal"
//! mean_ratio = 1.01
//! std_ratio = 1.01
//! skew_ratio = 3
//! base_skewness = 0.1
//!
//! [scenario.stable_mid]
//! family = "stable"
//! mean_ratio = { lo = 1.1, hi = 1.3, lo_open = true }
//! std_ratio = { lo = 1.1, hi = 1.3, lo_open = true }
//! skew_ratio = [1.5, 3.0]
//! ```

use std::path::Path;

use toml::{Table, Value};

use super::{default_base, Coupling, Ratio, ScenarioSpec, StableSettings};
use crate::distributions::{Family, MomentTarget};
use crate::error::{Error, Result};
use crate::seed;

/// `(n_obs, n_pairs)` used unless a config says otherwise.
pub const DESK_SCALE: (usize, usize) = (20_000, 200);
/// `(n_obs, n_pairs)` of the published experiment.
pub const PAPER_SCALE: (usize, usize) = (100_000, 1_000);

const DEFAULT_SEED: u64 = 20_240_401;

const TOP_KEYS: &[&str] = &["seed", "n_obs", "n_pairs", "coupling", "scenario"];
const SCENARIO_KEYS: &[&str] = &[
    "family",
    "mean_ratio",
    "std_ratio",
    "skew_ratio",
    "base_mean",
    "base_std",
    "base_skewness",
    "n_obs",
    "n_pairs",
    "seed",
    "coupling",
    "stability",
    "stable_skew_2",
    "stable_skew_1",
    "stable_scale",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub seed: u64,
    pub scenarios: Vec<ScenarioSpec>,
    explicit_seed: Vec<bool>,
}

impl SimulationConfig {
    /// Replaces the master seed; scenarios without their own `seed` key get
    /// re-derived streams.
    pub fn with_seed(mut self, master: u64) -> Self {
        self.seed = master;
        for (spec, &explicit) in self.scenarios.iter_mut().zip(&self.explicit_seed) {
            if !explicit {
                spec.master_seed = scenario_seed(master, &spec.id);
            }
        }
        self
    }

    /// Overrides `n_obs` and `n_pairs` of every scenario.
    pub fn with_scale(mut self, (n_obs, n_pairs): (usize, usize)) -> Self {
        for spec in &mut self.scenarios {
            spec.n_obs = n_obs;
            spec.n_pairs = n_pairs;
        }
        self
    }
}

fn scenario_seed(master: u64, id: &str) -> u64 {
    seed::derive(master, &[seed::label(id)])
}

fn config_error(section: &str, key: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        section: section.to_string(),
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn check_keys(table: &Table, section: &str, allowed: &[&str]) -> Result<()> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(config_error(section, key, "unknown key"));
        }
    }
    Ok(())
}

fn get_f64(table: &Table, section: &str, key: &str) -> Result<Option<f64>> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Float(v)) => Ok(Some(*v)),
        Some(Value::Integer(v)) => Ok(Some(*v as f64)),
        Some(_) => Err(config_error(section, key, "expected a number")),
    }
}

fn get_count(table: &Table, section: &str, key: &str) -> Result<Option<u64>> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
        Some(_) => Err(config_error(section, key, "expected a non-negative integer")),
    }
}

fn get_coupling(table: &Table, section: &str) -> Result<Option<Coupling>> {
    match table.get("coupling") {
        None => Ok(None),
        Some(Value::String(s)) if s == "common" => Ok(Some(Coupling::Common)),
        Some(Value::String(s)) if s == "independent" => Ok(Some(Coupling::Independent)),
        Some(_) => Err(config_error(section, "coupling", "expected \"common\" or \"independent\"")),
    }
}

fn number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn get_ratio(table: &Table, section: &str, key: &str) -> Result<Option<Ratio>> {
    let Some(v) = table.get(key) else {
        return Ok(None);
    };
    let bad = || config_error(section, key, "expected a number, [lo, hi] or { lo, hi, lo_open }");
    let ratio = match v {
        Value::Array(a) if a.len() == 2 => {
            Ratio::band(number(&a[0]).ok_or_else(bad)?, number(&a[1]).ok_or_else(bad)?)
        }
        Value::Table(t) => {
            let lo = t.get("lo").and_then(number).ok_or_else(bad)?;
            let hi = t.get("hi").and_then(number).ok_or_else(bad)?;
            let lo_open = match t.get("lo_open") {
                None => false,
                Some(Value::Boolean(b)) => *b,
                Some(_) => return Err(bad()),
            };
            if t.keys().any(|k| !["lo", "hi", "lo_open"].contains(&k.as_str())) {
                return Err(bad());
            }
            Ratio::Band { lo, hi, lo_open }
        }
        other => Ratio::Point(number(other).ok_or_else(bad)?),
    };
    ratio
        .validate(key)
        .map_err(|e| config_error(section, key, e.to_string()))?;
    Ok(Some(ratio))
}

struct Defaults {
    seed: u64,
    n_obs: usize,
    n_pairs: usize,
    coupling: Coupling,
}

fn parse_scenario(id: &str, table: &Table, defaults: &Defaults) -> Result<(ScenarioSpec, bool)> {
    let section = format!("scenario.{id}");
    let s = section.as_str();
    check_keys(table, s, SCENARIO_KEYS)?;

    let family: Family = match table.get("family") {
        Some(Value::String(name)) => name
            .parse()
            .map_err(|e: Error| config_error(s, "family", e.to_string()))?,
        Some(_) => return Err(config_error(s, "family", "expected a string")),
        None => return Err(config_error(s, "family", "missing")),
    };
    let mean_ratio = get_ratio(table, s, "mean_ratio")?.ok_or_else(|| config_error(s, "mean_ratio", "missing"))?;
    let std_ratio = get_ratio(table, s, "std_ratio")?.ok_or_else(|| config_error(s, "std_ratio", "missing"))?;
    let skew_ratio = get_ratio(table, s, "skew_ratio")?;

    let defaults_base = default_base(family);
    let base = MomentTarget {
        mean: get_f64(table, s, "base_mean")?.unwrap_or(defaults_base.mean),
        std: get_f64(table, s, "base_std")?.unwrap_or(defaults_base.std),
        skewness: get_f64(table, s, "base_skewness")?.or(defaults_base.skewness),
    };
    base.validate()
        .map_err(|e| config_error(s, "base_mean/base_std/base_skewness", e.to_string()))?;

    let mut stable = StableSettings::default();
    if let Some(v) = get_f64(table, s, "stability")? {
        stable.stability = v;
    }
    if let Some(v) = get_f64(table, s, "stable_skew_2")? {
        stable.skew_2 = v;
    }
    if let Some(v) = table.get("stable_scale") {
        let bad = || config_error(s, "stable_scale", "expected a number or [lo, hi]");
        stable.scale = match v {
            Value::Array(a) if a.len() == 2 => (number(&a[0]).ok_or_else(bad)?, number(&a[1]).ok_or_else(bad)?),
            other => {
                let x = number(other).ok_or_else(bad)?;
                (x, x)
            }
        };
    }
    if let Some(v) = table.get("stable_skew_1") {
        let bad = || config_error(s, "stable_skew_1", "expected [lo, hi]");
        match v {
            Value::Array(a) if a.len() == 2 => {
                stable.skew_1 = (number(&a[0]).ok_or_else(bad)?, number(&a[1]).ok_or_else(bad)?);
            }
            _ => return Err(bad()),
        }
    }

    let explicit_seed = get_count(table, s, "seed")?;
    let spec = ScenarioSpec {
        id: id.to_string(),
        family,
        mean_ratio,
        std_ratio,
        skew_ratio,
        base,
        n_obs: get_count(table, s, "n_obs")?.map_or(defaults.n_obs, |v| v as usize),
        n_pairs: get_count(table, s, "n_pairs")?.map_or(defaults.n_pairs, |v| v as usize),
        master_seed: explicit_seed.unwrap_or_else(|| scenario_seed(defaults.seed, id)),
        coupling: get_coupling(table, s)?.unwrap_or(defaults.coupling),
        stable,
    };
    spec.validate().map_err(|e| config_error(s, "*", e.to_string()))?;
    Ok((spec, explicit_seed.is_some()))
}

/// Parses a configuration document.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| config_error("<document>", "-", e.to_string()))?;
    check_keys(&root, "<top>", TOP_KEYS)?;
    let defaults = Defaults {
        seed: get_count(&root, "<top>", "seed")?.unwrap_or(DEFAULT_SEED),
        n_obs: get_count(&root, "<top>", "n_obs")?.map_or(DESK_SCALE.0, |v| v as usize),
        n_pairs: get_count(&root, "<top>", "n_pairs")?.map_or(DESK_SCALE.1, |v| v as usize),
        coupling: get_coupling(&root, "<top>")?.unwrap_or_default(),
    };
    let scenarios = match root.get("scenario") {
        None => return Err(Error::Usage("configuration defines no scenarios".into())),
        Some(Value::Table(t)) => t,
        Some(_) => return Err(config_error("scenario", "-", "expected [scenario.<id>] tables")),
    };
    if scenarios.is_empty() {
        return Err(Error::Usage("configuration defines no scenarios".into()));
    }
    let mut out = SimulationConfig {
        seed: defaults.seed,
        scenarios: Vec::with_capacity(scenarios.len()),
        explicit_seed: Vec::with_capacity(scenarios.len()),
    };
    for (id, value) in scenarios {
        let Value::Table(table) = value else {
            return Err(config_error(&format!("scenario.{id}"), "-", "expected a table"));
        };
        let (spec, explicit) = parse_scenario(id, table, &defaults)?;
        out.scenarios.push(spec);
        out.explicit_seed.push(explicit);
    }
    Ok(out)
}

pub fn read_config(path: impl AsRef<Path>) -> Result<SimulationConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"
seed = 9

[scenario.b_normal]
family = "normal"
mean_ratio = 1.05
std_ratio = 1.05

[scenario.a_stable]
family = "stable"
mean_ratio = { lo = 1.1, hi = 1.3, lo_open = true }
std_ratio = [1.1, 1.3]
skew_ratio = [1.5, 3]
n_pairs = 3
seed = 11
"#;

    #[test]
    fn parses_in_file_order() {
        let cfg = parse_config(DOC).unwrap();
        assert_eq!(cfg.scenarios.len(), 2);
        assert_eq!(cfg.scenarios[0].id, "b_normal");
        assert_eq!(cfg.scenarios[0].n_obs, DESK_SCALE.0);
        assert_eq!(cfg.scenarios[1].mean_ratio, Ratio::open_band(1.1, 1.3));
        assert_eq!(cfg.scenarios[1].n_pairs, 3);
        assert_eq!(cfg.scenarios[1].master_seed, 11);
    }

    #[test]
    fn seed_override_keeps_explicit_seeds() {
        let cfg = parse_config(DOC).unwrap();
        let before = cfg.scenarios[0].master_seed;
        let cfg = cfg.with_seed(10);
        assert_ne!(cfg.scenarios[0].master_seed, before);
        assert_eq!(cfg.scenarios[1].master_seed, 11);
    }

    #[test]
    fn errors_name_section_and_key() {
        let doc = "[scenario.x]\nfamily = \"normal\"\nmean_ratio = \"big\"\nstd_ratio = 1.0\n";
        match parse_config(doc) {
            Err(Error::Config { section, key, .. }) => {
                assert_eq!(section, "scenario.x");
                assert_eq!(key, "mean_ratio");
            }
            other => panic!("{other:?}"),
        }
        let doc = "[scenario.x]\nfamily = \"normal\"\nmean_ratio = 1\nstd_ratio = 1\ncolour = 1\n";
        assert!(matches!(parse_config(doc), Err(Error::Config { key, .. }) if key == "colour"));
    }

    #[test]
    fn empty_scenario_list_is_usage_error() {
        assert!(matches!(parse_config("seed = 1\n"), Err(Error::Usage(_))));
        assert!(matches!(parse_config("[scenario]\n"), Err(Error::Usage(_))));
    }
}
