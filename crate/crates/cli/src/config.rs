//! Run configuration: a TOML document with `--set key=value` overrides.

use std::path::{Path, PathBuf};

use carleman_core::{CostModel, GridConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub n_x: usize,
    pub n_t: usize,
    pub alpha: usize,
    pub dt: f64,
    pub nu: f64,
    pub l_x: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n_x: 4,
            n_t: 4,
            alpha: 2,
            dt: 0.25,
            nu: 1.0,
            l_x: 2.0 * std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub sigma: f64,
    pub mu: f64,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            sigma: 0.5,
            mu: std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqlsSection {
    pub layers: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_iter: usize,
    pub fd_step: f64,
}

impl Default for VqlsSection {
    fn default() -> Self {
        Self {
            layers: 3,
            seed: carleman_core::vqls::DEFAULT_SEED,
            tolerance: 1e-3,
            max_iter: 2000,
            fd_step: 1e-4,
        }
    }
}

/// Pass thresholds used by `compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSection {
    pub fidelity_min: f64,
    pub step_error_max: f64,
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            fidelity_min: 0.99,
            step_error_max: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub initial: InitialSection,
    pub vqls: VqlsSection,
    pub compare: CompareSection,
    /// Gate-cost constants used by `resources`.
    pub cost: CostModel,
    pub output: OutputSection,
}

const SECTIONS: [&str; 6] = ["grid", "initial", "vqls", "compare", "cost", "output"];

impl RunConfig {
    /// Reads `path` (or the built-in defaults), applies overrides and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                toml::from_str::<toml::Table>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::try_from(RunConfig::default()).expect("defaults serialize"),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        pow2("grid.n_x", g.n_x, 4)?;
        pow2("grid.n_t", g.n_t, 2)?;
        pow2("grid.alpha", g.alpha, 1)?;
        self.grid_config()?;
        if !(self.initial.sigma.is_finite() && self.initial.sigma != 0.0) {
            return Err(CliError::Config(format!(
                "initial.sigma = {} must be finite and nonzero",
                self.initial.sigma
            )));
        }
        if self.vqls.layers == 0 || self.vqls.max_iter == 0 {
            return Err(CliError::Config("vqls.layers and vqls.max_iter must be at least 1".into()));
        }
        if !(self.vqls.tolerance > 0.0 && self.vqls.fd_step > 0.0) {
            return Err(CliError::Config("vqls.tolerance and vqls.fd_step must be positive".into()));
        }
        Ok(())
    }

    pub fn grid_config(&self) -> Result<GridConfig, CliError> {
        let g = &self.grid;
        GridConfig::new(g.n_x, g.n_t, g.alpha, g.dt, g.nu, g.l_x).map_err(|e| CliError::Config(e.to_string()))
    }
}

fn pow2(name: &str, v: usize, min: usize) -> Result<(), CliError> {
    if v >= min && v.is_power_of_two() {
        return Ok(());
    }
    let below = if v > 1 { 1usize << (usize::BITS - 1 - v.leading_zeros()) } else { 0 };
    let above = v.max(1).next_power_of_two();
    let mut options: Vec<usize> = [below, above].into_iter().filter(|o| *o >= min && *o != v).collect();
    if options.is_empty() {
        options.push(min);
    }
    options.dedup();
    let hint = options.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(" or ");
    Err(CliError::Config(format!(
        "{name} = {v} must be a power of two and at least {min}; try {hint}"
    )))
}

/// Applies `key=value`; `key` is `section.field` or a bare field name that
/// exists in exactly one section.
fn apply_override(table: &mut toml::Table, text: &str) -> Result<(), CliError> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{text}` is not of the form key=value")))?;
    let key = key.trim();
    let value = parse_value(raw.trim());
    let (section, field) = match key.split_once('.') {
        Some((s, f)) => (s.to_string(), f.to_string()),
        None => {
            let defaults = toml::Table::try_from(RunConfig::default()).expect("defaults serialize");
            let owners: Vec<&str> = SECTIONS
                .iter()
                .copied()
                .filter(|s| defaults.get(*s).and_then(|t| t.get(key)).is_some())
                .collect();
            match owners.as_slice() {
                [one] => (one.to_string(), key.to_string()),
                [] => return Err(CliError::Config(format!("unknown configuration key `{key}`"))),
                _ => {
                    return Err(CliError::Config(format!(
                        "key `{key}` is ambiguous; use one of {}",
                        owners.iter().map(|s| format!("{s}.{key}")).collect::<Vec<_>>().join(", ")
                    )))
                }
            }
        }
    };
    if !SECTIONS.contains(&section.as_str()) {
        return Err(CliError::Config(format!("unknown configuration section `{section}`")));
    }
    let entry = table
        .entry(section.clone())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry {
        toml::Value::Table(t) => {
            t.insert(field, value);
            Ok(())
        }
        _ => Err(CliError::Config(format!("`{section}` is not a table"))),
    }
}

/// TOML scalar if it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
