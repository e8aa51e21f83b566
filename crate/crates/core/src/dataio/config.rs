//! Run configuration: flat `key = value` files, overridden by CLI flags.

use std::path::{Path, PathBuf};

use super::{io_err, DataError};
use crate::propagation::RangePolicy;
use crate::reassign::CoverageBasis;
use crate::regulatory::{Method, Preset, RegulatoryParams};

pub const DEFAULT_RESOLUTION_DEG: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    /// Overrides the preset's method when set.
    pub method: Option<Method>,
    pub params: RegulatoryParams,
    pub resolution_deg: f64,
    pub zones: Option<PathBuf>,
    pub towers: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub basis: CoverageBasis,
    pub min_separation: u8,
    pub seed: u64,
    pub count: usize,
    /// Parameters set explicitly, kept so a later preset change does not
    /// clobber them.
    overrides: Vec<(String, String)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: Preset::Pollution15,
            method: None,
            params: Preset::Pollution15.params(),
            resolution_deg: DEFAULT_RESOLUTION_DEG,
            zones: None,
            towers: None,
            out_dir: PathBuf::from("out"),
            basis: CoverageBasis::Fcc,
            min_separation: 2,
            seed: 254,
            count: 254,
            overrides: Vec::new(),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, DataError> {
    value
        .parse()
        .map_err(|_| DataError::Config(format!("bad value '{value}' for '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, DataError> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(DataError::Config(format!(
            "bad boolean '{value}' for '{key}'"
        ))),
    }
}

impl RunConfig {
    pub fn method(&self) -> Method {
        self.method.unwrap_or_else(|| self.preset.method())
    }

    /// Applies one setting. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), DataError> {
        let (key, value) = (key.trim(), value.trim());
        match key {
            "preset" => {
                self.preset = value.parse()?;
                self.params = self.preset.params();
                let replay = std::mem::take(&mut self.overrides);
                for (k, v) in &replay {
                    self.set(k, v)?;
                }
            }
            "method" => self.method = Some(value.parse()?),
            "resolution" | "resolution_deg" => self.resolution_deg = parse(key, value)?,
            "zones" => self.zones = Some(PathBuf::from(value)),
            "towers" => self.towers = Some(PathBuf::from(value)),
            "out" | "out_dir" => self.out_dir = PathBuf::from(value),
            "basis" => self.basis = value.parse()?,
            "min_separation" => self.min_separation = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "count" => self.count = parse(key, value)?,
            "extrapolate" => {
                self.params.range_policy = if parse_bool(key, value)? {
                    RangePolicy::Extrapolate
                } else {
                    RangePolicy::Strict
                };
                self.remember(key, value);
            }
            "include_adjacent" => {
                self.params.include_adjacent = parse_bool(key, value)?;
                self.remember(key, value);
            }
            _ => {
                let p = &mut self.params;
                let slot = match key {
                    "gamma_co_db" => &mut p.gamma_co_db,
                    "gamma_adj_db" => &mut p.gamma_adj_db,
                    "psi_db" => &mut p.psi_db,
                    "psi_adj_extra_db" => &mut p.psi_adj_extra_db,
                    "delta_db" => &mut p.delta_db,
                    "secondary_power_dbm" => &mut p.secondary_power_dbm,
                    "secondary_haat_m" => &mut p.secondary_haat_m,
                    "grade_b_dbu" => &mut p.grade_b_dbu,
                    "noise_dbm" => &mut p.noise_dbm,
                    "rx_height_m" => &mut p.rx_height_m,
                    _ => return Err(DataError::Config(format!("unknown key '{key}'"))),
                };
                *slot = parse(key, value)?;
                self.remember(key, value);
            }
        }
        Ok(())
    }

    fn remember(&mut self, key: &str, value: &str) {
        self.overrides.retain(|(k, _)| k != key);
        self.overrides.push((key.to_string(), value.to_string()));
    }

    /// Applies every `key = value` line of `text`; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), DataError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                DataError::Config(format!("line {}: expected key = value", i + 1))
            })?;
            self.set(k, v)
                .map_err(|e| DataError::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        self.params.validate()?;
        if !(self.resolution_deg > 0.0 && self.resolution_deg <= 1.0) {
            return Err(DataError::Config(format!(
                "resolution {} outside (0, 1]",
                self.resolution_deg
            )));
        }
        if self.min_separation == 0 {
            return Err(DataError::Config("min_separation must be >= 1".into()));
        }
        Ok(())
    }

    /// One-line provenance string embedded in every output table.
    pub fn provenance(&self) -> String {
        format!(
            "preset={} method={} resolution={:.4} include_adjacent={} extrapolate={}",
            self.preset,
            self.method(),
            self.resolution_deg,
            self.params.include_adjacent,
            self.params.range_policy == RangePolicy::Extrapolate
        )
    }
}
