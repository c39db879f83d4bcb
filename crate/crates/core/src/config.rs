//! `key=value` configuration files with dotted section prefixes.
//!
//! Blank lines and lines starting with `#` are ignored. Every key must be
//! consumed by some reader; [`KeyValues::finish`] names the first leftover.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::burgers::SweepOptions;
use crate::error::{BpError, Result};
use crate::grid::Grid;
use crate::preset::Preset;
use crate::solver::{SolveConfig, SourceIntegrator, Splitting};

#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
    used: std::collections::BTreeSet<String>,
}

fn config_err(key: &str, msg: impl Into<String>) -> BpError {
    BpError::Config {
        key: key.to_string(),
        msg: msg.into(),
    }
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_err(line, format!("line {} is not key=value", i + 1)));
            };
            let key = key.trim();
            let valid = !key.is_empty()
                && key.split('.').all(|part| {
                    !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                });
            if !valid {
                return Err(config_err(key, format!("malformed key on line {}", i + 1)));
            }
            if kv.entries.contains_key(key) {
                return Err(config_err(key, format!("duplicate key on line {}", i + 1)));
            }
            kv.entries.insert(key.to_string(), (i + 1, value.trim().to_string()));
        }
        Ok(kv)
    }

    /// All entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, (_, v))| (k.as_str(), v.as_str()))
    }

    pub fn raw(&mut self, key: &str) -> Option<&str> {
        let (_, v) = self.entries.get(key)?;
        self.used.insert(key.to_string());
        Some(v.as_str())
    }

    pub fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| config_err(key, format!("cannot parse `{v}`"))),
        }
    }

    pub fn get_or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| config_err(key, "missing required key"))
    }

    /// Comma-separated list of numbers.
    pub fn get_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        let v = v.to_string();
        v.split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|_| config_err(key, format!("cannot parse `{v}` as a list of numbers")))
    }

    pub fn require_list(&mut self, key: &str) -> Result<Vec<f64>> {
        self.get_list(key)?.ok_or_else(|| config_err(key, "missing required key"))
    }

    /// Errors on the first key no reader asked for.
    pub fn finish(&self) -> Result<()> {
        match self.entries.iter().find(|(k, _)| !self.used.contains(*k)) {
            None => Ok(()),
            Some((k, (line, _))) => Err(config_err(k, format!("unknown key on line {line}"))),
        }
    }
}

fn read_preset(kv: &mut KeyValues) -> Result<Preset> {
    let kind: String = kv.require("solve.preset")?;
    let p = |kv: &mut KeyValues, name: &str| kv.require::<f64>(&format!("solve.preset.{name}"));
    let preset = match kind.as_str() {
        "zero" => Preset::Zero,
        "box" => Preset::Box {
            a: p(kv, "a")?,
            b: p(kv, "b")?,
            height: p(kv, "height")?,
        },
        "bump" => Preset::Bump {
            center: p(kv, "center")?,
            half_width: p(kv, "half_width")?,
            height: p(kv, "height")?,
        },
        "step" => Preset::Step {
            a: p(kv, "a")?,
            x0: p(kv, "x0")?,
            b: p(kv, "b")?,
            u_left: p(kv, "u_left")?,
            u_right: p(kv, "u_right")?,
        },
        "sawtooth" => Preset::Sawtooth {
            a: p(kv, "a")?,
            b: p(kv, "b")?,
            teeth: kv.require("solve.preset.teeth")?,
            height: p(kv, "height")?,
        },
        "piecewise" => Preset::PiecewiseConstant {
            breaks: kv.require_list("solve.preset.breaks")?,
            values: kv.require_list("solve.preset.values")?,
        },
        "cantor" => Preset::Cantor {
            a: p(kv, "a")?,
            length: p(kv, "length")?,
            level: kv.require("solve.preset.level")?,
            height: p(kv, "height")?,
        },
        other => return Err(config_err("solve.preset", format!("unknown preset `{other}`"))),
    };
    preset
        .validate()
        .map_err(|e| config_err("solve.preset", e.to_string()))?;
    Ok(preset)
}

/// Builds a [`SolveConfig`] from the `solve.*` keys.
pub fn read_solve_config(kv: &mut KeyValues) -> Result<SolveConfig> {
    let x_min = kv.require("solve.grid.x_min")?;
    let x_max = kv.require("solve.grid.x_max")?;
    let n_cells = kv.require("solve.grid.n_cells")?;
    let grid = Grid::new(x_min, x_max, n_cells).map_err(|e| config_err("solve.grid", e.to_string()))?;
    let preset = read_preset(kv)?;
    let t_end = kv.require("solve.t_end")?;
    let mut cfg = SolveConfig::new(grid, preset, t_end);

    let every: Option<f64> = kv.get("solve.snapshot_every")?;
    let times = kv.get_list("solve.snapshot_times")?;
    match (every, times) {
        (Some(_), Some(_)) => {
            return Err(config_err(
                "solve.snapshot_times",
                "give either snapshot_times or snapshot_every",
            ))
        }
        (Some(e), None) => {
            if !(e > 0.0) {
                return Err(config_err("solve.snapshot_every", "must be positive"));
            }
            cfg = cfg.with_uniform_snapshots(e);
        }
        (None, Some(ts)) => cfg.snapshot_times = ts,
        (None, None) => cfg.snapshot_times = vec![t_end],
    }

    if let Some(s) = kv.get::<String>("solve.splitting")? {
        cfg.splitting = match s.as_str() {
            "strang" => Splitting::Strang,
            "lie" => Splitting::Lie,
            _ => return Err(config_err("solve.splitting", format!("expected lie or strang, got `{s}`"))),
        };
    }
    if let Some(s) = kv.get::<String>("solve.source_integrator")? {
        cfg.source_integrator = match s.as_str() {
            "rk2" => SourceIntegrator::Rk2,
            "euler" => SourceIntegrator::Euler,
            _ => {
                return Err(config_err(
                    "solve.source_integrator",
                    format!("expected euler or rk2, got `{s}`"),
                ))
            }
        };
    }
    let defaults = SweepOptions::default();
    let cfl = kv.get_or("solve.sweep.cfl", defaults.cfl())?;
    let max_dt = kv.get_or("solve.sweep.max_dt", defaults.max_dt())?;
    cfg.sweep = SweepOptions::new(cfl, max_dt).map_err(|e| config_err("solve.sweep", e.to_string()))?;
    cfg.source_enabled = kv.get_or("solve.source_enabled", cfg.source_enabled)?;
    cfg.fixed_dt = kv.get("solve.fixed_dt")?;
    cfg.substeps = kv.get_or("solve.substeps", cfg.substeps)?;
    cfg.pad = kv.get_or("solve.pad", cfg.pad)?;
    cfg.validate().map_err(|e| config_err("solve", e.to_string()))?;
    Ok(cfg)
}
