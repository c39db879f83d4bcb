use std::path::PathBuf;

use bplab_core::config::{read_solve_config, KeyValues};
use bplab_core::{Result, SolveConfig};

/// Checks a run can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    L1,
    Linf,
    Oleinik,
    Entropy,
    Bv,
    FSigma,
    Characteristics,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::L1,
        Check::Linf,
        Check::Oleinik,
        Check::Entropy,
        Check::Bv,
        Check::FSigma,
        Check::Characteristics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::L1 => "l1",
            Check::Linf => "linf",
            Check::Oleinik => "oleinik",
            Check::Entropy => "entropy",
            Check::Bv => "bv",
            Check::FSigma => "fsigma",
            Check::Characteristics => "characteristics",
        }
    }

    pub fn from_name(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FSigmaParams {
    pub sigma: f64,
    pub z1: f64,
    pub z2: f64,
    /// Empty means every snapshot after `sigma`.
    pub times: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub solve: SolveConfig,
    pub checks: Vec<Check>,
    pub t_min: f64,
    pub fsigma: Option<FSigmaParams>,
    pub pairs: usize,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    /// Every key as written, sorted, for the manifest.
    pub echo: Vec<(String, String)>,
}

pub const DEFAULT_T_MIN: f64 = 0.05;

pub fn read_fsigma(kv: &mut KeyValues) -> Result<Option<FSigmaParams>> {
    let sigma: Option<f64> = kv.get("fsigma.sigma")?;
    let z1: Option<f64> = kv.get("fsigma.z1")?;
    let z2: Option<f64> = kv.get("fsigma.z2")?;
    let times = kv.get_list("fsigma.times")?.unwrap_or_default();
    match (sigma, z1, z2) {
        (None, None, None) if times.is_empty() => Ok(None),
        (Some(sigma), Some(z1), Some(z2)) => Ok(Some(FSigmaParams { sigma, z1, z2, times })),
        _ => {
            let missing = [("fsigma.sigma", sigma), ("fsigma.z1", z1), ("fsigma.z2", z2)]
                .into_iter()
                .find(|(_, v)| v.is_none())
                .map(|(k, _)| k)
                .unwrap_or("fsigma.sigma");
            Err(bplab_core::BpError::Config {
                key: missing.into(),
                msg: "fsigma needs sigma, z1 and z2".into(),
            })
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::parse(text)?;
        let echo = kv.entries().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        let solve = read_solve_config(&mut kv)?;
        let mut checks = Vec::new();
        for c in Check::ALL {
            if kv.get_or(&format!("diagnostics.{}", c.name()), false)? {
                checks.push(c);
            }
        }
        let t_min = kv.get_or("diagnostics.t_min", DEFAULT_T_MIN)?;
        let pairs = kv.get_or("diagnostics.pairs", 50usize)?;
        let fsigma = read_fsigma(&mut kv)?;
        if checks.contains(&Check::FSigma) && fsigma.is_none() {
            return Err(bplab_core::BpError::Config {
                key: "diagnostics.fsigma".into(),
                msg: "set fsigma.sigma, fsigma.z1 and fsigma.z2".into(),
            });
        }
        let output_dir = kv.get::<String>("output.dir")?.map(PathBuf::from);
        let seed = kv.get_or("seed", 0u64)?;
        kv.finish()?;
        Ok(ExperimentConfig {
            solve,
            checks,
            t_min,
            fsigma,
            pairs,
            output_dir,
            seed,
            echo,
        })
    }
}
