//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::DataSpec;
use crate::error::{Error, Result};
use crate::ode::Point;
use crate::solver::SolverConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Toy,
    Shear,
    Euler,
    Diagnose,
    Theorem,
}

/// One requested probe of `diagnose`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "probe", rename_all = "snake_case")]
pub enum ProbeSpec {
    /// Key integral at the listed points and at `random` points drawn from
    /// `(0, 1/2]^2` with the experiment seed.
    KeyIntegral {
        #[serde(default)]
        points: Vec<Point>,
        #[serde(default)]
        random: usize,
    },
    KeyResidual { points: Vec<Point> },
    LevelGap {
        radii: Vec<f64>,
        level: f64,
        #[serde(default)]
        tol: f64,
    },
    Sobolev { exponents: Vec<f64> },
    LogLipschitz { num_pairs: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    pub t_list: Vec<f64>,
    pub x0_list: Vec<Point>,
    /// Number of `x1` samples per cusp curve and per axis of the field table.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    16
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            t_list: vec![0.0, 0.25, 0.5, std::f64::consts::LN_2, 1.0],
            x0_list: vec![[0.1, 0.1], [0.3, 0.3], [0.5, 0.5], [0.7, 0.7]],
            samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShearCase {
    pub p: f64,
    pub eps: f64,
    pub t: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShearConfig {
    pub cases: Vec<ShearCase>,
    pub resolutions: Vec<usize>,
}

impl Default for ShearConfig {
    fn default() -> Self {
        let mut cases = Vec::new();
        for p in [2.0, 3.0, 4.0] {
            let eps = 0.1 / (2.0 * p);
            cases.push(ShearCase { p, eps, t: 0.0, exponent: p });
            cases.push(ShearCase { p, eps, t: 1.0, exponent: p });
            cases.push(ShearCase { p, eps, t: 1.0, exponent: p / 2.0 });
        }
        Self {
            cases,
            resolutions: vec![256, 512, 1024, 2048],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremConfig {
    pub beta: f64,
    pub n_list: Vec<usize>,
    pub t_end: f64,
    /// Time step at the finest resolution; coarser runs scale it up.
    pub dt: f64,
    /// Snapshot times; `snapshots` equal intervals of `[0, t_end]` when empty.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    pub p_grid: Vec<f64>,
    #[serde(default = "default_pairs")]
    pub num_pairs: usize,
}

fn default_snapshots() -> usize {
    4
}
fn default_pairs() -> usize {
    4000
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            beta: 0.25,
            n_list: vec![128, 256, 512, 1024],
            t_end: 0.25,
            dt: 0.004,
            snapshot_times: Vec::new(),
            snapshots: default_snapshots(),
            p_grid: (0..=16).map(|k| 1.2 + 0.05 * k as f64).collect(),
            num_pairs: default_pairs(),
        }
    }
}

impl TheoremConfig {
    pub fn times(&self) -> Vec<f64> {
        if !self.snapshot_times.is_empty() {
            return self.snapshot_times.clone();
        }
        if self.t_end == 0.0 {
            return vec![0.0];
        }
        let k = self.snapshots.max(1);
        (0..=k).map(|i| self.t_end * i as f64 / k as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<ProbeSpec>,
    /// Snapshot files read by `diagnose`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shear: Option<ShearConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremConfig>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment,
            output_dir: output_dir.into(),
            seed: 0,
            data: None,
            solver: None,
            diagnostics: Vec::new(),
            snapshots: Vec::new(),
            toy: None,
            shear: None,
            theorem: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if let Some(d) = &self.data {
            d.validate().map_err(cfg)?;
        }
        if let Some(s) = &self.solver {
            s.validate().map_err(cfg)?;
        }
        match self.experiment {
            Experiment::Euler if self.data.is_none() || self.solver.is_none() => Err(Error::Config(
                "euler experiments need [data] and [solver] sections".into(),
            )),
            Experiment::Theorem => match &self.theorem {
                Some(t) if !(t.beta > 0.0 && t.beta < 0.5) => {
                    Err(Error::Config(format!("beta must lie in (0, 1/2), got {}", t.beta)))
                }
                Some(t) if t.n_list.len() < 3 => {
                    Err(Error::Config("theorem experiments need at least three resolutions".into()))
                }
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolverConfig;

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig::new(Experiment::Euler, "out");
        cfg.seed = 42;
        cfg.data = Some(DataSpec::theorem(0.3));
        cfg.solver = Some(SolverConfig::new(64, 0.01, 0.1).with_snapshots(vec![0.0, 0.05, 0.1]));
        cfg.diagnostics = vec![
            ProbeSpec::KeyIntegral {
                points: vec![[0.1, 0.2]],
                random: 3,
            },
            ProbeSpec::LevelGap {
                radii: vec![0.1, 0.2],
                level: 1.0,
                tol: 1e-9,
            },
        ];
        cfg.toy = Some(ToyConfig::default());
        cfg.shear = Some(ShearConfig::default());
        cfg.theorem = Some(TheoremConfig::default());
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            ExperimentConfig::from_toml("schema_version = 2\nexperiment = \"toy\"\noutput_dir = \"o\""),
            Err(Error::Config(_))
        ));
        assert!(ExperimentConfig::from_toml("schema_version = 1\nexperiment = \"euler\"\noutput_dir = \"o\"").is_err());
        assert!(ExperimentConfig::from_toml("not toml at all [").is_err());
        let ok = ExperimentConfig::from_toml("schema_version = 1\nexperiment = \"toy\"\noutput_dir = \"o\"").unwrap();
        assert_eq!(ok.experiment, Experiment::Toy);
    }
}
