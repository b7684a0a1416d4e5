//! Completed runs and their on-disk layout:
//!
//! ```text
//! <dir>/config.json
//! <dir>/diagnostics.csv      t,l1,l2,linf,energy
//! <dir>/snapshots/t_<t>.ylf
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::exact::Trajectory;
use crate::field::{read_ylf, write_ylf, FieldKind, GridField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: SolverConfig,
    pub snapshots: Vec<(f64, GridField)>,
    /// One row per step, starting at `t = 0`.
    pub diagnostics: Vec<DiagnosticsRow>,
    pub trajectories: Vec<Trajectory>,
}

#[derive(Serialize, Deserialize)]
struct StoredConfig {
    schema_version: u32,
    solver: SolverConfig,
}

pub(crate) fn snapshot_name(t: f64) -> String {
    format!("t_{t:.6}.ylf")
}

pub(crate) fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

impl RunRecord {
    pub fn snapshot_at(&self, t: f64) -> Option<&GridField> {
        self.snapshots
            .iter()
            .find(|s| (s.0 - t).abs() <= 1e-12 * t.abs().max(1.0))
            .map(|s| &s.1)
    }

    pub fn final_snapshot(&self) -> Option<&(f64, GridField)> {
        self.snapshots.last()
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir.join("snapshots"))?;
        let stored = StoredConfig {
            schema_version: 1,
            solver: self.config.clone(),
        };
        let json = serde_json::to_string_pretty(&stored).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(dir.join("config.json"), json + "\n")?;
        let mut w = csv::Writer::from_path(dir.join("diagnostics.csv")).map_err(csv_err)?;
        w.write_record(["t", "l1", "l2", "linf", "energy"]).map_err(csv_err)?;
        for d in &self.diagnostics {
            w.write_record([d.t, d.l1, d.l2, d.linf, d.energy].map(fmt_num))
                .map_err(csv_err)?;
        }
        w.flush()?;
        for (t, f) in &self.snapshots {
            write_ylf(dir.join("snapshots").join(snapshot_name(*t)), f)?;
        }
        Ok(())
    }

    /// Reads a run directory written by [`RunRecord::save`]. Trajectories are
    /// not persisted.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let text = fs::read_to_string(dir.join("config.json"))?;
        let stored: StoredConfig = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        if stored.schema_version != 1 {
            return Err(Error::Config(format!(
                "unsupported schema_version {}",
                stored.schema_version
            )));
        }
        let mut r = csv::Reader::from_path(dir.join("diagnostics.csv")).map_err(csv_err)?;
        let diagnostics = r
            .deserialize()
            .collect::<std::result::Result<Vec<DiagnosticsRow>, _>>()
            .map_err(csv_err)?;
        let mut snapshots = Vec::new();
        for t in stored.solver.resolved_snapshots() {
            let path = dir.join("snapshots").join(snapshot_name(t));
            if path.exists() {
                snapshots.push((t, read_ylf(path, FieldKind::Vorticity)?));
            }
        }
        Ok(Self {
            config: stored.solver,
            snapshots,
            diagnostics,
            trajectories: Vec::new(),
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    let offset = e.position().map_or(0, |p| p.byte());
    let reason = e.to_string();
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        _ => Error::Format { offset, reason },
    }
}
