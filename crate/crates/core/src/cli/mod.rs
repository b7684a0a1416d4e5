//! Experiment configuration and command recipes.

mod commands;
mod config;

use std::path::PathBuf;

pub use commands::{
    cmd_diagnose, cmd_euler_run, cmd_shear, cmd_theorem, cmd_toy, TheoremReport, YUDOVICH_MARGIN,
};
pub use config::{
    Experiment, ExperimentConfig, ProbeSpec, ShearCase, ShearConfig, TheoremConfig, ToyConfig,
    SCHEMA_VERSION,
};

use crate::error::{Error, Result};

/// Runs the experiment a configuration names; returns the files written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let out = &cfg.output_dir;
    std::fs::create_dir_all(out)?;
    let listing = |names: &[&str]| names.iter().map(|n| out.join(n)).collect::<Vec<_>>();
    match cfg.experiment {
        Experiment::Toy => cmd_toy(&cfg.toy.clone().unwrap_or_default(), out),
        Experiment::Shear => {
            cmd_shear(&cfg.shear.clone().unwrap_or_default(), out)?;
            Ok(listing(&["shear_study.csv", "shear_norms.csv"]))
        }
        Experiment::Euler => {
            let (data, solver) = match (&cfg.data, &cfg.solver) {
                (Some(d), Some(s)) => (d, s),
                _ => return Err(Error::Config("euler experiments need [data] and [solver]".into())),
            };
            cmd_euler_run(data, solver, out)?;
            Ok(listing(&["config.json", "diagnostics.csv"]))
        }
        Experiment::Diagnose => cmd_diagnose(&cfg.snapshots, &cfg.diagnostics, cfg.seed, out),
        Experiment::Theorem => {
            cmd_theorem(&cfg.theorem.clone().unwrap_or_default(), cfg.seed, out)?;
            Ok(listing(&["theorem.csv", "theorem_indices.csv", "theorem_fit.csv"]))
        }
    }
}
