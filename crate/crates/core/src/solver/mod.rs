//! Semi-Lagrangian vorticity transport coupled to spectral Biot–Savart.
//!
//! Each substep of length `tau` advects `omega^n` half a step with `u^n` to
//! predict a mid-step vorticity, recomputes the velocity from it, and then
//! traces backward characteristics of that frozen mid-step velocity over the
//! full step. Foot points are interpolated with a periodic bicubic stencil.

mod flow;
mod interp;
mod record;

pub use flow::{flow_map, log_lipschitz_constant, RunVelocity, VelocitySource};
pub use interp::{interpolate, sample, to_index};
pub use record::{DiagnosticsRow, RunRecord};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{biot_savart, check_resolution, lp_norm, FieldKind, GridField, VelocityField};

/// Substep limit of the adaptive CFL guard.
pub const MAX_SUBSTEPS: usize = 64;
/// Courant number: `tau * max|u| <= CFL * h`.
pub const CFL: f64 = 0.5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Bicubic,
    #[default]
    MonotoneBicubic,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacteristicIntegrator {
    #[default]
    Rk2,
    Rk4,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scheme {
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default)]
    pub characteristic_integrator: CharacteristicIntegrator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub interpolation: Interpolation,
    #[serde(default)]
    pub characteristic_integrator: CharacteristicIntegrator,
    /// Times at which the vorticity is stored; `{0, t_end}` when empty.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

impl SolverConfig {
    pub fn new(n: usize, dt: f64, t_end: f64) -> Self {
        Self {
            n,
            dt,
            t_end,
            interpolation: Interpolation::default(),
            characteristic_integrator: CharacteristicIntegrator::default(),
            snapshot_times: Vec::new(),
        }
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn scheme(&self) -> Scheme {
        Scheme {
            interpolation: self.interpolation,
            characteristic_integrator: self.characteristic_integrator,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_resolution(self.n)?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(invalid(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|t| !(**t >= 0.0 && **t <= self.t_end))
        {
            return Err(invalid(format!("snapshot time {t} outside [0, {}]", self.t_end)));
        }
        Ok(())
    }

    /// Sorted, deduplicated snapshot times.
    pub fn resolved_snapshots(&self) -> Vec<f64> {
        let mut times = if self.snapshot_times.is_empty() {
            vec![0.0, self.t_end]
        } else {
            self.snapshot_times.clone()
        };
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }
}

/// Backward characteristic foot of every grid point under the frozen
/// velocity `u` over time `tau`, followed by interpolation of `omega`.
fn advect(omega: &GridField, u: &VelocityField, tau: f64, scheme: Scheme) -> Vec<f64> {
    let n = omega.n();
    let inv_h = 1.0 / omega.h();
    let (a1, a2) = (u.u1.values(), u.u2.values());
    let w = omega.values();
    let monotone = scheme.interpolation == Interpolation::MonotoneBicubic;
    let vel = |s: [f64; 2]| {
        [
            sample(a1, n, s[0], s[1], false) * inv_h,
            sample(a2, n, s[0], s[1], false) * inv_h,
        ]
    };
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            let s = [i as f64, j as f64];
            let k1 = [a1[i * n + j] * inv_h, a2[i * n + j] * inv_h];
            let foot = match scheme.characteristic_integrator {
                CharacteristicIntegrator::Rk2 => {
                    let k2 = vel([s[0] - 0.5 * tau * k1[0], s[1] - 0.5 * tau * k1[1]]);
                    [s[0] - tau * k2[0], s[1] - tau * k2[1]]
                }
                CharacteristicIntegrator::Rk4 => {
                    let k2 = vel([s[0] - 0.5 * tau * k1[0], s[1] - 0.5 * tau * k1[1]]);
                    let k3 = vel([s[0] - 0.5 * tau * k2[0], s[1] - 0.5 * tau * k2[1]]);
                    let k4 = vel([s[0] - tau * k3[0], s[1] - tau * k3[1]]);
                    [
                        s[0] - tau / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                        s[1] - tau / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
                    ]
                }
            };
            *v = sample(w, n, foot[0], foot[1], monotone);
        }
    });
    out
}

fn to_vorticity(n: usize, mut values: Vec<f64>, step: usize) -> Result<GridField> {
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numerical {
            step,
            reason: format!("non-finite vorticity at sample {k}"),
        });
    }
    // semi-Lagrangian transport does not conserve the mean exactly
    let probe = GridField::new(n, values.clone(), FieldKind::Scalar)?;
    let mean = probe.mean();
    if mean != 0.0 {
        values.iter_mut().for_each(|v| *v -= mean);
    }
    GridField::new(n, values, FieldKind::Vorticity)
}

/// Number of CFL substeps needed for a step of `dt` at speed `speed`.
fn substeps(dt: f64, speed: f64, h: f64, step: usize) -> Result<usize> {
    let m = (dt * speed / (CFL * h)).ceil().max(1.0);
    if !m.is_finite() || m as usize > MAX_SUBSTEPS {
        return Err(Error::Numerical {
            step,
            reason: format!("CFL guard needs {m} substeps (limit {MAX_SUBSTEPS})"),
        });
    }
    Ok(m as usize)
}

/// Advances `omega` with its own velocity `u` (which must equal
/// `biot_savart(omega)`) by `dt`. Returns the new vorticity and its velocity.
fn advance(
    omega: GridField,
    u: VelocityField,
    dt: f64,
    scheme: Scheme,
    step: usize,
) -> Result<(GridField, VelocityField)> {
    let (mut omega, mut u) = (omega, u);
    let n = omega.n();
    let m = substeps(dt, u.max_speed(), omega.h(), step)?;
    let tau = dt / m as f64;
    for _ in 0..m {
        let half = to_vorticity(n, advect(&omega, &u, 0.5 * tau, scheme), step)?;
        let mid = biot_savart(&half)?;
        omega = to_vorticity(n, advect(&omega, &mid, tau, scheme), step)?;
        u = biot_savart(&omega)?;
        if u.max_speed() * tau > MAX_SUBSTEPS as f64 * CFL * omega.h() {
            return Err(Error::Numerical {
                step,
                reason: "velocity blew up within a step".into(),
            });
        }
    }
    Ok((omega, u))
}

/// One time step of length `dt`, substepped to satisfy the CFL guard.
pub fn step(omega: &GridField, dt: f64, scheme: Scheme) -> Result<GridField> {
    if !(dt > 0.0) {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    let u = biot_savart(omega)?;
    Ok(advance(omega.clone(), u, dt, scheme, 0)?.0)
}

fn diagnostics_row(t: f64, omega: &GridField, u: &VelocityField) -> Result<DiagnosticsRow> {
    Ok(DiagnosticsRow {
        t,
        l1: lp_norm(omega, 1.0)?,
        l2: lp_norm(omega, 2.0)?,
        linf: omega.max_abs(),
        energy: u.kinetic_energy(),
    })
}

/// Evolves `data` to `config.t_end`, landing exactly on every snapshot time.
pub fn run(data: &GridField, config: &SolverConfig) -> Result<RunRecord> {
    config.validate()?;
    if data.n() != config.n {
        return Err(invalid(format!(
            "data resolution {} differs from solver resolution {}",
            data.n(),
            config.n
        )));
    }
    let omega = data.clone().with_kind(FieldKind::Vorticity)?;
    let snaps = config.resolved_snapshots();
    let scheme = config.scheme();

    // breakpoints: the regular step grid merged with the snapshot times
    let count = (config.t_end / config.dt - 1e-9).ceil().max(0.0) as usize;
    let mut marks: Vec<f64> = (1..=count)
        .map(|k| (k as f64 * config.dt).min(config.t_end))
        .chain(snaps.iter().copied().filter(|t| *t > 0.0))
        .collect();
    marks.sort_by(f64::total_cmp);
    marks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * config.t_end.max(1.0));

    let mut u = biot_savart(&omega)?;
    let mut omega = omega;
    let mut diagnostics = vec![diagnostics_row(0.0, &omega, &u)?];
    let mut snapshots = Vec::new();
    let mut next_snap = 0;
    while next_snap < snaps.len() && snaps[next_snap] <= 0.0 {
        snapshots.push((0.0, omega.clone()));
        next_snap += 1;
    }
    let mut t = 0.0;
    for (k, &mark) in marks.iter().enumerate() {
        let dt = mark - t;
        if dt <= 0.0 {
            continue;
        }
        (omega, u) = advance(omega, u, dt, scheme, k + 1)?;
        t = mark;
        diagnostics.push(diagnostics_row(t, &omega, &u)?);
        while next_snap < snaps.len() && (snaps[next_snap] - t).abs() <= 1e-12 * config.t_end.max(1.0) {
            snapshots.push((snaps[next_snap], omega.clone()));
            next_snap += 1;
        }
    }
    Ok(RunRecord {
        config: config.clone(),
        snapshots,
        diagnostics,
        trajectories: Vec::new(),
    })
}
