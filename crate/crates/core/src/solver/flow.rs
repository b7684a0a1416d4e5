//! Particle trajectories and the log-Lipschitz modulus of a velocity field.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::interp::{sample, to_index};
use super::RunRecord;
use crate::error::{invalid, Result};
use crate::exact::Trajectory;
use crate::field::{biot_savart, VelocityField};
use crate::ode::{rk4_step, Point};

/// Velocities of a completed run at its snapshot times, interpolated
/// linearly in time and bicubically in space.
#[derive(Debug, Clone)]
pub struct RunVelocity {
    times: Vec<f64>,
    fields: Vec<VelocityField>,
}

impl RunVelocity {
    pub fn from_record(record: &RunRecord) -> Result<Self> {
        if record.snapshots.is_empty() {
            return Err(invalid("run has no snapshots"));
        }
        let times = record.snapshots.iter().map(|s| s.0).collect();
        let fields = record
            .snapshots
            .iter()
            .map(|s| biot_savart(&s.1))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { times, fields })
    }

    pub fn n(&self) -> usize {
        self.fields[0].n()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    fn spatial(u: &VelocityField, x: Point) -> Point {
        let n = u.n();
        let s = to_index(x, n);
        [
            sample(u.u1.values(), n, s[0], s[1], false),
            sample(u.u2.values(), n, s[0], s[1], false),
        ]
    }

    pub fn velocity(&self, t: f64, x: Point) -> Result<Point> {
        let (t0, t1) = self.span();
        let slack = 1e-9 * (t1 - t0).max(1.0);
        if t < t0 - slack || t > t1 + slack {
            return Err(invalid(format!("time {t} outside the run span [{t0}, {t1}]")));
        }
        if self.times.len() == 1 {
            return Ok(Self::spatial(&self.fields[0], x));
        }
        let k = self.times.partition_point(|s| *s <= t).clamp(1, self.times.len() - 1);
        let (ta, tb) = (self.times[k - 1], self.times[k]);
        let w = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
        let a = Self::spatial(&self.fields[k - 1], x);
        let b = Self::spatial(&self.fields[k], x);
        Ok([(1.0 - w) * a[0] + w * b[0], (1.0 - w) * a[1] + w * b[1]])
    }
}

pub type AnalyticVelocity = Arc<dyn Fn(f64, Point) -> Result<Point> + Send + Sync>;

#[derive(Clone)]
pub enum VelocitySource {
    Analytic(AnalyticVelocity),
    Run(RunVelocity),
}

impl VelocitySource {
    pub fn analytic<F>(f: F) -> Self
    where
        F: Fn(f64, Point) -> Result<Point> + Send + Sync + 'static,
    {
        VelocitySource::Analytic(Arc::new(f))
    }

    pub fn velocity(&self, t: f64, x: Point) -> Result<Point> {
        match self {
            VelocitySource::Analytic(f) => f(t, x),
            VelocitySource::Run(r) => r.velocity(t, x),
        }
    }

    /// Radius `2/n` below which gridded positions are not trusted; analytic
    /// sources have none.
    pub fn min_radius(&self) -> f64 {
        match self {
            VelocitySource::Analytic(_) => 0.0,
            VelocitySource::Run(r) => 2.0 / r.n() as f64,
        }
    }
}

/// RK4 integration of `dx/dt = u(t, x)` from `(t_grid[0], x0)`, sampled at
/// every entry of `t_grid`, with steps no longer than `max_dt`.
///
/// Once the particle comes within [`VelocitySource::min_radius`] of the
/// origin, integration stops; the remaining samples are flagged and repeat
/// the last trusted position.
pub fn flow_map(source: &VelocitySource, x0: Point, t_grid: &[f64], max_dt: f64) -> Result<Trajectory> {
    if t_grid.is_empty() {
        return Err(invalid("empty time grid"));
    }
    if !(max_dt > 0.0) {
        return Err(invalid("step size must be positive"));
    }
    let r_min = source.min_radius();
    let mut f = |t: f64, x: Point| source.velocity(t, x);
    let mut points = vec![x0];
    let mut flagged = vec![x0[0].hypot(x0[1]) < r_min];
    let mut x = x0;
    let mut lost = flagged[0];
    for w in t_grid.windows(2) {
        if !lost {
            let span = w[1] - w[0];
            let steps = (span.abs() / max_dt).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for k in 0..steps {
                let y = rk4_step(&mut f, w[0] + k as f64 * dt, x, dt)?;
                if y[0].hypot(y[1]) < r_min {
                    lost = true;
                    break;
                }
                x = y;
            }
        }
        points.push(x);
        flagged.push(lost);
    }
    Trajectory::new(t_grid.to_vec(), points, flagged)
}

/// `max |u(x) - u(x')| / (omega_sup |x - x'| ln(1/|x - x'|))` over sampled
/// pairs with `h <= |x - x'| < 1/2`.
///
/// Half of the base points are uniform on the torus; the other half are
/// drawn log-uniformly in radius around the origin, where the velocity
/// gradient of odd-odd data is largest. Offsets are log-uniform in length and
/// uniform in direction.
pub fn log_lipschitz_constant(u: &VelocityField, omega_sup: f64, num_pairs: usize, seed: u64) -> Result<f64> {
    let speed = u.max_speed();
    if omega_sup == 0.0 {
        if speed == 0.0 {
            return Ok(0.0);
        }
        return Err(invalid("omega_sup is zero but the velocity is not"));
    }
    if !(omega_sup > 0.0) {
        return Err(invalid(format!("omega_sup must be positive, got {omega_sup}")));
    }
    let n = u.n();
    let h = 2.0 / n as f64;
    let at = |x: Point| {
        let s = to_index(x, n);
        [
            sample(u.u1.values(), n, s[0], s[1], false),
            sample(u.u2.values(), n, s[0], s[1], false),
        ]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ld_lo, ld_hi) = (h.ln(), 0.49f64.ln());
    let mut best = 0.0f64;
    for k in 0..num_pairs {
        let x = if k % 2 == 0 {
            [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
        } else {
            let r = rng.gen_range(h.ln()..0.5f64.ln()).exp();
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            [r * a.cos(), r * a.sin()]
        };
        let d = rng.gen_range(ld_lo..ld_hi).exp();
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let y = [x[0] + d * a.cos(), x[1] + d * a.sin()];
        let (ux, uy) = (at(x), at(y));
        let du = (ux[0] - uy[0]).hypot(ux[1] - uy[1]);
        best = best.max(du / (omega_sup * d * (1.0 / d).ln()));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{toy_trajectory, toy_velocity, ToyFlowParams};
    use crate::field::{FieldKind, GridField};

    #[test]
    fn trivial_grid_returns_start() {
        let src = VelocitySource::analytic(|_, x| toy_velocity(x, ToyFlowParams::default()));
        let tr = flow_map(&src, [0.3, 0.4], &[0.0], 1e-3).unwrap();
        assert_eq!(tr.points, vec![[0.3, 0.4]]);
    }

    #[test]
    fn analytic_toy_flow_matches_closed_form() {
        let src = VelocitySource::analytic(|_, x| toy_velocity(x, ToyFlowParams::default()));
        let times: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
        let tr = flow_map(&src, [0.4, 0.6], &times, 1e-4).unwrap();
        for (t, p) in times.iter().zip(&tr.points) {
            let e = toy_trajectory([0.4, 0.6], *t).unwrap();
            assert!((p[0] - e[0]).abs() < 1e-8 && (p[1] - e[1]).abs() < 1e-8);
        }
        assert!(tr.flagged.iter().all(|f| !f));
    }

    #[test]
    fn zero_velocity_has_zero_constant() {
        let z = GridField::zeros(32, FieldKind::Component).unwrap();
        let u = VelocityField::new(z.clone(), z).unwrap();
        assert_eq!(log_lipschitz_constant(&u, 0.0, 100, 1).unwrap(), 0.0);
        assert_eq!(log_lipschitz_constant(&u, 1.0, 100, 1).unwrap(), 0.0);
    }
}
