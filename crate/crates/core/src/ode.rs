//! Fixed-step Runge–Kutta integration for planar trajectories.

use crate::error::{invalid, Result};

pub type Point = [f64; 2];

#[inline]
fn axpy(x: Point, a: f64, v: Point) -> Point {
    [x[0] + a * v[0], x[1] + a * v[1]]
}

/// One classical RK4 step for `dx/dt = f(t, x)`.
pub fn rk4_step<F>(f: &mut F, t: f64, x: Point, dt: f64) -> Result<Point>
where
    F: FnMut(f64, Point) -> Result<Point>,
{
    let k1 = f(t, x)?;
    let k2 = f(t + 0.5 * dt, axpy(x, 0.5 * dt, k1))?;
    let k3 = f(t + 0.5 * dt, axpy(x, 0.5 * dt, k2))?;
    let k4 = f(t + dt, axpy(x, dt, k3))?;
    Ok([
        x[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        x[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ])
}

/// Integrates from `t0` to `t1` with steps no longer than `max_dt`.
pub fn rk4_integrate<F>(mut f: F, x0: Point, t0: f64, t1: f64, max_dt: f64) -> Result<Point>
where
    F: FnMut(f64, Point) -> Result<Point>,
{
    if !(max_dt > 0.0) {
        return Err(invalid("step size must be positive"));
    }
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(x0);
    }
    let steps = (span.abs() / max_dt).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let mut x = x0;
    for k in 0..steps {
        x = rk4_step(&mut f, t0 + k as f64 * dt, x, dt)?;
    }
    Ok(x)
}
