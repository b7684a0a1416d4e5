//! Closed-form model flows.
//!
//! The toy field `v = (-x1 ln(1/x2), x2 ln(1/x2))` on the unit square has the
//! exact flow `phi2 = x02^(e^-t)`, `phi1 = x01 * x02^(1 - e^-t)`. Transporting
//! `sin(2 theta)` by it cusps the diagonal level set into
//! `x2 = x1^gamma(t)`, `gamma(t) = e^-t / (2 - e^-t)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::{sin_2theta, smooth_cutoff};
use crate::error::{invalid, Error, Result};
use crate::field::{
    odd_odd_extend, FieldKind, GradientLadder, GridField, Quadrant,
    SobolevEstimate,
};
use crate::ode::{rk4_integrate, Point};
use crate::quadrature::{integrate_rect_geometric, Tolerance};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToyFlowParams {
    /// Adds `x2` to `v2`, making the field divergence free.
    #[serde(default)]
    pub divergence_free: bool,
}

fn check_finite(x: Point) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite point ({}, {})", x[0], x[1])))
    }
}

pub fn toy_velocity(x: Point, params: ToyFlowParams) -> Result<Point> {
    check_finite(x)?;
    if !(x[1] > 0.0) {
        return Err(Error::Domain(format!("toy field needs x2 > 0, got {}", x[1])));
    }
    let l = -x[1].ln();
    let extra = if params.divergence_free { x[1] } else { 0.0 };
    Ok([-x[0] * l, x[1] * l + extra])
}

/// Analytic divergence of the toy field.
pub fn toy_divergence(params: ToyFlowParams) -> f64 {
    if params.divergence_free {
        0.0
    } else {
        -1.0
    }
}

/// Exact position at time `t` (any sign) of the particle starting at `x0`
/// under the toy field without the divergence correction.
pub fn toy_trajectory(x0: Point, t: f64) -> Result<Point> {
    check_finite(x0)?;
    if !(x0[1] > 0.0 && x0[1] < 1.0) || x0[0] < 0.0 {
        return Err(Error::Domain(format!(
            "trajectory start ({}, {}) needs 0 < x2 < 1 and x1 >= 0",
            x0[0], x0[1]
        )));
    }
    let e = (-t).exp();
    let l = x0[1].ln();
    let phi = [x0[0] * ((1.0 - e) * l).exp(), (e * l).exp()];
    if phi[1] == 0.0 || !phi[0].is_finite() {
        return Err(Error::OutOfResolution);
    }
    Ok(phi)
}

/// RK4 integration of the toy field, valid for both flag settings.
pub fn toy_trajectory_rk4(x0: Point, t: f64, params: ToyFlowParams, max_dt: f64) -> Result<Point> {
    rk4_integrate(|_, x| toy_velocity(x, params), x0, 0.0, t, max_dt)
}

/// Preimage of `x` under the time-`t` toy flow.
pub fn toy_backward_map(x: Point, t: f64) -> Result<Point> {
    toy_trajectory(x, -t)
}

/// `f(t, x) = f0(Phi_t^{-1}(x))`, the solution of `f_t + v . grad f = 0`.
/// `f0` is evaluated wherever the preimage lands.
pub fn toy_advect<F: Fn(Point) -> f64>(f0: F, t: f64, x: Point) -> Result<f64> {
    Ok(f0(toy_backward_map(x, t)?))
}

/// `sin(2 theta)` transported to time `t`, evaluated through the log of the
/// preimage slope so that it stays accurate where the preimage underflows.
pub fn toy_advected_sin2theta(t: f64, x: Point) -> Result<f64> {
    check_finite(x)?;
    if !(x[1] > 0.0 && x[1] < 1.0) || !(x[0] > 0.0) {
        if x[0] == 0.0 && x[1] > 0.0 && x[1] < 1.0 {
            return Ok(0.0);
        }
        return Err(Error::Domain(format!(
            "transport point ({}, {}) outside the unit square",
            x[0], x[1]
        )));
    }
    // ln(x01 / x02) with the backward map x0 = (x1 x2^(1-e^t), x2^(e^t))
    let slope = x[0].ln() + (1.0 - 2.0 * t.exp()) * x[1].ln();
    Ok(1.0 / slope.cosh())
}

pub fn gamma_exponent(t: f64) -> f64 {
    let e = (-t).exp();
    e / (2.0 - e)
}

pub fn gamma_curve(t: f64, x1: f64) -> Point {
    [x1, x1.powf(gamma_exponent(t))]
}

/// Regularity index `2 / (2 - e^-t)` of the transported scalar.
pub fn model_q(t: f64) -> f64 {
    2.0 / (2.0 - (-t).exp())
}

/// The transported `sin(2 theta)` with a radial cutoff, odd-odd extended to
/// the torus. Without the cutoff the field would jump across the torus seam.
pub fn toy_advected_field(t: f64, n: usize) -> Result<GridField> {
    let (inner, outer) = (0.5, 2.0 / 3.0);
    let quadrant = Quadrant::from_fn(n, |x1, x2| {
        let chi = smooth_cutoff(x1.hypot(x2), inner, outer);
        if chi == 0.0 {
            0.0
        } else {
            chi * toy_advected_sin2theta(t, [x1, x2]).unwrap_or(f64::NAN)
        }
    })?;
    odd_odd_extend(&quadrant, FieldKind::Scalar)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    /// Samples that left the resolved region; their points repeat the last
    /// trusted position.
    pub flagged: Vec<bool>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, points: Vec<Point>, flagged: Vec<bool>) -> Result<Self> {
        if times.len() != points.len() || times.len() != flagged.len() {
            return Err(invalid("trajectory columns differ in length"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("trajectory times must be strictly increasing"));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("trajectory points must be finite"));
        }
        Ok(Self {
            times,
            points,
            flagged,
        })
    }

    pub fn last(&self) -> Option<Point> {
        self.points.last().copied()
    }
}

/// Closed-form toy trajectory sampled at `times`.
pub fn toy_trajectory_samples(x0: Point, times: &[f64]) -> Result<Trajectory> {
    let points = times
        .iter()
        .map(|&t| toy_trajectory(x0, t))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), points, vec![false; times.len()])
}

pub type Profile1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Profile2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Profiles of the shear flow `u = (u1(x2), 0, u3(x1 - t u1(x2), x2))`.
#[derive(Clone)]
pub struct ShearProfiles {
    pub u1: Profile1,
    pub u3: Profile2,
    pub p: f64,
    pub eps: f64,
}

impl std::fmt::Debug for ShearProfiles {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ShearProfiles")
            .field("p", &self.p)
            .field("eps", &self.eps)
            .finish_non_exhaustive()
    }
}

/// Inner radius of the cutoff applied to the singular profiles.
pub const SHEAR_CUTOFF: (f64, f64) = (0.5, 2.0 / 3.0);

impl ShearProfiles {
    pub fn new(u1: Profile1, u3: Profile2, p: f64, eps: f64) -> Result<Self> {
        if !(p >= 1.0) || !(eps > 0.0) {
            return Err(invalid(format!("shear profiles need p >= 1 and eps > 0, got {p}, {eps}")));
        }
        Ok(Self { u1, u3, p, eps })
    }

    /// `u1 = chi(|x2|) |x2|^(1 - 1/p + eps)`, `u3 = chi(|x|) |x|^(1 - 2/p + eps)`.
    pub fn singular(p: f64, eps: f64) -> Result<Self> {
        let (a, b) = SHEAR_CUTOFF;
        let e1 = 1.0 - 1.0 / p + eps;
        let e3 = 1.0 - 2.0 / p + eps;
        Self::new(
            Arc::new(move |x2: f64| smooth_cutoff(x2.abs(), a, b) * x2.abs().powf(e1)),
            Arc::new(move |x1: f64, x2: f64| {
                let r = x1.hypot(x2);
                smooth_cutoff(r, a, b) * r.powf(e3)
            }),
            p,
            eps,
        )
    }

    /// A smooth periodic pair used for residual checks.
    pub fn smooth() -> Self {
        use std::f64::consts::PI;
        Self {
            u1: Arc::new(|x2: f64| 0.5 * (PI * x2).sin()),
            u3: Arc::new(|x1: f64, x2: f64| (PI * x1).sin() * (PI * x2).cos()),
            p: 2.0,
            eps: 1.0,
        }
    }
}

#[inline]
fn wrap(x: f64) -> f64 {
    (x + 1.0).rem_euclid(2.0) - 1.0
}

pub fn shear_velocity(profiles: &ShearProfiles, t: f64, x: [f64; 3]) -> [f64; 3] {
    let a = (profiles.u1)(x[1]);
    [a, 0.0, (profiles.u3)(wrap(x[0] - t * a), x[1])]
}

/// Max-norm of `u_t + (u . grad) u` at `x` by central differences with step `h`.
pub fn shear_euler_residual(profiles: &ShearProfiles, t: f64, x: [f64; 3], h: f64) -> f64 {
    let u = shear_velocity(profiles, t, x);
    let shift = |k: usize, d: f64| {
        let mut y = x;
        y[k] += d;
        y
    };
    let dt: Vec<f64> = (0..3)
        .map(|c| {
            (shear_velocity(profiles, t + h, x)[c] - shear_velocity(profiles, t - h, x)[c]) / (2.0 * h)
        })
        .collect();
    let mut res = [0.0f64; 3];
    for (c, r) in res.iter_mut().enumerate() {
        let mut adv = 0.0;
        for (k, uk) in u.iter().enumerate() {
            let d = (shear_velocity(profiles, t, shift(k, h))[c]
                - shear_velocity(profiles, t, shift(k, -h))[c])
                / (2.0 * h);
            adv += uk * d;
        }
        *r = dt[c] + adv;
    }
    res.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Central difference with a step relative to `scale`, the distance to the
/// nearest singularity of the profile.
fn local_derivative<F: Fn(f64) -> f64>(f: F, x: f64, scale: f64) -> f64 {
    let d = 1e-6 * scale.max(1e-300);
    (f(x + d) - f(x - d)) / (2.0 * d)
}

/// Frobenius norm of the shear-flow gradient at the cell centres of an
/// `n x n` slab grid, by the chain rule on the profiles.
///
/// Grid differences of `u3(x1 - t u1(x2), x2)` do not resolve the shift
/// between neighbouring rows near `x2 = 0`, which hides the divergence of the
/// cross term until far finer grids, so each profile is differentiated
/// pointwise at its own scale instead.
pub fn shear_gradient_magnitude(profiles: &ShearProfiles, t: f64, n: usize) -> Result<GridField> {
    let u1 = &profiles.u1;
    let u3 = &profiles.u3;
    GridField::from_fn(n, FieldKind::Scalar, |x1, x2| {
        let du1 = local_derivative(|s| u1(s), x2, x2.abs());
        let y1 = wrap(x1 - t * u1(x2));
        let rho = y1.hypot(x2);
        let d1 = local_derivative(|s| u3(s, x2), y1, rho);
        let d2 = local_derivative(|s| u3(y1, s), x2, rho);
        (du1 * du1 + d1 * d1 + (d2 - t * du1 * d1).powi(2)).sqrt()
    })
}

/// Multi-resolution `W^{1,exponent}` classification of the shear flow at time
/// `t`. Grids with fewer than three cells across the cutoff core give an
/// inconclusive verdict.
pub fn shear_w1p_study(
    profiles: &ShearProfiles,
    t: f64,
    exponent: f64,
    resolutions: &[usize],
) -> Result<SobolevEstimate> {
    if !(t >= 0.0) {
        return Err(invalid(format!("shear study needs t >= 0, got {t}")));
    }
    let mags = resolutions
        .iter()
        .map(|&n| shear_gradient_magnitude(profiles, t, n))
        .collect::<Result<Vec<_>>>()?;
    let ladder = GradientLadder::new(mags)?;
    let mut est = ladder.estimate(exponent)?;
    let coarse = ladder.resolutions().first().copied().unwrap_or(0);
    if (SHEAR_CUTOFF.0 * coarse as f64 / 2.0) < 3.0 {
        est.verdict = crate::field::Verdict::Inconclusive;
    }
    Ok(est)
}

/// Lower cutoff of the origin gradient quadrature.
pub const ORIGIN_CUTOFF: f64 = 1e-6;

/// Quadrature of `integral_{[h,1]^2} y1 y2 / |y|^4 * min(1, y1 y2^(2t-1)) dy`
/// with `h = 1e-6`. The ratio `phi1/phi2` of the approximate flow stands in
/// for the transported data and is capped at the data's maximum 1.
pub fn origin_gradient_estimate(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid(format!("origin gradient estimate needs t > 0, got {t}")));
    }
    let tol = Tolerance {
        abs: 1e-12,
        rel: 1e-9,
        max_intervals: 400,
    };
    let e = 2.0 * t - 1.0;
    let est = integrate_rect_geometric(
        |y1, y2| {
            let r2 = y1 * y1 + y2 * y2;
            y1 * y2 / (r2 * r2) * (y1 * y2.powf(e)).min(1.0)
        },
        (ORIGIN_CUTOFF, 1.0),
        (ORIGIN_CUTOFF, 1.0),
        tol,
    )?;
    Ok(est.value)
}

/// `sin(2 theta)` as an initial scalar for [`toy_advect`].
pub fn sin_2theta_point(x: Point) -> f64 {
    sin_2theta(x[0], x[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn velocity_examples() {
        let off = ToyFlowParams::default();
        let v = toy_velocity([0.5, 0.5], off).unwrap();
        assert!((v[0] + 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((v[1] - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(toy_velocity([0.3, 1.0], off).unwrap(), [0.0, 0.0]);
        assert!(toy_velocity([0.3, 0.0], off).is_err());
        for flag in [false, true] {
            let p = ToyFlowParams { divergence_free: flag };
            let (x, h) = ([0.3, 0.4], 1e-5);
            let d1 = (toy_velocity([x[0] + h, x[1]], p).unwrap()[0]
                - toy_velocity([x[0] - h, x[1]], p).unwrap()[0])
                / (2.0 * h);
            let d2 = (toy_velocity([x[0], x[1] + h], p).unwrap()[1]
                - toy_velocity([x[0], x[1] - h], p).unwrap()[1])
                / (2.0 * h);
            assert!((d1 + d2 - toy_divergence(p)).abs() < 1e-6);
        }
    }

    #[test]
    fn trajectory_examples() {
        assert_eq!(toy_trajectory([0.2, 0.7], 0.0).unwrap(), [0.2, 0.7]);
        let x = toy_trajectory([0.5, 0.5], 2f64.ln()).unwrap();
        assert!((x[0] - 0.5f64.powf(1.5)).abs() < 1e-14);
        assert!((x[1] - 0.5f64.sqrt()).abs() < 1e-14);
        let rk = toy_trajectory_rk4([0.5, 0.5], 2f64.ln(), ToyFlowParams::default(), 1e-4).unwrap();
        assert!((rk[0] - x[0]).abs() < 1e-8 && (rk[1] - x[1]).abs() < 1e-8);
        for a in [0.1f64, 0.4] {
            let t: f64 = 0.8;
            let e = (-t).exp();
            let x = toy_trajectory([a, a], t).unwrap();
            assert!((x[0] - a.powf(2.0 - e)).abs() < 1e-14);
            assert!((x[1] - a.powf(e)).abs() < 1e-14);
            let g = gamma_curve(t, x[0]);
            assert!((g[1] - x[1]).abs() < 1e-12);
        }
        assert!(toy_trajectory([0.2, 1.0], 0.1).is_err());
        assert!(toy_trajectory([-0.1, 0.5], 0.1).is_err());
    }

    #[test]
    fn divergence_free_variant_moves_particles_differently() {
        let on = ToyFlowParams { divergence_free: true };
        let x = toy_trajectory_rk4([0.3, 0.3], 0.5, on, 1e-3).unwrap();
        let y = toy_trajectory([0.3, 0.3], 0.5).unwrap();
        assert!(x[1] > y[1]);
    }

    #[test]
    fn exponents_and_index() {
        assert_eq!(gamma_exponent(0.0), 1.0);
        assert_eq!(model_q(0.0), 2.0);
        let t = 2f64.ln();
        assert!((gamma_exponent(t) - 1.0 / 3.0).abs() < 1e-15);
        assert!((model_q(t) - 4.0 / 3.0).abs() < 1e-15);
        for k in 0..50 {
            let t = 0.1 * k as f64;
            assert!((model_q(t) - 1.0 - gamma_exponent(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn advected_scalar_examples() {
        let x = [0.3, 0.8];
        assert!((toy_advect(sin_2theta_point, 0.0, x).unwrap() - sin_2theta(0.3, 0.8)).abs() < 1e-15);
        for t in [0.2, 0.7, 1.5] {
            for x1 in [0.05, 0.3, 0.6] {
                let g = gamma_curve(t, x1);
                assert!((toy_advect(sin_2theta_point, t, g).unwrap() - 1.0).abs() < 1e-12);
                assert!((toy_advected_sin2theta(t, g).unwrap() - 1.0).abs() < 1e-12);
            }
            assert_eq!(toy_advect(sin_2theta_point, t, [0.0, 0.4]).unwrap(), 0.0);
            assert_eq!(toy_advected_sin2theta(t, [0.0, 0.4]).unwrap(), 0.0);
        }
        let a = toy_advect(sin_2theta_point, 0.4, [0.2, 0.3]).unwrap();
        let b = toy_advected_sin2theta(0.4, [0.2, 0.3]).unwrap();
        assert!((a - b).abs() < 1e-13);
        assert!(matches!(
            toy_advect(sin_2theta_point, 800.0, [0.2, 0.3]),
            Err(Error::OutOfResolution)
        ));
    }

    #[test]
    fn shear_flow_is_an_euler_solution() {
        let s = ShearProfiles::smooth();
        for t in [0.0, 0.5, 1.0] {
            for x in [[0.1, 0.2, 0.0], [-0.4, 0.7, 0.3], [0.9, -0.5, -0.2]] {
                assert!(shear_euler_residual(&s, t, x, 1e-5) < 1e-6);
            }
        }
        let v = shear_velocity(&s, 0.0, [0.2, 0.3, 0.0]);
        assert_eq!(v[1], 0.0);
        assert!((v[2] - (s.u3)(0.2, 0.3)).abs() < 1e-15);
        assert!(ShearProfiles::singular(0.5, 0.1).is_err());
        assert!(ShearProfiles::singular(2.0, 0.0).is_err());
    }

    #[test]
    fn origin_estimate_rejects_nonpositive_time() {
        assert!(origin_gradient_estimate(0.0).is_err());
        assert!(origin_gradient_estimate(0.25).unwrap() > 0.0);
    }

    proptest! {
        #[test]
        fn semigroup(x1 in 0.0f64..1.0, x2 in 0.01f64..0.99, s in -1.0f64..1.0, t in -1.0f64..1.0) {
            let a = toy_trajectory(toy_trajectory([x1, x2], s).unwrap(), t).unwrap();
            let b = toy_trajectory([x1, x2], s + t).unwrap();
            prop_assert!((a[0] - b[0]).abs() <= 1e-10 * (1.0 + b[0].abs()));
            prop_assert!((a[1] - b[1]).abs() <= 1e-10);
        }

        #[test]
        fn backward_inverts_forward(x1 in 0.01f64..0.99, x2 in 0.01f64..0.99, t in 0.0f64..2.0) {
            let y = toy_backward_map(toy_trajectory([x1, x2], t).unwrap(), t).unwrap();
            prop_assert!((y[0] - x1).abs() < 1e-10 && (y[1] - x2).abs() < 1e-10);
        }

        #[test]
        fn trajectories_keep_order(x1 in 0.0f64..1.0, a in 0.01f64..0.98, d in 1e-6f64..0.01, t in 0.0f64..3.0) {
            let lo = toy_trajectory([x1, a], t).unwrap();
            let hi = toy_trajectory([x1, a + d], t).unwrap();
            prop_assert!(lo[1] < hi[1]);
        }
    }
}
