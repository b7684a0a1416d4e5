//! The key integral `I(x) = (4/pi) * integral_{[2x1,1]x[2x2,1]} y1 y2 / |y|^4 omega(y) dy`
//! and the remainder of the velocity decomposition near the origin.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{GridField, VelocityField};
use crate::ode::Point;
use crate::quadrature::{integrate_rect_geometric, Tolerance};
use crate::solver::interpolate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyIntegral {
    pub value: f64,
    /// Set when `2 x_i >= 1` for some `i`; the value is then 0.
    pub empty_domain: bool,
}

impl KeyIntegral {
    const EMPTY: KeyIntegral = KeyIntegral {
        value: 0.0,
        empty_domain: true,
    };
}

fn check_point(x: Point) -> Result<bool> {
    if !(x[0] > 0.0 && x[1] > 0.0) || !x[0].is_finite() || !x[1].is_finite() {
        return Err(Error::Domain(format!(
            "key integral needs x1, x2 > 0, got ({}, {})",
            x[0], x[1]
        )));
    }
    Ok(2.0 * x[0] >= 1.0 || 2.0 * x[1] >= 1.0)
}

/// Antiderivative of the kernel: `d1 d2 F = y1 y2 / |y|^4`.
#[inline]
fn kernel_antiderivative(y1: f64, y2: f64) -> f64 {
    -0.25 * (y1 * y1 + y2 * y2).ln()
}

/// Closed form of `I(x)` for `omega = 1` on the unit square.
pub fn key_integral_indicator(x: Point) -> Result<KeyIntegral> {
    if check_point(x)? {
        return Ok(KeyIntegral::EMPTY);
    }
    let (a1, a2) = (2.0 * x[0], 2.0 * x[1]);
    let v = ((1.0 + a1 * a1) * (1.0 + a2 * a2) / (2.0 * (a1 * a1 + a2 * a2))).ln() / PI;
    Ok(KeyIntegral {
        value: v,
        empty_domain: false,
    })
}

/// `I(x)` for a gridded vorticity: piecewise-constant `omega` on cells, with
/// the kernel integrated exactly over each cell's part of the square.
pub fn key_integral(omega: &GridField, x: Point) -> Result<KeyIntegral> {
    if check_point(x)? {
        return Ok(KeyIntegral::EMPTY);
    }
    let n = omega.n();
    let half = n / 2;
    let h = omega.h();
    let (lo1, lo2) = (2.0 * x[0], 2.0 * x[1]);
    // first-quadrant cells [k h, (k+1) h] meeting the square
    let first = |lo: f64| ((lo / h).floor() as usize).min(half - 1);
    let (k1, k2) = (first(lo1), first(lo2));
    let edges = |k0: usize, lo: f64| -> Vec<f64> {
        (k0..=half)
            .map(|k| if k == k0 { lo } else { k as f64 * h })
            .collect()
    };
    let e1 = edges(k1, lo1);
    let e2 = edges(k2, lo2);
    let m2 = e2.len();
    let corners: Vec<f64> = e1
        .iter()
        .flat_map(|&a| e2.iter().map(move |&b| kernel_antiderivative(a, b)))
        .collect();
    let rows: Vec<f64> = (0..e1.len() - 1)
        .map(|a| {
            let i = half + k1 + a;
            (0..m2 - 1)
                .map(|b| {
                    let j = half + k2 + b;
                    let w = corners[(a + 1) * m2 + b + 1] - corners[a * m2 + b + 1]
                        - corners[(a + 1) * m2 + b]
                        + corners[a * m2 + b];
                    w * omega.get(i, j)
                })
                .sum::<f64>()
        })
        .collect();
    Ok(KeyIntegral {
        value: 4.0 / PI * rows.iter().sum::<f64>(),
        empty_domain: false,
    })
}

/// `I(x)` for an analytic vorticity by nested adaptive quadrature.
pub fn key_integral_analytic<F: Fn(f64, f64) -> f64>(omega: F, x: Point) -> Result<KeyIntegral> {
    if check_point(x)? {
        return Ok(KeyIntegral::EMPTY);
    }
    let est = integrate_rect_geometric(
        |y1, y2| {
            let r2 = y1 * y1 + y2 * y2;
            y1 * y2 / (r2 * r2) * omega(y1, y2)
        },
        (2.0 * x[0], 1.0),
        (2.0 * x[1], 1.0),
        Tolerance::default(),
    )?;
    Ok(KeyIntegral {
        value: 4.0 / PI * est.value,
        empty_domain: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyResidual {
    pub integral: f64,
    pub b1: f64,
    pub b2: f64,
    /// `|B_j| / (||omega||_inf ln(10 + x_{3-j}/x_j))`.
    pub bound_ratio_1: f64,
    pub bound_ratio_2: f64,
}

/// Symmetry defect accepted by [`key_residual`], relative to `max |omega|`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Remainders `B_j = (-1)^(j+1) u_j(x) / x_j - I(x)`.
///
/// With `u = (-d2, d1) Laplacian^{-1} omega`, vorticity that is positive in
/// the first quadrant drives a hyperbolic flow that stretches along `x1` and
/// compresses along `x2`, so `-u_2/x_2` and `u_1/x_1` carry the `+I` part.
pub fn key_residual(omega: &GridField, u: &VelocityField, x: Point) -> Result<KeyResidual> {
    if omega.n() != u.n() {
        return Err(invalid("vorticity and velocity resolutions differ"));
    }
    let sup = omega.max_abs();
    if omega.odd_odd_defect() > SYMMETRY_TOLERANCE * sup.max(f64::MIN_POSITIVE) {
        return Err(invalid("key residual requires vorticity odd in both coordinates"));
    }
    if !(x[0] <= 0.5 && x[1] <= 0.5) {
        return Err(Error::Domain(format!(
            "key residual needs coordinates in (0, 1/2], got ({}, {})",
            x[0], x[1]
        )));
    }
    let integral = key_integral(omega, x)?.value;
    let u1 = interpolate(&u.u1, x, false);
    let u2 = interpolate(&u.u2, x, false);
    let b1 = u1 / x[0] - integral;
    let b2 = -u2 / x[1] - integral;
    let ratio = |b: f64, num: f64, den: f64| {
        if sup == 0.0 {
            0.0
        } else {
            b.abs() / (sup * (10.0 + num / den).ln())
        }
    };
    Ok(KeyResidual {
        integral,
        b1,
        b2,
        bound_ratio_1: ratio(b1, x[1], x[0]),
        bound_ratio_2: ratio(b2, x[0], x[1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_data, DataSpec};
    use crate::field::{biot_savart, FieldKind};

    fn indicator(n: usize) -> GridField {
        // +1 on the open first quadrant, odd-odd extended
        GridField::from_fn(n, FieldKind::Vorticity, |a, b| a.signum() * b.signum()).unwrap()
    }

    #[test]
    fn empty_domain_is_flagged() {
        let w = indicator(32);
        let k = key_integral(&w, [0.5, 0.1]).unwrap();
        assert!(k.empty_domain && k.value == 0.0);
        assert!(key_integral_indicator([0.1, 0.7]).unwrap().empty_domain);
        assert!(key_integral(&w, [0.0, 0.1]).is_err());
    }

    #[test]
    fn indicator_example_and_quadrature_oracle() {
        let v = key_integral_indicator([0.25, 0.25]).unwrap().value;
        assert!((v - 1.5625f64.ln() / PI).abs() < 1e-15);
        let q = key_integral_analytic(|_, _| 1.0, [0.25, 0.25]).unwrap().value;
        assert!((q - v).abs() < 1e-8 * v);
        let g = key_integral(&indicator(64), [0.13, 0.31]).unwrap().value;
        let e = key_integral_indicator([0.13, 0.31]).unwrap().value;
        assert!((g - e).abs() < 1e-12 * e);
    }

    #[test]
    fn linear_and_signed() {
        let a = make_data(&DataSpec::theorem(0.25), 64).unwrap();
        let b = make_data(&DataSpec::bahouri_chemin(), 64).unwrap();
        let combo = GridField::new(
            64,
            a.values().iter().zip(b.values()).map(|(x, y)| 2.5 * x + y).collect(),
            FieldKind::Vorticity,
        )
        .unwrap();
        let x = [0.07, 0.11];
        let (ia, ib) = (key_integral(&a, x).unwrap().value, key_integral(&b, x).unwrap().value);
        let ic = key_integral(&combo, x).unwrap().value;
        assert!((ic - 2.5 * ia - ib).abs() < 1e-10);
        assert!(ia >= 0.0 && ib >= 0.0);
    }

    #[test]
    fn residual_rejects_asymmetric_data() {
        let w = GridField::from_fn(32, FieldKind::Vorticity, |a, _| (std::f64::consts::PI * a).sin()).unwrap();
        let u = biot_savart(&w).unwrap();
        assert!(key_residual(&w, &u, [0.1, 0.1]).is_err());
        let z = GridField::zeros(32, FieldKind::Vorticity).unwrap();
        let uz = biot_savart(&z).unwrap();
        let r = key_residual(&z, &uz, [0.1, 0.2]).unwrap();
        assert_eq!((r.b1, r.b2), (0.0, 0.0));
    }

    #[test]
    fn residual_is_bounded_relative_to_integral() {
        let w = make_data(&DataSpec::bahouri_chemin(), 256).unwrap();
        let u = biot_savart(&w).unwrap();
        let r = key_residual(&w, &u, [0.05, 0.05]).unwrap();
        assert!(r.integral > 0.5);
        assert!(r.bound_ratio_1 < 1.0 && r.bound_ratio_2 < 1.0, "{r:?}");
    }
}
