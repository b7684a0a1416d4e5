//! Periodic bicubic (4 x 4 Lagrange) interpolation in index coordinates.
//!
//! Index coordinate `s` corresponds to the cell-centre grid position, so the
//! physical coordinate is `x = -1 + (s + 1/2) h`.

use crate::field::GridField;
use crate::ode::Point;

#[inline]
fn weights(f: f64) -> [f64; 4] {
    let fm = f - 1.0;
    let fp = f + 1.0;
    let f2 = f - 2.0;
    [
        -f * fm * f2 / 6.0,
        fp * fm * f2 / 2.0,
        -fp * f * f2 / 2.0,
        fp * f * fm / 6.0,
    ]
}

#[inline]
fn stencil(s: f64, n: usize) -> ([usize; 4], f64) {
    let fl = s.floor();
    let base = (fl as i64 - 1).rem_euclid(n as i64) as usize;
    let mut idx = [0usize; 4];
    for (k, v) in idx.iter_mut().enumerate() {
        let i = base + k;
        *v = if i >= n { i - n } else { i };
    }
    (idx, s - fl)
}

/// Samples the `n x n` periodic array `v` at index position `(s1, s2)`. With
/// `monotone` the result is clamped to the range of the four nearest nodes.
#[inline]
pub fn sample(v: &[f64], n: usize, s1: f64, s2: f64, monotone: bool) -> f64 {
    let (ri, f1) = stencil(s1, n);
    let (cj, f2) = stencil(s2, n);
    let w1 = weights(f1);
    let w2 = weights(f2);
    let mut acc = 0.0;
    for a in 0..4 {
        let row = &v[ri[a] * n..ri[a] * n + n];
        let r = w2[0] * row[cj[0]] + w2[1] * row[cj[1]] + w2[2] * row[cj[2]] + w2[3] * row[cj[3]];
        acc += w1[a] * r;
    }
    if monotone {
        let c = [
            v[ri[1] * n + cj[1]],
            v[ri[1] * n + cj[2]],
            v[ri[2] * n + cj[1]],
            v[ri[2] * n + cj[2]],
        ];
        let lo = c.iter().fold(f64::INFINITY, |m, x| m.min(*x));
        let hi = c.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x));
        acc.clamp(lo, hi)
    } else {
        acc
    }
}

/// Index coordinates of a physical point.
#[inline]
pub fn to_index(x: Point, n: usize) -> Point {
    let scale = n as f64 / 2.0;
    [(x[0] + 1.0) * scale - 0.5, (x[1] + 1.0) * scale - 0.5]
}

/// Bicubic value of a grid field at a physical point of the torus.
pub fn interpolate(field: &GridField, x: Point, monotone: bool) -> f64 {
    let s = to_index(x, field.n());
    sample(field.values(), field.n(), s[0], s[1], monotone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldKind;
    use std::f64::consts::PI;

    #[test]
    fn reproduces_nodes_and_cubics() {
        let n = 16;
        let f = GridField::from_fn(n, FieldKind::Scalar, |x, y| x + 2.0 * y).unwrap();
        assert!((sample(f.values(), n, 3.0, 5.0, false) - f.get(3, 5)).abs() < 1e-14);
        // interior cubic in each variable, away from the periodic seam
        let g = GridField::from_fn(n, FieldKind::Scalar, |x, y| x * x * x - y * y).unwrap();
        for &(a, b) in &[(0.1, -0.2), (0.33, 0.41)] {
            assert!((interpolate(&g, [a, b], false) - (a * a * a - b * b)).abs() < 1e-13);
        }
    }

    #[test]
    fn periodic_smooth_accuracy_is_fourth_order() {
        let err = |n: usize| {
            let f = GridField::from_fn(n, FieldKind::Scalar, |x, y| (PI * x).sin() * (PI * y).cos()).unwrap();
            let mut worst = 0.0f64;
            for k in 0..50 {
                let x = [-0.97 + 0.039 * k as f64, 0.61 - 0.033 * k as f64];
                let exact = (PI * x[0]).sin() * (PI * x[1]).cos();
                worst = worst.max((interpolate(&f, x, false) - exact).abs());
            }
            worst
        };
        let r = err(32) / err(64);
        assert!(r > 12.0, "ratio {r}");
    }

    #[test]
    fn monotone_stays_within_neighbours() {
        let n = 16;
        let f = GridField::from_fn(n, FieldKind::Scalar, |x, _| if x > 0.0 { 1.0 } else { 0.0 }).unwrap();
        for k in 0..200 {
            let s = k as f64 * 0.08;
            let v = sample(f.values(), n, s, 2.5, true);
            assert!((0.0..=1.0).contains(&v));
        }
        let overshoot = (0..200)
            .map(|k| sample(f.values(), n, k as f64 * 0.08, 2.5, false))
            .fold(0.0f64, f64::max);
        assert!(overshoot > 1.0);
    }
}
