//! Angular positions of level sets on circles around the origin, and the
//! resulting lower bound for `||grad f||_p^p`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::GridField;
use crate::ode::Point;
use crate::solver::to_index;

/// Crossing angles of one level on circles of decreasing radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelGapProfile {
    pub radii: Vec<f64>,
    /// First angle from the `x1` axis at which the level is reached.
    pub theta_star: Vec<f64>,
    /// Last such angle before the `x2` axis.
    pub theta_star_hi: Vec<f64>,
    pub level: f64,
    pub tol: f64,
    /// Probed radii where the level was never reached or the circle was
    /// below grid resolution.
    pub omitted: Vec<f64>,
}

impl LevelGapProfile {
    /// Angular distance from the level set to the nearer axis.
    pub fn gaps(&self) -> Vec<f64> {
        self.theta_star
            .iter()
            .zip(&self.theta_star_hi)
            .map(|(lo, hi)| lo.min(FRAC_PI_2 - hi))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Periodic bilinear interpolation of a grid field.
pub fn bilinear(field: &GridField, x: Point) -> f64 {
    let n = field.n();
    let s = to_index(x, n);
    let (f1, f2) = (s[0].floor(), s[1].floor());
    let (w1, w2) = (s[0] - f1, s[1] - f2);
    let wrap = |k: f64| (k as i64).rem_euclid(n as i64) as usize;
    let (i0, j0) = (wrap(f1), wrap(f2));
    let (i1, j1) = ((i0 + 1) % n, (j0 + 1) % n);
    (1.0 - w1) * ((1.0 - w2) * field.get(i0, j0) + w2 * field.get(i0, j1))
        + w1 * ((1.0 - w2) * field.get(i1, j0) + w2 * field.get(i1, j1))
}

/// Locates the first angle (scanning in the direction of `order`) where
/// `g(theta) >= target`, refining sampled crossings by bisection. When no
/// sample reaches the target, the largest sample is refined by
/// golden-section search so that narrow peaks are not missed.
fn crossing<G: Fn(f64) -> f64>(g: &G, thetas: &[f64], values: &[f64], target: f64, forward: bool) -> Option<f64> {
    let m = thetas.len();
    let order: Vec<usize> = if forward { (0..m).collect() } else { (0..m).rev().collect() };
    let bisect = |mut a: f64, mut b: f64| {
        // g(a) < target <= g(b)
        for _ in 0..60 {
            let c = 0.5 * (a + b);
            if g(c) >= target {
                b = c;
            } else {
                a = c;
            }
        }
        b
    };
    let edge = if forward { 0.0 } else { FRAC_PI_2 };
    for (pos, &k) in order.iter().enumerate() {
        if values[k] >= target {
            let prev = if pos == 0 { edge } else { thetas[order[pos - 1]] };
            if g(prev) >= target {
                return Some(prev);
            }
            return Some(bisect(prev, thetas[k]));
        }
    }
    // no sample reached the level: look for a narrow peak
    let (kmax, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    let lo = if kmax == 0 { 0.0 } else { thetas[kmax - 1] };
    let hi = if kmax + 1 == m { FRAC_PI_2 } else { thetas[kmax + 1] };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    for _ in 0..80 {
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    let peak = 0.5 * (a + b);
    if g(peak) < target {
        return None;
    }
    Some(if forward { bisect(lo, peak) } else { bisect(hi, peak) })
}

/// Level-set angles of an arbitrary function of the first quadrant, with
/// `samples` equally spaced angles per circle.
pub fn level_set_gap_fn<F: Fn(Point) -> f64>(
    f: F,
    radii: &[f64],
    level: f64,
    tol: f64,
    samples: usize,
) -> Result<LevelGapProfile> {
    if samples < 2 {
        return Err(invalid("need at least two angular samples"));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let target = level - tol;
    let dth = FRAC_PI_2 / samples as f64;
    let thetas: Vec<f64> = (0..samples).map(|k| (k as f64 + 0.5) * dth).collect();
    let mut out = LevelGapProfile {
        radii: Vec::new(),
        theta_star: Vec::new(),
        theta_star_hi: Vec::new(),
        level,
        tol,
        omitted: Vec::new(),
    };
    for r in sorted {
        if !(r > 0.0) {
            return Err(invalid(format!("radii must be positive, got {r}")));
        }
        let g = |th: f64| f([r * th.cos(), r * th.sin()]);
        let values: Vec<f64> = thetas.iter().map(|&t| g(t)).collect();
        match (
            crossing(&g, &thetas, &values, target, true),
            crossing(&g, &thetas, &values, target, false),
        ) {
            (Some(lo), Some(hi)) => {
                out.radii.push(r);
                out.theta_star.push(lo.max(f64::MIN_POSITIVE));
                out.theta_star_hi.push(hi.max(lo));
            }
            _ => out.omitted.push(r),
        }
    }
    Ok(out)
}

/// Level-set angles of a grid field with `4n` angular samples per circle and
/// bilinear interpolation. Circles of radius below two cells are omitted.
pub fn level_set_gap(f: &GridField, radii: &[f64], level: f64, tol: f64) -> Result<LevelGapProfile> {
    let r_min = 2.0 * f.h();
    let (kept, below): (Vec<f64>, Vec<f64>) = radii.iter().partition(|r| **r >= r_min);
    let mut profile = level_set_gap_fn(|x| bilinear(f, x), &kept, level, tol, 4 * f.n())?;
    profile.omitted.extend(below);
    Ok(profile)
}

/// `integral_0^{r0} r^(1-p) theta*(r)^(1-p) dr` with unit constant, where
/// `theta*` is the profile's gap to the nearer axis. Trapezoid rule over the
/// profile radii, plus `r_min * g(r_min)` for the part below the smallest
/// radius.
pub fn lvlsob_lower_bound(profile: &LevelGapProfile, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid(format!("lower bound needs p >= 1, got {p}")));
    }
    if profile.is_empty() {
        return Err(invalid("empty level-gap profile"));
    }
    let mut pts: Vec<(f64, f64)> = profile
        .radii
        .iter()
        .zip(profile.gaps())
        .map(|(&r, g)| (r, (r * g).powf(1.0 - p)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tail = pts[0].0 * pts[0].1;
    let body: f64 = pts
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    Ok(tail + body)
}

/// Least-squares exponent `b` of `theta* ~ A r^b` over the profile.
pub fn gap_exponent(profile: &LevelGapProfile) -> Result<f64> {
    if profile.radii.len() < 2 {
        return Err(invalid("need at least two radii for an exponent fit"));
    }
    let pts: Vec<(f64, f64)> = profile
        .radii
        .iter()
        .zip(profile.gaps())
        .map(|(r, g)| (r.ln(), g.ln()))
        .collect();
    Ok(ls_slope(&pts))
}

pub(crate) fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
