//! Initial vorticities. Every kind is specified on the first quadrant and
//! extended to the torus with odd symmetry about both axes.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::{odd_odd_extend, FieldKind, GridField, Quadrant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// `chi(r) * min(1, phi / r^beta)` with `phi` the angle to the nearest axis.
    TheoremBeta,
    /// `chi(r) * sin(2 theta)`.
    BahouriChemin,
    /// `chi(r) * (ln 1/r)^(-gamma) * sin(2 theta)`.
    H1Log,
    /// Finite sum of `a * sin(pi k1 x1) * sin(pi k2 x2)`.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineMode {
    pub amplitude: f64,
    pub k1: u32,
    pub k2: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    pub kind: DataKind,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_inner")]
    pub cutoff_inner: f64,
    #[serde(default = "default_outer")]
    pub cutoff_outer: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<SineMode>,
}

fn default_beta() -> f64 {
    0.25
}
fn default_gamma() -> f64 {
    1.0
}
fn default_inner() -> f64 {
    0.5
}
fn default_outer() -> f64 {
    2.0 / 3.0
}

/// Radius below which `h1_log` data is set to zero.
pub const H1_LOG_FLOOR: f64 = 1e-12;

impl DataSpec {
    fn with_kind(kind: DataKind) -> Self {
        Self {
            kind,
            beta: default_beta(),
            gamma: default_gamma(),
            cutoff_inner: default_inner(),
            cutoff_outer: default_outer(),
            modes: Vec::new(),
        }
    }

    pub fn theorem(beta: f64) -> Self {
        Self {
            beta,
            ..Self::with_kind(DataKind::TheoremBeta)
        }
    }

    pub fn bahouri_chemin() -> Self {
        Self::with_kind(DataKind::BahouriChemin)
    }

    pub fn h1_log(gamma: f64) -> Self {
        Self {
            gamma,
            ..Self::with_kind(DataKind::H1Log)
        }
    }

    pub fn custom(modes: Vec<SineMode>) -> Self {
        Self {
            modes,
            ..Self::with_kind(DataKind::Custom)
        }
    }

    /// `sin(pi x1) sin(pi x2)`, a steady Euler flow.
    pub fn taylor_green() -> Self {
        Self::custom(vec![SineMode {
            amplitude: 1.0,
            k1: 1,
            k2: 1,
        }])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(invalid(format!("beta must lie in (0, 1/2), got {}", self.beta)));
        }
        if !(self.gamma > 0.0) {
            return Err(invalid(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(0.0 < self.cutoff_inner && self.cutoff_inner < self.cutoff_outer && self.cutoff_outer < 1.0) {
            return Err(invalid(format!(
                "cutoffs must satisfy 0 < inner < outer < 1, got {} and {}",
                self.cutoff_inner, self.cutoff_outer
            )));
        }
        if self.kind == DataKind::Custom && self.modes.iter().any(|m| m.k1 == 0 || m.k2 == 0) {
            return Err(invalid("custom sine modes need nonzero wavenumbers"));
        }
        Ok(())
    }

    pub fn chi(&self, r: f64) -> f64 {
        smooth_cutoff(r, self.cutoff_inner, self.cutoff_outer)
    }

    /// Value at a point of the open first quadrant.
    pub fn quadrant_value(&self, x1: f64, x2: f64) -> f64 {
        let r = x1.hypot(x2);
        match self.kind {
            DataKind::TheoremBeta => {
                let chi = self.chi(r);
                if chi == 0.0 {
                    return 0.0;
                }
                let theta = x2.atan2(x1);
                let phi = theta.min(FRAC_PI_2 - theta).max(0.0);
                let edge = r.powf(self.beta);
                chi * if phi < edge { phi / edge } else { 1.0 }
            }
            DataKind::BahouriChemin => self.chi(r) * sin_2theta(x1, x2),
            DataKind::H1Log => {
                if r < H1_LOG_FLOOR {
                    return 0.0;
                }
                let chi = self.chi(r);
                if chi == 0.0 {
                    return 0.0;
                }
                chi * (1.0 / r).ln().powf(-self.gamma) * sin_2theta(x1, x2)
            }
            DataKind::Custom => self.modes.iter().fold(0.0, |acc, m| {
                acc + m.amplitude * (PI * m.k1 as f64 * x1).sin() * (PI * m.k2 as f64 * x2).sin()
            }),
        }
    }

    /// Value anywhere on the torus via the odd-odd extension.
    pub fn evaluate(&self, x1: f64, x2: f64) -> f64 {
        let s = x1.signum() * x2.signum();
        if x1 == 0.0 || x2 == 0.0 {
            return 0.0;
        }
        s * self.quadrant_value(x1.abs(), x2.abs())
    }
}

/// Quintic smoothstep: 1 for `r <= inner`, 0 for `r >= outer`.
pub fn smooth_cutoff(r: f64, inner: f64, outer: f64) -> f64 {
    if r <= inner {
        1.0
    } else if r >= outer {
        0.0
    } else {
        let s = (r - inner) / (outer - inner);
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// `sin(2 theta) = 2 x1 x2 / (x1^2 + x2^2)`.
#[inline]
pub fn sin_2theta(x1: f64, x2: f64) -> f64 {
    let r2 = x1 * x1 + x2 * x2;
    if r2 == 0.0 {
        0.0
    } else {
        2.0 * x1 * x2 / r2
    }
}

pub fn make_data(spec: &DataSpec, n: usize) -> Result<GridField> {
    spec.validate()?;
    let quadrant = Quadrant::from_fn(n, |x1, x2| spec.quadrant_value(x1, x2))?;
    let field = odd_odd_extend(&quadrant, FieldKind::Vorticity)?;
    let h = 2.0 / n as f64;
    if spec.kind == DataKind::TheoremBeta {
        let r = 0.5 * spec.cutoff_inner;
        let wedge = r.powf(1.0 + spec.beta);
        if wedge < 4.0 * h {
            return Ok(field.with_warning(format!(
                "n = {n} resolves the r^beta wedge at r = {r} with only {:.1} cells",
                wedge / h
            )));
        }
    }
    Ok(field)
}

/// Supremum Sobolev index `p0 = 1 + 1/(1 + beta)` of the theorem data.
pub fn classify_p0(spec: &DataSpec) -> Result<f64> {
    if spec.kind != DataKind::TheoremBeta {
        return Err(invalid("classify_p0 applies to theorem_beta data only"));
    }
    spec.validate()?;
    Ok(1.0 + 1.0 / (1.0 + spec.beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn theorem_data_examples() {
        let s = DataSpec::theorem(0.25);
        let (c, si) = (FRAC_PI_4.cos(), FRAC_PI_4.sin());
        assert_eq!(s.quadrant_value(0.25 * c, 0.25 * si), 1.0);
        assert_eq!(s.evaluate(0.3, 0.0), 0.0);
        assert_eq!(s.quadrant_value(0.3, 0.0), 0.0);
        // interior of the wedge: linear in the angle
        let (r, phi) = (0.1_f64, 0.2_f64);
        let v = s.quadrant_value(r * phi.cos(), r * phi.sin());
        assert!((v - phi / r.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn theorem_data_invariants() {
        let s = DataSpec::theorem(0.3);
        let f = make_data(&s, 128).unwrap();
        assert_eq!(f.mean(), 0.0);
        assert_eq!(f.odd_odd_defect(), 0.0);
        assert_eq!(f.max_abs(), 1.0);
        let q = f.first_quadrant();
        let h = q.half();
        for i in 0..h {
            for j in 0..h {
                assert!(q.get(i, j) >= 0.0);
                assert!((q.get(i, j) - q.get(j, i)).abs() < 1e-12);
                let (x1, x2) = (crate::field::coord(h + i, 2 * h), crate::field::coord(h + j, 2 * h));
                let r = x1.hypot(x2);
                let th = x2.atan2(x1);
                if r <= 0.5 && th >= r.powf(0.3) && th <= FRAC_PI_2 - r.powf(0.3) {
                    assert_eq!(q.get(i, j), 1.0);
                }
            }
        }
    }

    #[test]
    fn bahouri_chemin_diagonal_and_axes() {
        let s = DataSpec::bahouri_chemin();
        assert!((s.quadrant_value(0.2, 0.2) - 1.0).abs() < 1e-15);
        assert_eq!(s.evaluate(0.0, 0.3), 0.0);
        assert_eq!(s.evaluate(-0.3, 0.0), 0.0);
        let f = make_data(&s, 64).unwrap();
        assert_eq!(f.odd_odd_defect(), 0.0);
    }

    #[test]
    fn p0_and_validation() {
        assert!((classify_p0(&DataSpec::theorem(0.25)).unwrap() - 1.8).abs() < 1e-15);
        assert!((classify_p0(&DataSpec::theorem(1e-9)).unwrap() - 2.0).abs() < 1e-8);
        assert!(classify_p0(&DataSpec::bahouri_chemin()).is_err());
        assert!(make_data(&DataSpec::theorem(0.5), 32).is_err());
        assert!(make_data(&DataSpec::theorem(0.0), 32).is_err());
        let mut bad = DataSpec::theorem(0.2);
        bad.cutoff_outer = 0.4;
        assert!(bad.validate().is_err());
        assert!(!make_data(&DataSpec::theorem(0.25), 16).unwrap().warnings().is_empty());
        assert!(make_data(&DataSpec::theorem(0.25), 128).unwrap().warnings().is_empty());
    }

    #[test]
    fn cutoff_is_smooth_step() {
        assert_eq!(smooth_cutoff(0.4, 0.5, 2.0 / 3.0), 1.0);
        assert_eq!(smooth_cutoff(0.7, 0.5, 2.0 / 3.0), 0.0);
        let mid = smooth_cutoff(7.0 / 12.0, 0.5, 2.0 / 3.0);
        assert!((mid - 0.5).abs() < 1e-14);
    }

    #[test]
    fn h1_log_is_floored() {
        let s = DataSpec::h1_log(0.5);
        assert_eq!(s.quadrant_value(1e-13, 1e-13), 0.0);
        assert!(s.quadrant_value(0.01, 0.01) > 0.0);
        assert!(make_data(&s, 64).is_ok());
    }
}
