//! Multi-resolution classification of `W^{1,p}` membership.
//!
//! For a field whose gradient is `L^p`-integrable the discrete quantity
//! `P(n) = ||grad f||_p^p` converges as `n` grows, and its successive
//! increments `P(2n) - P(n)` decay like a negative power of `n`. At the
//! critical exponent the increments stay constant (logarithmic divergence)
//! and above it they grow. The reported slope is the log-log slope of the
//! increment magnitudes against `n`, so the critical exponent is the zero
//! crossing of the slope as a function of `p`.

use serde::{Deserialize, Serialize};

use super::{power_sum, GridField};
use crate::error::{invalid, Result};

/// Increments decaying faster than this slope classify as finite.
pub const FINITE_SLOPE: f64 = -0.01;
/// Increments growing faster than this slope classify as divergent.
pub const DIVERGENT_SLOPE: f64 = 0.01;
/// Increments below this fraction of the norm count as converged.
const CONVERGED_INCREMENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Finite,
    Divergent,
    Inconclusive,
}

impl Verdict {
    pub fn from_slope(slope: f64) -> Self {
        if slope < FINITE_SLOPE {
            Verdict::Finite
        } else if slope > DIVERGENT_SLOPE {
            Verdict::Divergent
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Finite => "finite",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevEstimate {
    pub p: f64,
    pub resolutions: Vec<usize>,
    /// `||grad f||_{L^p}` at each resolution.
    pub norms: Vec<f64>,
    pub slope: f64,
    pub verdict: Verdict,
}

impl SobolevEstimate {
    pub fn from_norms(p: f64, resolutions: Vec<usize>, norms: Vec<f64>) -> Result<Self> {
        if resolutions.len() != norms.len() {
            return Err(invalid("one norm per resolution is required"));
        }
        if resolutions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("resolutions must be strictly increasing"));
        }
        if norms.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(invalid("norms must be finite and nonnegative"));
        }
        let powers: Vec<f64> = norms.iter().map(|v| v.powf(p)).collect();
        let (slope, verdict) = if resolutions.len() < 3 {
            (f64::NAN, Verdict::Inconclusive)
        } else {
            let slope = increment_slope(&resolutions, &powers);
            (slope, Verdict::from_slope(slope))
        };
        Ok(Self {
            p,
            resolutions,
            norms,
            slope,
            verdict,
        })
    }

    /// Slopes from each consecutive pair of increments (finest last).
    pub fn local_slopes(&self) -> Vec<f64> {
        let powers: Vec<f64> = self.norms.iter().map(|v| v.powf(self.p)).collect();
        local_increment_slopes(&self.resolutions, &powers)
    }
}

fn increments(resolutions: &[usize], powers: &[f64]) -> Option<Vec<(f64, f64)>> {
    let scale = powers.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let incs: Vec<(f64, f64)> = resolutions
        .windows(2)
        .zip(powers.windows(2))
        .map(|(n, p)| {
            let mid = ((n[0] * n[1]) as f64).sqrt().ln();
            (mid, (p[1] - p[0]).abs())
        })
        .collect();
    if incs.iter().all(|(_, d)| *d <= CONVERGED_INCREMENT * scale) {
        None
    } else {
        Some(
            incs.into_iter()
                .map(|(m, d)| (m, d.max(f64::MIN_POSITIVE).ln()))
                .collect(),
        )
    }
}

/// Least-squares slope of `ln |P(n_{k+1}) - P(n_k)|` against `ln n`.
pub(crate) fn increment_slope(resolutions: &[usize], powers: &[f64]) -> f64 {
    let Some(pts) = increments(resolutions, powers) else {
        return f64::NEG_INFINITY;
    };
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

pub(crate) fn local_increment_slopes(resolutions: &[usize], powers: &[f64]) -> Vec<f64> {
    match increments(resolutions, powers) {
        None => vec![f64::NEG_INFINITY; resolutions.len().saturating_sub(2)],
        Some(pts) => pts
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect(),
    }
}

/// Pointwise gradient magnitudes of one field at several resolutions, ready
/// for repeated `W^{1,p}` evaluation at different exponents.
#[derive(Debug, Clone)]
pub struct GradientLadder {
    resolutions: Vec<usize>,
    magnitudes: Vec<GridField>,
}

impl GradientLadder {
    pub fn new(mut magnitudes: Vec<GridField>) -> Result<Self> {
        magnitudes.sort_by_key(|m| m.n());
        let resolutions: Vec<usize> = magnitudes.iter().map(|m| m.n()).collect();
        if resolutions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("resolutions must be distinct"));
        }
        Ok(Self {
            resolutions,
            magnitudes,
        })
    }

    pub fn resolutions(&self) -> &[usize] {
        &self.resolutions
    }

    pub fn power_sums(&self, p: f64) -> Result<Vec<f64>> {
        self.magnitudes.iter().map(|m| power_sum(m, p)).collect()
    }

    pub fn estimate(&self, p: f64) -> Result<SobolevEstimate> {
        let norms = self
            .power_sums(p)?
            .into_iter()
            .map(|s| s.powf(1.0 / p))
            .collect();
        SobolevEstimate::from_norms(p, self.resolutions.clone(), norms)
    }

    pub fn slope(&self, p: f64) -> Result<f64> {
        Ok(increment_slope(&self.resolutions, &self.power_sums(p)?))
    }

    pub fn local_slopes(&self, p: f64) -> Result<Vec<f64>> {
        Ok(local_increment_slopes(&self.resolutions, &self.power_sums(p)?))
    }
}
