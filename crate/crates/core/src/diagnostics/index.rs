//! Critical Sobolev index estimation and regularity-index reference curves.

use serde::{Deserialize, Serialize};

use crate::data::{make_data, DataSpec};
use crate::error::{invalid, Result};
use crate::field::{
    gradient_magnitude, GradientLadder, GradientScheme, GridField, SobolevEstimate, Verdict,
    DIVERGENT_SLOPE, FINITE_SLOPE,
};
use crate::solver::{run, RunRecord, SolverConfig};

/// Gradient scheme used by the index estimator. Central differences keep
/// the error of a non-smooth field local, where spectral derivatives of a
/// kinked field ring across the whole torus.
pub const INDEX_SCHEME: GradientScheme = GradientScheme::CentralDifference;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalIndex {
    /// Zero of the increment slope as a function of `p`; `+inf` when every
    /// probed exponent is finite.
    pub p_hat: f64,
    /// Band of exponents whose verdict is inconclusive around `p_hat`,
    /// widened to the whole mixed range when verdicts are not monotone.
    pub lo: f64,
    pub hi: f64,
    /// Range of the zeros of the slopes from single pairs of increments.
    /// Lattice effects at the coarser grids make it much wider than `lo..hi`.
    pub spread_lo: f64,
    pub spread_hi: f64,
    /// False when verdicts along the sorted `p` grid are not a run of
    /// finite followed by a run of divergent.
    pub monotone: bool,
    pub estimates: Vec<SobolevEstimate>,
}

impl CriticalIndex {
    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }
}

fn bisect_root<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, target: f64) -> Result<f64> {
    // f(a) < target <= f(b)
    for _ in 0..40 {
        if b - a < 1e-5 {
            break;
        }
        let c = 0.5 * (a + b);
        if f(c)? >= target {
            b = c;
        } else {
            a = c;
        }
    }
    Ok(0.5 * (a + b))
}

/// Root of `g(p) = target` inside `[a, b]`; clamped to the end points when
/// `g` does not change sides.
fn bracketed_root<F: Fn(f64) -> Result<f64>>(g: &F, a: f64, b: f64, target: f64) -> Result<f64> {
    let (ga, gb) = (g(a)?, g(b)?);
    if ga >= target {
        return Ok(a);
    }
    if gb < target {
        return Ok(b);
    }
    bisect_root(g, a, b, target)
}

/// Critical index of prepared gradient magnitudes.
pub fn critical_index_ladder(ladder: &GradientLadder, p_grid: &[f64]) -> Result<CriticalIndex> {
    if ladder.resolutions().len() < 3 {
        return Err(invalid("critical index needs at least three resolutions"));
    }
    if ladder.resolutions().windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(invalid("critical index resolutions must double"));
    }
    let mut ps = p_grid.to_vec();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    if ps.len() < 2 || ps[0] <= 0.0 {
        return Err(invalid("need at least two positive exponents"));
    }
    let estimates = ps
        .iter()
        .map(|&p| ladder.estimate(p))
        .collect::<Result<Vec<_>>>()?;
    let slopes: Vec<f64> = estimates.iter().map(|e| e.slope).collect();
    let first_non_finite = slopes.iter().position(|s| *s >= 0.0);
    let last_non_divergent = slopes.iter().rposition(|s| *s <= 0.0);
    let monotone = estimates
        .windows(2)
        .all(|w| !(w[0].verdict == Verdict::Divergent && w[1].verdict != Verdict::Divergent))
        && estimates
            .windows(2)
            .all(|w| !(w[0].verdict != Verdict::Finite && w[1].verdict == Verdict::Finite));

    let slope = |p: f64| ladder.slope(p);
    let Some(k) = first_non_finite else {
        let top = *ps.last().unwrap();
        return Ok(CriticalIndex {
            p_hat: f64::INFINITY,
            lo: top,
            hi: f64::INFINITY,
            spread_lo: top,
            spread_hi: f64::INFINITY,
            monotone,
            estimates,
        });
    };
    if k == 0 {
        return Ok(CriticalIndex {
            p_hat: ps[0],
            lo: 0.0,
            hi: ps[0],
            spread_lo: 0.0,
            spread_hi: ps[0],
            monotone,
            estimates,
        });
    }
    let (a, b) = (ps[k - 1], ps[k]);
    let p_hat = bisect_root(&slope, a, b, 0.0)?;

    let (wa, wb) = (ps[0], *ps.last().unwrap());
    let mut lo = bracketed_root(&slope, wa, p_hat, FINITE_SLOPE)?;
    let mut hi = bracketed_root(&slope, p_hat, wb, DIVERGENT_SLOPE)?;
    let (mut spread_lo, mut spread_hi) = (p_hat, p_hat);
    let pairs = ladder.resolutions().len() - 2;
    for m in 0..pairs {
        let local = |p: f64| -> Result<f64> { Ok(ladder.local_slopes(p)?[m]) };
        let r = bracketed_root(&local, wa, wb, 0.0)?;
        spread_lo = spread_lo.min(r);
        spread_hi = spread_hi.max(r);
    }
    if !monotone {
        if let Some(j) = last_non_divergent {
            lo = lo.min(ps[k]);
            hi = hi.max(ps[j]);
        }
    }
    Ok(CriticalIndex {
        p_hat,
        lo,
        hi,
        spread_lo,
        spread_hi,
        monotone,
        estimates,
    })
}

/// Builds the field at every resolution, takes central-difference gradient
/// magnitudes and locates the exponent where `W^{1,p}` membership is lost.
pub fn critical_index<G>(generator: G, p_grid: &[f64], resolutions: &[usize]) -> Result<CriticalIndex>
where
    G: Fn(usize) -> Result<GridField>,
{
    let mags = resolutions
        .iter()
        .map(|&n| gradient_magnitude(&generator(n)?, INDEX_SCHEME))
        .collect::<Result<Vec<_>>>()?;
    critical_index_ladder(&GradientLadder::new(mags)?, p_grid)
}

/// Riccati bound `p / (1 + C M p t)`, the solution of `q' = -C M q^2`.
pub fn yudovich_q(p: f64, c_times_m: f64, t: f64) -> f64 {
    p / (1.0 + c_times_m * p * t)
}

/// `1 + 1 / (1/(p0 - 1) + c0 t)`.
pub fn theorem_q(p0: f64, c0: f64, t: f64) -> f64 {
    1.0 + 1.0 / (1.0 / (p0 - 1.0) + c0 * t)
}

/// Least-squares `c0` fitting `theorem_q(p0, c0, t)` to measured indices.
/// Points with `q <= 1` or `q >= p0` carry no information and are skipped.
pub fn fit_theorem_c0(p0: f64, times: &[f64], q: &[f64]) -> Option<f64> {
    // 1/(q - 1) - 1/(p0 - 1) = c0 t is linear in c0
    let (mut stt, mut sty) = (0.0, 0.0);
    for (&t, &v) in times.iter().zip(q) {
        if t > 0.0 && v > 1.0 && v < p0 {
            let y = 1.0 / (v - 1.0) - 1.0 / (p0 - 1.0);
            stt += t * t;
            sty += t * y;
        }
    }
    (stt > 0.0).then(|| sty / stt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSource {
    Theorem,
    Model,
    YudovichBound,
    Measured,
}

impl CurveSource {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveSource::Theorem => "theorem",
            CurveSource::Model => "model",
            CurveSource::YudovichBound => "yudovich_bound",
            CurveSource::Measured => "measured",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityIndexCurve {
    pub times: Vec<f64>,
    pub q_values: Vec<f64>,
    pub q_lo: Vec<f64>,
    pub q_hi: Vec<f64>,
    pub source: CurveSource,
}

impl RegularityIndexCurve {
    fn exact(times: &[f64], source: CurveSource, q: impl Fn(f64) -> f64) -> Result<Self> {
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("curve times must be strictly increasing"));
        }
        let q_values: Vec<f64> = times.iter().map(|&t| q(t)).collect();
        Ok(Self {
            times: times.to_vec(),
            q_lo: q_values.clone(),
            q_hi: q_values.clone(),
            q_values,
            source,
        })
    }

    pub fn theorem(p0: f64, c0: f64, times: &[f64]) -> Result<Self> {
        if !(p0 > 1.0 && p0 < 2.0) || !(c0 > 0.0) {
            return Err(invalid(format!("theorem curve needs p0 in (1,2) and c0 > 0, got {p0}, {c0}")));
        }
        Self::exact(times, CurveSource::Theorem, |t| theorem_q(p0, c0, t))
    }

    pub fn model(times: &[f64]) -> Result<Self> {
        Self::exact(times, CurveSource::Model, crate::exact::model_q)
    }

    pub fn yudovich(p: f64, c_times_m: f64, times: &[f64]) -> Result<Self> {
        if !(p > 0.0 && p <= 2.0) || !(c_times_m >= 0.0) {
            return Err(invalid(format!("Riccati curve needs p in (0,2] and CM >= 0, got {p}, {c_times_m}")));
        }
        Self::exact(times, CurveSource::YudovichBound, |t| yudovich_q(p, c_times_m, t))
    }
}

/// How [`regularity_monitor`] obtains the resolution ladder: the run's data
/// is regenerated at each resolution and evolved with the run's settings,
/// with `dt` scaled by `n_run / n` to keep the Courant number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionPolicy {
    pub resolutions: Vec<usize>,
    pub data: DataSpec,
}

/// Measured index curve at the snapshot times of `record`.
pub fn regularity_monitor(
    record: &RunRecord,
    p_grid: &[f64],
    policy: &ResolutionPolicy,
) -> Result<(RegularityIndexCurve, Vec<CriticalIndex>)> {
    if record.snapshots.len() < 2 {
        return Err(invalid("regularity monitor needs at least two snapshots"));
    }
    let times: Vec<f64> = record.snapshots.iter().map(|s| s.0).collect();
    let mut ladders: Vec<Vec<GridField>> = vec![Vec::new(); times.len()];
    for &n in &policy.resolutions {
        let runs_here;
        let rec = if n == record.config.n {
            record
        } else {
            let mut cfg: SolverConfig = record.config.clone();
            cfg.dt = record.config.dt * record.config.n as f64 / n as f64;
            cfg.n = n;
            cfg.snapshot_times = times.clone();
            runs_here = run(&make_data(&policy.data, n)?, &cfg)?;
            &runs_here
        };
        for (k, &t) in times.iter().enumerate() {
            let snap = rec
                .snapshot_at(t)
                .ok_or_else(|| invalid(format!("run at n = {n} lacks a snapshot at t = {t}")))?;
            ladders[k].push(gradient_magnitude(snap, INDEX_SCHEME)?);
        }
    }
    let indices = ladders
        .into_iter()
        .map(|mags| critical_index_ladder(&GradientLadder::new(mags)?, p_grid))
        .collect::<Result<Vec<_>>>()?;
    let curve = RegularityIndexCurve {
        times,
        q_values: indices.iter().map(|c| c.p_hat).collect(),
        q_lo: indices.iter().map(|c| c.lo).collect(),
        q_hi: indices.iter().map(|c| c.hi).collect(),
        source: CurveSource::Measured,
    };
    Ok((curve, indices))
}
