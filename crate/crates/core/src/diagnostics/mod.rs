//! Quantitative probes: the key integral near the origin, level-set gaps
//! and their Sobolev lower bound, critical-index estimation and the
//! regularity-index reference curves.

mod index;
mod key;
mod level;

pub use index::{
    critical_index, critical_index_ladder, fit_theorem_c0, regularity_monitor, theorem_q,
    yudovich_q, CriticalIndex, CurveSource, RegularityIndexCurve, ResolutionPolicy, INDEX_SCHEME,
};
pub use key::{
    key_integral, key_integral_analytic, key_integral_indicator, key_residual, KeyIntegral,
    KeyResidual, SYMMETRY_TOLERANCE,
};
pub use level::{
    bilinear, gap_exponent, level_set_gap, level_set_gap_fn, lvlsob_lower_bound, LevelGapProfile,
};

