//! Numerical laboratory for continuous loss of `W^{1,p}` regularity in 2D Euler
//! flows with bounded (Yudovich-class) vorticity.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: torus grids on `[-1,1)^2`, spectral Biot–Savart inversion,
//!   gradients, `L^p`/`W^{1,p}` norms and the multi-resolution Sobolev estimator.
//! * [`exact`]: closed-form model flows (the logarithmic hyperbolic toy field,
//!   the cusp curve, shear flows, and the origin velocity-gradient integral).
//! * [`data`]: constructors for the odd-odd initial vorticities.
//! * [`solver`]: semi-Lagrangian vorticity transport and flow-map integration.
//! * [`diagnostics`]: key integral, level-set gaps, critical-index estimation
//!   and regularity-index reference curves.
//! * [`cli`]: experiment configuration, recipes and CSV/YLF output.

// NaN must fail every range check, so negated comparisons are intentional
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod field;
pub mod ode;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use field::{FieldKind, GridField, GradientScheme, SobolevEstimate, VelocityField, Verdict};
