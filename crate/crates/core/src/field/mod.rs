//! Uniform cell-centred grids on the periodic square `[-1,1)^2`.
//!
//! Sample `(i, j)` sits at `x1 = -1 + (i + 1/2) h`, `x2 = -1 + (j + 1/2) h`
//! with `h = 2/n`, stored row-major with `x2` varying fastest. No sample lies
//! on an axis, so the origin is never a grid point.

mod io;
mod norms;
mod sobolev;
mod spectral;

pub use io::{decode_ylf, encode_ylf, read_ylf, write_ylf, YLF_HEADER_LEN, YLF_MAGIC};
pub use norms::{
    gradient, gradient_magnitude, lp_norm, lp_norm_normalized, power_sum, sup_norm, w1p_norm,
    GradientScheme,
};
pub use sobolev::{GradientLadder, SobolevEstimate, Verdict, DIVERGENT_SLOPE, FINITE_SLOPE};
pub use spectral::{biot_savart, curl, divergence, laplacian_inverse, spectral_gradient};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance on the grid mean of a vorticity field.
pub const MEAN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Vorticity,
    Scalar,
    Component,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    n: usize,
    values: Vec<f64>,
    kind: FieldKind,
    warnings: Vec<String>,
}

/// Cell-centre coordinate of index `i` on an `n`-point axis.
#[inline]
pub fn coord(i: usize, n: usize) -> f64 {
    -1.0 + (i as f64 + 0.5) * (2.0 / n as f64)
}

pub fn check_resolution(n: usize) -> Result<()> {
    if n < 16 || !n.is_power_of_two() {
        return Err(invalid(format!(
            "resolution must be a power of two and at least 16, got {n}"
        )));
    }
    Ok(())
}

impl GridField {
    pub fn new(n: usize, values: Vec<f64>, kind: FieldKind) -> Result<Self> {
        check_resolution(n)?;
        if values.len() != n * n {
            return Err(invalid(format!(
                "expected {} samples for n = {n}, got {}",
                n * n,
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let field = Self {
            n,
            values,
            kind,
            warnings: Vec::new(),
        };
        if kind == FieldKind::Vorticity {
            let mean = field.mean();
            if mean.abs() > MEAN_TOLERANCE {
                return Err(Error::NotMeanZero { mean });
            }
        }
        Ok(field)
    }

    pub fn zeros(n: usize, kind: FieldKind) -> Result<Self> {
        Self::new(n, vec![0.0; n * n], kind)
    }

    /// Samples `f(x1, x2)` at every cell centre.
    pub fn from_fn<F>(n: usize, kind: FieldKind, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        check_resolution(n)?;
        let mut values = vec![0.0; n * n];
        values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let x1 = coord(i, n);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x1, coord(j, n));
            }
        });
        Self::new(n, values, kind)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        2.0 / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.h() * self.h()
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.warnings.push(warning.into());
        self
    }

    /// Re-tags the field, re-running the checks of the new kind.
    pub fn with_kind(self, kind: FieldKind) -> Result<Self> {
        let warnings = self.warnings;
        let mut field = Self::new(self.n, self.values, kind)?;
        field.warnings = warnings;
        Ok(field)
    }

    /// Grid mean, summed over mirror pairs `(x1, x2)`, `(-x1, x2)` so that a
    /// field odd in `x1` has mean exactly zero.
    pub fn mean(&self) -> f64 {
        let n = self.n;
        let half = n / 2;
        let row_sums: Vec<f64> = (0..half)
            .into_par_iter()
            .map(|i| {
                let a = &self.values[i * n..(i + 1) * n];
                let b = &self.values[(n - 1 - i) * n..(n - i) * n];
                a.iter().zip(b).map(|(x, y)| x + y).sum::<f64>()
            })
            .collect();
        row_sums.iter().sum::<f64>() / (n * n) as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn map<F: Fn(f64) -> f64 + Sync>(&self, kind: FieldKind, f: F) -> Result<Self> {
        let values = self.values.par_iter().map(|&v| f(v)).collect();
        Self::new(self.n, values, kind)
    }

    /// Largest violation of `f(-x1, x2) = -f(x1, x2) = f(x1, -x2)`.
    pub fn odd_odd_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                worst = worst
                    .max((v + self.get(n - 1 - i, j)).abs())
                    .max((v + self.get(i, n - 1 - j)).abs());
            }
        }
        worst
    }

    /// Samples with both coordinates positive, as a quadrant field.
    pub fn first_quadrant(&self) -> Quadrant {
        let half = self.n / 2;
        let mut values = Vec::with_capacity(half * half);
        for i in 0..half {
            for j in 0..half {
                values.push(self.get(half + i, half + j));
            }
        }
        Quadrant { half, values }
    }
}

/// Samples of a field on the open first quadrant `(0,1)^2`, laid out like the
/// upper-right block of a torus grid with `2 * half` points per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrant {
    half: usize,
    values: Vec<f64>,
}

impl Quadrant {
    pub fn new(half: usize, values: Vec<f64>) -> Result<Self> {
        check_resolution(2 * half)?;
        if values.len() != half * half {
            return Err(invalid(format!(
                "quadrant with {half} points per axis needs {} samples",
                half * half
            )));
        }
        Ok(Self { half, values })
    }

    /// Samples `f` at the first-quadrant cell centres of an `n`-point torus grid.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        check_resolution(n)?;
        let half = n / 2;
        let mut values = vec![0.0; half * half];
        values.par_chunks_mut(half).enumerate().for_each(|(i, row)| {
            let x1 = coord(half + i, n);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x1, coord(half + j, n));
            }
        });
        Ok(Self { half, values })
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.half + j]
    }
}

/// Extends quadrant samples to the torus with `f(-x1,x2) = -f(x1,x2) = f(x1,-x2)`.
/// Mirrored samples are exact negations, so the mean is exactly zero.
pub fn odd_odd_extend(quadrant: &Quadrant, kind: FieldKind) -> Result<GridField> {
    let half = quadrant.half;
    let n = 2 * half;
    let mut values = vec![0.0; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let (qi, si) = if i >= half {
            (i - half, 1.0)
        } else {
            (half - 1 - i, -1.0)
        };
        for (j, v) in row.iter_mut().enumerate() {
            let (qj, sj) = if j >= half {
                (j - half, 1.0)
            } else {
                (half - 1 - j, -1.0)
            };
            *v = si * sj * quadrant.get(qi, qj);
        }
    });
    GridField::new(n, values, kind)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub u1: GridField,
    pub u2: GridField,
}

impl VelocityField {
    pub fn new(u1: GridField, u2: GridField) -> Result<Self> {
        if u1.n() != u2.n() {
            return Err(invalid("velocity components have different resolutions"));
        }
        Ok(Self { u1, u2 })
    }

    pub fn n(&self) -> usize {
        self.u1.n()
    }

    pub fn max_speed(&self) -> f64 {
        self.u1
            .values()
            .iter()
            .zip(self.u2.values())
            .fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// `(1/2) * integral of |u|^2` with midpoint quadrature.
    pub fn kinetic_energy(&self) -> f64 {
        let n = self.n();
        let rows: Vec<f64> = self
            .u1
            .values()
            .par_chunks(n)
            .zip(self.u2.values().par_chunks(n))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * x + y * y).sum::<f64>())
            .collect();
        0.5 * rows.iter().sum::<f64>() * self.u1.cell_area()
    }

    pub fn negated(&self) -> Result<Self> {
        Self::new(
            self.u1.map(FieldKind::Component, |v| -v)?,
            self.u2.map(FieldKind::Component, |v| -v)?,
        )
    }
}
