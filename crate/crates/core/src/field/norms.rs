//! Gradients and midpoint-rule norms. The midpoint rule on cell centres is
//! the single quadrature used for every norm comparison in the crate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{spectral_gradient, FieldKind, GridField};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientScheme {
    Spectral,
    CentralDifference,
}

pub fn gradient(f: &GridField, scheme: GradientScheme) -> Result<(GridField, GridField)> {
    match scheme {
        GradientScheme::Spectral => spectral_gradient(f),
        GradientScheme::CentralDifference => central_gradient(f),
    }
}

fn central_gradient(f: &GridField) -> Result<(GridField, GridField)> {
    let n = f.n();
    let inv = 1.0 / (2.0 * f.h());
    let v = f.values();
    let mut d1 = vec![0.0; n * n];
    let mut d2 = vec![0.0; n * n];
    d1.par_chunks_mut(n)
        .zip(d2.par_chunks_mut(n))
        .enumerate()
        .for_each(|(i, (r1, r2))| {
            let ip = (i + 1) % n;
            let im = (i + n - 1) % n;
            for j in 0..n {
                let jp = (j + 1) % n;
                let jm = (j + n - 1) % n;
                r1[j] = (v[ip * n + j] - v[im * n + j]) * inv;
                r2[j] = (v[i * n + jp] - v[i * n + jm]) * inv;
            }
        });
    Ok((
        GridField::new(n, d1, FieldKind::Component)?,
        GridField::new(n, d2, FieldKind::Component)?,
    ))
}

/// Pointwise `|grad f|`.
pub fn gradient_magnitude(f: &GridField, scheme: GradientScheme) -> Result<GridField> {
    let (d1, d2) = gradient(f, scheme)?;
    let values = d1
        .values()
        .par_iter()
        .zip(d2.values().par_iter())
        .map(|(a, b)| a.hypot(*b))
        .collect();
    GridField::new(f.n(), values, FieldKind::Scalar)
}

/// `sum |f|^p * cell_area`, accumulated row by row in a fixed order.
pub fn power_sum(f: &GridField, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(invalid(format!("norm exponent must be positive, got {p}")));
    }
    let n = f.n();
    let rows: Vec<f64> = f
        .values()
        .par_chunks(n)
        .map(|row| {
            if p == 2.0 {
                row.iter().map(|v| v * v).sum::<f64>()
            } else if p == 1.0 {
                row.iter().map(|v| v.abs()).sum::<f64>()
            } else {
                row.iter().map(|v| v.abs().powf(p)).sum::<f64>()
            }
        })
        .collect();
    Ok(rows.iter().sum::<f64>() * f.cell_area())
}

/// `(sum |f|^p * (2/n)^2)^(1/p)`; `p < 1` gives the quasi-norm.
pub fn lp_norm(f: &GridField, p: f64) -> Result<f64> {
    Ok(power_sum(f, p)?.powf(1.0 / p))
}

/// `L^p` norm against the normalized measure `dx / 4`.
pub fn lp_norm_normalized(f: &GridField, p: f64) -> Result<f64> {
    Ok((power_sum(f, p)? / 4.0).powf(1.0 / p))
}

pub fn sup_norm(f: &GridField) -> f64 {
    f.max_abs()
}

/// `L^p` norm of `|grad f|`.
pub fn w1p_norm(f: &GridField, p: f64, scheme: GradientScheme) -> Result<f64> {
    if !(p > 0.0) {
        return Err(invalid(format!("norm exponent must be positive, got {p}")));
    }
    lp_norm(&gradient_magnitude(f, scheme)?, p)
}
