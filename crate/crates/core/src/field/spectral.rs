//! Fourier operators on the period-2 torus. Wavenumbers are `pi * k` with
//! `k` in `[-n/2, n/2)`; first derivatives drop the Nyquist mode so that the
//! discrete divergence of a spectral curl vanishes identically.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{FieldKind, GridField, VelocityField, MEAN_TOLERANCE};
use crate::error::{invalid, Error, Result};

struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        data.par_chunks_mut(n).for_each(|row| fft.process(row));
        transpose(data, n);
        data.par_chunks_mut(n).for_each(|row| fft.process(row));
        transpose(data, n);
    }

    fn forward(&self, field: &GridField) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = field
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.transform(&mut data, &self.forward);
        data
    }

    fn inverse_real(&self, mut data: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut data, &self.inverse);
        let scale = 1.0 / (self.n * self.n) as f64;
        data.iter().map(|c| c.re * scale).collect()
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    const BLOCK: usize = 32;
    for bi in (0..n).step_by(BLOCK) {
        for bj in (bi..n).step_by(BLOCK) {
            for i in bi..(bi + BLOCK).min(n) {
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + BLOCK).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

/// Derivative wavenumbers `pi * k`, with the Nyquist entry set to zero.
fn derivative_wavenumbers(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            if k < n / 2 {
                PI * k as f64
            } else if k == n / 2 {
                0.0
            } else {
                PI * (k as f64 - n as f64)
            }
        })
        .collect()
}

/// Laplacian symbol magnitudes `pi^2 (k1^2 + k2^2)`, Nyquist included.
fn laplacian_symbol(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            PI * m
        })
        .collect()
}

fn ensure_vorticity(omega: &GridField) -> Result<()> {
    if omega.kind() != FieldKind::Vorticity {
        return Err(invalid("Biot-Savart inversion needs a vorticity field"));
    }
    let mean = omega.mean();
    if mean.abs() > MEAN_TOLERANCE {
        return Err(Error::NotMeanZero { mean });
    }
    Ok(())
}

/// Stream function `psi = Laplacian^{-1} omega` in the mean-zero gauge.
pub fn laplacian_inverse(omega: &GridField) -> Result<GridField> {
    ensure_vorticity(omega)?;
    let n = omega.n();
    let fft = Fft2::new(n);
    let mut hat = fft.forward(omega);
    apply_inverse_laplacian(&mut hat, n);
    GridField::new(n, fft.inverse_real(hat), FieldKind::Scalar)
}

fn apply_inverse_laplacian(hat: &mut [Complex64], n: usize) {
    let kl = laplacian_symbol(n);
    hat.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
        for (b, c) in row.iter_mut().enumerate() {
            let k2 = kl[a] * kl[a] + kl[b] * kl[b];
            *c = if k2 == 0.0 { Complex64::new(0.0, 0.0) } else { -*c / k2 };
        }
    });
}

/// `u = grad^perp Laplacian^{-1} omega = (-d2 psi, d1 psi)`.
pub fn biot_savart(omega: &GridField) -> Result<VelocityField> {
    ensure_vorticity(omega)?;
    let n = omega.n();
    let fft = Fft2::new(n);
    let mut psi = fft.forward(omega);
    apply_inverse_laplacian(&mut psi, n);
    let kd = derivative_wavenumbers(n);
    let i = Complex64::new(0.0, 1.0);
    let mut u1_hat = psi.clone();
    let mut u2_hat = psi;
    u1_hat
        .par_chunks_mut(n)
        .zip(u2_hat.par_chunks_mut(n))
        .enumerate()
        .for_each(|(a, (r1, r2))| {
            for b in 0..n {
                r1[b] *= -i * kd[b];
                r2[b] *= i * kd[a];
            }
        });
    let u1 = GridField::new(n, fft.inverse_real(u1_hat), FieldKind::Component)?;
    let u2 = GridField::new(n, fft.inverse_real(u2_hat), FieldKind::Component)?;
    VelocityField::new(u1, u2)
}

/// Spectral `(d1 f, d2 f)`.
pub fn spectral_gradient(f: &GridField) -> Result<(GridField, GridField)> {
    let n = f.n();
    let fft = Fft2::new(n);
    let hat = fft.forward(f);
    let kd = derivative_wavenumbers(n);
    let i = Complex64::new(0.0, 1.0);
    let mut d1 = hat.clone();
    let mut d2 = hat;
    d1.par_chunks_mut(n)
        .zip(d2.par_chunks_mut(n))
        .enumerate()
        .for_each(|(a, (r1, r2))| {
            for b in 0..n {
                r1[b] *= i * kd[a];
                r2[b] *= i * kd[b];
            }
        });
    Ok((
        GridField::new(n, fft.inverse_real(d1), FieldKind::Component)?,
        GridField::new(n, fft.inverse_real(d2), FieldKind::Component)?,
    ))
}

/// Spectral `d1 u2 - d2 u1`.
pub fn curl(u: &VelocityField) -> Result<GridField> {
    let (_, d2u1) = spectral_gradient(&u.u1)?;
    let (d1u2, _) = spectral_gradient(&u.u2)?;
    let values = d1u2
        .values()
        .iter()
        .zip(d2u1.values())
        .map(|(a, b)| a - b)
        .collect();
    GridField::new(u.n(), values, FieldKind::Scalar)
}

/// Spectral `d1 u1 + d2 u2`.
pub fn divergence(u: &VelocityField) -> Result<GridField> {
    let (d1u1, _) = spectral_gradient(&u.u1)?;
    let (_, d2u2) = spectral_gradient(&u.u2)?;
    let values = d1u1
        .values()
        .iter()
        .zip(d2u2.values())
        .map(|(a, b)| a + b)
        .collect();
    GridField::new(u.n(), values, FieldKind::Scalar)
}
