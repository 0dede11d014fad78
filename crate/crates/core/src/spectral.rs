//! Periodic Fourier collocation on `[-L, L)`.
//!
//! Coefficients are stored in FFT order with the `1/N` normalization, so that
//! `u(x_j) = sum_k c_k exp(i xi_k (x_j + L))`. The Nyquist mode is listed as
//! `+N/2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid and its FFT plans.
#[derive(Clone)]
pub struct GridSpec {
    pub n_modes: usize,
    pub half_length: f64,
    pub spacing: f64,
    /// Integer mode numbers `k_j` in FFT order.
    pub modes: Vec<i64>,
    /// `xi_j = (pi / L) k_j`.
    pub wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridSpec")
            .field("n_modes", &self.n_modes)
            .field("half_length", &self.half_length)
            .field("spacing", &self.spacing)
            .finish()
    }
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.n_modes == other.n_modes && self.half_length == other.half_length
    }
}

/// Builds a periodic grid with `n_modes` collocation points on `[-L, L)`.
pub fn make_grid(n_modes: usize, half_length: f64) -> Result<Arc<GridSpec>> {
    if n_modes < 8 || !n_modes.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!("n_modes must be even and >= 8, got {n_modes}")));
    }
    if !(half_length > 0.0) || !half_length.is_finite() {
        return Err(Error::InvalidGrid(format!("half_length must be positive, got {half_length}")));
    }
    let half = (n_modes / 2) as i64;
    let modes: Vec<i64> = (0..n_modes as i64).map(|j| if j <= half { j } else { j - n_modes as i64 }).collect();
    let base = PI / half_length;
    let wavenumbers = modes.iter().map(|&k| base * k as f64).collect();
    let mut planner = FftPlanner::new();
    Ok(Arc::new(GridSpec {
        n_modes,
        half_length,
        spacing: 2.0 * half_length / n_modes as f64,
        modes,
        wavenumbers,
        forward: planner.plan_fft_forward(n_modes),
        inverse: planner.plan_fft_inverse(n_modes),
    }))
}

impl GridSpec {
    pub fn x(&self, i: usize) -> f64 {
        -self.half_length + i as f64 * self.spacing
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_modes).map(|i| self.x(i)).collect()
    }

    pub fn nyquist_index(&self) -> usize {
        self.n_modes / 2
    }

    /// Largest `|k|` kept by the two-thirds rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n_modes / 3) as i64
    }

    pub fn analyze(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n_modes as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// `(i xi)^order` with the Nyquist entry zeroed for odd orders.
    pub fn derivative_symbol(&self, j: usize, order: u32) -> Complex64 {
        if order % 2 == 1 && j == self.nyquist_index() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, self.wavenumbers[j]).powu(order)
    }

    pub fn differentiate_coeffs(&self, coeffs: &[Complex64], order: u32) -> Vec<Complex64> {
        coeffs.iter().enumerate().map(|(j, &c)| c * self.derivative_symbol(j, order)).collect()
    }

    pub fn dealias_coeffs(&self, coeffs: &mut [Complex64]) {
        let cutoff = self.dealias_cutoff();
        for (c, &k) in coeffs.iter_mut().zip(&self.modes) {
            if k.abs() > cutoff {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// One snapshot `u(t, .)` on a grid, held in both representations.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<GridSpec>,
    values: Vec<f64>,
    coefficients: Vec<Complex64>,
}

impl Field {
    pub fn from_values(grid: &Arc<GridSpec>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_modes {
            return Err(Error::InvalidArgument(format!("expected {} values, got {}", grid.n_modes, values.len())));
        }
        let coefficients = grid.analyze(&values);
        Ok(Self { grid: grid.clone(), values, coefficients })
    }

    pub fn from_coefficients(grid: &Arc<GridSpec>, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != grid.n_modes {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.n_modes,
                coefficients.len()
            )));
        }
        let values = grid.synthesize(&coefficients);
        Ok(Self { grid: grid.clone(), values, coefficients })
    }

    pub fn from_fn(grid: &Arc<GridSpec>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self::from_values(grid, values).expect("length matches grid")
    }

    pub fn zeros(grid: &Arc<GridSpec>) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.n_modes],
            coefficients: vec![Complex64::new(0.0, 0.0); grid.n_modes],
        }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.coefficients[0].re
    }

    /// `a * self + b * other`, computed in both representations.
    pub fn lincomb(&self, a: f64, other: &Field, b: f64) -> Field {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        let coefficients = self.coefficients.iter().zip(&other.coefficients).map(|(x, y)| x * a + y * b).collect();
        Field { grid: self.grid.clone(), values, coefficients }
    }

    pub fn scaled(&self, a: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * a).collect(),
            coefficients: self.coefficients.iter().map(|c| c * a).collect(),
        }
    }

    /// `Sum |c_k|^2 * 2L`, the Parseval side of `||u||_2^2`.
    pub fn spectral_energy(&self) -> f64 {
        2.0 * self.grid.half_length * self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

pub fn differentiate(f: &Field, order: u32) -> Result<Field> {
    if !(1..=5).contains(&order) {
        return Err(Error::InvalidArgument(format!("derivative order must be 1..=5, got {order}")));
    }
    let coeffs = f.grid.differentiate_coeffs(&f.coefficients, order);
    Field::from_coefficients(&f.grid, coeffs)
}

/// Two-thirds rule: zero every mode with `|k| > N/3`.
pub fn dealias(f: &Field) -> Field {
    let mut coeffs = f.coefficients.clone();
    f.grid.dealias_coeffs(&mut coeffs);
    Field::from_coefficients(&f.grid, coeffs).expect("length matches grid")
}

/// Rectangle-rule `L^p` norm for `p` in `{1, 2, 4, inf}`.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    lp_norm_values(f.values(), f.grid.spacing, p)
}

pub fn lp_norm_values(values: &[f64], spacing: f64, p: f64) -> Result<f64> {
    if p == f64::INFINITY {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let sum: f64 = match p {
        1.0 => values.iter().map(|v| v.abs()).sum(),
        2.0 => values.iter().map(|v| v * v).sum(),
        4.0 => values.iter().map(|v| (v * v) * (v * v)).sum(),
        _ => return Err(Error::InvalidArgument(format!("unsupported norm exponent p = {p}"))),
    };
    Ok((sum * spacing).powf(1.0 / p))
}
