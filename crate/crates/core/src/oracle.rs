//! Entropy solutions of the Burgers target: exact Riemann fans, a Godunov
//! reference with mesh refinement, and Kruzhkov admissibility checks.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::models::{FluxConvention, InitialData, Profile};
use crate::quadrature::{adaptive_simpson, poly_bump};
use crate::spectral::Field;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Wave {
    Shock { speed: f64 },
    Rarefaction { lo_speed: f64, hi_speed: f64 },
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannFan {
    pub u_left: f64,
    pub u_right: f64,
    pub wave: Wave,
    pub flux_convention: FluxConvention,
}

/// Riemann solution for `f(u) = u^2`.
pub fn riemann_fan(u_l: f64, u_r: f64) -> RiemannFan {
    riemann_fan_with(u_l, u_r, FluxConvention::FullSquare)
}

pub fn riemann_fan_with(u_l: f64, u_r: f64, conv: FluxConvention) -> RiemannFan {
    let a = conv.slope_factor();
    let wave = if u_l > u_r {
        Wave::Shock { speed: 0.5 * a * (u_l + u_r) }
    } else if u_l < u_r {
        Wave::Rarefaction { lo_speed: a * u_l, hi_speed: a * u_r }
    } else {
        Wave::Constant
    };
    RiemannFan { u_left: u_l, u_right: u_r, wave, flux_convention: conv }
}

/// Self-similar value at `x / t`; on the shock ray the left state is returned.
pub fn fan_value(fan: &RiemannFan, x_over_t: f64) -> f64 {
    match fan.wave {
        Wave::Constant => fan.u_left,
        Wave::Shock { speed } => {
            if x_over_t <= speed {
                fan.u_left
            } else {
                fan.u_right
            }
        }
        Wave::Rarefaction { lo_speed, hi_speed } => {
            if x_over_t < lo_speed {
                fan.u_left
            } else if x_over_t > hi_speed {
                fan.u_right
            } else {
                x_over_t / fan.flux_convention.slope_factor()
            }
        }
    }
}

/// Mean of the fan solution centred at `x0` over `[a, b]` at time `t > 0`.
pub fn fan_cell_average(fan: &RiemannFan, x0: f64, t: f64, a: f64, b: f64) -> f64 {
    let v = |x: f64| fan_value(fan, (x - x0) / t);
    let mut breaks = vec![a, b];
    match fan.wave {
        Wave::Shock { speed } => breaks.push(x0 + speed * t),
        Wave::Rarefaction { lo_speed, hi_speed } => {
            breaks.push(x0 + lo_speed * t);
            breaks.push(x0 + hi_speed * t);
        }
        Wave::Constant => {}
    }
    breaks.retain(|&x| x >= a && x <= b);
    breaks.sort_by(f64::total_cmp);
    // piecewise linear between breaks, so the midpoint rule is exact on each piece
    let total: f64 = breaks.windows(2).map(|w| (w[1] - w[0]) * v(0.5 * (w[0] + w[1]))).sum();
    total / (b - a)
}

/// Exact-Riemann interface flux for `f(u) = u^2`.
pub fn godunov_flux(a: f64, b: f64) -> f64 {
    godunov_flux_with(a, b, FluxConvention::FullSquare)
}

pub fn godunov_flux_with(a: f64, b: f64, conv: FluxConvention) -> f64 {
    conv.flux(a.max(0.0)).max(conv.flux(b.min(0.0)))
}

/// Finite-volume cell averages on `[-L, L)`; cell `i` is centred at `-L + (i + 1/2) h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub cells: Vec<f64>,
    pub spacing: f64,
    pub time: f64,
    pub flux_convention: FluxConvention,
    pub half_length: f64,
}

pub const GODUNOV_CFL: f64 = 0.45;

impl ReferenceSolution {
    /// Exact cell averages of the sharp profile.
    pub fn from_profile(profile: &Profile, half_length: f64, n_cells: usize, conv: FluxConvention) -> Result<Self> {
        if n_cells == 0 || !(half_length > 0.0) {
            return Err(Error::InvalidArgument("need at least one cell and L > 0".into()));
        }
        let h = 2.0 * half_length / n_cells as f64;
        let cells = (0..n_cells)
            .map(|i| {
                let a = -half_length + i as f64 * h;
                profile.cell_average(a, a + h, half_length)
            })
            .collect();
        Ok(Self { cells, spacing: h, time: 0.0, flux_convention: conv, half_length })
    }

    pub fn center(&self, i: usize) -> f64 {
        -self.half_length + (i as f64 + 0.5) * self.spacing
    }

    pub fn mass(&self) -> f64 {
        self.cells.iter().sum::<f64>() * self.spacing
    }

    pub fn total_variation(&self) -> f64 {
        let n = self.cells.len();
        (0..n).map(|i| (self.cells[(i + 1) % n] - self.cells[i]).abs()).sum()
    }

    pub fn stable_dt(&self) -> f64 {
        let conv = self.flux_convention;
        let speed = self.cells.iter().fold(0.0f64, |s, &u| s.max(conv.speed(u).abs()));
        GODUNOV_CFL * self.spacing / speed.max(1e-12)
    }

    /// Averages pairs of cells onto the mesh of half the resolution.
    pub fn coarsen(&self) -> Result<Self> {
        if !self.cells.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument("cell count must be even to coarsen".into()));
        }
        let cells = self.cells.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect();
        Ok(Self { cells, spacing: 2.0 * self.spacing, ..self.clone() })
    }

    /// `(int_K |u - v|^p)^(1/p)` over cells whose centres lie in `K`.
    pub fn window_distance(&self, other: &[f64], window: (f64, f64), p: f64) -> Result<f64> {
        if other.len() != self.cells.len() {
            return Err(Error::InvalidArgument("cell counts differ".into()));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")));
        }
        let s: f64 = (0..self.cells.len())
            .filter(|&i| (window.0..=window.1).contains(&self.center(i)))
            .map(|i| (self.cells[i] - other[i]).abs().powf(p))
            .sum();
        Ok((s * self.spacing).powf(1.0 / p))
    }
}

/// One conservative Godunov update with periodic indexing.
pub fn godunov_step(s: &ReferenceSolution, dt: f64) -> Result<ReferenceSolution> {
    let limit = s.stable_dt();
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, limit });
    }
    let mut out = s.clone();
    let mut flux = Vec::new();
    advance_cells(&s.cells, &mut out.cells, &mut flux, dt / s.spacing, s.flux_convention);
    out.time += dt;
    Ok(out)
}

fn advance_cells(u: &[f64], next: &mut [f64], flux: &mut Vec<f64>, ratio: f64, conv: FluxConvention) {
    let n = u.len();
    flux.clear();
    // flux[i] sits at the left edge of cell i
    // both conventions are c u^2, so the flux is c max(a+^2, b-^2)
    let g = |a: f64, b: f64| {
        let (p, m) = (a.max(0.0), b.min(0.0));
        (p * p).max(m * m)
    };
    flux.push(g(u[n - 1], u[0]));
    flux.extend(u.windows(2).map(|w| g(w[0], w[1])));
    flux.push(flux[0]);
    let r = ratio * conv.flux(1.0);
    for ((x, &v), f) in next.iter_mut().zip(u).zip(flux.windows(2)) {
        *x = v - r * (f[1] - f[0]);
    }
}

/// Evolves to time `t`, never overshooting.
pub fn godunov_evolve(s: &ReferenceSolution, t: f64) -> Result<ReferenceSolution> {
    if !(t >= s.time) {
        return Err(Error::InvalidArgument(format!("target time {t} precedes {}", s.time)));
    }
    let mut cur = s.cells.clone();
    let mut next = vec![0.0; cur.len()];
    let mut flux = Vec::with_capacity(cur.len() + 1);
    let mut time = s.time;
    let conv = s.flux_convention;
    let tol = 1e-14 * t.max(1.0);
    while t - time > tol {
        let speed = cur.iter().fold(0.0f64, |m, &u| m.max(conv.speed(u).abs()));
        let dt = (GODUNOV_CFL * s.spacing / speed.max(1e-12)).min(t - time);
        advance_cells(&cur, &mut next, &mut flux, dt / s.spacing, conv);
        std::mem::swap(&mut cur, &mut next);
        time += dt;
    }
    Ok(ReferenceSolution { cells: cur, time: t, ..s.clone() })
}

pub const MAX_DOUBLINGS: usize = 6;

/// Godunov solution from the sharp profile, refined by mesh doubling until
/// consecutive levels agree in `L^1` to `1e-4 * 2L * max|u0|`.
pub fn entropy_reference(
    initial: &InitialData,
    half_length: f64,
    conv: FluxConvention,
    t: f64,
    target_spacing: f64,
) -> Result<ReferenceSolution> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    if !(target_spacing > 0.0) {
        return Err(Error::InvalidArgument("target spacing must be positive".into()));
    }
    let n0 = ((2.0 * half_length / target_spacing).round() as usize).max(1);
    let start = |n: usize| ReferenceSolution::from_profile(&initial.profile, half_length, n, conv);
    if t == 0.0 {
        return start(n0);
    }
    let tol = 1e-4 * 2.0 * half_length * initial.profile.max_abs();
    let mut prev = godunov_evolve(&start(n0)?, t)?;
    let mut last_diff = f64::INFINITY;
    for level in 1..=MAX_DOUBLINGS {
        let fine = godunov_evolve(&start(n0 << level)?, t)?;
        let coarse = fine.coarsen()?;
        last_diff = prev.cells.iter().zip(&coarse.cells).map(|(a, b)| (a - b).abs()).sum::<f64>() * prev.spacing;
        if last_diff < tol {
            return Ok(fine);
        }
        prev = fine;
    }
    Err(Error::OracleStalled { doublings: MAX_DOUBLINGS, last_diff, tol })
}

/// Exact averages of a trigonometric polynomial over `n_cells` equal cells of the box.
pub fn spectral_cell_averages(f: &Field, n_cells: usize) -> Vec<f64> {
    let g = f.grid();
    let n = g.n_modes;
    let l = g.half_length;
    let h = 2.0 * l / n_cells as f64;
    let c = f.coefficients();
    let sinc = |z: f64| if z.abs() < 1e-12 { 1.0 } else { z.sin() / z };
    // coefficients are referenced to x = -L; d_k folds in the cell mean and the half-cell shift
    let weight = |j: usize| {
        let xi = g.wavenumbers[j];
        c[j] * sinc(0.5 * xi * h) * Complex64::from_polar(1.0, 0.5 * xi * h)
    };
    if n_cells >= n {
        let mut buf = vec![Complex64::new(0.0, 0.0); n_cells];
        for j in 0..n {
            let m = g.modes[j];
            if j == g.nyquist_index() && n_cells > n {
                // split the Nyquist cosine across +-N/2
                let half = 0.5 * weight(j);
                buf[n / 2] += half;
                let xi = -g.wavenumbers[j];
                let neg = 0.5 * c[j] * sinc(0.5 * xi * h) * Complex64::from_polar(1.0, 0.5 * xi * h);
                buf[n_cells - n / 2] += neg;
                continue;
            }
            let idx = if m >= 0 { m as usize } else { (n_cells as i64 + m) as usize };
            buf[idx] += weight(j);
        }
        FftPlanner::new().plan_fft_inverse(n_cells).process(&mut buf);
        buf.iter().map(|z| z.re).collect()
    } else {
        (0..n_cells)
            .map(|i| {
                let x = i as f64 * h;
                (0..n).map(|j| (weight(j) * Complex64::from_polar(1.0, g.wavenumbers[j] * x)).re).sum()
            })
            .collect()
    }
}

/// Space-time samples `u(t_j, x_i)` on a uniform spatial lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSolution {
    pub times: Vec<f64>,
    pub half_length: f64,
    pub spacing: f64,
    /// Position of sample `i` is `-L + (i + offset) h`.
    pub offset: f64,
    pub values: Vec<Vec<f64>>,
}

impl SampledSolution {
    pub fn from_trajectory(tr: &Trajectory) -> Self {
        let g = tr.grid();
        Self {
            times: tr.times.clone(),
            half_length: g.half_length,
            spacing: g.spacing,
            offset: 0.0,
            values: tr.fields.iter().map(|f| f.values().to_vec()).collect(),
        }
    }

    pub fn from_references(refs: &[ReferenceSolution]) -> Result<Self> {
        let first = refs.first().ok_or_else(|| Error::InvalidArgument("no reference solutions".into()))?;
        if refs.iter().any(|r| r.cells.len() != first.cells.len()) {
            return Err(Error::InvalidArgument("reference meshes differ".into()));
        }
        Ok(Self {
            times: refs.iter().map(|r| r.time).collect(),
            half_length: first.half_length,
            spacing: first.spacing,
            offset: 0.5,
            values: refs.iter().map(|r| r.cells.clone()).collect(),
        })
    }

    /// Samples a closed-form `u(t, x)` at cell centres.
    pub fn from_fn(times: Vec<f64>, half_length: f64, n: usize, u: impl Fn(f64, f64) -> f64) -> Self {
        let h = 2.0 * half_length / n as f64;
        let values =
            times.iter().map(|&t| (0..n).map(|i| u(t, -half_length + (i as f64 + 0.5) * h)).collect()).collect();
        Self { times, half_length, spacing: h, offset: 0.5, values }
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_length + (i as f64 + self.offset) * self.spacing
    }
}

/// `phi(t, x) = B((t - tc)/tr) B((x - xc)/xr)` with the C2 bump `B(s) = (1 - s^2)^3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeBump {
    pub t_lo: f64,
    pub t_hi: f64,
    pub x_center: f64,
    pub x_radius: f64,
}

impl SpaceTimeBump {
    /// Returns `(phi, phi_t, phi_x)`.
    pub fn eval(&self, t: f64, x: f64) -> (f64, f64, f64) {
        let tc = 0.5 * (self.t_lo + self.t_hi);
        let tr = 0.5 * (self.t_hi - self.t_lo);
        let (bt, dbt) = poly_bump((t - tc) / tr);
        let (bx, dbx) = poly_bump((x - self.x_center) / self.x_radius);
        (bt * bx, dbt / tr * bx, bt * dbx / self.x_radius)
    }
}

/// Smoothed Kruzhkov pair `eta = sqrt((u-k)^2 + d^2) - d` and its flux, in closed form.
pub fn kruzhkov_pair(u: f64, k: f64, delta: f64, conv: FluxConvention) -> (f64, f64) {
    let anti = |v: f64| {
        let s = v - k;
        let r = s.hypot(delta);
        0.5 * (s * r - delta * delta * (s / delta).asinh()) + k * r
    };
    let eta = (u - k).hypot(delta) - delta;
    let q = conv.slope_factor() * (anti(u) - anti(0.0));
    (eta, q)
}

pub const KRUZHKOV_DELTA: f64 = 1e-3;

/// `int int [eta(u) phi_t + q(u) phi_x] dx dt`; nonnegative (up to quadrature error) for entropy solutions.
pub fn kruzhkov_check(s: &SampledSolution, k: f64, test: &SpaceTimeBump, delta: f64, conv: FluxConvention) -> f64 {
    let slices: Vec<f64> = s
        .times
        .iter()
        .zip(&s.values)
        .map(|(&t, row)| {
            row.iter()
                .enumerate()
                .map(|(i, &u)| {
                    let (_, pt, px) = test.eval(t, s.x(i));
                    if pt == 0.0 && px == 0.0 {
                        return 0.0;
                    }
                    let (eta, q) = kruzhkov_pair(u, k, delta, conv);
                    eta * pt + q * px
                })
                .sum::<f64>()
                * s.spacing
        })
        .collect();
    crate::quadrature::trapezoid(&s.times, &slices)
}

/// Entropy production of a single discontinuity `x = x0 + speed t` tested against `phi`:
/// `int phi(t, x(t)) [speed (eta_r - eta_l) - (q_r - q_l)] dt`.
#[allow(clippy::too_many_arguments)]
pub fn shock_entropy_production(
    u_l: f64,
    u_r: f64,
    speed: f64,
    x0: f64,
    k: f64,
    test: &SpaceTimeBump,
    delta: f64,
    conv: FluxConvention,
) -> f64 {
    let (el, ql) = kruzhkov_pair(u_l, k, delta, conv);
    let (er, qr) = kruzhkov_pair(u_r, k, delta, conv);
    let jump = speed * (er - el) - (qr - ql);
    let f = |t: f64| test.eval(t, x0 + speed * t).0;
    jump * adaptive_simpson(&f, test.t_lo, test.t_hi, 1e-12)
}
