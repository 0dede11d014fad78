//! Integrating-factor RK4 for the semidiscrete model equations.
//!
//! The viscous decay `Re sigma / mass` is integrated exactly through the
//! factor `exp(-t Re sigma / mass)`; advection and the remaining dispersion are
//! treated explicitly. The running dissipation `2 eps int ||u_x||^2` is carried
//! along as an extra quadrature variable with the same RK4 weights, so the
//! discrete energy identity can be checked to the accuracy of the stepper.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{make_initial_data, InitialBounds, InitialData, ModelKind, ModelSpec, SymbolTable};
use crate::spectral::{dealias, make_grid, Field, GridSpec};

/// Runtime guards; every threshold is configurable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Guards {
    pub blowup_threshold: f64,
    /// Outer-quarter amplitude allowed, relative to `max |u|`.
    pub contamination_threshold: f64,
    /// Largest step; `None` means `T / 16`.
    pub dt_max: Option<f64>,
    /// Smallest accepted step as a fraction of `T`.
    pub dt_min_fraction: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Self { blowup_threshold: 1e6, contamination_threshold: 1e-6, dt_max: None, dt_min_fraction: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub n_modes: usize,
    pub half_length: f64,
    pub initial: InitialData,
    pub horizon: f64,
    pub cfl_safety: f64,
    pub sample_times: Vec<f64>,
    pub record_time_derivatives: bool,
    #[serde(default)]
    pub guards: Guards,
}

impl RunConfig {
    /// `n` equally spaced sample times covering `[0, T]`, both ends included.
    pub fn uniform_samples(horizon: f64, n: usize) -> Vec<f64> {
        match n {
            0 => vec![],
            1 => vec![horizon],
            _ => (0..n).map(|i| horizon * i as f64 / (n - 1) as f64).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidArgument(format!("horizon must be >= 0, got {}", self.horizon)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidArgument(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety)));
        }
        if self.sample_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("sample_times must be sorted".into()));
        }
        if self.sample_times.iter().any(|&t| !(0.0..=self.horizon).contains(&t)) {
            return Err(Error::InvalidArgument("sample_times must lie in [0, T]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub steps: usize,
    pub dt_min: f64,
    pub dt_max: f64,
    pub dt_mean: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    /// `u_t` at each sample, when requested.
    pub tendencies: Option<Vec<Field>>,
    /// Step-wise `2 eps int_0^t ||u_x||^2 ds` at each sample.
    pub dissipation: Option<Vec<f64>>,
    pub initial_bounds: Option<InitialBounds>,
    pub stats: RunStats,
}

impl Trajectory {
    /// Wraps externally produced snapshots (no tendencies, no dissipation record).
    pub fn from_snapshots(times: Vec<f64>, fields: Vec<Field>) -> Result<Self> {
        if times.len() != fields.len() || times.is_empty() {
            return Err(Error::InvalidArgument("need one field per time, at least one".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("times must be strictly increasing".into()));
        }
        Ok(Self {
            times,
            fields,
            tendencies: None,
            dissipation: None,
            initial_bounds: None,
            stats: RunStats::default(),
        })
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        self.fields[0].grid()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn last(&self) -> &Field {
        self.fields.last().expect("non-empty")
    }
}

/// Stable step size from the advective CFL number and, for KdV-type terms,
/// the RK4 imaginary-axis limit `2.8`.
pub fn choose_dt(m: &ModelSpec, f: &Field, safety: f64) -> f64 {
    let g = f.grid();
    let speed = f.values().iter().fold(0.0f64, |s, &u| s.max(m.flux_convention.speed(u).abs()));
    let advective = g.spacing / speed.max(1e-12);
    safety * advective.min(dispersive_limit(m, g))
}

fn dispersive_limit(m: &ModelSpec, g: &GridSpec) -> f64 {
    if !m.kind.has_kdv_term() || m.beta == 0.0 {
        return f64::INFINITY;
    }
    let table_max = g
        .wavenumbers
        .iter()
        .map(|&xi| {
            let s = crate::models::stiffness_symbol(m, xi);
            (s.im / crate::models::mass_symbol(m, xi)).abs()
        })
        .fold(0.0f64, f64::max);
    if table_max == 0.0 {
        f64::INFINITY
    } else {
        2.8 / table_max
    }
}

struct Stepper {
    table: SymbolTable,
    flux_enabled: bool,
}

impl Stepper {
    fn new(m: &ModelSpec, grid: &Arc<GridSpec>) -> Self {
        Self { table: SymbolTable::new(m, grid), flux_enabled: true }
    }

    fn dissipation_rate(&self, u: &[Complex64]) -> f64 {
        let g = &self.table.grid;
        let eps = self.table.model.epsilon;
        if eps == 0.0 {
            return 0.0;
        }
        let s: f64 = u
            .iter()
            .zip(&g.wavenumbers)
            .enumerate()
            .filter(|(j, _)| *j != g.nyquist_index())
            .map(|(_, (c, xi))| xi * xi * c.norm_sqr())
            .sum();
        2.0 * eps * 2.0 * g.half_length * s
    }

    /// One IF-RK4 step; returns the new coefficients and the dissipation increment.
    fn advance(&self, u: &[Complex64], dt: f64) -> (Vec<Complex64>, f64) {
        let n = u.len();
        let eh: Vec<f64> = self.table.decay.iter().map(|a| (-a * 0.5 * dt).exp()).collect();
        let nl = |v: &[Complex64]| self.table.explicit_part(v, self.flux_enabled);

        let k1 = nl(u);
        let ua: Vec<Complex64> = (0..n).map(|j| (u[j] + k1[j] * (0.5 * dt)) * eh[j]).collect();
        let k2 = nl(&ua);
        let ub: Vec<Complex64> = (0..n).map(|j| u[j] * eh[j] + k2[j] * (0.5 * dt)).collect();
        let k3 = nl(&ub);
        let uc: Vec<Complex64> = (0..n).map(|j| u[j] * (eh[j] * eh[j]) + k3[j] * (dt * eh[j])).collect();
        let k4 = nl(&uc);

        let mut next: Vec<Complex64> = (0..n)
            .map(|j| {
                let ef = eh[j] * eh[j];
                u[j] * ef + (k1[j] * ef + (k2[j] + k3[j]) * (2.0 * eh[j]) + k4[j]) * (dt / 6.0)
            })
            .collect();
        self.table.grid.dealias_coeffs(&mut next);

        let diss = dt / 6.0
            * (self.dissipation_rate(u)
                + 2.0 * self.dissipation_rate(&ua)
                + 2.0 * self.dissipation_rate(&ub)
                + self.dissipation_rate(&uc));
        (next, diss)
    }
}

fn check_finite(values: &[f64], threshold: f64, time: f64) -> Result<()> {
    let mut max_abs = 0.0f64;
    for &v in values {
        if !v.is_finite() {
            return Err(Error::BlowUp { time, max_abs: f64::INFINITY });
        }
        max_abs = max_abs.max(v.abs());
    }
    if max_abs > threshold {
        return Err(Error::BlowUp { time, max_abs });
    }
    Ok(())
}

/// Advances a dealiased field by one step of size `dt`.
pub fn step(m: &ModelSpec, f: &Field, dt: f64) -> Result<Field> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let stepper = Stepper::new(m, f.grid());
    let (next, _) = stepper.advance(f.coefficients(), dt);
    let out = Field::from_coefficients(f.grid(), next)?;
    check_finite(out.values(), Guards::default().blowup_threshold, dt)?;
    Ok(out)
}

/// Checks that the outer quarter of the box stays quiet.
pub fn support_monitor(f: &Field, threshold: f64, time: f64) -> Result<()> {
    let g = f.grid();
    let edge = 0.75 * g.half_length;
    let mut outer = 0.0f64;
    let mut all = 0.0f64;
    for (i, &v) in f.values().iter().enumerate() {
        all = all.max(v.abs());
        if g.x(i).abs() >= edge {
            outer = outer.max(v.abs());
        }
    }
    if outer > threshold * all {
        return Err(Error::BoundaryContamination { time, outer, inner: all });
    }
    Ok(())
}

pub fn evolve(c: &RunConfig) -> Result<Trajectory> {
    c.validate()?;
    let grid = make_grid(c.n_modes, c.half_length)?;
    let init = make_initial_data(&c.initial, &grid, &c.model)?;
    evolve_from(c, dealias(&init.field), Some(init.bounds))
}

/// Same as [`evolve`] but from a given (dealiased) field instead of the configured profile.
pub fn evolve_from(c: &RunConfig, start: Field, bounds: Option<InitialBounds>) -> Result<Trajectory> {
    c.validate()?;
    if c.model.kind == ModelKind::Burgers {
        return Err(Error::InvalidModel("the inviscid burgers model has no spectral evolution; use the oracle".into()));
    }
    let grid = start.grid().clone();
    let stepper = Stepper::new(&c.model, &grid);
    let horizon = c.horizon;
    let dt_cap = c.guards.dt_max.unwrap_or(horizon / 16.0);
    let dt_floor = c.guards.dt_min_fraction * horizon;

    let mut times = vec![0.0];
    let mut fields = vec![start.clone()];
    let mut tend = c.record_time_derivatives.then(|| {
        vec![Field::from_coefficients(&grid, stepper.table.tendency_coeffs(start.coefficients())).expect("grid")]
    });
    let mut diss_record = vec![0.0];
    support_monitor(&start, c.guards.contamination_threshold, 0.0)?;

    let mut u = start.coefficients().to_vec();
    let mut t = 0.0;
    let mut diss = 0.0;
    let mut stats = RunStats { steps: 0, dt_min: f64::INFINITY, dt_max: 0.0, dt_mean: 0.0 };
    let tol = 1e-12 * horizon.max(1e-300);

    for &target in c.sample_times.iter().filter(|&&s| s > tol) {
        while target - t > tol {
            let current = Field::from_coefficients(&grid, u.clone())?;
            let wanted = choose_dt(&c.model, &current, c.cfl_safety).min(dt_cap);
            if wanted < dt_floor {
                return Err(Error::Stagnation { time: t, dt: wanted });
            }
            // equal steps up to the next sample, so no sliver step is left before it
            let remaining = target - t;
            let dt = remaining / (remaining / wanted).ceil().max(1.0);
            let (next, dd) = stepper.advance(&u, dt);
            let values = grid.synthesize(&next);
            u = next;
            t = if target - (t + dt) <= tol { target } else { t + dt };
            diss += dd;
            check_finite(&values, c.guards.blowup_threshold, t)?;
            stats.steps += 1;
            stats.dt_min = stats.dt_min.min(dt);
            stats.dt_max = stats.dt_max.max(dt);
            stats.dt_mean += dt;
        }
        if times.last() == Some(&target) {
            continue;
        }
        let snap = Field::from_coefficients(&grid, u.clone())?;
        support_monitor(&snap, c.guards.contamination_threshold, t)?;
        if let Some(tv) = tend.as_mut() {
            tv.push(Field::from_coefficients(&grid, stepper.table.tendency_coeffs(&u))?);
        }
        times.push(target);
        fields.push(snap);
        diss_record.push(diss);
    }
    if stats.steps > 0 {
        stats.dt_mean /= stats.steps as f64;
    } else {
        stats.dt_min = 0.0;
    }
    Ok(Trajectory { times, fields, tendencies: tend, dissipation: Some(diss_record), initial_bounds: bounds, stats })
}
