//! Sweeps over `(eps, beta)`, configuration, reporting and persistence.

pub mod config;
pub mod output;
pub mod sweep;
pub mod table;

pub use config::Config;
pub use output::{regenerate, write_oracle, write_simulation, write_sweep, Manifest, ManifestBody, SimulationRecord};
pub use sweep::{
    evolve_row, observed_order, oracle_references, plan_sweep, run_sweep, Regime, SweepPlan, SweepResult, SweepRow,
    SweepTemplate,
};
pub use table::{convergence_table, ConvergenceTable};

use crate::entropy::{make_entropy_pair, residual_decomposition, PairKind};
use crate::error::{Error, Result};
use crate::estimates::{collect_norms, scaling_report};
use crate::integrator::{evolve, RunConfig, Trajectory};
use crate::models::InitialData;
use crate::oracle::{entropy_reference, ReferenceSolution};

/// One run with the `[model]` parameters, packaged for persistence.
pub fn simulate(config: &Config) -> Result<SimulationRecord> {
    let m = config.single_model()?;
    let rc = config.run_config(&m);
    let traj = evolve(&rc)?;
    let norms = collect_norms(&traj, &m);
    let scaling = scaling_report(&norms, &m)?;
    let pair_kind = config.sweep.as_ref().map(|s| s.pair).unwrap_or(PairKind::Quadratic);
    let residuals = match residual_decomposition(&traj, &m, &make_entropy_pair(pair_kind, &m)?) {
        Ok(r) => Some(r),
        Err(Error::MissingTendencies) => None,
        Err(e) => return Err(e),
    };
    let mut wanted = if config.output.profile_times.is_empty() {
        vec![config.grid.horizon]
    } else {
        config.output.profile_times.clone()
    };
    wanted.sort_by(f64::total_cmp);
    wanted.dedup();
    let at = |tr: &Trajectory, t: f64| tr.times.iter().position(|s| (s - t).abs() <= 1e-12 * config.grid.horizon);
    let extra;
    let source = if wanted.iter().all(|&t| at(&traj, t).is_some()) {
        &traj
    } else {
        // off the sampling grid: a separate pass stopping exactly at the requested times
        extra = evolve(&RunConfig { sample_times: wanted.clone(), record_time_derivatives: false, ..rc.clone() })?;
        &extra
    };
    let profiles =
        wanted.iter().map(|&t| (t, source.fields[at(source, t).expect("sampled")].values().to_vec())).collect();
    Ok(SimulationRecord {
        model: m,
        initial: rc.initial,
        initial_bounds: traj.initial_bounds.clone(),
        stats: traj.stats,
        energy_drift: norms.energy_drift(),
        norms,
        scaling,
        residuals,
        profiles,
    })
}

/// Entropy references at the horizon for each configured limit flux (the
/// model's native flux when no sweep section is present).
pub fn oracle(config: &Config) -> Result<Vec<ReferenceSolution>> {
    let fluxes = match &config.sweep {
        Some(s) => s.oracle_fluxes.clone(),
        None => vec![config.model.kind.native_flux()],
    };
    let g = &config.grid;
    let sharp = InitialData { profile: config.initial.profile, mollifier_width: 0.0, c0: config.initial.c0 };
    let spacing = 2.0 * g.half_length / g.n_modes as f64;
    fluxes.iter().map(|&f| entropy_reference(&sharp, g.half_length, f, g.horizon, spacing)).collect()
}
