//! `(eps, beta)` sweeps along a scaling regime, compared against the entropy oracle.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{make_entropy_pair, residual_decomposition, PairKind, ResidualReport};
use crate::error::{Error, Result};
use crate::estimates::{collect_norms, scaling_report, NormSeries, ScalingReport};
use crate::integrator::{evolve, RunConfig, RunStats, Trajectory};
use crate::models::{FluxConvention, InitialBounds, ModelKind, ModelSpec};
use crate::oracle::{entropy_reference, spectral_cell_averages, ReferenceSolution};

use super::config::{GridSection, InitialSection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `beta = C eps^4`
    #[serde(rename = "big_O_4")]
    BigO4,
    /// `beta = eps^(4 + delta)`
    #[serde(rename = "little_o_4")]
    LittleO4,
    /// `beta = C eps^3`
    #[serde(rename = "big_O_3")]
    BigO3,
    /// `beta = eps^(3 + delta)`
    #[serde(rename = "little_o_3")]
    LittleO3,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::BigO4 => "big_O_4",
            Regime::LittleO4 => "little_o_4",
            Regime::BigO3 => "big_O_3",
            Regime::LittleO3 => "little_o_3",
        }
    }

    /// `param` is `C` for the big-O regimes and `delta` for the little-o ones.
    pub fn beta(self, param: f64, eps: f64) -> f64 {
        match self {
            Regime::BigO4 => param * eps.powi(4),
            Regime::LittleO4 => eps.powf(4.0 + param),
            Regime::BigO3 => param * eps.powi(3),
            Regime::LittleO3 => eps.powf(3.0 + param),
        }
    }

    fn fits(self, kind: ModelKind) -> bool {
        match self {
            Regime::BigO3 | Regime::LittleO3 => kind == ModelKind::Kdv,
            Regime::BigO4 | Regime::LittleO4 => kind.is_rosenau_family() || kind == ModelKind::Kdv,
        }
    }
}

/// Everything a sweep row needs besides `(eps, beta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTemplate {
    pub kind: ModelKind,
    pub grid: GridSection,
    pub initial: InitialSection,
    pub window: (f64, f64),
    pub pair: PairKind,
    pub oracle_fluxes: Vec<FluxConvention>,
    pub primary_flux: FluxConvention,
}

impl SweepTemplate {
    pub fn model(&self, eps: f64, beta: f64) -> Result<ModelSpec> {
        ModelSpec::new(self.kind, eps, beta)
    }

    pub fn run_config(&self, m: &ModelSpec) -> RunConfig {
        let g = &self.grid;
        RunConfig {
            model: *m,
            n_modes: g.n_modes,
            half_length: g.half_length,
            initial: self.initial.resolve(m),
            horizon: g.horizon,
            cfl_safety: g.cfl_safety,
            sample_times: RunConfig::uniform_samples(g.horizon, g.samples),
            record_time_derivatives: g.record_time_derivatives,
            guards: g.guards,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedRow {
    pub epsilon: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub regime: Regime,
    /// `C` or `delta`, depending on the regime.
    pub parameter: f64,
    pub rows: Vec<PlannedRow>,
    pub template: SweepTemplate,
}

pub fn plan_sweep(regime: Regime, param: f64, epsilons: &[f64], template: SweepTemplate) -> Result<SweepPlan> {
    if !regime.fits(template.kind) {
        return Err(Error::Config(format!(
            "regime {} does not apply to the {} model",
            regime.name(),
            template.kind.name()
        )));
    }
    if !(param > 0.0) || !param.is_finite() {
        return Err(Error::Config(format!("regime parameter must be positive, got {param}")));
    }
    if epsilons.is_empty() {
        return Err(Error::Config("a sweep needs at least one epsilon".into()));
    }
    if epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::Config("every epsilon must lie in (0, 1)".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("epsilons must be strictly decreasing".into()));
    }
    let rows: Vec<PlannedRow> =
        epsilons.iter().map(|&e| PlannedRow { epsilon: e, beta: regime.beta(param, e) }).collect();
    if let Some(r) = rows.iter().find(|r| !(r.beta > 0.0 && r.beta < 1.0)) {
        return Err(Error::Config(format!("beta = {} at eps = {} is outside (0, 1)", r.beta, r.epsilon)));
    }
    Ok(SweepPlan { regime, parameter: param, rows, template })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub flux: FluxConvention,
    pub l1: f64,
    pub l1_5: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowData {
    pub comparisons: Vec<OracleComparison>,
    /// Errors against the primary flux.
    pub l1_error: f64,
    pub l1_5_error: f64,
    pub energy_drift: f64,
    pub norms: NormSeries,
    pub scaling: ScalingReport,
    pub residuals: Option<ResidualReport>,
    pub stats: RunStats,
    pub initial_bounds: Option<InitialBounds>,
    pub final_values: Vec<f64>,
    /// Not persisted, so reruns write identical files.
    #[serde(skip)]
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowOutcome {
    Ok(Box<RowData>),
    Failed { message: String, exit_code: i32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub beta: f64,
    pub mollifier_width: f64,
    pub outcome: RowOutcome,
}

impl SweepRow {
    pub fn data(&self) -> Option<&RowData> {
        match &self.outcome {
            RowOutcome::Ok(d) => Some(d),
            RowOutcome::Failed { .. } => None,
        }
    }

    pub fn error_for(&self, flux: FluxConvention) -> Option<f64> {
        self.data()?.comparisons.iter().find(|c| c.flux == flux).map(|c| c.l1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub plan: SweepPlan,
    pub rows: Vec<SweepRow>,
    /// `p_n` between rows `n` and `n + 1`.
    pub observed_orders: Vec<Option<f64>>,
    /// Oracle meshes at the horizon, one per compared flux.
    #[serde(skip)]
    pub references: Vec<ReferenceSolution>,
}

pub fn observed_order(e0: f64, e1: f64, eps0: f64, eps1: f64) -> f64 {
    if e0 == e1 {
        return 0.0;
    }
    (e0 / e1).ln() / (eps0 / eps1).ln()
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.data().is_none()).count()
    }

    pub fn primary_errors(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.data().map(|d| d.l1_error)).collect()
    }

    /// The compared flux under which the errors decrease strictly and end smallest.
    pub fn matched_flux(&self) -> Option<FluxConvention> {
        let fluxes = &self.plan.template.oracle_fluxes;
        let series = |f: FluxConvention| -> Option<Vec<f64>> { self.rows.iter().map(|r| r.error_for(f)).collect() };
        let scored: Vec<(FluxConvention, bool, f64)> = fluxes
            .iter()
            .filter_map(|&f| {
                let s = series(f)?;
                let decreasing = s.windows(2).all(|w| w[1] < w[0]);
                Some((f, decreasing, *s.last()?))
            })
            .collect();
        scored
            .iter()
            .filter(|s| s.1)
            .chain(scored.iter())
            .min_by(|a, b| (!a.1).cmp(&!b.1).then(a.2.total_cmp(&b.2)))
            .map(|s| s.0)
    }
}

/// Evolves one row of the plan.
pub fn evolve_row(template: &SweepTemplate, eps: f64, beta: f64) -> Result<(ModelSpec, Trajectory)> {
    let m = template.model(eps, beta)?;
    let traj = evolve(&template.run_config(&m))?;
    Ok((m, traj))
}

/// Entropy references at the horizon for every compared flux.
pub fn oracle_references(template: &SweepTemplate) -> Result<Vec<ReferenceSolution>> {
    let g = &template.grid;
    let spacing = 2.0 * g.half_length / g.n_modes as f64;
    let sharp =
        crate::models::InitialData { profile: template.initial.profile, mollifier_width: 0.0, c0: template.initial.c0 };
    template
        .oracle_fluxes
        .par_iter()
        .map(|&f| entropy_reference(&sharp, g.half_length, f, g.horizon, spacing))
        .collect()
}

pub fn compare(
    final_field: &crate::spectral::Field,
    reference: &ReferenceSolution,
    window: (f64, f64),
) -> Result<(f64, f64)> {
    let cells = spectral_cell_averages(final_field, reference.cells.len());
    Ok((reference.window_distance(&cells, window, 1.0)?, reference.window_distance(&cells, window, 1.5)?))
}

fn run_row(plan: &SweepPlan, row: PlannedRow, refs: &[ReferenceSolution]) -> Result<RowData> {
    let start = Instant::now();
    let t = &plan.template;
    let (m, traj) = evolve_row(t, row.epsilon, row.beta)?;
    let last = traj.last();
    let mut comparisons = Vec::new();
    for (flux, r) in t.oracle_fluxes.iter().zip(refs) {
        let (l1, l1_5) = compare(last, r, t.window)?;
        comparisons.push(OracleComparison { flux: *flux, l1, l1_5 });
    }
    let primary = comparisons.iter().find(|c| c.flux == t.primary_flux).copied().expect("primary flux is compared");
    let norms = collect_norms(&traj, &m);
    let scaling = scaling_report(&norms, &m)?;
    let pair = make_entropy_pair(t.pair, &m)?;
    let residuals = match residual_decomposition(&traj, &m, &pair) {
        Ok(r) => Some(r),
        Err(Error::MissingTendencies) => None,
        Err(e) => return Err(e),
    };
    Ok(RowData {
        comparisons,
        l1_error: primary.l1,
        l1_5_error: primary.l1_5,
        energy_drift: norms.energy_drift(),
        norms,
        scaling,
        residuals,
        stats: traj.stats,
        initial_bounds: traj.initial_bounds.clone(),
        final_values: last.values().to_vec(),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every row in parallel; individual failures are recorded, and the
/// sweep fails only when more than half of the rows do.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    let refs = oracle_references(&plan.template)?;
    let mut rows: Vec<SweepRow> = plan
        .rows
        .par_iter()
        .map(|&row| {
            let m = plan.template.model(row.epsilon, row.beta);
            let width = m.map(|m| plan.template.initial.resolve(&m).mollifier_width).unwrap_or(f64::NAN);
            let outcome = match run_row(plan, row, &refs) {
                Ok(d) => RowOutcome::Ok(Box::new(d)),
                Err(e) => RowOutcome::Failed { message: e.to_string(), exit_code: e.exit_code() },
            };
            SweepRow { epsilon: row.epsilon, beta: row.beta, mollifier_width: width, outcome }
        })
        .collect();
    rows.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    let failed = rows.iter().filter(|r| r.data().is_none()).count();
    if 2 * failed > rows.len() {
        return Err(Error::SweepFailed { failed, total: rows.len() });
    }
    let observed_orders = rows
        .windows(2)
        .map(|w| match (w[0].data(), w[1].data()) {
            (Some(a), Some(b)) => Some(observed_order(a.l1_error, b.l1_error, w[0].epsilon, w[1].epsilon)),
            _ => None,
        })
        .collect();
    Ok(SweepResult { plan: plan.clone(), rows, observed_orders, references: refs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Profile;

    pub fn small_template(kind: ModelKind) -> SweepTemplate {
        SweepTemplate {
            kind,
            grid: GridSection {
                n_modes: 1024,
                half_length: 8.0,
                horizon: 0.2,
                samples: 9,
                cfl_safety: 0.4,
                record_time_derivatives: true,
                guards: Default::default(),
            },
            initial: InitialSection {
                profile: Profile::MollifiedRiemann { u_left: 1.0, u_right: 0.0, x_jump: 0.0 },
                w0: 0.5,
                width: None,
                c0: 100.0,
            },
            window: (-1.5, 1.5),
            pair: PairKind::Quadratic,
            oracle_fluxes: vec![FluxConvention::FullSquare, FluxConvention::HalfSquare],
            primary_flux: FluxConvention::FullSquare,
        }
    }

    #[test]
    fn regime_formulas() {
        let t = small_template(ModelKind::Rosenau);
        let p = plan_sweep(Regime::BigO4, 1.0, &[0.3], t.clone()).unwrap();
        assert_eq!(p.rows[0].beta, 0.3f64.powi(4));
        assert!((p.rows[0].beta - 0.0081).abs() < 1e-15);
        let p = plan_sweep(Regime::LittleO4, 0.5, &[0.25], t.clone()).unwrap();
        assert_eq!(p.rows[0].beta, 0.25f64.powf(4.5));
        assert!(matches!(plan_sweep(Regime::BigO3, 1.0, &[0.3], t.clone()), Err(Error::Config(_))));
        let k = small_template(ModelKind::Kdv);
        assert!(plan_sweep(Regime::LittleO3, 0.5, &[0.2, 0.1], k).is_ok());
    }

    #[test]
    fn plan_validation() {
        let t = small_template(ModelKind::Rosenau);
        assert!(plan_sweep(Regime::BigO4, 1.0, &[0.1, 0.2], t.clone()).is_err());
        assert!(plan_sweep(Regime::BigO4, 1.0, &[1.5], t.clone()).is_err());
        assert!(plan_sweep(Regime::BigO4, 1.0, &[], t.clone()).is_err());
        assert!(plan_sweep(Regime::BigO4, 200.0, &[0.5], t.clone()).is_err());
        assert!(plan_sweep(Regime::BigO4, -1.0, &[0.5], t).is_err());
    }

    proptest::proptest! {
        #[test]
        fn regime_arithmetic_is_exact(e in 0.01f64..0.9, c in 0.1f64..5.0, d in 0.01f64..2.0) {
            let t = small_template(ModelKind::Kdv);
            for (r, p) in [(Regime::BigO4, c), (Regime::LittleO4, d), (Regime::BigO3, c), (Regime::LittleO3, d)] {
                if let Ok(plan) = plan_sweep(r, p, &[e], t.clone()) {
                    let expected = match r {
                        Regime::BigO4 => p * e.powi(4),
                        Regime::LittleO4 => e.powf(4.0 + p),
                        Regime::BigO3 => p * e.powi(3),
                        Regime::LittleO3 => e.powf(3.0 + p),
                    };
                    proptest::prop_assert_eq!(plan.rows[0].beta.to_bits(), expected.to_bits());
                }
            }
        }
    }

    #[test]
    fn orders() {
        assert_eq!(observed_order(0.08, 0.04, 0.2, 0.1), 1.0);
        assert_eq!(observed_order(0.05, 0.05, 0.2, 0.1), 0.0);
    }

    #[test]
    fn single_row_sweep_and_determinism() {
        let plan = plan_sweep(Regime::BigO4, 1.0, &[0.2], small_template(ModelKind::Rosenau)).unwrap();
        let a = run_sweep(&plan).unwrap();
        assert_eq!(a.rows.len(), 1);
        assert!(a.observed_orders.is_empty());
        let d = a.rows[0].data().unwrap();
        assert!(d.residuals.is_some());
        assert_eq!(d.comparisons.len(), 2);
        let mut b = run_sweep(&plan).unwrap();
        // wall time is the only field allowed to differ
        if let (RowOutcome::Ok(x), RowOutcome::Ok(y)) = (&a.rows[0].outcome, &mut b.rows[0].outcome) {
            y.wall_seconds = x.wall_seconds;
        }
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn failed_rows_are_recorded() {
        let mut t = small_template(ModelKind::Rosenau);
        t.grid.guards.blowup_threshold = 0.5;
        let plan = plan_sweep(Regime::BigO4, 1.0, &[0.2, 0.1], t).unwrap();
        assert!(matches!(run_sweep(&plan), Err(Error::SweepFailed { failed: 2, total: 2 })));
    }
}
