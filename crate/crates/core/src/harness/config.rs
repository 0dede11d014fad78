//! TOML run configuration.
//!
//! ```toml
//! [model]
//! kind = "rosenau"          # burgers | rosenau | rosenau_rlw | rosenau_kdv_rlw | kdv
//! epsilon = 0.05            # single runs only
//! beta = 6.25e-6
//!
//! [grid]
//! n_modes = 4096
//! half_length = 8.0
//! horizon = 0.4
//! samples = 64
//! cfl_safety = 0.4
//!
//! [initial]
//! profile = { type = "mollified_riemann", u_left = 1.0, u_right = 0.0, x_jump = 0.0 }
//! w0 = 0.25                 # width = w0 * max(eps, beta)^(1/4), unless `width` is given
//! c0 = 100.0
//!
//! [sweep]
//! regime = "little_o_4"     # big_O_4 | little_o_4 | big_O_3 | little_o_3
//! delta = 0.5               # little_o regimes; `constant` for big_O regimes
//! epsilons = [0.2, 0.1, 0.05, 0.025]
//! window = [-1.5, 1.5]
//!
//! [output]
//! dir = "runs"
//! id = "default"
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entropy::PairKind;
use crate::error::{Error, Result};
use crate::integrator::{Guards, RunConfig};
use crate::models::{FluxConvention, InitialData, ModelKind, ModelSpec, Profile};

use super::sweep::{plan_sweep, Regime, SweepPlan, SweepTemplate};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
}

fn default_samples() -> usize {
    64
}

fn default_cfl() -> f64 {
    0.4
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_modes: usize,
    pub half_length: f64,
    pub horizon: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    #[serde(default = "default_true")]
    pub record_time_derivatives: bool,
    #[serde(default)]
    pub guards: Guards,
}

fn default_w0() -> f64 {
    1.0
}

fn default_c0() -> f64 {
    100.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub profile: Profile,
    #[serde(default = "default_w0")]
    pub w0: f64,
    /// Fixed mollifier width, overriding `w0`.
    pub width: Option<f64>,
    #[serde(default = "default_c0")]
    pub c0: f64,
}

impl InitialSection {
    pub fn resolve(&self, m: &ModelSpec) -> InitialData {
        match self.width {
            Some(w) => InitialData { profile: self.profile, mollifier_width: w, c0: self.c0 },
            None => InitialData::for_model(self.profile, self.w0, self.c0, m),
        }
    }
}

fn default_window() -> (f64, f64) {
    (-1.5, 1.5)
}

fn default_pair() -> PairKind {
    PairKind::Quadratic
}

fn default_fluxes() -> Vec<FluxConvention> {
    vec![FluxConvention::FullSquare, FluxConvention::HalfSquare]
}

fn default_primary() -> FluxConvention {
    FluxConvention::FullSquare
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub regime: Regime,
    pub constant: Option<f64>,
    pub delta: Option<f64>,
    pub epsilons: Vec<f64>,
    #[serde(default = "default_window")]
    pub window: (f64, f64),
    #[serde(default = "default_pair")]
    pub pair: PairKind,
    /// Limit fluxes the runs are compared against.
    #[serde(default = "default_fluxes")]
    pub oracle_fluxes: Vec<FluxConvention>,
    /// Flux whose errors fill the main error column.
    #[serde(default = "default_primary")]
    pub primary_flux: FluxConvention,
}

fn default_dir() -> String {
    "runs".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: String,
    pub id: Option<String>,
    /// Times at which `profile_t<time>.csv` is written; defaults to the horizon.
    #[serde(default)]
    pub profile_times: Vec<f64>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: default_dir(), id: None, profile_times: vec![] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelSection,
    pub grid: GridSection,
    pub initial: InitialSection,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let c: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.check()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    fn check(&self) -> Result<()> {
        let g = &self.grid;
        if g.samples < 2 {
            return Err(Error::Config("grid.samples must be at least 2".into()));
        }
        if !(g.horizon > 0.0) {
            return Err(Error::Config("grid.horizon must be positive".into()));
        }
        if let Some(s) = &self.sweep {
            if s.oracle_fluxes.is_empty() {
                return Err(Error::Config("sweep.oracle_fluxes must not be empty".into()));
            }
            if !s.oracle_fluxes.contains(&s.primary_flux) {
                return Err(Error::Config("sweep.primary_flux must be one of sweep.oracle_fluxes".into()));
            }
            if !(s.window.0 < s.window.1) {
                return Err(Error::Config("sweep.window must satisfy lo < hi".into()));
            }
        }
        Ok(())
    }

    /// Run id: the configured one, else the given fallback (usually the file stem).
    pub fn run_id(&self, fallback: &str) -> String {
        self.output.id.clone().unwrap_or_else(|| fallback.to_string())
    }

    pub fn single_model(&self) -> Result<ModelSpec> {
        match (self.model.epsilon, self.model.beta) {
            (Some(e), Some(b)) => ModelSpec::new(self.model.kind, e, b),
            _ => Err(Error::Config("model.epsilon and model.beta are required for a single run".into())),
        }
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

    pub fn template(&self) -> Result<SweepTemplate> {
        let s = self.sweep.as_ref().ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
        Ok(SweepTemplate {
            kind: self.model.kind,
            grid: self.grid.clone(),
            initial: self.initial.clone(),
            window: s.window,
            pair: s.pair,
            oracle_fluxes: s.oracle_fluxes.clone(),
            primary_flux: s.primary_flux,
        })
    }

    pub fn plan(&self) -> Result<SweepPlan> {
        let s = self.sweep.as_ref().ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
        let param = match s.regime {
            Regime::BigO4 | Regime::BigO3 => s.constant.unwrap_or(1.0),
            Regime::LittleO4 | Regime::LittleO3 => {
                s.delta.ok_or_else(|| Error::Config("little_o regimes need sweep.delta".into()))?
            }
        };
        plan_sweep(s.regime, param, &s.epsilons, self.template()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const SAMPLE: &str = r#"
[model]
kind = "rosenau"
epsilon = 0.1
beta = 0.0001

[grid]
n_modes = 256
half_length = 8.0
horizon = 0.2

[initial]
profile = { type = "mollified_riemann", u_left = 1.0, u_right = 0.0, x_jump = 0.0 }
w0 = 0.5

[sweep]
regime = "big_O_4"
constant = 1.0
epsilons = [0.2, 0.1]
"#;

    #[test]
    fn parses_with_defaults() {
        let c = Config::parse(SAMPLE).unwrap();
        assert_eq!(c.grid.samples, 64);
        assert_eq!(c.grid.cfl_safety, 0.4);
        assert_eq!(c.initial.c0, 100.0);
        assert_eq!(c.output.dir, "runs");
        let s = c.sweep.as_ref().unwrap();
        assert_eq!(s.window, (-1.5, 1.5));
        assert_eq!(s.pair, PairKind::Quadratic);
        let m = c.single_model().unwrap();
        let rc = c.run_config(&m);
        assert_eq!(rc.sample_times.len(), 64);
        assert_eq!(rc.initial.mollifier_width, 0.5 * 0.1f64.powf(0.25));
        assert_eq!(Config::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let bad = SAMPLE.replace("w0 = 0.5", "w0 = 0.5\nwidht = 0.1");
        assert!(matches!(Config::parse(&bad), Err(Error::Config(_))));
        let bad = SAMPLE.replace("[grid]", "[grid]\nspeed = 3");
        assert!(matches!(Config::parse(&bad), Err(Error::Config(_))));
        assert!(matches!(Config::parse("[model]\nkind = \"heat\""), Err(Error::Config(_))));
    }

    #[test]
    fn little_o_needs_delta() {
        let c = Config::parse(&SAMPLE.replace("big_O_4", "little_o_4")).unwrap();
        assert!(matches!(c.plan(), Err(Error::Config(_))));
    }
}
