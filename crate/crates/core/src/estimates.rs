//! Norm monitors along a trajectory and the scaling reports built from them.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::models::{ModelKind, ModelSpec};
use crate::quadrature::{cumulative_trapezoid, trapezoid};
use crate::spectral::{differentiate, lp_norm, Field};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub l2_u: Vec<f64>,
    pub l4_u: Vec<f64>,
    pub linf_u: Vec<f64>,
    pub l2_ux: Vec<f64>,
    pub l2_uxx: Vec<f64>,
    pub l2_uxxx: Vec<f64>,
    pub linf_ux: Vec<f64>,
    /// `||u u_x||_2`.
    pub l2_uux: Vec<f64>,
    /// Trapezoid over samples of `2 eps ||u_x||^2`.
    pub dissipation_integral: Vec<f64>,
    /// The integrator's own step-wise accumulation of the same integral, when available.
    pub dissipation_stepwise: Option<Vec<f64>>,
    /// Model energy `||u||^2 + [rlw] beta ||u_x||^2 + beta^2 ||u_xx||^2` (Rosenau family) or `||u||^2`.
    pub energy: Vec<f64>,
    pub l2_ut: Option<Vec<f64>>,
    pub l2_utx: Option<Vec<f64>>,
    pub l2_utxx: Option<Vec<f64>>,
    pub l2_utxxx: Option<Vec<f64>>,
}

fn l2(f: &Field) -> f64 {
    lp_norm(f, 2.0).expect("p = 2 is supported")
}

fn deriv(f: &Field, k: u32) -> Field {
    differentiate(f, k).expect("order within 1..=5")
}

pub fn collect_norms(traj: &Trajectory, m: &ModelSpec) -> NormSeries {
    let mut ns = NormSeries { times: traj.times.clone(), ..Default::default() };
    let (w_rlw, w_ros) = m.energy_weights();
    for f in &traj.fields {
        let ux = deriv(f, 1);
        let uxx = deriv(f, 2);
        let uxxx = deriv(f, 3);
        let uux: Vec<f64> = f.values().iter().zip(ux.values()).map(|(a, b)| a * b).collect();
        ns.l2_u.push(l2(f));
        ns.l4_u.push(lp_norm(f, 4.0).expect("p = 4 is supported"));
        ns.linf_u.push(f.max_abs());
        ns.l2_ux.push(l2(&ux));
        ns.l2_uxx.push(l2(&uxx));
        ns.l2_uxxx.push(l2(&uxxx));
        ns.linf_ux.push(ux.max_abs());
        ns.l2_uux.push(crate::spectral::lp_norm_values(&uux, f.grid().spacing, 2.0).expect("p = 2"));
        let n2 = |v: f64| v * v;
        ns.energy.push(n2(l2(f)) + w_rlw * n2(l2(&ux)) + w_ros * n2(l2(&uxx)));
    }
    let rate: Vec<f64> = ns.l2_ux.iter().map(|v| 2.0 * m.epsilon * v * v).collect();
    ns.dissipation_integral = cumulative_trapezoid(&ns.times, &rate);
    ns.dissipation_stepwise = traj.dissipation.clone();
    if let Some(tend) = &traj.tendencies {
        ns.l2_ut = Some(tend.iter().map(l2).collect());
        ns.l2_utx = Some(tend.iter().map(|t| l2(&deriv(t, 1))).collect());
        ns.l2_utxx = Some(tend.iter().map(|t| l2(&deriv(t, 2))).collect());
        ns.l2_utxxx = Some(tend.iter().map(|t| l2(&deriv(t, 3))).collect());
    }
    ns
}

impl NormSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Best available running dissipation: step-wise if recorded, trapezoid otherwise.
    pub fn dissipation(&self) -> &[f64] {
        self.dissipation_stepwise.as_deref().unwrap_or(&self.dissipation_integral)
    }

    /// `E(t) + 2 eps int_0^t ||u_x||^2`, which the dynamics keep constant.
    pub fn energy_balance(&self) -> Vec<f64> {
        self.energy.iter().zip(self.dissipation()).map(|(e, d)| e + d).collect()
    }

    /// Largest `|balance(t) / balance(0) - 1|` over the samples.
    pub fn energy_drift(&self) -> f64 {
        let b = self.energy_balance();
        match b.first() {
            Some(&b0) if b0 > 0.0 => b.iter().map(|v| (v / b0 - 1.0).abs()).fold(0.0, f64::max),
            _ => 0.0,
        }
    }

    /// The series of the samples multiplied by `lambda`: norms scale linearly,
    /// energy, dissipation and `||u u_x||` quadratically.
    pub fn scaled(&self, lambda: f64) -> Self {
        let a = lambda.abs();
        let s = |v: &Vec<f64>, p: i32| v.iter().map(|x| x * a.powi(p)).collect::<Vec<_>>();
        let so = |v: &Option<Vec<f64>>| v.as_ref().map(|v| s(v, 1));
        Self {
            times: self.times.clone(),
            l2_u: s(&self.l2_u, 1),
            l4_u: s(&self.l4_u, 1),
            linf_u: s(&self.linf_u, 1),
            l2_ux: s(&self.l2_ux, 1),
            l2_uxx: s(&self.l2_uxx, 1),
            l2_uxxx: s(&self.l2_uxxx, 1),
            linf_ux: s(&self.linf_ux, 1),
            l2_uux: s(&self.l2_uux, 2),
            dissipation_integral: s(&self.dissipation_integral, 2),
            dissipation_stepwise: self.dissipation_stepwise.as_ref().map(|v| s(v, 2)),
            energy: s(&self.energy, 2),
            l2_ut: so(&self.l2_ut),
            l2_utx: so(&self.l2_utx),
            l2_utxx: so(&self.l2_utxx),
            l2_utxxx: so(&self.l2_utxxx),
        }
    }

    pub const CSV_COLUMNS: [&'static str; 17] = [
        "time",
        "l2_u",
        "l4_u",
        "linf_u",
        "l2_ux",
        "l2_uxx",
        "l2_uxxx",
        "linf_ux",
        "l2_uux",
        "dissipation_integral",
        "dissipation_stepwise",
        "energy",
        "l2_ut",
        "l2_utx",
        "l2_utxx",
        "l2_utxxx",
        "energy_balance",
    ];

    /// One record per sample time, in [`Self::CSV_COLUMNS`] order; absent optional series are blank.
    pub fn records(&self) -> Vec<Vec<String>> {
        let balance = self.energy_balance();
        let opt = |v: &Option<Vec<f64>>, i: usize| v.as_ref().map(|v| fmt(v[i])).unwrap_or_default();
        (0..self.len())
            .map(|i| {
                vec![
                    fmt(self.times[i]),
                    fmt(self.l2_u[i]),
                    fmt(self.l4_u[i]),
                    fmt(self.linf_u[i]),
                    fmt(self.l2_ux[i]),
                    fmt(self.l2_uxx[i]),
                    fmt(self.l2_uxxx[i]),
                    fmt(self.linf_ux[i]),
                    fmt(self.l2_uux[i]),
                    fmt(self.dissipation_integral[i]),
                    opt(&self.dissipation_stepwise, i),
                    fmt(self.energy[i]),
                    opt(&self.l2_ut, i),
                    opt(&self.l2_utx, i),
                    opt(&self.l2_utxx, i),
                    opt(&self.l2_utxxx, i),
                    fmt(balance[i]),
                ]
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::CSV_COLUMNS)?;
        for r in self.records() {
            out.write_record(&r)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingEntry {
    pub name: String,
    /// Supremum over the samples, or the space-time norm for integrated entries.
    pub value: f64,
    /// Value at `t = 0` for pointwise-in-time entries.
    pub initial: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub model: ModelKind,
    pub epsilon: f64,
    pub beta: f64,
    pub entries: Vec<ScalingEntry>,
    pub tendencies_missing: bool,
}

impl ScalingReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.value)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["name", "value", "initial", "epsilon", "beta"])?;
        for e in &self.entries {
            out.write_record([
                e.name.clone(),
                fmt(e.value),
                e.initial.map(fmt).unwrap_or_default(),
                fmt(self.epsilon),
                fmt(self.beta),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn sup_entry(name: &str, weight: f64, series: &[f64]) -> ScalingEntry {
    let sup = series.iter().cloned().fold(0.0, f64::max);
    ScalingEntry { name: name.into(), value: weight * sup, initial: series.first().map(|v| weight * v) }
}

/// `weight * (int_0^T ||.||_2^2 dt)^(1/2)` from per-sample spatial norms.
fn spacetime_entry(name: &str, weight: f64, times: &[f64], series: &[f64]) -> ScalingEntry {
    let sq: Vec<f64> = series.iter().map(|v| v * v).collect();
    ScalingEntry { name: name.into(), value: weight * trapezoid(times, &sq).max(0.0).sqrt(), initial: None }
}

fn check_params(eps: f64, beta: f64) -> Result<()> {
    if !(eps >= 0.0 && beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("eps and beta must be >= 0, got ({eps}, {beta})")));
    }
    Ok(())
}

pub fn rosenau_scaling_report(ns: &NormSeries, eps: f64, beta: f64) -> Result<ScalingReport> {
    check_params(eps, beta)?;
    let b = beta;
    let mut entries = vec![
        sup_entry("Linf_times_beta_quarter", b.powf(0.25), &ns.linf_u),
        sup_entry("L2ux_times_beta_half", b.sqrt(), &ns.l2_ux),
        sup_entry("L2ux_times_beta_quarter_eps", b.powf(0.25) * eps, &ns.l2_ux),
        sup_entry("L2uxx_times_beta_three_quarters_eps", b.powf(0.75) * eps, &ns.l2_uxx),
        sup_entry("L2uxxx_times_beta_three_halves", b.powf(1.5), &ns.l2_uxxx),
        sup_entry("Linfux_times_beta_three_quarters", b.powf(0.75), &ns.linf_ux),
        sup_entry("L4u", 1.0, &ns.l4_u),
        sup_entry("L2ux_times_eps", eps, &ns.l2_ux),
        sup_entry("L2uxx_times_beta_half_eps_half", (b * eps).sqrt(), &ns.l2_uxx),
        spacetime_entry("ST_uux_times_eps_half", eps.sqrt(), &ns.times, &ns.l2_uux),
    ];
    let t = &ns.times;
    let tend = (&ns.l2_ut, &ns.l2_utx, &ns.l2_utxx, &ns.l2_utxxx);
    let missing = if let (Some(ut), Some(utx), Some(utxx), Some(utxxx)) = tend {
        let e2 = eps.sqrt();
        entries.extend([
            spacetime_entry("ST_utx_times_beta_three_quarters_eps_half", b.powf(0.75) * e2, t, utx),
            spacetime_entry("ST_utxxx_times_beta_seven_quarters_eps_half", b.powf(1.75) * e2, t, utxxx),
            spacetime_entry("ST_ut_times_beta_quarter_eps", b.powf(0.25) * eps, t, ut),
            spacetime_entry("ST_utxx_times_beta_five_quarters_eps_half", b.powf(1.25) * e2, t, utxx),
            spacetime_entry("ST_utx_times_beta_half_eps_half", b.sqrt() * e2, t, utx),
            spacetime_entry("ST_ut_times_eps_half", e2, t, ut),
            spacetime_entry("ST_utxxx_times_beta_three_halves_eps_half", b.powf(1.5) * e2, t, utxxx),
            spacetime_entry("ST_utxx_times_beta_eps_half", b * e2, t, utxx),
        ]);
        false
    } else {
        true
    };
    Ok(ScalingReport { model: ModelKind::Rosenau, epsilon: eps, beta, entries, tendencies_missing: missing })
}

pub fn kdv_scaling_report(ns: &NormSeries, eps: f64, beta: f64) -> Result<ScalingReport> {
    check_params(eps, beta)?;
    let b = beta;
    let uxx_sq: Vec<f64> = ns.l2_uxx.iter().map(|v| v * v).collect();
    let int_uxx = trapezoid(&ns.times, &uxx_sq).max(0.0);
    let entries = vec![
        sup_entry("Linf_times_beta_third", b.powf(1.0 / 3.0), &ns.linf_u),
        sup_entry("L2ux_times_beta_two_thirds", b.powf(2.0 / 3.0), &ns.l2_ux),
        sup_entry("L2ux_times_beta_half", b.sqrt(), &ns.l2_ux),
        ScalingEntry {
            name: "ST_uxx_times_beta_two_thirds_eps_half".into(),
            value: (2.0 * b.powf(4.0 / 3.0) * eps * int_uxx).sqrt(),
            initial: None,
        },
        ScalingEntry {
            name: "ST_uxx_times_beta_half_eps_half".into(),
            value: (1.5 * b * eps * int_uxx).sqrt(),
            initial: None,
        },
    ];
    Ok(ScalingReport { model: ModelKind::Kdv, epsilon: eps, beta, entries, tendencies_missing: false })
}

/// Picks the report matching the model family.
pub fn scaling_report(ns: &NormSeries, m: &ModelSpec) -> Result<ScalingReport> {
    let mut r = if m.kind == ModelKind::Kdv {
        kdv_scaling_report(ns, m.epsilon, m.beta)?
    } else {
        rosenau_scaling_report(ns, m.epsilon, m.beta)?
    };
    r.model = m.kind;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{evolve, Guards, RunConfig};
    use crate::models::{InitialData, Profile};
    use crate::spectral::make_grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn trajectory_of(fields: Vec<Field>) -> Trajectory {
        let times = (0..fields.len()).map(|i| i as f64 * 0.1).collect();
        Trajectory::from_snapshots(times, fields).unwrap()
    }

    #[test]
    fn zero_trajectory_gives_zero_norms_and_reports() {
        let g = make_grid(32, 2.0).unwrap();
        let tr = trajectory_of(vec![Field::zeros(&g); 3]);
        let m = ModelSpec::new(ModelKind::Rosenau, 0.1, 0.01).unwrap();
        let ns = collect_norms(&tr, &m);
        for s in
            [&ns.l2_u, &ns.l4_u, &ns.linf_u, &ns.l2_ux, &ns.l2_uxx, &ns.l2_uxxx, &ns.linf_ux, &ns.dissipation_integral]
        {
            assert!(s.iter().all(|&v| v == 0.0));
        }
        let r = rosenau_scaling_report(&ns, 0.1, 0.01).unwrap();
        assert!(r.entries.iter().all(|e| e.value == 0.0));
        assert!(r.tendencies_missing);
        let k = kdv_scaling_report(&ns, 0.1, 0.01).unwrap();
        assert!(k.entries.iter().all(|e| e.value == 0.0));
    }

    #[test]
    fn single_mode_norms() {
        let g = make_grid(64, PI).unwrap();
        let a = 0.7;
        let tr = trajectory_of(vec![Field::from_fn(&g, |x| a * x.sin())]);
        let ns = collect_norms(&tr, &ModelSpec::new(ModelKind::Rosenau, 0.1, 0.01).unwrap());
        let expected = a * PI.sqrt();
        assert_relative_eq!(ns.l2_u[0], expected, max_relative = 1e-12);
        assert_relative_eq!(ns.l2_ux[0], expected, max_relative = 1e-12);
        assert_relative_eq!(ns.l2_uxx[0], expected, max_relative = 1e-12);
        assert_relative_eq!(ns.linf_ux[0], a, max_relative = 1e-12);
    }

    fn rosenau_run(samples: usize, tendencies: bool) -> (Trajectory, ModelSpec) {
        let m = ModelSpec::new(ModelKind::Rosenau, 0.1, 0.05).unwrap();
        let c = RunConfig {
            model: m,
            n_modes: 256,
            half_length: 8.0,
            initial: InitialData {
                profile: Profile::Gaussian { amplitude: 0.8, width: 0.7, center: 0.0 },
                mollifier_width: 0.1,
                c0: 100.0,
            },
            horizon: 0.4,
            cfl_safety: 0.4,
            sample_times: RunConfig::uniform_samples(0.4, samples),
            record_time_derivatives: tendencies,
            guards: Guards::default(),
        };
        (evolve(&c).unwrap(), m)
    }

    #[test]
    fn energy_combination_is_constant() {
        let (tr, m) = rosenau_run(33, false);
        let ns = collect_norms(&tr, &m);
        assert!(ns.energy_drift() <= 1e-6, "drift {}", ns.energy_drift());
        assert!(ns.dissipation_integral.windows(2).all(|w| w[1] >= w[0]));
        // the trapezoid path agrees with the step-wise one to sampling accuracy
        let d1 = *ns.dissipation_integral.last().unwrap();
        let d2 = *ns.dissipation().last().unwrap();
        assert!((d1 - d2).abs() <= 1e-3 * d2);
        let b0 = ns.energy_balance()[0];
        assert!(ns.energy_balance().iter().all(|&b| b <= (1.0 + 1e-6) * b0));
    }

    #[test]
    fn linf_entry_is_the_definition_and_homogeneous() {
        let (tr, m) = rosenau_run(9, true);
        let ns = collect_norms(&tr, &m);
        let r = rosenau_scaling_report(&ns, m.epsilon, m.beta).unwrap();
        let direct = m.beta.powf(0.25) * tr.fields.iter().map(Field::max_abs).fold(0.0, f64::max);
        assert_eq!(r.get("Linf_times_beta_quarter").unwrap(), direct);
        assert!(!r.tendencies_missing);
        assert!(r.entries.iter().all(|e| e.value.is_finite() && e.value >= 0.0));
        let scaled = rosenau_scaling_report(&ns.scaled(3.0), m.epsilon, m.beta).unwrap();
        assert_relative_eq!(scaled.get("Linf_times_beta_quarter").unwrap(), 3.0 * direct, max_relative = 1e-15);
        let k = kdv_scaling_report(&ns, m.epsilon, m.beta).unwrap();
        assert_eq!(
            k.get("Linf_times_beta_third").unwrap(),
            m.beta.powf(1.0 / 3.0) * ns.linf_u.iter().cloned().fold(0.0, f64::max)
        );
    }

    #[test]
    fn spacetime_entries_converge_with_sample_density() {
        let values: Vec<f64> = [9usize, 17, 33, 65]
            .iter()
            .map(|&n| {
                let (tr, m) = rosenau_run(n, true);
                rosenau_scaling_report(&collect_norms(&tr, &m), m.epsilon, m.beta)
                    .unwrap()
                    .get("ST_ut_times_eps_half")
                    .unwrap()
            })
            .collect();
        let d: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(d[1] < d[0] && d[2] < d[1], "{values:?}");
        assert!(d[2] <= 1e-3 * values[3]);
    }

    #[test]
    fn csv_has_one_row_per_sample() {
        let (tr, m) = rosenau_run(5, true);
        let ns = collect_norms(&tr, &m);
        let mut buf = Vec::new();
        ns.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("time,l2_u,"));
    }
}
