//! Entropy pairs, the entropy-dissipation decomposition and an `H^-1` proxy.
//!
//! Multiplying the model equation by `eta'(u)` gives
//! `eta(u)_t + q(u)_x = I1 + I2 + I3 + I4` with
//!
//! * `I1 = (eps eta' u_x)_x`, `I2 = -eps eta'' u_x^2`,
//! * `I3 = (G3)_x`, `G3 = -beta^2 eta' u_txxx + [rlw] beta eta' u_tx - [kdv] beta eta' u_xx`,
//! * `I4 = beta^2 eta'' u_x u_txxx - [rlw] beta eta'' u_x u_tx + [kdv] beta eta'' u_x u_xx`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::models::{FluxConvention, ModelSpec};
use crate::oracle::SpaceTimeBump;
use crate::quadrature::{poly_bump, time_window, trapezoid};
use crate::spectral::{differentiate, Field};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PairKind {
    Quadratic,
    SmoothedKruzhkov { k: f64, delta: f64 },
    CompactBump { center: f64, radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyPair {
    pub kind: PairKind,
    pub flux_convention: FluxConvention,
}

pub fn make_entropy_pair(kind: PairKind, m: &ModelSpec) -> Result<EntropyPair> {
    match kind {
        PairKind::SmoothedKruzhkov { k, delta } if !(delta > 0.0) || !k.is_finite() => {
            Err(Error::InvalidArgument(format!("smoothed Kruzhkov pair needs delta > 0, got {delta}")))
        }
        PairKind::CompactBump { center, radius } if !(radius > 0.0) || !center.is_finite() => {
            Err(Error::InvalidArgument(format!("bump entropy needs radius > 0, got {radius}")))
        }
        _ => Ok(EntropyPair { kind, flux_convention: m.flux_convention }),
    }
}

impl EntropyPair {
    pub fn id(&self) -> String {
        match self.kind {
            PairKind::Quadratic => "quadratic".into(),
            PairKind::SmoothedKruzhkov { k, delta } => format!("kruzhkov(k={k},delta={delta})"),
            PairKind::CompactBump { center, radius } => format!("bump(center={center},radius={radius})"),
        }
    }

    pub fn eta(&self, u: f64) -> f64 {
        match self.kind {
            PairKind::Quadratic => u * u,
            PairKind::SmoothedKruzhkov { k, delta } => (u - k).hypot(delta) - delta,
            PairKind::CompactBump { center, radius } => poly_bump((u - center) / radius).0,
        }
    }

    pub fn eta_prime(&self, u: f64) -> f64 {
        match self.kind {
            PairKind::Quadratic => 2.0 * u,
            PairKind::SmoothedKruzhkov { k, delta } => (u - k) / (u - k).hypot(delta),
            PairKind::CompactBump { center, radius } => poly_bump((u - center) / radius).1 / radius,
        }
    }

    pub fn eta_second(&self, u: f64) -> f64 {
        match self.kind {
            PairKind::Quadratic => 2.0,
            PairKind::SmoothedKruzhkov { k, delta } => {
                let r = (u - k).hypot(delta);
                delta * delta / (r * r * r)
            }
            PairKind::CompactBump { center, radius } => {
                let s = (u - center) / radius;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - s * s) * (30.0 * s * s - 6.0) / (radius * radius)
                }
            }
        }
    }

    /// `q(u) = a int_0^u xi eta'(xi) d xi` with `a = f'(u)/u`, in closed form.
    pub fn q(&self, u: f64) -> f64 {
        let a = self.flux_convention.slope_factor();
        match self.kind {
            PairKind::Quadratic => a * 2.0 / 3.0 * u * u * u,
            PairKind::SmoothedKruzhkov { k, delta } => {
                crate::oracle::kruzhkov_pair(u, k, delta, self.flux_convention).1
            }
            PairKind::CompactBump { center, radius } => {
                // with xi = c + r s: int xi eta' = c phi + r (s phi - Phi), Phi' = phi = (1 - s^2)^3
                let anti = |v: f64| {
                    let s = ((v - center) / radius).clamp(-1.0, 1.0);
                    let phi = poly_bump(s).0;
                    let s2 = s * s;
                    let big_phi = s * (1.0 - s2 + 0.6 * s2 * s2 - s2 * s2 * s2 / 7.0);
                    center * phi + radius * (s * phi - big_phi)
                };
                a * (anti(u) - anti(0.0))
            }
        }
    }
}

/// Space-time samples on a uniform time lattice `t_j = t_0 + j dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeBlock {
    pub values: Vec<Vec<f64>>,
    pub dt: f64,
    pub spacing: f64,
}

/// Windowed space-time `H^-1` norm: the block is multiplied by `16 s^2 (1-s)^2`
/// over its time span, transformed in `(t, x)` over the periods `n_t dt` and
/// `n_x h`, and `(P X sum |g^|^2 / (1 + tau^2 + xi^2))^(1/2)` is returned.
pub fn hneg_proxy(block: &SpaceTimeBlock) -> f64 {
    let nt = block.values.len();
    if nt == 0 {
        return 0.0;
    }
    let nx = block.values[0].len();
    let period_t = nt as f64 * block.dt;
    let period_x = nx as f64 * block.spacing;
    let mut planner = FftPlanner::new();
    let fx = planner.plan_fft_forward(nx);
    let ft = planner.plan_fft_forward(nt);
    let mut rows: Vec<Vec<Complex64>> = block
        .values
        .iter()
        .enumerate()
        .map(|(j, row)| {
            let w = if nt > 1 { time_window(j as f64 / (nt - 1) as f64) } else { 0.0 };
            let mut r: Vec<Complex64> = row.iter().map(|&v| Complex64::new(w * v, 0.0)).collect();
            fx.process(&mut r);
            r
        })
        .collect();
    let norm = 1.0 / (nt * nx) as f64;
    let wavenumber = |m: usize, n: usize, period: f64| {
        let k = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
        2.0 * std::f64::consts::PI * k / period
    };
    let mut col = vec![Complex64::new(0.0, 0.0); nt];
    let mut sum = 0.0;
    for i in 0..nx {
        for j in 0..nt {
            col[j] = rows[j][i];
        }
        ft.process(&mut col);
        let xi = wavenumber(i, nx, period_x);
        for (m, c) in col.iter().enumerate() {
            let tau = wavenumber(m, nt, period_t);
            sum += (c * norm).norm_sqr() / (1.0 + tau * tau + xi * xi);
        }
    }
    rows.clear();
    (period_t * period_x * sum).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub pair: String,
    /// Space-time `L^2` norm of the flux `eps eta' u_x` inside `I1`.
    pub i1_hneg: f64,
    /// Windowed `H^-1` proxy of `I1` itself.
    pub i1_proxy: f64,
    pub i2_l1: f64,
    /// Space-time `L^2` norm of the flux `G3` inside `I3`.
    pub i3_hneg: f64,
    pub i3_proxy: f64,
    pub i4_l1: f64,
}

/// Pointwise fields of the decomposition at one sample.
struct Terms {
    g1: Vec<f64>,
    i1: Vec<f64>,
    i2: Vec<f64>,
    g3: Vec<f64>,
    i3: Vec<f64>,
    i4: Vec<f64>,
}

fn terms_at(f: &Field, ut: Option<&Field>, m: &ModelSpec, pair: &EntropyPair) -> Result<Terms> {
    let g = f.grid();
    let d = |f: &Field, k: u32| differentiate(f, k).expect("order within 1..=5");
    let u = f.values();
    let ux = d(f, 1);
    let uxx = d(f, 2);
    let (eps, beta) = (m.epsilon, m.beta);
    let kind = m.kind;
    let ep: Vec<f64> = u.iter().map(|&v| pair.eta_prime(v)).collect();
    let es: Vec<f64> = u.iter().map(|&v| pair.eta_second(v)).collect();
    let (utx, utxxx) = if kind.is_rosenau_family() {
        let ut = ut.ok_or(Error::MissingTendencies)?;
        (Some(d(ut, 1)), Some(d(ut, 3)))
    } else {
        (None, None)
    };
    let n = u.len();
    let mut g1 = vec![0.0; n];
    let mut i2 = vec![0.0; n];
    let mut g3 = vec![0.0; n];
    let mut i4 = vec![0.0; n];
    for i in 0..n {
        let uxi = ux.values()[i];
        g1[i] = eps * ep[i] * uxi;
        i2[i] = -eps * es[i] * uxi * uxi;
        let mut flux3 = 0.0;
        let mut prod4 = 0.0;
        if let Some(t3) = &utxxx {
            flux3 -= beta * beta * ep[i] * t3.values()[i];
            prod4 += beta * beta * es[i] * uxi * t3.values()[i];
        }
        if kind.has_rlw_term() {
            let t1 = utx.as_ref().expect("rosenau family").values()[i];
            flux3 += beta * ep[i] * t1;
            prod4 -= beta * es[i] * uxi * t1;
        }
        if kind.has_kdv_term() {
            flux3 -= beta * ep[i] * uxx.values()[i];
            prod4 += beta * es[i] * uxi * uxx.values()[i];
        }
        g3[i] = flux3;
        i4[i] = prod4;
    }
    let div = |v: &[f64]| -> Vec<f64> {
        let fv = Field::from_values(g, v.to_vec()).expect("grid length");
        d(&fv, 1).values().to_vec()
    };
    let i1 = div(&g1);
    let i3 = div(&g3);
    Ok(Terms { g1, i1, i2, g3, i3, i4 })
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Ok(0.0);
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1e-300)) {
        return Err(Error::InvalidArgument("the H^-1 proxy needs uniformly spaced samples".into()));
    }
    Ok(dt)
}

/// The four diagnostics as space-time quadratures over the sampled trajectory.
pub fn residual_decomposition(traj: &Trajectory, m: &ModelSpec, pair: &EntropyPair) -> Result<ResidualReport> {
    if m.kind.is_rosenau_family() && traj.tendencies.is_none() {
        return Err(Error::MissingTendencies);
    }
    let h = traj.grid().spacing;
    let dt = uniform_step(&traj.times)?;
    let mut g1_sq = Vec::new();
    let mut i2_l1 = Vec::new();
    let mut g3_sq = Vec::new();
    let mut i4_l1 = Vec::new();
    let mut i1_block = Vec::new();
    let mut i3_block = Vec::new();
    for (j, f) in traj.fields.iter().enumerate() {
        let ut = traj.tendencies.as_ref().map(|t| &t[j]);
        let t = terms_at(f, ut, m, pair)?;
        g1_sq.push(t.g1.iter().map(|v| v * v).sum::<f64>() * h);
        i2_l1.push(t.i2.iter().map(|v| v.abs()).sum::<f64>() * h);
        g3_sq.push(t.g3.iter().map(|v| v * v).sum::<f64>() * h);
        i4_l1.push(t.i4.iter().map(|v| v.abs()).sum::<f64>() * h);
        i1_block.push(t.i1);
        i3_block.push(t.i3);
    }
    let tr = |v: &[f64]| trapezoid(&traj.times, v);
    let proxy = |values: Vec<Vec<f64>>| hneg_proxy(&SpaceTimeBlock { values, dt, spacing: h });
    Ok(ResidualReport {
        pair: pair.id(),
        i1_hneg: tr(&g1_sq).max(0.0).sqrt(),
        i1_proxy: proxy(i1_block),
        i2_l1: tr(&i2_l1),
        i3_hneg: tr(&g3_sq).max(0.0).sqrt(),
        i3_proxy: proxy(i3_block),
        i4_l1: tr(&i4_l1),
    })
}

/// Both sides of `int int [eta(u)_t + q(u)_x] phi = sum_k int int I_k phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyBalance {
    pub lhs: f64,
    pub terms: [f64; 4],
}

impl EntropyBalance {
    pub fn rhs(&self) -> f64 {
        self.terms.iter().sum()
    }
}

/// Tests the pointwise entropy balance against `phi`; needs recorded tendencies.
pub fn entropy_balance(
    traj: &Trajectory,
    m: &ModelSpec,
    pair: &EntropyPair,
    phi: &SpaceTimeBump,
) -> Result<EntropyBalance> {
    let tend = traj.tendencies.as_ref().ok_or(Error::MissingTendencies)?;
    let g = traj.grid();
    let h = g.spacing;
    let conv = m.flux_convention;
    let mut lhs = Vec::new();
    let mut parts: [Vec<f64>; 4] = Default::default();
    for (j, f) in traj.fields.iter().enumerate() {
        let t = traj.times[j];
        let w: Vec<f64> = (0..g.n_modes).map(|i| phi.eval(t, g.x(i)).0).collect();
        let ux = differentiate(f, 1)?;
        let terms = terms_at(f, Some(&tend[j]), m, pair)?;
        let pairing = |v: &[f64]| v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() * h;
        let local: Vec<f64> = f
            .values()
            .iter()
            .zip(tend[j].values())
            .zip(ux.values())
            .map(|((&u, &ut), &uxv)| pair.eta_prime(u) * (ut + conv.speed(u) * uxv))
            .collect();
        lhs.push(pairing(&local));
        parts[0].push(pairing(&terms.i1));
        parts[1].push(pairing(&terms.i2));
        parts[2].push(pairing(&terms.i3));
        parts[3].push(pairing(&terms.i4));
    }
    let tr = |v: &[f64]| trapezoid(&traj.times, v);
    Ok(EntropyBalance { lhs: tr(&lhs), terms: [tr(&parts[0]), tr(&parts[1]), tr(&parts[2]), tr(&parts[3])] })
}
