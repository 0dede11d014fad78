//! Run directories: `manifest.json` plus CSV tables and plot data.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::entropy::ResidualReport;
use crate::error::{Error, Result};
use crate::estimates::{fmt, NormSeries, ScalingReport};
use crate::integrator::RunStats;
use crate::models::{InitialBounds, InitialData, ModelSpec};
use crate::oracle::ReferenceSolution;

use super::config::Config;
use super::sweep::{SweepResult, SweepRow};
use super::table::{convergence_table, ConvergenceTable};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub model: ModelSpec,
    pub initial: InitialData,
    pub initial_bounds: Option<InitialBounds>,
    pub stats: RunStats,
    pub energy_drift: f64,
    pub norms: NormSeries,
    pub scaling: ScalingReport,
    pub residuals: Option<ResidualReport>,
    /// `(time, values)` for every written profile.
    pub profiles: Vec<(f64, Vec<f64>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub references: Vec<ReferenceSolution>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum ManifestBody {
    Simulate(Box<SimulationRecord>),
    Sweep(Box<SweepResult>),
    Oracle(OracleRecord),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub id: String,
    pub config: Config,
    pub environment: Environment,
    pub body: ManifestBody,
}

pub fn run_dir(out: &Path, id: &str) -> Result<PathBuf> {
    if id.is_empty() || id.contains(['/', '\\']) || id == "." || id == ".." {
        return Err(Error::Config(format!("invalid run id `{id}`")));
    }
    let dir = out.join(id);
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn profile_name(t: f64) -> String {
    format!("profile_t{t}.csv")
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn grid_points(n: usize, half_length: f64) -> Vec<f64> {
    let h = 2.0 * half_length / n as f64;
    (0..n).map(|i| -half_length + i as f64 * h).collect()
}

fn row_prefix(eps: f64, beta: f64) -> Vec<String> {
    vec![fmt(eps), fmt(beta)]
}

fn norms_rows(prefix: &[String], ns: &NormSeries) -> Vec<Vec<String>> {
    ns.records().into_iter().map(|r| prefix.iter().cloned().chain(r).collect()).collect()
}

fn scaling_rows(prefix: &[String], s: &ScalingReport) -> Vec<Vec<String>> {
    s.entries
        .iter()
        .map(|e| {
            let mut r = prefix.to_vec();
            r.extend([e.name.clone(), fmt(e.value), e.initial.map(fmt).unwrap_or_default()]);
            r
        })
        .collect()
}

fn residual_row(prefix: &[String], r: &ResidualReport) -> Vec<String> {
    let mut v = prefix.to_vec();
    v.push(r.pair.clone());
    v.extend([r.i1_hneg, r.i1_proxy, r.i2_l1, r.i3_hneg, r.i3_proxy, r.i4_l1].map(fmt));
    v
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn norms_header() -> Vec<String> {
    let mut h = header(&["epsilon", "beta"]);
    h.extend(NormSeries::CSV_COLUMNS.iter().map(|s| s.to_string()));
    h
}

const SCALING_HEADER: [&str; 5] = ["epsilon", "beta", "name", "value", "initial"];
const RESIDUAL_HEADER: [&str; 9] =
    ["epsilon", "beta", "pair", "i1_hneg", "i1_proxy", "i2_l1", "i3_hneg", "i3_proxy", "i4_l1"];

fn write_sweep_tables(dir: &Path, sr: &SweepResult) -> Result<ConvergenceTable> {
    let table = convergence_table(sr);
    fs::write(dir.join("sweep.csv"), table.to_csv())?;
    let ok: Vec<(&SweepRow, _)> = sr.rows.iter().filter_map(|r| r.data().map(|d| (r, d))).collect();
    let mut norms = Vec::new();
    let mut scaling = Vec::new();
    let mut residuals = Vec::new();
    for (r, d) in &ok {
        let p = row_prefix(r.epsilon, r.beta);
        norms.extend(norms_rows(&p, &d.norms));
        scaling.extend(scaling_rows(&p, &d.scaling));
        if let Some(res) = &d.residuals {
            residuals.push(residual_row(&p, res));
        }
    }
    write_csv(&dir.join("norms.csv"), &norms_header(), &norms)?;
    write_csv(&dir.join("scaling.csv"), &header(&SCALING_HEADER), &scaling)?;
    write_csv(&dir.join("residuals.csv"), &header(&RESIDUAL_HEADER), &residuals)?;

    let g = &sr.plan.template.grid;
    let xs = grid_points(g.n_modes, g.half_length);
    let mut head = header(&["x"]);
    head.extend(ok.iter().map(|(r, _)| format!("u_eps{}", r.epsilon)));
    let rows: Vec<Vec<String>> = (0..xs.len())
        .map(|i| std::iter::once(fmt(xs[i])).chain(ok.iter().map(|(_, d)| fmt(d.final_values[i]))).collect())
        .collect();
    write_csv(&dir.join(profile_name(g.horizon)), &head, &rows)?;
    Ok(table)
}

fn write_references(dir: &Path, refs: &[ReferenceSolution]) -> Result<()> {
    for r in refs {
        let rows: Vec<Vec<String>> = (0..r.cells.len()).map(|i| vec![fmt(r.center(i)), fmt(r.cells[i])]).collect();
        let name = format!("oracle_{}_t{}.csv", r.flux_convention.name(), r.time);
        write_csv(&dir.join(name), &header(&["x", "u"]), &rows)?;
    }
    Ok(())
}

fn write_simulation_tables(dir: &Path, config: &Config, rec: &SimulationRecord) -> Result<()> {
    let p = row_prefix(rec.model.epsilon, rec.model.beta);
    write_csv(&dir.join("norms.csv"), &norms_header(), &norms_rows(&p, &rec.norms))?;
    write_csv(&dir.join("scaling.csv"), &header(&SCALING_HEADER), &scaling_rows(&p, &rec.scaling))?;
    let res: Vec<Vec<String>> = rec.residuals.iter().map(|r| residual_row(&p, r)).collect();
    write_csv(&dir.join("residuals.csv"), &header(&RESIDUAL_HEADER), &res)?;
    let xs = grid_points(config.grid.n_modes, config.grid.half_length);
    for (t, values) in &rec.profiles {
        let rows: Vec<Vec<String>> = xs.iter().zip(values).map(|(x, u)| vec![fmt(*x), fmt(*u)]).collect();
        write_csv(&dir.join(profile_name(*t)), &header(&["x", "u"]), &rows)?;
    }
    Ok(())
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(m)?;
    fs::write(dir.join("manifest.json"), text + "\n")?;
    Ok(())
}

pub fn write_sweep(out: &Path, id: &str, config: &Config, sr: &SweepResult) -> Result<(PathBuf, ConvergenceTable)> {
    let dir = run_dir(out, id)?;
    let manifest = Manifest {
        id: id.into(),
        config: config.clone(),
        environment: Environment::current(),
        body: ManifestBody::Sweep(Box::new(sr.clone())),
    };
    write_manifest(&dir, &manifest)?;
    let table = write_sweep_tables(&dir, sr)?;
    write_references(&dir, &sr.references)?;
    Ok((dir, table))
}

pub fn write_simulation(out: &Path, id: &str, config: &Config, rec: &SimulationRecord) -> Result<PathBuf> {
    let dir = run_dir(out, id)?;
    let manifest = Manifest {
        id: id.into(),
        config: config.clone(),
        environment: Environment::current(),
        body: ManifestBody::Simulate(Box::new(rec.clone())),
    };
    write_manifest(&dir, &manifest)?;
    write_simulation_tables(&dir, config, rec)?;
    Ok(dir)
}

pub fn write_oracle(out: &Path, id: &str, config: &Config, refs: &[ReferenceSolution]) -> Result<PathBuf> {
    let dir = run_dir(out, id)?;
    let manifest = Manifest {
        id: id.into(),
        config: config.clone(),
        environment: Environment::current(),
        body: ManifestBody::Oracle(OracleRecord { references: refs.to_vec() }),
    };
    write_manifest(&dir, &manifest)?;
    write_references(&dir, refs)?;
    Ok(dir)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Rewrites the tables and plot data of one run directory from its manifest;
/// returns a printable summary.
pub fn regenerate(dir: &Path) -> Result<String> {
    let m = read_manifest(dir)?;
    match &m.body {
        ManifestBody::Sweep(sr) => {
            let table = write_sweep_tables(dir, sr)?;
            let mut s = format!("sweep `{}` ({} rows, regime {})\n", m.id, sr.rows.len(), sr.plan.regime.name());
            s.push_str(&table.render());
            if let Some(f) = sr.matched_flux() {
                s.push_str(&format!("errors converge under the {} limit flux\n", f.name()));
            }
            Ok(s)
        }
        ManifestBody::Simulate(rec) => {
            write_simulation_tables(dir, &m.config, rec)?;
            Ok(format!(
                "simulation `{}`: {} {} eps = {} beta = {}, energy drift {:.3e}\n",
                m.id,
                rec.model.kind.name(),
                rec.model.flux_convention.name(),
                rec.model.epsilon,
                rec.model.beta,
                rec.energy_drift
            ))
        }
        ManifestBody::Oracle(o) => {
            write_references(dir, &o.references)?;
            Ok(format!("oracle `{}`: {} reference solutions\n", m.id, o.references.len()))
        }
    }
}

/// Run directories under `dir`: the directory itself if it holds a manifest, else its children that do.
pub fn find_runs(dir: &Path) -> Result<Vec<PathBuf>> {
    if dir.join("manifest.json").is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("manifest.json").is_file())
        .collect();
    out.sort();
    if out.is_empty() {
        return Err(Error::Config(format!("no manifest.json under {}", dir.display())));
    }
    Ok(out)
}
