//! Convergence tables: text rendering and a CSV form that parses back exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::sweep::SweepResult;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub columns: Vec<String>,
    /// `None` marks a value that does not exist (failed row, first-row order).
    pub rows: Vec<Vec<Option<f64>>>,
}

const RESIDUAL_COLUMNS: [&str; 6] = ["i1_hneg", "i1_proxy", "i2_l1", "i3_hneg", "i3_proxy", "i4_l1"];

pub fn convergence_table(sr: &SweepResult) -> ConvergenceTable {
    let fluxes = &sr.plan.template.oracle_fluxes;
    let mut columns: Vec<String> =
        ["epsilon", "beta", "L1_error", "L1_5_error", "observed_order"].iter().map(|s| s.to_string()).collect();
    columns.extend(fluxes.iter().map(|f| format!("L1_error_{}", f.name())));
    columns.extend(["energy_drift", "steps"].iter().map(|s| s.to_string()));
    let scaling_names: Vec<String> = sr
        .rows
        .iter()
        .find_map(|r| r.data())
        .map(|d| d.scaling.names().into_iter().map(String::from).collect())
        .unwrap_or_default();
    columns.extend(scaling_names.iter().cloned());
    columns.extend(RESIDUAL_COLUMNS.iter().map(|s| s.to_string()));

    let rows = sr
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let order = if i == 0 { None } else { sr.observed_orders.get(i - 1).copied().flatten() };
            let mut v = vec![Some(r.epsilon), Some(r.beta)];
            let d = r.data();
            v.push(d.map(|d| d.l1_error));
            v.push(d.map(|d| d.l1_5_error));
            v.push(order);
            v.extend(fluxes.iter().map(|&f| r.error_for(f)));
            v.push(d.map(|d| d.energy_drift));
            v.push(d.map(|d| d.stats.steps as f64));
            v.extend(scaling_names.iter().map(|n| d.and_then(|d| d.scaling.get(n))));
            let res = d.and_then(|d| d.residuals.as_ref());
            v.extend(RESIDUAL_COLUMNS.iter().map(|&c| {
                res.map(|r| match c {
                    "i1_hneg" => r.i1_hneg,
                    "i1_proxy" => r.i1_proxy,
                    "i2_l1" => r.i2_l1,
                    "i3_hneg" => r.i3_hneg,
                    "i3_proxy" => r.i3_proxy,
                    _ => r.i4_l1,
                })
            }));
            v
        })
        .collect();
    ConvergenceTable { columns, rows }
}

impl ConvergenceTable {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Fixed-width text table of the leading columns.
    pub fn render(&self) -> String {
        let shown = self.columns.len().min(8);
        let widths: Vec<usize> = self.columns[..shown].iter().map(|c| c.len().max(11) + 2).collect();
        let mut out = String::new();
        for (c, w) in self.columns[..shown].iter().zip(&widths) {
            out.push_str(&format!("{c:>w$}"));
        }
        out.push('\n');
        for r in &self.rows {
            for (v, w) in r[..shown].iter().zip(&widths) {
                let cell = match v {
                    Some(x) => format!("{x:.4e}"),
                    None => "-".to_string(),
                };
                out.push_str(&format!("{cell:>w$}"));
            }
            out.push('\n');
        }
        out
    }

    /// Shortest round-trip representation of every value; missing values are empty.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| v.map(|x| format!("{x:e}")).unwrap_or_default()).collect();
            w.write_record(&cells).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    if s.is_empty() {
                        Ok(None)
                    } else {
                        s.parse::<f64>().map(Some).map_err(|e| Error::Config(format!("bad table value `{s}`: {e}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }
}
