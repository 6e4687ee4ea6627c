//! Tabulate finished runs side by side.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fsamp_core::fourier::io::fmt_g17;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::experiment::RunReport;
use crate::manifest::RunManifest;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub manifest: PathBuf,
    pub n: usize,
    pub scheme: String,
    pub method: String,
    pub degree: usize,
    pub l1_error: f64,
    pub l2_error: f64,
    pub edge_discrepancy: f64,
    pub bv_objective: f64,
    pub converged: Option<bool>,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub phantom_sha256: String,
    pub metric_grid: usize,
    pub rows: Vec<ComparisonRow>,
}

const CSV_HEADER: &str =
    "name,n,scheme,method,degree,l1_error,l2_error,edge_discrepancy,bv_objective,converged,runtime_ms";

impl Comparison {
    pub fn row(&self, name: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let conv = r.converged.map(|c| c.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{:.3}",
                r.name,
                r.n,
                r.scheme,
                r.method,
                r.degree,
                fmt_g17(r.l1_error),
                fmt_g17(r.l2_error),
                fmt_g17(r.edge_discrepancy),
                fmt_g17(r.bv_objective),
                conv,
                r.runtime_ms
            );
        }
        out
    }

    /// Write `<prefix>.csv` and `<prefix>.json`.
    pub fn write(&self, prefix: &Path) -> CliResult<(PathBuf, PathBuf)> {
        let csv = prefix.with_extension("csv");
        let json = prefix.with_extension("json");
        std::fs::write(&csv, self.to_csv())?;
        std::fs::write(&json, serde_json::to_string_pretty(self)?)?;
        Ok((csv, json))
    }
}

/// One row per manifest. All runs must share the phantom and metric grid.
pub fn compare_runs(manifests: &[PathBuf]) -> CliResult<Comparison> {
    if manifests.len() < 2 {
        return Err(CliError::Input(format!("need at least two manifests, got {}", manifests.len())));
    }
    let mut rows = Vec::with_capacity(manifests.len());
    let mut reference: Option<(String, usize)> = None;
    for path in manifests {
        let m = RunManifest::read(path)?;
        if let Some(stage) = &m.failed_stage {
            return Err(CliError::Input(format!("{}: run failed at `{stage}`", path.display())));
        }
        let phantom = m
            .inputs
            .get("phantom")
            .cloned()
            .ok_or_else(|| CliError::Input(format!("{}: no phantom hash", path.display())))?;
        let grid = m.resolved.metric_grid;
        match &reference {
            None => reference = Some((phantom, grid)),
            Some((p, g)) => {
                if *p != phantom {
                    return Err(CliError::Input(format!("{}: different phantom than the first run", path.display())));
                }
                if *g != grid {
                    return Err(CliError::Input(format!(
                        "{}: metric grid {grid} differs from {g}",
                        path.display()
                    )));
                }
            }
        }
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let report: RunReport = serde_json::from_str(&std::fs::read_to_string(m.artifact_path(&dir, "report")?)?)?;
        let lp = |p: f64| report.metrics.lp_error(p).unwrap_or(f64::NAN);
        rows.push(ComparisonRow {
            name: report.name.clone(),
            manifest: path.clone(),
            n: report.n,
            scheme: report.scheme.clone(),
            method: report.method.clone(),
            degree: report.degree,
            l1_error: lp(1.0),
            l2_error: lp(2.0),
            edge_discrepancy: report.metrics.edge_discrepancy,
            bv_objective: report.metrics.bv_objective,
            converged: report.solver.as_ref().map(|s| s.converged),
            runtime_ms: m.total_time_ms(),
        });
    }
    let (phantom_sha256, metric_grid) = reference.expect("at least two manifests");
    Ok(Comparison {
        phantom_sha256,
        metric_grid,
        rows,
    })
}
