use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::experiment::{execute, ExperimentSpec, Resolved};

/// Reruns must match every floating-point report field to this absolute
/// tolerance.
pub const REPORT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    /// Relative to the manifest's directory.
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub spec: ExperimentSpec,
    pub resolved: Resolved,
    pub seeds: BTreeMap<String, u64>,
    /// SHA-256 of the inputs (canonical phantom JSON, design file).
    pub inputs: BTreeMap<String, String>,
    pub artifacts: BTreeMap<String, ArtifactRecord>,
    pub timings_ms: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub failed_stage: Option<String>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn total_time_ms(&self) -> f64 {
        self.timings_ms.iter().filter(|(k, _)| k.as_str() != "solver").map(|(_, v)| v).sum()
    }

    pub fn artifact_path(&self, dir: &Path, key: &str) -> CliResult<PathBuf> {
        self.artifacts
            .get(key)
            .map(|a| dir.join(&a.path))
            .ok_or_else(|| CliError::Input(format!("manifest has no `{key}` artifact")))
    }

    /// Recompute the artifact hashes and report the keys that differ.
    pub fn check_artifacts(&self, dir: &Path) -> CliResult<Vec<String>> {
        let mut bad = Vec::new();
        for (key, a) in &self.artifacts {
            let (h, _) = sha256_file(&dir.join(&a.path))?;
            if h != a.sha256 {
                bad.push(key.clone());
            }
        }
        Ok(bad)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> CliResult<(String, u64)> {
    let mut file = std::fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        total += n as u64;
    }
    Ok((hex::encode(hasher.finalize()), total))
}

/// Re-execute the resolved parameters of a manifest into `out_dir`.
pub fn rerun_from_manifest(manifest_path: &Path, out_dir: &Path) -> CliResult<RunManifest> {
    let original = RunManifest::read(manifest_path)?;
    if let Some(stage) = &original.failed_stage {
        return Err(CliError::Input(format!("manifest records a run that failed at `{stage}`")));
    }
    let mut spec = original.spec.clone();
    spec.out_dir = out_dir.to_path_buf();
    let run = execute(&spec, &original.resolved, out_dir)?;
    for (key, hash) in &original.inputs {
        if run.inputs.get(key) != Some(hash) {
            return Err(CliError::Mismatch(format!("input `{key}` changed since the original run")));
        }
    }
    Ok(run)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RerunCheck {
    pub design_identical: bool,
    /// Largest absolute difference over all numeric report fields.
    pub max_report_diff: f64,
    /// Report fields that differ beyond the tolerance or in non-numeric
    /// content.
    pub mismatched_fields: Vec<String>,
    pub tolerance: f64,
}

impl RerunCheck {
    pub fn passed(&self) -> bool {
        self.design_identical && self.mismatched_fields.is_empty()
    }
}

/// Compare a rerun against the original: design bytes must be equal and
/// report numbers within the original's tolerance.
pub fn verify_rerun(original: &Path, rerun: &Path) -> CliResult<RerunCheck> {
    let (a, b) = (RunManifest::read(original)?, RunManifest::read(rerun)?);
    let (da, db) = (dir_of(original), dir_of(rerun));
    let design_identical =
        std::fs::read(a.artifact_path(&da, "design")?)? == std::fs::read(b.artifact_path(&db, "design")?)?;
    let ra: Value = serde_json::from_str(&std::fs::read_to_string(a.artifact_path(&da, "report")?)?)?;
    let rb: Value = serde_json::from_str(&std::fs::read_to_string(b.artifact_path(&db, "report")?)?)?;
    let mut check = RerunCheck {
        design_identical,
        max_report_diff: 0.0,
        mismatched_fields: Vec::new(),
        tolerance: a.tolerance,
    };
    diff_values("report", &ra, &rb, &mut check);
    Ok(check)
}

fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn diff_values(at: &str, a: &Value, b: &Value, check: &mut RerunCheck) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            let d = (x - y).abs();
            if x != y {
                check.max_report_diff = check.max_report_diff.max(d);
                if !(d <= check.tolerance) {
                    check.mismatched_fields.push(at.to_string());
                }
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            for k in x.keys().chain(y.keys().filter(|k| !x.contains_key(*k))) {
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => diff_values(&format!("{at}.{k}"), u, v, check),
                    _ => check.mismatched_fields.push(format!("{at}.{k}")),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                diff_values(&format!("{at}[{i}]"), u, v, check);
            }
        }
        _ if a == b => {}
        _ => check.mismatched_fields.push(at.to_string()),
    }
}
