//! Group witness runs for the `witness` subcommand.

use std::collections::BTreeMap;
use std::path::Path;

use fsamp_core::fourier::io::{write_coefficient_rows, write_coefficients};
use fsamp_core::witness::{
    greedy_select, phase_search, riesz_product, theorem2_witness, witness_ratio, GreedyResult, GroupSpec,
    TorusWitnessOptions, TorusWitnessReport,
};
use fsamp_core::{FrequencyIndex, SamplingDesign};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupWitnessReport {
    pub moduli: Vec<usize>,
    pub lambda_size: usize,
    pub greedy: GreedyResult,
    pub trials: usize,
    pub seed: u64,
    pub best_trial: usize,
    pub ell1: f64,
    pub mean_ell1: f64,
    pub target_ell1: f64,
    pub met_target: bool,
    pub ell2_sq: f64,
    pub ell_inf: f64,
    pub support_size: usize,
    /// `||rho||_{l_p} / ||rho||_{l_1}` keyed by `p`.
    pub ratios: BTreeMap<String, f64>,
}

/// Centered representative in `[-N/2, N/2)` per axis.
fn centered(group: &GroupSpec, flat: usize) -> FrequencyIndex {
    let t = group.tuple(flat);
    FrequencyIndex::new(
        t.iter()
            .zip(group.moduli())
            .map(|(&c, &n)| if 2 * c >= n { c as i64 - n as i64 } else { c as i64 })
            .collect(),
    )
}

/// Greedy selection on `Lambda` = the first `ceil(frac |G|)` elements in
/// flat order, then the best Riesz product over `trials` phase draws.
/// Writes `witness.json` and `witness_coeffs.csv` into `dir`.
pub fn group_witness(
    moduli: Vec<usize>,
    lambda_frac: f64,
    delta: f64,
    trials: usize,
    seed: u64,
    dir: &Path,
) -> CliResult<GroupWitnessReport> {
    if !(lambda_frac > 0.0 && lambda_frac <= 1.0) {
        return Err(CliError::Input(format!("lambda fraction must lie in (0, 1], got {lambda_frac}")));
    }
    let group = GroupSpec::new(moduli.clone())?;
    let size = ((lambda_frac * group.size() as f64).ceil() as usize).clamp(1, group.size());
    let lambda: Vec<usize> = (0..size).collect();
    let greedy = greedy_select(&group, &lambda, delta)?;
    let search = phase_search(&group, &greedy.s, greedy.h, trials, seed)?;
    let rho = riesz_product(&group, &greedy.s, greedy.h, &search.phases)?;
    let mut ratios = BTreeMap::new();
    for p in [1.25, 1.5, 2.0] {
        ratios.insert(format!("{p}"), witness_ratio(&rho, p)?);
    }
    std::fs::create_dir_all(dir)?;
    let rows: Vec<(FrequencyIndex, _)> = rho
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 1e-12)
        .map(|(a, c)| (centered(&group, a), *c))
        .collect();
    write_coefficient_rows(&dir.join("witness_coeffs.csv"), group.rank(), rows.iter().map(|(f, c)| (f, *c)))?;
    let report = GroupWitnessReport {
        moduli,
        lambda_size: size,
        ell2_sq: rho.norm(2.0).powi(2),
        ell_inf: rho.norm(f64::INFINITY),
        support_size: rho.support_size(),
        greedy,
        trials,
        seed,
        best_trial: search.best_trial,
        ell1: search.ell1,
        mean_ell1: search.mean_ell1,
        target_ell1: search.target,
        met_target: search.met_target,
        ratios,
    };
    std::fs::write(dir.join("witness.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}

/// Torus witness of degree `2^k` vanishing on the design; writes the same
/// two files as [`group_witness`].
pub fn torus_witness(k: u32, design: &SamplingDesign, opts: &TorusWitnessOptions, dir: &Path) -> CliResult<TorusWitnessReport> {
    let (poly, report) = theorem2_witness(k, design, opts)?;
    std::fs::create_dir_all(dir)?;
    write_coefficients(&dir.join("witness_coeffs.csv"), &poly)?;
    std::fs::write(dir.join("witness.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}
