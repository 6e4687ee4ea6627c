//! Edge-recovery measures and error summaries for reconstructions.
//!
//! Grid fields are compared through their real parts; all measures are
//! fractions of grid points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::design::SamplingDesign;
use crate::error::{param, Error, Result};
use crate::fourier::{evaluate_on_grid, lp_norm_grid, GridField, TrigPolynomial};
use crate::phantom::Phantom;
use crate::recon::{bv_objective, feasibility_residual, Measurements};

/// Default metric grid points per axis.
pub const DEFAULT_METRIC_GRID: usize = 1024;

/// Exponents reported in [`EdgeReport::lp_errors`].
pub const LP_EXPONENTS: [f64; 3] = [1.0, 1.5, 2.0];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    /// Transitional set `1/4 <= recon <= 3/4` (binary truths only).
    pub measure_t: f64,
    /// False positives: truth 0, recon above 3/4.
    pub measure_p: f64,
    /// False negatives: truth 1, recon below 1/4.
    pub measure_n: f64,
    pub measure_union: f64,
    /// `fraction{|recon - truth| >= 1/4}`.
    pub edge_discrepancy: f64,
    /// Grid `L_p` errors keyed by `p` ("1", "1.5", "2").
    pub lp_errors: BTreeMap<String, f64>,
    pub bv_objective: f64,
    pub feasibility: f64,
    pub grid: usize,
}

impl EdgeReport {
    pub fn lp_error(&self, p: f64) -> Option<f64> {
        self.lp_errors.get(&p_key(p)).copied()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn p_key(p: f64) -> String {
    format!("{p}")
}

fn real_pairs<'a>(recon: &'a GridField, truth: &'a GridField) -> Result<impl Iterator<Item = (f64, f64)> + 'a> {
    recon.check_aligned(truth)?;
    Ok(recon.values().iter().zip(truth.values()).map(|(r, t)| (r.re, t.re)))
}

/// T/P/N measures against a `{0, 1}`-valued truth. Only the set measures
/// are filled; `edge_discrepancy` uses the threshold `1/4`.
pub fn edge_sets_binary(recon: &GridField, truth: &GridField) -> Result<EdgeReport> {
    let n = recon.len() as f64;
    let (mut t, mut p, mut nn, mut union, mut far) = (0usize, 0usize, 0usize, 0usize, 0usize);
    for (r, f) in real_pairs(recon, truth)? {
        if f != 0.0 && f != 1.0 {
            return param(format!("binary truth expected, found value {f}"));
        }
        let in_t = (0.25..=0.75).contains(&r);
        let in_p = f == 0.0 && r > 0.75;
        let in_n = f == 1.0 && r < 0.25;
        t += in_t as usize;
        p += in_p as usize;
        nn += in_n as usize;
        union += (in_t || in_p || in_n) as usize;
        far += ((r - f).abs() >= 0.25) as usize;
    }
    Ok(EdgeReport {
        measure_t: t as f64 / n,
        measure_p: p as f64 / n,
        measure_n: nn as f64 / n,
        measure_union: union as f64 / n,
        edge_discrepancy: far as f64 / n,
        grid: recon.points(),
        ..Default::default()
    })
}

/// Fraction of grid points with `|recon - truth| >= c`.
pub fn edge_discrepancy(recon: &GridField, truth: &GridField, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return param(format!("edge threshold must be positive, got {c}"));
    }
    let n = recon.len() as f64;
    let count = real_pairs(recon, truth)?.filter(|(r, f)| (r - f).abs() >= c).count();
    Ok(count as f64 / n)
}

/// Crossover exponent `p0 = 1 / (log2 pi - 1)` where `gamma_p` reaches 0.
pub fn crossover_p0() -> f64 {
    1.0 / (std::f64::consts::PI.log2() - 1.0)
}

/// `gamma_p = max{0, log2(pi / 2^{1 + 1/p})}` for `1 < p <= 2`.
pub fn gamma_exponent(p: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0) {
        return param(format!("gamma_p is defined for 1 < p <= 2, got {p}"));
    }
    Ok((std::f64::consts::PI.log2() - 1.0 - 1.0 / p).max(0.0))
}

/// Evaluate `recon` against the exact phantom on a `G x G` grid.
///
/// Binary set measures are filled only when the phantom is `{0,1}`-valued
/// on the grid; otherwise they stay 0 and `edge_discrepancy` carries the
/// comparison. The BV objective is computed on the solver grid
/// `4m + 1`; feasibility is measured against the exact phantom
/// coefficients at the design frequencies.
pub fn recovery_report(recon: &TrigPolynomial, phantom: &Phantom, design: &SamplingDesign, points: usize) -> Result<EdgeReport> {
    if recon.dim() != 2 || design.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: if recon.dim() != 2 { recon.dim() } else { design.dim() },
        });
    }
    let truth = phantom.render(points)?;
    let field = evaluate_on_grid(recon, points)?;
    let mut report = match edge_sets_binary(&field, &truth) {
        Ok(r) => r,
        Err(Error::Parameter(_)) => EdgeReport {
            edge_discrepancy: edge_discrepancy(&field, &truth, 0.25)?,
            grid: points,
            ..Default::default()
        },
        Err(e) => return Err(e),
    };
    let diff = field.sub(&truth)?;
    for p in LP_EXPONENTS {
        report.lp_errors.insert(p_key(p), lp_norm_grid(&diff, p)?);
    }
    report.bv_objective = bv_objective(recon, 4 * recon.degree() + 1)?;
    let exact = Measurements::from_source(design, phantom, "phantom", true)?;
    report.feasibility = feasibility_residual(recon, &exact)?;
    Ok(report)
}
