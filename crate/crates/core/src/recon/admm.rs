//! BV-norm minimization `min ||B x||_1 s.t. pinned coefficients` by ADMM.
//!
//! Splitting `z = B x` with scaled dual `u`:
//!
//! * x-update: minimize `(rho/2) ||B x - z + u||^2` over the free
//!   coefficients; `B^* B = diag(|xi|^2)` makes this a coefficient-wise
//!   division `x = B^*(z - u) / |xi|^2`.
//! * z-update: group soft-thresholding of `B x + u` at `1/rho`, per grid point.
//! * u-update: `u += B x - z`.
//!
//! `B^* z` and `B^* u` are carried in coefficient space (`B^* u` through its
//! closed-form recursion), so one synthesis and one analysis per iteration
//! suffice and the dual residual `rho ||B^*(z - z_prev)||` is exact.
//!
//! Measurements are rescaled by a power of two before solving, so the
//! iteration is equivariant under scaling of the data by powers of two and
//! by `-1`, and pinned coefficients are reproduced bit-for-bit.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::measure::Measurements;
use super::operator::{iso_l1, GradientField, GradientOperator};
use crate::error::{param, Error, Result};
use crate::fourier::TrigPolynomial;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmmParams {
    /// Augmented-Lagrangian weight (initial value when `adaptive_rho`).
    pub rho: f64,
    pub max_iter: usize,
    pub eps_primal: f64,
    pub eps_dual: f64,
    /// Reconstruction degree `m` (even).
    pub degree: usize,
    /// Grid points per axis are `oversample * m + 1`.
    pub oversample: usize,
    /// Residual balancing: rescale `rho` by 2 whenever one residual exceeds
    /// the other by a factor 10 (checked every 10 iterations).
    pub adaptive_rho: bool,
}

impl AdmmParams {
    pub fn new(degree: usize) -> Self {
        Self {
            rho: 1.0,
            max_iter: 5000,
            eps_primal: 1e-7,
            eps_dual: 1e-7,
            degree,
            oversample: 4,
            adaptive_rho: true,
        }
    }

    pub fn grid_points(&self) -> usize {
        self.oversample * self.degree + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 2 || self.degree % 2 != 0 {
            return param(format!("degree must be even and >= 2, got {}", self.degree));
        }
        if self.oversample < 4 {
            return param(format!("oversample factor must be >= 4, got {}", self.oversample));
        }
        if !(self.rho > 0.0) || !(self.eps_primal > 0.0) || !(self.eps_dual > 0.0) {
            return param("rho and tolerances must be positive");
        }
        if self.max_iter == 0 {
            return param("max_iter must be positive");
        }
        Ok(())
    }
}

/// Solver iterates.
pub struct AdmmState {
    pub x: Vec<Complex64>,
    pub z: GradientField,
    pub u: GradientField,
    pub iter: usize,
    pub primal_res: f64,
    pub dual_res: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    /// Objective of the returned (best) iterate.
    pub final_objective: f64,
    pub primal_res: f64,
    pub dual_res: f64,
    pub converged: bool,
    pub wall_time_ms: f64,
    pub rho_final: f64,
    pub degree: usize,
    pub grid_points: usize,
    /// Iteration at which the returned iterate was produced (0 = start point).
    pub best_iteration: usize,
    pub objective_history: Vec<f64>,
    pub primal_history: Vec<f64>,
    pub dual_history: Vec<f64>,
}

/// Pinned coefficient offsets and values in the degree-`m` block.
fn pins(meas: &Measurements, degree: usize) -> Result<Vec<(usize, Complex64)>> {
    if !meas.is_real() {
        return param("BV minimization reconstructs real functions; measurements must be declared real");
    }
    let probe = TrigPolynomial::zeros(meas.dim(), degree);
    let half = (degree / 2) as u64;
    let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(2 * meas.len());
    let mut taken = std::collections::HashMap::new();
    for (xi, &v) in meas.iter() {
        if xi.sup_norm() > half {
            return param(format!("measured frequency {xi} exceeds m/2 = {half}"));
        }
        let k = probe.offset(xi.components()).unwrap();
        taken.insert(k, v);
    }
    for (&k, &v) in taken.clone().iter() {
        let mk = probe.coeffs().len() - 1 - k;
        taken.entry(mk).or_insert(v.conj());
    }
    out.extend(taken);
    out.sort_by_key(|(k, _)| *k);
    Ok(out)
}

fn rms(field: &GradientField) -> f64 {
    let n = field[0].len() as f64;
    (field.iter().flat_map(|c| c.iter()).map(|v| v * v).sum::<f64>() / n).sqrt()
}

fn coeff_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest power of two not above `x` (for `x > 0`).
fn pow2_floor(x: f64) -> f64 {
    2f64.powi(x.log2().floor() as i32)
}

/// Minimize the discrete BV norm of a real degree-`m` polynomial whose
/// coefficients at the measured frequencies (and their mirrors) are pinned.
pub fn bv_min_admm(meas: &Measurements, params: &AdmmParams) -> Result<(TrigPolynomial, ConvergenceReport)> {
    params.validate()?;
    let start = Instant::now();
    let dim = meas.dim();
    let m = params.degree;
    let pinned = pins(meas, m)?;
    let mut op = GradientOperator::new(dim, m, params.grid_points())?;
    let n = op.coeff_len();
    let diag = op.diagonal();

    let mut is_pinned = vec![false; n];
    pinned.iter().for_each(|(k, _)| is_pinned[*k] = true);

    let peak = pinned.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let finish = |x: Vec<Complex64>, report: ConvergenceReport| -> Result<(TrigPolynomial, ConvergenceReport)> {
        let mut coeffs = x;
        for &(k, v) in &pinned {
            coeffs[k] = v;
        }
        Ok((TrigPolynomial::from_coeffs(dim, m, coeffs)?, report))
    };
    let mut report = ConvergenceReport {
        iterations: 0,
        final_objective: 0.0,
        primal_res: 0.0,
        dual_res: 0.0,
        converged: true,
        wall_time_ms: 0.0,
        rho_final: params.rho,
        degree: m,
        grid_points: params.grid_points(),
        best_iteration: 0,
        objective_history: Vec::new(),
        primal_history: Vec::new(),
        dual_history: Vec::new(),
    };
    if peak == 0.0 {
        report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        return finish(vec![Complex64::default(); n], report);
    }
    if !peak.is_finite() {
        return Err(Error::Numerical("non-finite measurement".into()));
    }
    let scale = pow2_floor(peak);

    let mut x = vec![Complex64::default(); n];
    for &(k, v) in &pinned {
        x[k] = v / scale;
    }
    let mut bx = op.zero_field();
    op.apply(&x, &mut bx);
    let mut z = bx.clone();
    let mut u = op.zero_field();
    let mut bz = vec![Complex64::default(); n];
    op.adjoint(&z, &mut bz);
    let mut bu = vec![Complex64::default(); n];
    let mut bz_prev = bz.clone();
    let mut rho = params.rho;

    let mut best_obj = iso_l1(&bx);
    let mut best_x = x.clone();
    report.objective_history.push(best_obj * scale);

    let dims = dim;
    let npts = op.grid_len();
    let mut converged = false;
    let mut iter = 0;
    let (mut r_norm, mut s_norm) = (f64::INFINITY, f64::INFINITY);
    while iter < params.max_iter {
        iter += 1;
        // x-update on free coefficients; the mean is invisible to the gradient.
        for k in 0..n {
            if !is_pinned[k] && diag[k] > 0.0 {
                x[k] = (bz[k] - bu[k]) / diag[k];
            }
        }
        op.apply(&x, &mut bx);

        // z-update: group shrinkage; exactly-at-threshold maps to zero.
        let thresh = 1.0 / rho;
        let mut v = vec![0.0; dims];
        for p in 0..npts {
            let mut mag2 = 0.0;
            for a in 0..dims {
                v[a] = bx[a][p] + u[a][p];
                mag2 += v[a] * v[a];
            }
            let mag = mag2.sqrt();
            let factor = if mag > thresh { 1.0 - thresh / mag } else { 0.0 };
            for a in 0..dims {
                z[a][p] = factor * v[a];
            }
        }

        // u-update and its image B^* u = B^* u + |xi|^2 x - B^* z.
        for a in 0..dims {
            for p in 0..npts {
                u[a][p] += bx[a][p] - z[a][p];
            }
        }
        std::mem::swap(&mut bz, &mut bz_prev);
        op.adjoint(&z, &mut bz);
        for k in 0..n {
            bu[k] += x[k] * diag[k] - bz[k];
        }

        // Residuals (normalized norms).
        let mut r2 = 0.0;
        for a in 0..dims {
            for p in 0..npts {
                let d = bx[a][p] - z[a][p];
                r2 += d * d;
            }
        }
        r_norm = (r2 / npts as f64).sqrt();
        let diff: Vec<Complex64> = bz.iter().zip(&bz_prev).map(|(a, b)| a - b).collect();
        s_norm = rho * coeff_norm(&diff);

        let obj = iso_l1(&bx);
        report.objective_history.push(obj * scale);
        report.primal_history.push(r_norm * scale);
        report.dual_history.push(s_norm * scale);
        if obj < best_obj {
            best_obj = obj;
            best_x.copy_from_slice(&x);
            report.best_iteration = iter;
        }

        let eps_pri = params.eps_primal * (1.0 + rms(&bx).max(rms(&z)));
        let eps_dual = params.eps_dual * (1.0 + rho * coeff_norm(&bu));
        if r_norm <= eps_pri && s_norm <= eps_dual {
            converged = true;
            break;
        }

        if params.adaptive_rho && iter % 10 == 0 {
            let factor = if r_norm > 10.0 * s_norm {
                2.0
            } else if s_norm > 10.0 * r_norm {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                for ch in u.iter_mut() {
                    ch.iter_mut().for_each(|v| *v /= factor);
                }
                bu.iter_mut().for_each(|v| *v /= factor);
            }
        }
    }

    report.iterations = iter;
    report.final_objective = best_obj * scale;
    report.primal_res = r_norm * scale;
    report.dual_res = s_norm * scale;
    report.converged = converged;
    report.rho_final = rho;
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let out: Vec<Complex64> = best_x.iter().map(|c| c * scale).collect();
    finish(out, report)
}
