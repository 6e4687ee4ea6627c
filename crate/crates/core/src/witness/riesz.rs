//! Modified Riesz products `rho = chi_h prod_j (1 + z_j chi_{g_j})`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use super::group::GroupSpec;
use crate::error::{param, Result};
use crate::fourier::NdFft;

const UNIMODULAR_TOL: f64 = 1e-12;

/// A function on the group together with its character coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFunction {
    pub group: GroupSpec,
    pub s: Vec<usize>,
    pub h: usize,
    pub phases: Vec<Complex64>,
    /// `rho(g)` for every group element (flat order).
    pub values: Vec<Complex64>,
    /// Coefficient of `chi_a` for every character index `a` (flat order).
    pub coeffs: Vec<Complex64>,
}

impl WitnessFunction {
    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// Normalized `l_p` norm of the values; `p = inf` gives the max.
    pub fn norm(&self, p: f64) -> f64 {
        let mags = self.values.iter().map(|v| v.norm());
        if p.is_infinite() {
            return mags.fold(0.0, f64::max);
        }
        let n = self.values.len() as f64;
        if p == 1.0 {
            return mags.sum::<f64>() / n;
        }
        (mags.map(|a| a.powf(p)).sum::<f64>() / n).powf(1.0 / p)
    }

    /// Number of non-zero coefficients.
    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|c| c.norm() > 1e-12).count()
    }

    /// Values recomputed from the coefficients by the character transform.
    pub fn synthesize(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        NdFft::new(self.group.moduli()).process(&mut buf, FftDirection::Inverse);
        buf
    }
}

fn check_inputs(group: &GroupSpec, s: &[usize], h: usize) -> Result<()> {
    let size = group.size();
    if h >= size || s.iter().any(|&g| g >= size) {
        return param(format!("elements must be flat offsets below {size}"));
    }
    Ok(())
}

/// `chi_{g_j}(x)` for every `j` and every `x`.
fn character_table(group: &GroupSpec, s: &[usize]) -> Vec<Vec<Complex64>> {
    s.iter()
        .map(|&a| (0..group.size()).map(|x| group.chi(a, x)).collect())
        .collect()
}

/// Build `rho = chi_h prod_j (1 + z_j chi_{g_j})` pointwise and by expansion.
pub fn riesz_product(group: &GroupSpec, s: &[usize], h: usize, phases: &[Complex64]) -> Result<WitnessFunction> {
    check_inputs(group, s, h)?;
    if phases.len() != s.len() {
        return param(format!("{} phases for {} characters", phases.len(), s.len()));
    }
    if let Some(z) = phases.iter().find(|z| (z.norm() - 1.0).abs() > UNIMODULAR_TOL) {
        return param(format!("phase {z} is not unimodular"));
    }
    let size = group.size();
    let table = character_table(group, s);
    let values = (0..size)
        .map(|x| {
            let mut v = group.chi(h, x);
            for (row, z) in table.iter().zip(phases) {
                v *= 1.0 + z * row[x];
            }
            v
        })
        .collect();

    let n = s.len();
    let mut index = vec![h; 1 << n];
    let mut weight = vec![Complex64::new(1.0, 0.0); 1 << n];
    for j in 0..n {
        let half = 1 << j;
        for mask in 0..half {
            index[mask | half] = group.add(index[mask], s[j]);
            weight[mask | half] = weight[mask] * phases[j];
        }
    }
    let mut coeffs = vec![Complex64::default(); size];
    for (&a, &w) in index.iter().zip(&weight) {
        coeffs[a] += w;
    }
    Ok(WitnessFunction {
        group: group.clone(),
        s: s.to_vec(),
        h,
        phases: phases.to_vec(),
        values,
        coeffs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSearch {
    /// Phases of the trial with the smallest `l_1` norm (earliest on ties).
    pub phases: Vec<Complex64>,
    pub ell1: f64,
    pub best_trial: usize,
    pub mean_ell1: f64,
    /// `(4/pi)^n`.
    pub target: f64,
    pub met_target: bool,
    pub trials: usize,
    pub seed: u64,
}

/// Uniform phases `e^{2 pi i u}` for one trial; trial `t` uses ChaCha8
/// stream `t` of `seed`, with `u` built from the top 53 bits of each draw.
pub fn trial_phases(seed: u64, trial: usize, n: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    (0..n)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            Complex64::from_polar(1.0, 2.0 * PI * u)
        })
        .collect()
}

/// Random restarts over uniform phases, keeping the minimizer of
/// `||rho||_{l_1}`. The `l_1` norm does not depend on `h`.
pub fn phase_search(group: &GroupSpec, s: &[usize], h: usize, trials: usize, seed: u64) -> Result<PhaseSearch> {
    check_inputs(group, s, h)?;
    if trials == 0 {
        return param("phase search needs at least one trial");
    }
    let n = s.len();
    let table = character_table(group, s);
    let size = group.size();
    let ell1s: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let z = trial_phases(seed, t, n);
            let mut acc = 0.0;
            for x in 0..size {
                let mut prod = 1.0;
                for (row, zj) in table.iter().zip(&z) {
                    prod *= (1.0 + zj * row[x]).norm();
                }
                acc += prod;
            }
            acc / size as f64
        })
        .collect();
    let (best_trial, ell1) = ell1s
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (t, v)| if v < acc.1 { (t, v) } else { acc });
    let target = (4.0 / PI).powi(n as i32);
    Ok(PhaseSearch {
        phases: trial_phases(seed, best_trial, n),
        ell1,
        best_trial,
        mean_ell1: ell1s.iter().sum::<f64>() / trials as f64,
        target,
        met_target: ell1 <= target,
        trials,
        seed,
    })
}

/// `||w||_{l_p} / ||w||_{l_1}` for `1 <= p <= 2`.
pub fn witness_ratio(w: &WitnessFunction, p: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return param(format!("ratio defined for 1 <= p <= 2, got {p}"));
    }
    let l1 = w.norm(1.0);
    if l1 == 0.0 {
        return param("zero function has no norm ratio");
    }
    Ok(w.norm(p) / l1)
}
