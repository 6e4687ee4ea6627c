//! Torus witness: a degree-`2^k` polynomial vanishing at every sampled
//! frequency whose `L_p / L_1` ratio is large.
//!
//! The frequencies `|xi|_inf <= 2^{k+1}` are identified with the characters
//! of `(Z/2^{k+2})^d`; a polynomial of degree `2^k` sampled on the
//! `2^{k+2}`-point torus grid is exactly the corresponding group function.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::greedy::{greedy_select_capped, DEFAULT_GROUP_CAP};
use super::group::GroupSpec;
use super::riesz::{phase_search, riesz_product, witness_ratio};
use crate::design::SamplingDesign;
use crate::error::{param, Error, Result};
use crate::fourier::{block, evaluate_on_grid, lp_norm_grid, FrequencyIndex, TrigPolynomial};

/// Exponents reported for the witness ratios.
pub const WITNESS_EXPONENTS: [f64; 3] = [1.25, 1.5, 2.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusWitnessOptions {
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub group_cap: usize,
    /// Oversampled torus grid for the continuous norms is `factor * 2^k + 1`.
    pub torus_oversample: usize,
}

impl Default for TorusWitnessOptions {
    fn default() -> Self {
        Self {
            delta: 0.5,
            trials: 10_000,
            seed: 0,
            group_cap: DEFAULT_GROUP_CAP,
            torus_oversample: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusWitnessReport {
    pub k: u32,
    pub dim: usize,
    pub modulus: usize,
    pub group_size: usize,
    /// Characters of degree `<= 2^k` not sampled (the admissible support).
    pub admissible: usize,
    pub sampled: usize,
    pub n: usize,
    pub greedy_bound: f64,
    /// `||rho||_{l_1}` before normalization, with its random-phase mean and
    /// the `(4/pi)^n` target.
    pub rho_ell1: f64,
    pub rho_ell1_mean: f64,
    pub target_ell1: f64,
    pub met_target: bool,
    pub rho_ell2_sq: f64,
    pub rho_ell_inf: f64,
    /// `||f||_{l_p}` of the normalized witness on the group, keyed by `p`.
    pub group_ratios: BTreeMap<String, f64>,
    /// `(pi / 2^{1+1/p})^n`, the floor implied when the target is met.
    pub ratio_floor: BTreeMap<String, f64>,
    pub torus_points: usize,
    /// `||f||_{L_p} / ||f||_{L_1}` on the oversampled torus grid.
    pub torus_ratios: BTreeMap<String, f64>,
}

/// Centered representative of a group element in `[-N/2, N/2)^d`.
fn centered(group: &GroupSpec, flat: usize) -> Vec<i64> {
    group
        .tuple(flat)
        .iter()
        .zip(group.moduli())
        .map(|(&c, &n)| {
            let c = c as i64;
            if c >= n as i64 / 2 {
                c - n as i64
            } else {
                c
            }
        })
        .collect()
}

/// Build the witness for `k` against the sampled frequencies. Requires the
/// balance condition `(2^k + 1)^d >= 2 |sampled|`.
pub fn theorem2_witness(k: u32, sampled: &SamplingDesign, opts: &TorusWitnessOptions) -> Result<(TrigPolynomial, TorusWitnessReport)> {
    let d = sampled.dim();
    if k == 0 || k > 24 {
        return param(format!("k must be in 1..=24, got {k}"));
    }
    let degree = 1usize << k;
    let balance = ((degree + 1) as u128).pow(d as u32);
    if balance < 2 * sampled.len() as u128 {
        return param(format!(
            "balance condition (2^k + 1)^d >= 2n fails: {balance} < 2 * {}",
            sampled.len()
        ));
    }
    let modulus = 4 * degree;
    let group = GroupSpec::power(modulus, d)?;
    if group.size() > opts.group_cap {
        return param(format!("group of size {} exceeds the cap {}", group.size(), opts.group_cap));
    }

    let admissible: Vec<usize> = block(d, degree as u64)
        .filter(|xi| !sampled.contains(xi))
        .map(|xi| group.flat(xi.components()))
        .collect::<Result<_>>()?;
    let greedy = greedy_select_capped(&group, &admissible, opts.delta, opts.group_cap)?;
    let search = phase_search(&group, &greedy.s, greedy.h, opts.trials, opts.seed)?;
    let rho = riesz_product(&group, &greedy.s, greedy.h, &search.phases)?;
    let ell1 = rho.norm(1.0);

    let mut poly = TrigPolynomial::zeros(d, degree);
    for (a, &c) in rho.coeffs.iter().enumerate() {
        if c == Complex64::default() {
            continue;
        }
        let xi = FrequencyIndex::new(centered(&group, a));
        if xi.sup_norm() > degree as u64 || sampled.contains(&xi) {
            return Err(Error::Numerical(format!("witness coefficient escaped the admissible set at {xi}")));
        }
        poly.set(&xi, c / ell1)?;
    }

    let n = greedy.n();
    let mut group_ratios = BTreeMap::new();
    let mut ratio_floor = BTreeMap::new();
    let mut torus_ratios = BTreeMap::new();
    let torus_points = opts.torus_oversample.max(2) * degree + 1;
    let field = evaluate_on_grid(&poly, torus_points)?;
    let torus_l1 = lp_norm_grid(&field, 1.0)?;
    for p in WITNESS_EXPONENTS {
        let key = format!("{p}");
        group_ratios.insert(key.clone(), witness_ratio(&rho, p)?);
        ratio_floor.insert(key.clone(), (PI / 2f64.powf(1.0 + 1.0 / p)).powi(n as i32));
        torus_ratios.insert(key, lp_norm_grid(&field, p)? / torus_l1);
    }
    let report = TorusWitnessReport {
        k,
        dim: d,
        modulus,
        group_size: group.size(),
        admissible: admissible.len(),
        sampled: sampled.len(),
        n,
        greedy_bound: greedy.bound,
        rho_ell1: ell1,
        rho_ell1_mean: search.mean_ell1,
        target_ell1: search.target,
        met_target: search.met_target,
        rho_ell2_sq: rho.norm(2.0).powi(2),
        rho_ell_inf: rho.norm(f64::INFINITY),
        group_ratios,
        ratio_floor,
        torus_points,
        torus_ratios,
    };
    Ok((poly, report))
}
