//! Greedy selection of a dissociated set `S` and shift `h` with every
//! `h + sum_{g in T} g` (`T ⊆ S`) inside a target set.

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use super::group::GroupSpec;
use crate::error::{param, Error, Result};
use crate::fourier::NdFft;

/// Largest group handled without an explicit override.
pub const DEFAULT_GROUP_CAP: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyResult {
    pub group: GroupSpec,
    /// Selected elements `g_0, ..., g_{n-1}` as flat offsets.
    pub s: Vec<usize>,
    /// Smallest element of the final `Lambda_n`.
    pub h: usize,
    /// `|Lambda_0|, ..., |Lambda_n|`.
    pub lambda_sizes: Vec<usize>,
    /// `|E_0|, ..., |E_n|`.
    pub excluded_sizes: Vec<usize>,
    pub delta: f64,
    /// Right-hand side of the size guarantee `2^n >= bound`.
    pub bound: f64,
    /// Largest `n` with `2^n` below both terms of the guarantee; the trace
    /// satisfies `|Lambda_j| >= 2 * 3^j` for `j <= guaranteed_steps`.
    pub guaranteed_steps: usize,
}

impl GreedyResult {
    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// `h + sum_{j in mask} g_j` for every subset mask, in mask order.
    pub fn subset_sums(&self) -> Vec<usize> {
        let n = self.n();
        let mut sums = vec![self.h; 1 << n];
        for (j, &g) in self.s.iter().enumerate() {
            let half = 1 << j;
            for mask in 0..half {
                sums[mask | half] = self.group.add(sums[mask], g);
            }
        }
        sums
    }
}

/// The two terms of `2^n >= (1/2) min{delta log|G| / log(|G|/|Lambda|),
/// (|G|^{1-delta} / 16)^{2/3}}`; the first is infinite when `Lambda = G`.
fn guarantee_terms(group_size: usize, lambda: usize, delta: f64) -> (f64, f64) {
    let g = group_size as f64;
    let ratio = (g / lambda as f64).ln();
    let first = if ratio > 0.0 { delta * g.ln() / ratio } else { f64::INFINITY };
    let second = (g.powf(1.0 - delta) / 16.0).powf(2.0 / 3.0);
    (first, second)
}

/// `|Lambda ∩ (Lambda - g)|` for every `g`, by direct counting.
pub fn overlap_counts_direct(group: &GroupSpec, member: &[bool]) -> Vec<usize> {
    let n = group.size();
    (0..n)
        .map(|g| (0..n).filter(|&h| member[h] && member[group.add(h, g)]).count())
        .collect()
}

/// Same counts through the circular autocorrelation of the indicator.
fn overlap_counts_fft(fft: &NdFft, member: &[bool], buf: &mut [Complex64]) -> Vec<usize> {
    for (b, &m) in buf.iter_mut().zip(member) {
        *b = Complex64::new(if m { 1.0 } else { 0.0 }, 0.0);
    }
    fft.process(buf, FftDirection::Forward);
    buf.iter_mut().for_each(|v| *v = Complex64::new(v.norm_sqr(), 0.0));
    fft.process(buf, FftDirection::Inverse);
    let scale = 1.0 / buf.len() as f64;
    buf.iter().map(|v| (v.re * scale).round().max(0.0) as usize).collect()
}

/// Greedy construction with the default group-size cap.
pub fn greedy_select(group: &GroupSpec, lambda: &[usize], delta: f64) -> Result<GreedyResult> {
    greedy_select_capped(group, lambda, delta, DEFAULT_GROUP_CAP)
}

/// Starting from `Lambda_0 = Lambda`, repeatedly pick the `g` outside
/// `E_j = {sum p_g g : p_g in {0, ±1}}` maximizing `|Lambda_j ∩ (Lambda_j - g)|`
/// (ties to the smallest element) and set `Lambda_{j+1} = Lambda_j ∩ (Lambda_j - g)`.
/// Stops once `E_j` is the whole group or every overlap outside it is empty.
pub fn greedy_select_capped(group: &GroupSpec, lambda: &[usize], delta: f64, cap: usize) -> Result<GreedyResult> {
    let size = group.size();
    if size > cap {
        return param(format!("group of size {size} exceeds the cap {cap}"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return param(format!("delta must lie in (0, 1), got {delta}"));
    }
    let mut member = vec![false; size];
    for &x in lambda {
        if x >= size {
            return param(format!("element {x} outside a group of size {size}"));
        }
        if std::mem::replace(&mut member[x], true) {
            return Err(Error::Duplicate(format!("{:?}", group.tuple(x))));
        }
    }
    if lambda.len() < 2 {
        return param(format!("need |Lambda| >= 2, got {}", lambda.len()));
    }

    let (first, second) = guarantee_terms(size, lambda.len(), delta);
    let cap_n = first.min(second);
    let bound = 0.5 * cap_n;
    let guaranteed_steps = if cap_n >= 1.0 { cap_n.log2().floor() as usize } else { 0 };

    let fft = NdFft::new(group.moduli());
    let mut buf = vec![Complex64::default(); size];
    let mut excluded = vec![false; size];
    excluded[0] = true;
    let mut excluded_count = 1;
    let mut s = Vec::new();
    let mut lambda_sizes = vec![lambda.len()];
    let mut excluded_sizes = vec![1];

    while excluded_count < size {
        let counts = overlap_counts_fft(&fft, &member, &mut buf);
        let best = (0..size)
            .filter(|&g| !excluded[g])
            .fold(None, |acc: Option<(usize, usize)>, g| match acc {
                Some((_, c)) if c >= counts[g] => acc,
                _ => Some((g, counts[g])),
            });
        let Some((g, count)) = best else { break };
        if count == 0 {
            break;
        }
        let next: Vec<bool> = (0..size).map(|h| member[h] && member[group.add(h, g)]).collect();
        member = next;
        debug_assert_eq!(member.iter().filter(|&&m| m).count(), count);

        let mut grown = excluded.clone();
        for e in (0..size).filter(|&e| excluded[e]) {
            grown[group.add(e, g)] = true;
            grown[group.sub(e, g)] = true;
        }
        excluded = grown;
        excluded_count = excluded.iter().filter(|&&e| e).count();

        s.push(g);
        lambda_sizes.push(count);
        excluded_sizes.push(excluded_count);
    }

    let h = member.iter().position(|&m| m).expect("Lambda_j stays non-empty");
    Ok(GreedyResult {
        group: group.clone(),
        s,
        h,
        lambda_sizes,
        excluded_sizes,
        delta,
        bound,
        guaranteed_steps,
    })
}
