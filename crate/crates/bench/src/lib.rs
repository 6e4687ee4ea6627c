//! Criterion benchmarks for the hot kernels: grid synthesis, ADMM
//! iterations, greedy selection and the phase search.

use std::hint::black_box;

use criterion::Criterion;
use fsamp_core::design::lowest_block;
use fsamp_core::fourier::{evaluate_on_grid, TrigPolynomial};
use fsamp_core::recon::{bv_min_admm, AdmmParams, Measurements};
use fsamp_core::witness::{greedy_select, phase_search, GroupSpec};
use fsamp_core::Phantom;

pub fn synthesis(c: &mut Criterion) {
    let ph = Phantom::standard();
    let design = lowest_block(32, 2).unwrap();
    let meas = Measurements::from_source(&design, &ph, "phantom", true).unwrap();
    let poly = TrigPolynomial::from_fn(2, 32, |xi| meas.get(xi).unwrap_or_default());
    let mut g = c.benchmark_group("synthesis");
    for points in [129usize, 1024] {
        g.bench_function(format!("degree32_grid{points}"), |b| {
            b.iter(|| evaluate_on_grid(black_box(&poly), points).unwrap())
        });
    }
    g.finish();
}

pub fn admm(c: &mut Criterion) {
    let ph = Phantom::standard();
    let design = lowest_block(8, 2).unwrap();
    let meas = Measurements::from_source(&design, &ph, "phantom", true).unwrap();
    let mut params = AdmmParams::new(32);
    params.max_iter = 20;
    let mut g = c.benchmark_group("admm");
    g.sample_size(10);
    g.bench_function("m32_20_iterations", |b| b.iter(|| bv_min_admm(black_box(&meas), &params).unwrap()));
    g.finish();
}

pub fn witness(c: &mut Criterion) {
    let group = GroupSpec::cyclic(1024).unwrap();
    let lambda: Vec<usize> = (0..512).collect();
    c.bench_function("greedy_z1024_half", |b| b.iter(|| greedy_select(&group, black_box(&lambda), 0.5).unwrap()));
    let s: Vec<usize> = (0..8).map(|j| 1 << j).collect();
    let mut g = c.benchmark_group("phase_search");
    g.sample_size(10);
    g.bench_function("z1024_n8_1000_trials", |b| b.iter(|| phase_search(&group, black_box(&s), 0, 1000, 3).unwrap()));
    g.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    synthesis(c);
    admm(c);
    witness(c);
}
