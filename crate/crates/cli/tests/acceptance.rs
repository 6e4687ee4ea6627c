//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Each criterion also has a wall-clock budget.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fsamp_cli::experiment::{preset, run_experiment, RunReport};
use fsamp_cli::{compare_runs, rerun_from_manifest, verify_rerun};
use fsamp_core::design::{hierarchical, lowest_block, uniform_random, HierarchicalParams, SamplingDesign};
use fsamp_core::fourier::{band_bounds, band_decompose, block, vdp_sum, TrigPolynomial};
use fsamp_core::metrics::{crossover_p0, gamma_exponent};
use fsamp_core::phantom::{Phantom, Shape};
use fsamp_core::quadrature::{integrate, integrate_with_breaks};
use fsamp_core::recon::{bv_min_admm, bv_objective, AdmmParams, Measurements};
use fsamp_core::witness::{
    greedy_select, overlap_counts_direct, phase_search, riesz_product, trial_phases, GreedyResult, GroupSpec,
};
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_poly(rng: &mut ChaCha8Rng, dim: usize, degree: usize) -> TrigPolynomial {
    TrigPolynomial::from_fn(dim, degree, |_| Complex64::new(uniform(rng) - 0.5, uniform(rng) - 0.5))
}

fn c1_vdp_projection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for m in [4usize, 8, 16] {
        for dim in [1usize, 2] {
            for _ in 0..100 {
                let f = random_poly(&mut rng, dim, m / 2);
                let v = vdp_sum(&f, m).map_err(|e| e.to_string())?;
                worst = worst.max(v.max_abs_diff(&f.with_degree(m)));
                count += 1;
            }
        }
    }
    check(worst <= 1e-12, format!("max coefficient error {worst:.2e} > 1e-12"))?;
    Ok(format!("{count} polynomials, max coefficient error {worst:.1e}"))
}

fn c2_telescoping() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let r = 1 + (i % 6) as u32;
        let dim = 1 + i % 2;
        let top = 1usize << r;
        let f = random_poly(&mut rng, dim, top + 3);
        let bands = band_decompose(&f, r).map_err(|e| e.to_string())?;
        let pieces = bands.pieces();
        check(pieces.len() == r as usize, format!("r = {r}: {} pieces", pieces.len()))?;
        let mut sum = TrigPolynomial::zeros(dim, top);
        for (k, piece) in pieces.iter().enumerate() {
            let (lo, hi) = band_bounds(k as u32);
            for (xi, c) in piece.iter() {
                let s = xi.sup_norm();
                if c != Complex64::default() && (s < lo || s > hi) {
                    return Err(format!("band {k} has coefficient at {xi} outside [{lo}, {hi}]"));
                }
            }
            sum = sum.add(&piece.with_degree(top));
        }
        let want = vdp_sum(&f, top).map_err(|e| e.to_string())?;
        worst = worst.max(sum.max_abs_diff(&want));
    }
    check(worst <= 1e-12, format!("telescoping error {worst:.2e} > 1e-12"))?;
    Ok(format!("50 inputs, r <= 6, supports exact, telescoping error {worst:.1e}"))
}

fn x_breaks(ph: &Phantom) -> Vec<f64> {
    let mut out = Vec::new();
    for r in ph.regions() {
        match r.shape {
            Shape::Rect(q) => out.extend([q.x0, q.x1]),
            Shape::Diamond(d) => out.extend([d.cx - d.r, d.cx, d.cx + d.r]),
            Shape::DiamondAnnulus(a) => out.extend([a.cx - a.r_out, a.cx - a.r_in, a.cx, a.cx + a.r_in, a.cx + a.r_out]),
        }
    }
    out
}

fn y_breaks(ph: &Phantom, x: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut diamond = |cx: f64, cy: f64, r: f64| {
        let h = r - (x - cx).abs();
        if h > 0.0 {
            out.extend([cy - h, cy + h]);
        }
    };
    let mut rects = Vec::new();
    for r in ph.regions() {
        match r.shape {
            Shape::Rect(q) => rects.extend([q.y0, q.y1]),
            Shape::Diamond(d) => diamond(d.cx, d.cy, d.r),
            Shape::DiamondAnnulus(a) => {
                diamond(a.cx, a.cy, a.r_out);
                diamond(a.cx, a.cy, a.r_in);
            }
        }
    }
    out.extend(rects);
    out
}

/// Nested adaptive quadrature of the pointwise phantom, split at edges.
fn quadrature_coeff(ph: &Phantom, k1: i64, k2: i64, tol: f64) -> Complex64 {
    let xb = x_breaks(ph);
    let part = |re: bool| {
        integrate_with_breaks(
            |x| {
                let ys = y_breaks(ph, x);
                integrate_with_breaks(
                    |y| {
                        let t = -(k1 as f64 * x + k2 as f64 * y);
                        ph.value_at(x, y) * if re { t.cos() } else { t.sin() }
                    },
                    0.0,
                    2.0 * PI,
                    &ys,
                    tol * 1e-2,
                )
                .unwrap()
            },
            0.0,
            2.0 * PI,
            &xb,
            tol,
        )
        .unwrap()
    };
    Complex64::new(part(true), part(false)) / (4.0 * PI * PI)
}

fn c3_phantom_quadrature() -> Outcome {
    let ph = Phantom::standard();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for xi in block(2, 8) {
        let c = xi.components();
        let exact = ph.coeff(&xi).map_err(|e| e.to_string())?;
        let quad = quadrature_coeff(&ph, c[0], c[1], 1e-11);
        worst = worst.max((exact - quad).norm());
        count += 1;
    }
    check(count == 289, format!("{count} frequencies"))?;
    check(worst <= 1e-8, format!("max deviation {worst:.2e} > 1e-8"))?;
    Ok(format!("{count} frequencies, max deviation {worst:.1e}"))
}

fn distinct_sorted(d: &SamplingDesign) -> bool {
    d.freqs().windows(2).all(|w| w[0] < w[1])
}

fn c4_design_counts() -> Outcome {
    let lb = lowest_block(8, 2).map_err(|e| e.to_string())?;
    check(lb.len() == 289, format!("lowest_block(8, 2) has {} frequencies", lb.len()))?;
    let mut runs = 0;
    for n in [289usize, 1089] {
        for seed in 0..20u64 {
            let p = HierarchicalParams::with_defaults(n, 2, 1.0);
            let h = hierarchical(&p, 2, seed).map_err(|e| e.to_string())?;
            check(h.len() == n && distinct_sorted(&h), format!("hierarchical n={n} seed={seed}: {}", h.len()))?;
            let u = uniform_random(n, 1024, 2, seed).map_err(|e| e.to_string())?;
            check(u.len() == n && distinct_sorted(&u), format!("uniform n={n} seed={seed}: {}", u.len()))?;
            check(u.max_sup_norm() <= 1024, "uniform draw outside the box")?;
            runs += 2;
        }
    }
    let spec_case = HierarchicalParams {
        k0: 3,
        alpha: 1.0,
        k_cap: 9,
        n_target: 289,
    };
    let h = hierarchical(&spec_case, 2, 7).map_err(|e| e.to_string())?;
    check(h.len() == 289 && h.max_sup_norm() <= 1024, "k0=3, k_cap=9 case")?;
    Ok(format!("lowest block 289; {runs} seeded designs exact and duplicate-free"))
}

fn c5_admm() -> Outcome {
    let ph = Phantom::standard();
    let design = lowest_block(8, 2).map_err(|e| e.to_string())?;
    let meas = Measurements::from_source(&design, &ph, "phantom", true).map_err(|e| e.to_string())?;
    let params = AdmmParams::new(32);
    check(params.grid_points() == 129, "grid is not 129")?;
    let (f, rep) = bv_min_admm(&meas, &params).map_err(|e| e.to_string())?;
    let pin_err = meas.iter().map(|(xi, v)| (f.coeff(xi) - v).norm()).fold(0.0, f64::max);
    check(pin_err <= 1e-14, format!("pin error {pin_err:.2e}"))?;
    let comparator = bv_objective(&vdp_sum(&ph, 32).map_err(|e| e.to_string())?, 129).map_err(|e| e.to_string())?;
    check(
        rep.final_objective <= comparator + 1e-6,
        format!("objective {} above comparator {comparator}", rep.final_objective),
    )?;
    let mut eq_err: f64 = 0.0;
    for t in [2.0, -1.0] {
        let (ft, _) = bv_min_admm(&meas.scaled(t), &params).map_err(|e| e.to_string())?;
        eq_err = eq_err.max(ft.max_abs_diff(&f.scale(t)));
    }
    check(eq_err <= 1e-8, format!("equivariance error {eq_err:.2e}"))?;
    Ok(format!(
        "pins {pin_err:.0e}, objective {:.6} vs comparator {comparator:.6}, equivariance {eq_err:.1e} ({} iterations)",
        rep.final_objective, rep.iterations
    ))
}

fn read_report(manifest: &Path) -> Result<RunReport, String> {
    let text = std::fs::read_to_string(manifest.parent().unwrap().join("report.json")).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn run_preset(root: &Path, name: &str) -> Result<PathBuf, String> {
    let mut spec = preset(name).ok_or(format!("no preset {name}"))?;
    spec.out_dir = root.join(name);
    run_experiment(&spec).map_err(|e| format!("{name}: {e}"))?;
    Ok(spec.out_dir.join("manifest.json"))
}

fn c6_edge_ordering(root: &Path) -> Outcome {
    let names = ["exp1", "exp2", "exp3", "exp4", "exp5", "exp4-1089"];
    let mut manifests = Vec::new();
    for name in names {
        manifests.push(run_preset(root, name)?);
    }
    let table = compare_runs(&manifests).map_err(|e| e.to_string())?;
    table.write(&root.join("comparison")).map_err(|e| e.to_string())?;
    for line in table.to_csv().lines() {
        println!("        {line}");
    }
    let disc = |n: &str| table.row(n).map(|r| r.edge_discrepancy).ok_or(format!("missing row {n}"));
    let (vdp, lowest, hier, unif, hier1089) = (disc("exp2")?, disc("exp3")?, disc("exp4")?, disc("exp5")?, disc("exp4-1089")?);
    check(hier < lowest, format!("hierarchical {hier} !< lowest-block {lowest}"))?;
    check(lowest < vdp, format!("lowest-block bvmin {lowest} !< vdp {vdp}"))?;
    check(unif > hier && unif > lowest, format!("uniform {unif} not worst among bvmin"))?;
    check(hier1089 < hier, format!("n=1089 {hier1089} !< n=289 {hier}"))?;
    let exp1 = read_report(&manifests[0])?;
    check(exp1.overshoot > 0.05, format!("partial-sum overshoot {} <= 0.05", exp1.overshoot))?;
    Ok(format!(
        "hier {hier:.4} < lowest {lowest:.4} < vdp {vdp:.4}; uniform {unif:.4} worst; n=1089 {hier1089:.4}"
    ))
}

fn c7_riesz_identities() -> Outcome {
    let g = GroupSpec::cyclic(1024).map_err(|e| e.to_string())?;
    let mut cases = 0;
    for n in 0..=10usize {
        for (variant, mult) in [1usize, 3].into_iter().enumerate() {
            let s: Vec<usize> = (0..n).map(|j| ((1usize << j) * mult) % 1024).collect();
            let z = trial_phases(11, variant * 16 + n, n);
            let h = (37 * n + 5 * variant) % 1024;
            let w = riesz_product(&g, &s, h, &z).map_err(|e| e.to_string())?;
            let two_n = 2f64.powi(n as i32);
            check((w.norm(2.0).powi(2) / two_n - 1.0).abs() <= 1e-9, format!("n={n}: l2^2 {}", w.norm(2.0).powi(2)))?;
            check(w.norm(f64::INFINITY) <= two_n * (1.0 + 1e-12), format!("n={n}: l_inf above 2^n"))?;
            let nz: Vec<&Complex64> = w.coeffs.iter().filter(|c| c.norm() > 1e-12).collect();
            check(nz.len() == 1 << n, format!("n={n}: {} non-zero coefficients", nz.len()))?;
            check(nz.iter().all(|c| (c.norm() - 1.0).abs() < 1e-10), format!("n={n}: non-unimodular coefficient"))?;
            for p in [1.25, 1.5, 2.0] {
                let floor = 2f64.powf(n as f64 * (1.0 - 1.0 / p));
                check(w.norm(p) >= floor * (1.0 - 1e-12), format!("n={n}, p={p}: {} < {floor}", w.norm(p)))?;
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} products on Z/1024, n <= 10"))
}

fn c8_average_ell1() -> Outcome {
    let g = GroupSpec::cyclic(1024).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for n in 1..=8usize {
        let s: Vec<usize> = (0..n).map(|j| 1 << j).collect();
        let r = phase_search(&g, &s, 0, 10_000, 8).map_err(|e| e.to_string())?;
        let rel = (r.mean_ell1 / (4.0 / PI).powi(n as i32) - 1.0).abs();
        worst = worst.max(rel);
        check(rel <= 0.02, format!("n={n}: mean {} is {:.2}% off", r.mean_ell1, 100.0 * rel))?;
    }
    let avg = integrate(|t| (1.0 + Complex64::from_polar(1.0, t)).norm(), 0.0, 2.0 * PI, 1e-12).map_err(|e| e.to_string())?
        / (2.0 * PI);
    let qerr = (avg - 4.0 / PI).abs();
    check(qerr <= 1e-6, format!("n=1 quadrature off by {qerr:.2e}"))?;
    Ok(format!("10^4 draws, worst relative deviation {:.2}%; n=1 quadrature error {qerr:.1e}", 100.0 * worst))
}

fn selection_violation(r: &GreedyResult, lambda: &[usize]) -> Option<String> {
    let size = r.group.size();
    let mut member = vec![false; size];
    lambda.iter().for_each(|&x| member[x] = true);
    let n = r.n();
    let mut seen = vec![false; size];
    for mask in 0..1usize << n {
        let sum = r
            .s
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .fold(0, |acc, (_, &g)| r.group.add(acc, g));
        if !member[r.group.add(r.h, sum)] {
            return Some(format!("h + sum(T) outside Lambda for subset {mask:b}"));
        }
        if seen[sum] {
            return Some(format!("repeated subset sum for subset {mask:b}"));
        }
        seen[sum] = true;
    }
    if 2f64.powi(n as i32) < r.bound {
        return Some(format!("2^{n} below bound {}", r.bound));
    }
    for j in 0..n {
        let (lj, next) = (r.lambda_sizes[j] as f64, r.lambda_sizes[j + 1] as f64);
        if next < lj * (lj - 3f64.powi(j as i32)) / size as f64 {
            return Some(format!("recursion fails at step {j}"));
        }
    }
    None
}

fn c9_greedy_selection() -> Outcome {
    let mut parts = Vec::new();
    for n_group in [256usize, 1024] {
        let g = GroupSpec::cyclic(n_group).map_err(|e| e.to_string())?;
        let lambda: Vec<usize> = (0..n_group / 2).collect();
        let r = greedy_select(&g, &lambda, 0.5).map_err(|e| e.to_string())?;
        if let Some(v) = selection_violation(&r, &lambda) {
            return Err(format!("N={n_group}: {v}"));
        }
        // First selection step agrees with direct overlap counting.
        let mut member = vec![false; n_group];
        lambda.iter().for_each(|&x| member[x] = true);
        let counts = overlap_counts_direct(&g, &member);
        let best = (1..n_group).max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a))).unwrap();
        check(r.s.first() == Some(&best), format!("N={n_group}: first pick {:?} vs {best}", r.s.first()))?;
        parts.push(format!("N={n_group}: |S|={} (bound {:.2})", r.n(), r.bound));
    }
    Ok(parts.join(", "))
}

fn c10_constants() -> Outcome {
    let (g2, p0) = (gamma_exponent(2.0).map_err(|e| e.to_string())?, crossover_p0());
    check((g2 - 0.151).abs() <= 5e-4, format!("gamma_2 = {g2}"))?;
    check((p0 - 1.535).abs() <= 5e-4, format!("p0 = {p0}"))?;
    Ok(format!("gamma_2 = {g2:.5}, p0 = {p0:.5}"))
}

fn c11_rerun(root: &Path) -> Outcome {
    let original = root.join("exp3").join("manifest.json");
    if !original.exists() {
        run_preset(root, "exp3")?;
    }
    let dir = root.join("exp3-rerun");
    rerun_from_manifest(&original, &dir).map_err(|e| e.to_string())?;
    let c = verify_rerun(&original, &dir.join("manifest.json")).map_err(|e| e.to_string())?;
    check(c.design_identical, "design files differ")?;
    check(c.passed(), format!("report fields differ: {:?}", c.mismatched_fields))?;
    Ok(format!("design byte-identical, max report difference {:.1e}", c.max_report_diff))
}

fn main() {
    let work = tempfile::tempdir().expect("temp dir");
    let root = work.path();
    let criteria: Vec<(u32, &str, u64, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "de la Vallee Poussin reproduction", 1, Box::new(c1_vdp_projection)),
        (2, "band telescoping", 5, Box::new(c2_telescoping)),
        (3, "phantom coefficients vs quadrature", 30, Box::new(c3_phantom_quadrature)),
        (4, "design counts", 5, Box::new(c4_design_counts)),
        (5, "ADMM pins, comparator, equivariance", 300, Box::new(c5_admm)),
        (6, "edge-recovery ordering", 1200, Box::new(move || c6_edge_ordering(root))),
        (7, "Riesz-product identities", 60, Box::new(c7_riesz_identities)),
        (8, "average l1 identity", 120, Box::new(c8_average_ell1)),
        (9, "greedy selection certification", 120, Box::new(c9_greedy_selection)),
        (10, "constants", 1, Box::new(c10_constants)),
        (11, "manifest rerun reproducibility", 300, Box::new(move || c11_rerun(root))),
    ];
    // Optional criterion ids as arguments select a subset.
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, title, budget, run) in &criteria {
        if !only.is_empty() && !only.contains(id) {
            continue;
        }
        ran += 1;
        let t0 = Instant::now();
        let outcome = run();
        let elapsed = t0.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(*budget) => Err(format!("{msg}; over the {budget} s budget")),
            other => other,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {id:>2} {title}: {msg} [{secs:.2} s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id:>2} {title}: {msg} [{secs:.2} s]");
            }
        }
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
