use std::f64::consts::PI;

use fsamp_core::design::lowest_block;
use fsamp_core::fourier::{evaluate_on_grid, vdp_sum, FrequencyIndex, GridField, TrigPolynomial};
use fsamp_core::recon::{
    bv_min_admm, bv_objective, feasibility_residual, gradient_grid_operator, partial_sum_recon, vdp_recon,
    AdmmParams, Measurements,
};
use fsamp_core::{Error, Phantom};
use num_complex::Complex64;

fn fi(v: &[i64]) -> FrequencyIndex {
    FrequencyIndex::new(v.to_vec())
}

fn random_real_poly(dim: usize, degree: usize, seed: u64) -> TrigPolynomial {
    let mut s = seed | 1;
    let mut next = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut p = TrigPolynomial::from_fn(dim, degree, |_| Complex64::new(next(), next()));
    p.symmetrize();
    p
}

fn direct_value(p: &TrigPolynomial, x: &[f64]) -> f64 {
    p.iter()
        .map(|(xi, c)| {
            let t: f64 = xi.components().iter().zip(x).map(|(&k, &y)| k as f64 * y).sum();
            (c * Complex64::from_polar(1.0, t)).re
        })
        .sum()
}

fn square_wave_measurements(radius: i64) -> Measurements {
    let rows = (-radius..=radius).map(|k| {
        let c = if k == 0 {
            Complex64::new(0.5, 0.0)
        } else {
            (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -(k as f64) * PI)) / Complex64::new(0.0, 2.0 * PI * k as f64)
        };
        (fi(&[k]), c)
    });
    Measurements::new(1, rows, "square", true).unwrap()
}

#[test]
fn gradient_of_a_single_mode() {
    // f = cos(x_1) + sin(x_2): gradient (-sin x_1, cos x_2).
    let mut p = TrigPolynomial::zeros(2, 2);
    p.set(&fi(&[1, 0]), Complex64::new(0.5, 0.0)).unwrap();
    p.set(&fi(&[-1, 0]), Complex64::new(0.5, 0.0)).unwrap();
    p.set(&fi(&[0, 1]), Complex64::new(0.0, -0.5)).unwrap();
    p.set(&fi(&[0, -1]), Complex64::new(0.0, 0.5)).unwrap();
    let mut op = gradient_grid_operator(2, 2, 9).unwrap();
    let mut out = op.zero_field();
    op.apply(p.coeffs(), &mut out);
    let grid = GridField::from_real(2, 9, vec![0.0; 81]).unwrap();
    for k in 0..81 {
        let x = grid.coordinates(k);
        assert!((out[0][k] + x[0].sin()).abs() < 1e-10);
        assert!((out[1][k] - x[1].cos()).abs() < 1e-10);
    }
}

#[test]
fn constant_has_zero_gradient() {
    let mut p = TrigPolynomial::zeros(2, 3);
    p.set(&fi(&[0, 0]), Complex64::new(2.5, 0.0)).unwrap();
    let mut op = gradient_grid_operator(2, 3, 13).unwrap();
    let mut out = op.zero_field();
    op.apply(p.coeffs(), &mut out);
    assert!(out.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn gradient_matches_finite_differences() {
    for dim in [1, 2, 3] {
        let p = random_real_poly(dim, 3, 41 + dim as u64);
        let points = 13;
        let mut op = gradient_grid_operator(dim, 3, points).unwrap();
        let mut out = op.zero_field();
        op.apply(p.coeffs(), &mut out);
        let grid = GridField::from_real(dim, points, vec![0.0; points.pow(dim as u32)]).unwrap();
        let h = 1e-5;
        for k in (0..grid.len()).step_by(7) {
            let x = grid.coordinates(k);
            for a in 0..dim {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[a] += h;
                xm[a] -= h;
                let fd = (direct_value(&p, &xp) - direct_value(&p, &xm)) / (2.0 * h);
                assert!((out[a][k] - fd).abs() < 1e-6, "dim {dim} axis {a}");
            }
        }
    }
}

#[test]
fn normal_operator_is_diagonal_and_adjoint_is_consistent() {
    for dim in [1, 2, 3] {
        let m = 4;
        let points = 4 * m + 1;
        let p = random_real_poly(dim, m, 7 * dim as u64);
        let mut op = gradient_grid_operator(dim, m, points).unwrap();
        let mut bx = op.zero_field();
        op.apply(p.coeffs(), &mut bx);
        let mut back = vec![Complex64::default(); op.coeff_len()];
        op.adjoint(&bx, &mut back);
        let diag = op.diagonal();
        for ((b, c), d) in back.iter().zip(p.coeffs()).zip(&diag) {
            assert!((b - c * d).norm() < 1e-10);
        }
        // <B c, w> = <c, B* w> for a real field w.
        let q = random_real_poly(dim, m, 99 + dim as u64);
        let mut w = op.zero_field();
        op.apply(q.coeffs(), &mut w);
        for (a, ch) in w.iter_mut().enumerate() {
            for (k, v) in ch.iter_mut().enumerate() {
                *v += ((k * 31 + a * 7) % 11) as f64 * 0.1;
            }
        }
        let n = op.grid_len() as f64;
        let lhs: f64 = bx.iter().zip(&w).flat_map(|(x, y)| x.iter().zip(y).map(|(a, b)| a * b)).sum::<f64>() / n;
        let mut bw = vec![Complex64::default(); op.coeff_len()];
        op.adjoint(&w, &mut bw);
        let rhs: f64 = p.coeffs().iter().zip(&bw).map(|(c, b)| (c.conj() * b).re).sum();
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} {rhs}");
    }
}

#[test]
fn undersampled_gradient_grid_is_refused() {
    assert!(matches!(gradient_grid_operator(2, 8, 32), Err(Error::Aliasing { .. })));
    assert!(gradient_grid_operator(2, 8, 33).is_ok());
}

#[test]
fn partial_and_vdp_reconstructions() {
    let zero = Measurements::new(2, lowest_block(2, 2).unwrap().freqs().iter().map(|f| (f.clone(), Complex64::default())), "zero", true).unwrap();
    assert_eq!(partial_sum_recon(&zero, 2).unwrap().max_abs(), 0.0);
    assert_eq!(vdp_recon(&zero, 2).unwrap().max_abs(), 0.0);
    assert!(matches!(partial_sum_recon(&zero, 3), Err(Error::MissingFrequency(_))));

    let one = Measurements::new(2, [(fi(&[0, 0]), Complex64::new(1.0, 0.0))], "one", true).unwrap();
    let c = partial_sum_recon(&one, 0).unwrap();
    assert_eq!(c.coeffs(), &[Complex64::new(1.0, 0.0)]);

    let p = random_real_poly(2, 4, 5);
    let design = lowest_block(8, 2).unwrap();
    let meas = Measurements::from_source(&design, &p.with_degree(8), "p", true).unwrap();
    assert!(vdp_recon(&meas, 8).unwrap().max_abs_diff(&p.with_degree(8)) < 1e-15);
}

#[test]
fn feasibility_residual_examples() {
    let design = lowest_block(3, 2).unwrap();
    let p = random_real_poly(2, 3, 17);
    let meas = Measurements::from_source(&design, &p, "p", true).unwrap();
    assert_eq!(feasibility_residual(&p, &meas).unwrap(), 0.0);
    let zero = TrigPolynomial::zeros(2, 3);
    assert_eq!(feasibility_residual(&zero, &meas).unwrap(), meas.max_abs());
    let mut q = p.clone();
    let xi = fi(&[1, -2]);
    q.set(&xi, p.coeff(&xi) + Complex64::new(1e-3, 0.0)).unwrap();
    assert!((feasibility_residual(&q, &meas).unwrap() - 1e-3).abs() < 1e-15);
}

#[test]
fn inconsistent_pins_are_infeasible() {
    let rows = [(fi(&[1]), Complex64::new(1.0, 0.5)), (fi(&[-1]), Complex64::new(1.0, 0.5))];
    assert!(matches!(Measurements::new(1, rows, "bad", true), Err(Error::Infeasible(_))));
    let mean = [(fi(&[0]), Complex64::new(1.0, 0.5))];
    assert!(matches!(Measurements::new(1, mean, "bad", true), Err(Error::Infeasible(_))));
    let dup = [(fi(&[2]), Complex64::new(1.0, 0.0)), (fi(&[2]), Complex64::new(1.0, 0.0))];
    assert!(matches!(Measurements::new(1, dup, "dup", true), Err(Error::Duplicate(_))));
}

#[test]
fn admm_parameter_validation() {
    let meas = square_wave_measurements(4);
    let mut p = AdmmParams::new(7);
    assert!(bv_min_admm(&meas, &p).is_err());
    p.degree = 6;
    assert!(bv_min_admm(&meas, &p).is_err(), "m must cover twice the sampled radius");
    p.degree = 8;
    p.oversample = 3;
    assert!(bv_min_admm(&meas, &p).is_err());
    p.oversample = 4;
    p.rho = 0.0;
    assert!(bv_min_admm(&meas, &p).is_err());
}

#[test]
fn constant_function_is_a_fixed_point() {
    let design = lowest_block(2, 2).unwrap();
    let rows = design.freqs().iter().map(|f| {
        let v = if f.is_zero() { 3.0 } else { 0.0 };
        (f.clone(), Complex64::new(v, 0.0))
    });
    let meas = Measurements::new(2, rows, "const", true).unwrap();
    let (f, rep) = bv_min_admm(&meas, &AdmmParams::new(4)).unwrap();
    assert!(rep.converged);
    assert!(rep.iterations <= 2);
    assert_eq!(rep.final_objective, 0.0);
    assert_eq!(f.coeff(&fi(&[0, 0])), Complex64::new(3.0, 0.0));
    assert_eq!(f.max_abs(), 3.0);
}

#[test]
fn square_wave_beats_partial_sum() {
    let meas = square_wave_measurements(4);
    let (f, rep) = bv_min_admm(&meas, &AdmmParams::new(16)).unwrap();
    let partial = partial_sum_recon(&meas, 4).unwrap();
    let points = 2048;
    let truth = GridField::from_fn(1, points, |x| if x[0] < PI { 1.0 } else { 0.0 }).unwrap();
    let err = |p: &TrigPolynomial| {
        let g = evaluate_on_grid(p, points).unwrap();
        g.values().iter().zip(truth.values()).map(|(a, b)| (a.re - b.re).abs()).sum::<f64>() / points as f64
    };
    assert!(err(&f) < err(&partial), "{} vs {}", err(&f), err(&partial));
    assert_eq!(feasibility_residual(&f, &meas).unwrap(), 0.0);
    assert!(rep.final_objective <= bv_objective(&partial.with_degree(16), 65).unwrap());
}

#[test]
fn phantom_block_properties() {
    let ph = Phantom::standard();
    let design = lowest_block(8, 2).unwrap();
    let meas = Measurements::from_source(&design, &ph, "phantom", true).unwrap();
    let mut params = AdmmParams::new(32);
    params.max_iter = 1500;
    let (f, rep) = bv_min_admm(&meas, &params).unwrap();

    for (xi, v) in meas.iter() {
        assert!((f.coeff(xi) - v).norm() <= 1e-14);
    }
    let comparator = bv_objective(&vdp_sum(&ph, 32).unwrap(), 129).unwrap();
    assert!(rep.final_objective <= comparator + 1e-6);
    assert!((bv_objective(&f, 129).unwrap() - rep.final_objective).abs() < 1e-12);

    let running_min: Vec<f64> = rep
        .objective_history
        .iter()
        .scan(f64::INFINITY, |m, &v| {
            *m = m.min(v);
            Some(*m)
        })
        .collect();
    assert!(running_min.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*running_min.last().unwrap(), rep.final_objective);

    let g = evaluate_on_grid(&f, 129).unwrap();
    assert!(g.max_imag() < 1e-10);

    for t in [2.0, -1.0] {
        let (ft, _) = bv_min_admm(&meas.scaled(t), &params).unwrap();
        assert!(ft.max_abs_diff(&f.scale(t)) <= 1e-8 * f.max_abs());
    }
}

#[test]
fn converged_runs_meet_their_tolerances() {
    let meas = square_wave_measurements(3);
    let mut params = AdmmParams::new(8);
    params.eps_primal = 1e-5;
    params.eps_dual = 1e-5;
    params.max_iter = 20_000;
    let (_, rep) = bv_min_admm(&meas, &params).unwrap();
    assert!(rep.converged, "{} iterations", rep.iterations);
    assert_eq!(rep.primal_history.len(), rep.iterations);
    assert!(rep.primal_res >= 0.0 && rep.dual_res >= 0.0);
}
