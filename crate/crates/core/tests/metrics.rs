use fsamp_core::design::lowest_block;
use fsamp_core::fourier::{evaluate_on_grid, fetch_block, lp_norm_grid, GridField, TrigPolynomial};
use fsamp_core::metrics::{edge_discrepancy, edge_sets_binary, recovery_report};
use fsamp_core::phantom::{Phantom, RectRegion, Region, Shape};
use fsamp_core::recon::{bv_min_admm, partial_sum_recon, AdmmParams, Measurements};
use proptest::prelude::*;

fn binary_phantom() -> Phantom {
    Phantom::new(vec![Region {
        shape: Shape::Rect(RectRegion {
            x0: 1.5,
            x1: 4.0,
            y0: 2.0,
            y1: 5.0,
        }),
        weight: 1.0,
    }])
    .unwrap()
}

#[test]
fn zero_reconstruction_reports_phantom_norms() {
    let ph = Phantom::standard();
    let design = lowest_block(4, 2).unwrap();
    let r = recovery_report(&TrigPolynomial::zeros(2, 4), &ph, &design, 256).unwrap();
    let truth = ph.render(256).unwrap();
    for p in [1.0, 1.5, 2.0] {
        assert!((r.lp_error(p).unwrap() - lp_norm_grid(&truth, p).unwrap()).abs() < 1e-14);
    }
    assert_eq!(r.bv_objective, 0.0);
    let peak = design.freqs().iter().map(|f| ph.coeff(f).unwrap().norm()).fold(0.0, f64::max);
    assert_eq!(r.feasibility, peak);
}

#[test]
fn truncations_improve_with_degree() {
    let ph = Phantom::standard();
    let design = lowest_block(4, 2).unwrap();
    let disc: Vec<f64> = [16usize, 32, 64]
        .iter()
        .map(|&m| {
            let p = fetch_block(&ph, m).unwrap();
            recovery_report(&p, &ph, &design, 1024).unwrap().edge_discrepancy
        })
        .collect();
    assert!(disc[0] > disc[1] && disc[1] > disc[2], "{disc:?}");
    assert!(disc[2] < 0.05);
}

#[test]
fn binary_sets_for_a_binary_truth() {
    let ph = binary_phantom();
    let p = fetch_block(&ph, 24).unwrap();
    let field = evaluate_on_grid(&p, 512).unwrap();
    let truth = ph.render(512).unwrap();
    let r = edge_sets_binary(&field, &truth).unwrap();
    assert!(r.measure_union <= r.measure_t + r.measure_p + r.measure_n + 1e-15);
    assert!(r.measure_union <= edge_discrepancy(&field, &truth, 0.25).unwrap());
    assert!(r.measure_t > 0.0);
    let full = recovery_report(&p, &ph, &lowest_block(2, 2).unwrap(), 512).unwrap();
    assert_eq!(full.measure_t, r.measure_t);
}

#[test]
fn bv_minimization_beats_the_partial_sum_at_289() {
    let ph = Phantom::standard();
    let design = lowest_block(8, 2).unwrap();
    let meas = Measurements::from_source(&design, &ph, "phantom", true).unwrap();
    let partial = partial_sum_recon(&meas, 8).unwrap();
    let mut params = AdmmParams::new(32);
    params.max_iter = 1000;
    let (bv, _) = bv_min_admm(&meas, &params).unwrap();
    let a = recovery_report(&partial, &ph, &design, 1024).unwrap();
    let b = recovery_report(&bv, &ph, &design, 1024).unwrap();
    assert!(b.edge_discrepancy < a.edge_discrepancy, "{} vs {}", b.edge_discrepancy, a.edge_discrepancy);
    assert!(b.feasibility < 1e-15);
}

fn field(vals: Vec<f64>) -> GridField {
    let n = vals.len();
    GridField::from_real(1, n, vals).unwrap()
}

proptest! {
    #[test]
    fn chebyshev_and_subset_bounds(
        truth in prop::collection::vec(prop::bool::ANY, 64),
        noise in prop::collection::vec(-1.5f64..1.5, 64),
        c in 0.05f64..1.0,
    ) {
        let t: Vec<f64> = truth.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let r: Vec<f64> = t.iter().zip(&noise).map(|(a, b)| a + b).collect();
        let (tf, rf) = (field(t), field(r));
        let disc = edge_discrepancy(&rf, &tf, c).unwrap();
        let diff = rf.sub(&tf).unwrap();
        for p in [1.0, 2.0] {
            let bound = (lp_norm_grid(&diff, p).unwrap() / c).powf(p);
            prop_assert!(disc <= bound + 1e-12);
        }
        let sets = edge_sets_binary(&rf, &tf).unwrap();
        prop_assert!(sets.measure_union <= edge_discrepancy(&rf, &tf, 0.25).unwrap());
        prop_assert!(sets.measure_union <= sets.measure_t + sets.measure_p + sets.measure_n + 1e-15);
        for m in [sets.measure_t, sets.measure_p, sets.measure_n, sets.measure_union] {
            prop_assert!((0.0..=1.0).contains(&m));
        }
    }
}
