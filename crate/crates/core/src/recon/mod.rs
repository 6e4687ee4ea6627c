//! Recovery of trigonometric polynomials from Fourier measurements.

mod admm;
mod measure;
mod operator;

pub use admm::{bv_min_admm, AdmmParams, AdmmState, ConvergenceReport};
pub use measure::Measurements;
pub use operator::{bv_objective, gradient_grid_operator, GradientField, GradientOperator};

use crate::error::Result;
use crate::fourier::{fetch_block, vdp_sum, CoefficientSource, TrigPolynomial};

/// Truncated Fourier series over the block `|xi|_inf <= m`.
pub fn partial_sum_recon(meas: &Measurements, m: usize) -> Result<TrigPolynomial> {
    fetch_block(meas, m)
}

/// De la Vallée Poussin sum `V_m` built from the measured block.
pub fn vdp_recon(meas: &Measurements, m: usize) -> Result<TrigPolynomial> {
    vdp_sum(meas, m)
}

/// `max_i |f^(xi_i) - meas(xi_i)|` over the measured frequencies.
pub fn feasibility_residual<S: CoefficientSource + ?Sized>(f: &S, meas: &Measurements) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (xi, v) in meas.iter() {
        worst = worst.max((f.coefficient(xi)? - v).norm());
    }
    Ok(worst)
}
