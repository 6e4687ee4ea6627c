//! Trigonometric polynomials on the d-torus.

mod fft;
mod freq;
mod grid;
pub mod io;
mod poly;
mod vdp;

pub use fft::NdFft;
pub use freq::{block, FrequencyIndex};
pub use grid::{evaluate_on_grid, lp_norm_grid, GridField, GridTransform};
pub use poly::{CoefficientSource, TrigPolynomial, HERMITIAN_TOL};
pub use vdp::{
    band_bounds, band_decompose, besov_proxy, fetch_block, vdp_multiplier, vdp_sum, vdp_weight,
    BandDecomposition,
};
pub(crate) use freq::unflatten;
