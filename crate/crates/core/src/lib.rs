//! Reconstruction of periodic functions on the torus from samples of their
//! Fourier coefficients.
//!
//! * [`fourier`]: coefficient blocks, grid synthesis and analysis, de la
//!   Vallée Poussin sums and dyadic band decompositions.
//! * [`phantom`]: piecewise-constant test images with exact coefficients.
//! * [`design`]: lowest-block, hierarchical and uniform frequency designs.
//! * [`recon`]: partial sums, smoothed sums and BV-norm minimization.
//! * [`metrics`]: edge-set discrepancies and recovery reports.
//! * [`witness`]: greedy character selection and Riesz-product witnesses on
//!   finite abelian groups.

pub mod design;
pub mod error;
pub mod fourier;
pub mod metrics;
pub mod phantom;
pub mod quadrature;
pub mod recon;
pub mod witness;

pub use design::{hierarchical, lowest_block, uniform_random, HierarchicalParams, SamplingDesign, Scheme};
pub use error::{Error, Result};
pub use fourier::{FrequencyIndex, GridField, GridTransform, TrigPolynomial};
pub use phantom::Phantom;
pub use recon::{bv_min_admm, AdmmParams, ConvergenceReport, Measurements};
