//! Constructive lower-bound witnesses on finite abelian groups.
//!
//! Groups are products of cyclic groups written additively; the character
//! group is identified with the group itself through
//! `chi_a(g) = exp(2 pi i sum_j a_j g_j / N_j)`. All `l_p` norms use the
//! normalized counting measure.

mod greedy;
mod group;
mod riesz;
mod torus;

pub use greedy::{greedy_select, greedy_select_capped, overlap_counts_direct, GreedyResult, DEFAULT_GROUP_CAP};
pub use group::{character_eval, GroupSpec};
pub use riesz::{phase_search, riesz_product, trial_phases, witness_ratio, PhaseSearch, WitnessFunction};
pub use torus::{theorem2_witness, TorusWitnessOptions, TorusWitnessReport};
