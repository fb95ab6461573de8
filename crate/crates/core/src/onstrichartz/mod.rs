//! Strichartz estimates for orthonormal families: evaluation, sharpness
//! constructions, the Schatten dual form and the refined Besov bound.

pub mod duality;
pub mod family;
pub mod lhs;
pub mod refined;
pub mod sharpness;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use duality::{duality_check, DualityReport, SpacetimeOperator};
pub use family::{
    counterexample_lattice, counterexample_time_translates, gram_matrix, lattice_points, random_onf,
    time_translate_grid, FrequencyWindow, OrthonormalFamily, Orthogonality,
};
pub use lhs::{lieb_sobolev_ratio, strichartz_lhs, LhsValue, Psi, StrichartzSetup, TimeWindow};
pub use refined::{refined_corpus, refined_strichartz_check, RefinedReport};
pub use sharpness::{
    lattice_density_norm, lattice_lhs, sharpness_sweep_lattice, sharpness_sweep_time_translates, time_translate_lhs, Construction,
    LatticeEvalOptions, SharpnessSweep, SweepRow, TimeTranslateOptions,
};

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for one `(experiment, scale, trial)` cell, independent of scheduling.
pub fn stream_rng(seed: u64, stream: &[u64]) -> ChaCha8Rng {
    let mut s = splitmix(seed);
    for &k in stream {
        s = splitmix(s ^ splitmix(k));
    }
    ChaCha8Rng::seed_from_u64(s)
}
