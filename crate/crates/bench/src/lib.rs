//! Shared fixtures for the criterion benchmarks.

use std::f64::consts::PI;

use carleman_core::burgers::{carleman_initial_vector, initial_state};
use carleman_core::decomposition::decompose_full;
use carleman_core::embedding::{build_embedded_system, EmbeddedSystem};
use carleman_core::sparse::real_vec;
use carleman_core::{DecompositionTerm, GridConfig};

/// Grid with the benchmark's default physics and the given sizes.
pub fn grid(n_x: usize, n_t: usize, alpha: usize) -> GridConfig {
    GridConfig::new(n_x, n_t, alpha, 0.25, 1.0, 2.0 * PI).expect("benchmark grids are valid")
}

/// Embedded system for a Gaussian pulse centred on the domain.
pub fn system(g: &GridConfig) -> EmbeddedSystem {
    let u0 = real_vec(&initial_state(g, 0.5, PI).expect("sigma is nonzero"));
    build_embedded_system(g, &carleman_initial_vector(&u0, g.alpha)).expect("grid builds")
}

pub fn terms(g: &GridConfig) -> Vec<DecompositionTerm> {
    decompose_full(g).expect("grid decomposes")
}
