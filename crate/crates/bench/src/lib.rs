//! Fixed instances for the benchmarks.

use mixkt::gen::{random_matrix, rng, MassProfile};
use mixkt::WeightedMatrix;

/// Square instance with wide random masses, reproducible from `seed`.
pub fn weighted(n: usize, seed: u64) -> WeightedMatrix {
    random_matrix(&mut rng(seed), n, n, MassProfile::wide(), 0.1)
}

/// Square instance with unit masses, so the column prefix shortcut applies.
pub fn unit(n: usize, seed: u64) -> WeightedMatrix {
    random_matrix(&mut rng(seed), n, n, MassProfile::Unit, 0.1)
}
