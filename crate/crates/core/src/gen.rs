//! Seeded random instances.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::measure::{MeasureSpace, WeightedMatrix};

/// The random stream used for every seeded instance.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// How atom masses are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassProfile {
    /// Every atom has mass 1.
    Unit,
    /// Masses uniform in `[lo, hi]`.
    Random { lo: f64, hi: f64 },
}

impl MassProfile {
    /// Masses uniform in `[0.1, 10]`.
    pub fn wide() -> Self {
        MassProfile::Random { lo: 0.1, hi: 10.0 }
    }

    pub fn space<R: Rng>(&self, rng: &mut R, len: usize) -> MeasureSpace {
        let masses = match *self {
            MassProfile::Unit => vec![1.0; len],
            MassProfile::Random { lo, hi } => (0..len).map(|_| rng.gen_range(lo..=hi)).collect(),
        };
        MeasureSpace::new(masses).expect("generated masses are positive")
    }
}

/// `m x n` matrix with entries uniform in `[-1, 1]`; each entry is zeroed with
/// probability `zero_prob`.
pub fn random_matrix<R: Rng>(rng: &mut R, m: usize, n: usize, masses: MassProfile, zero_prob: f64) -> WeightedMatrix {
    let rows = masses.space(rng, m);
    let cols = masses.space(rng, n);
    let entries = (0..m * n)
        .map(|_| {
            let x = rng.gen_range(-1.0..=1.0);
            if zero_prob > 0.0 && rng.gen_bool(zero_prob) {
                0.0
            } else {
                x
            }
        })
        .collect();
    WeightedMatrix::new(rows, cols, entries).expect("generated matrix is consistent")
}

/// A matrix with random shape in `1..=max_m x 1..=max_n`.
pub fn random_instance<R: Rng>(rng: &mut R, max_m: usize, max_n: usize, masses: MassProfile) -> WeightedMatrix {
    let m = rng.gen_range(1..=max_m);
    let n = rng.gen_range(1..=max_n);
    random_matrix(rng, m, n, masses, 0.15)
}
