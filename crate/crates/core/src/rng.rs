//! Seeded randomness.
//!
//! Every sampling routine takes an explicit `u64` seed and draws from
//! ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), which is portable
//! across platforms; Gaussian samples use `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Matrix, Vector};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent child seed, so sub-experiments do not share streams.
pub fn child_seed(rng: &mut SeededRng) -> u64 {
    rng.random()
}

pub fn gaussian(rng: &mut SeededRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_vector(rng: &mut SeededRng, dim: usize) -> Vector {
    Vector::from_iterator(dim, (0..dim).map(|_| gaussian(rng)))
}

pub fn unit_vector(rng: &mut SeededRng, dim: usize) -> Vector {
    loop {
        let v = gaussian_vector(rng, dim);
        let norm = v.norm();
        if norm > 1e-3 {
            return v / norm;
        }
    }
}

pub fn gaussian_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> Matrix {
    // column-major fill; the order is part of the reproducibility contract
    Matrix::from_iterator(rows, cols, (0..rows * cols).map(|_| gaussian(rng)))
}

pub fn uniform(rng: &mut SeededRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
