//! Seeded random test fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::transforms::{Basis, SpectralField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Coefficients with independent uniform real/imaginary parts in `[-1, 1)`.
pub fn random_spectral_field(trunc: usize, basis: Basis, seed: u64) -> SpectralField {
    let mut r = rng(seed);
    SpectralField::from_fn(trunc, basis, |_| random_complex(&mut r))
}
