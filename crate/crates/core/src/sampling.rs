//! Seeded random matrices: complex Gaussians and Haar unitaries.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cxmat::{qr_gram_schmidt, CMat};

/// Generator used for every seeded draw in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with independent standard normal real and imaginary parts, each of variance 1/2.
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    })
}

/// Haar-distributed `n x n` unitary via QR of a complex Ginibre matrix. Gram-Schmidt yields a
/// positive real diagonal in `R`, which is the phase fix that makes `Q` Haar.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    loop {
        let g = complex_gaussian(n, n, rng);
        let (q, r) = qr_gram_schmidt(&g);
        if (0..n).all(|i| r[(i, i)].re > 1e-10) {
            return q;
        }
    }
}

/// Random skew-Hermitian matrix `(G - G†)/2` scaled by `scale`.
pub fn skew_hermitian<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> CMat {
    let g = complex_gaussian(n, n, rng);
    CMat::from_fn(n, n, |i, j| (g[(i, j)] - g[(j, i)].conj()) * (0.5 * scale))
}
