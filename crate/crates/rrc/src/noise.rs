//! Seeded additive white Gaussian noise.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rrc_core::ImageBuffer;

/// `img + σ·n` with `n` drawn in raster order from a ChaCha20 stream seeded
/// by `seed`. No clamping.
pub fn add_gaussian_noise(img: &ImageBuffer, sigma: f64, seed: u64) -> anyhow::Result<ImageBuffer> {
    anyhow::ensure!(sigma >= 0.0 && sigma.is_finite(), "sigma must be finite and nonnegative, got {sigma}");
    let normal = Normal::new(0.0, sigma).map_err(|e| anyhow::anyhow!("invalid sigma {sigma}: {e}"))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let data = img.as_slice().iter().map(|&v| v + normal.sample(&mut rng)).collect();
    Ok(ImageBuffer::new(img.rows(), img.cols(), data)?)
}

/// Seed for one (image, noise level) cell of a benchmark, derived from the
/// manifest seed so every method sees the same realization.
pub fn cell_seed(seed: u64, image_index: usize, sigma: f64) -> u64 {
    let mut z = seed ^ (image_index as u64).rotate_left(32) ^ sigma.to_bits();
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
