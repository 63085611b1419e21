//! Keyed random streams shared by the generators and the field sampler.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream ids reserved for the test-corpus generators. Field sampling uses the
/// substream index directly as the ChaCha stream id, so these only need to be
/// distinct from each other.
pub(crate) const HERMITIAN_STREAM: u64 = 0x4845_524d;
pub(crate) const PURE_STATE_STREAM: u64 = 0x5055_5245;
pub(crate) const DENSITY_STREAM: u64 = 0x4445_4e53;

/// ChaCha8 generator keyed by `seed` and positioned on stream `stream`.
pub fn keyed_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Circularly-symmetric complex normal with `E|z|^2 = 1`.
pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

/// SplitMix64 finalizer; used to derive per-trial seeds from a base seed.
pub fn mix_seed(base: u64, tag: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
