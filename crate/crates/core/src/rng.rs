//! Reproducible random streams.
//!
//! All generators in this crate draw from ChaCha20 substreams so that results
//! are bit-identical across platforms and so that independent parts of a
//! simulation (mixing matrix, sources, noise, ...) consume independent
//! streams of the same seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// Returns substream `stream` of the ChaCha20 generator seeded with `seed`.
///
/// Streams with different ids are statistically independent, so parallel
/// consumers may each take their own stream of a shared seed.
pub fn substream(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One standard-normal draw.
pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample::<f64, _>(StandardNormal)
}
