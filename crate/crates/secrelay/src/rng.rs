//! Deterministic random-number plumbing shared by the estimator and the
//! simulator.
//!
//! Everything randomized in this crate is driven by a `(seed, stream)` pair:
//! the seed identifies the experiment, the stream separates logically
//! independent consumers (estimation workers, simulation runs) without any
//! coordination between them.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Builds the generator for one logical stream of an experiment.
///
/// Streams of the same seed are statistically independent; the same
/// `(seed, stream)` pair always yields the same sequence.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent sub-seed from a master seed and a purpose tag.
///
/// This is the splitmix64 finalizer applied to `seed ^ (tag * golden)`; it
/// decorrelates sub-seeds even for adjacent tags, so callers can use small
/// integers (row indices, fixed purpose constants) as tags.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform sample in `[0, 1)` with the full 53 bits of `f64` resolution.
pub fn unit_uniform<R: RngCore>(rng: &mut R) -> f64 {
    // Top 53 bits of the next word, scaled by 2^-53.
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
