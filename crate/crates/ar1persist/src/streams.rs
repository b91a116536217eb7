//! Counter-derived random substreams.
//!
//! A master seed plus a stream index deterministically selects an
//! independent ChaCha8 stream. Work split into blocks indexed
//! `0..n_blocks` draws block `i` from `substream(master_seed, i)`, so the
//! merged result does not depend on how blocks are scheduled across
//! workers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream index reserved for auxiliary draws (e.g. resampling choices)
/// that must not collide with per-block simulation streams.
pub const AUX_STREAM: u64 = u64::MAX - 1;

/// Returns the `index`-th substream of `master_seed`.
pub fn substream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
