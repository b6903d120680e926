//! Seeded, partition-independent random streams.
//!
//! Every Monte Carlo routine fills its output in fixed-size blocks, and block
//! `b` always draws from ChaCha stream `b` of the base seed. The result is
//! therefore identical whether the blocks run on one thread or many.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Number of samples generated from one substream.
pub const BLOCK: usize = 4096;

pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent seed for a named sub-experiment (snapshot index,
/// tier, ...). SplitMix64 finalizer over the pair.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fills `n` samples, block by block, with `fill(rng, block)`.
///
/// `fill` must write every slot of the block it is handed.
pub fn fill_blocks<F>(n: usize, seed: u64, fill: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let mut out = vec![0.0; n];
    out.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
        let mut rng = substream(seed, b as u64);
        fill(&mut rng, chunk);
    });
    out
}
