//! Named, seeded random substreams.
//!
//! Every stochastic component draws from its own stream derived from a run
//! seed, a stream name and a list of indices (iteration, tree, fold, ...).
//! Results therefore never depend on the order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives a 64-bit seed from a parent seed, a stream name and indices.
pub fn derive_seed(seed: u64, name: &str, indices: &[u64]) -> u64 {
    let mut h = splitmix64(seed ^ splitmix64(fnv1a(name)));
    for &i in indices {
        h = splitmix64(h ^ splitmix64(i.wrapping_add(0x5851_f42d_4c95_7f2d)));
    }
    h
}

/// Returns an independent generator for the named substream.
pub fn substream(seed: u64, name: &str, indices: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, name, indices))
}
