//! Deterministic seed derivation.
//!
//! Every randomized routine in this crate takes a single `u64` seed and, where
//! it spawns independent units of work (Monte Carlo pair evaluations, restart
//! chains, per-example dataset generation, per-seed benchmark runs), derives
//! one substream seed per unit. Substreams are indexed, not drawn from a
//! shared generator, so any parallel schedule reproduces the sequential
//! result bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derive the seed of substream `stream` from a master seed.
///
/// SplitMix64 finalization over the (master, stream) pair: cheap, and small
/// seed deltas land in unrelated points of the generator's state space.
pub fn substream(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Build the crate-wide generator from a seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_differ() {
        let a = substream(7, 0);
        let b = substream(7, 1);
        let c = substream(8, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(b, c);
    }

    #[test]
    fn substream_is_stable() {
        // Pinned so serialized artifacts stay reproducible across releases.
        assert_eq!(substream(0, 0), 16294208416658607535);
        assert_eq!(substream(42, 3), 7297471543603743092);
    }
}
