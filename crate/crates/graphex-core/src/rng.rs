//! Reproducible random-number streams.
//!
//! Every stochastic routine owns a counter-based ChaCha stream keyed by a
//! 64-bit seed plus structural coordinates (purpose tag, grid index,
//! replicate index). Streams derived from distinct coordinates are
//! independent, so parallel replicates reproduce bit-for-bit regardless of
//! scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags keep streams for different pipeline stages disjoint even
/// when they share a base seed and replicate index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    SampleGraph = 1,
    PSample = 2,
    RiskTable = 3,
    SpeciesTable = 4,
    RealEval = 5,
    BipartiteSample = 6,
}

/// Build a ChaCha8 RNG whose 256-bit key encodes all four coordinates.
pub fn stream(seed: u64, purpose: u64, grid: u64, replicate: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&purpose.to_le_bytes());
    key[16..24].copy_from_slice(&grid.to_le_bytes());
    key[24..32].copy_from_slice(&replicate.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Collapse (seed, purpose, grid, replicate) into a single 64-bit sub-seed
/// for APIs that take a plain seed. SplitMix64 finalizer rounds.
pub fn derive_seed(seed: u64, purpose: Purpose, grid: u64, replicate: u64) -> u64 {
    let mut z = seed;
    for salt in [purpose as u64, grid, replicate] {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(salt);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}
