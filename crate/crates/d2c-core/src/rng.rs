//! Deterministic random streams with keyed substream derivation.
//!
//! Every randomized operation takes a `u64` seed and derives independent
//! substreams for its internal pieces (one per DAG, per tree, per grid
//! subsample, ...) by hashing the seed together with a domain tag and the
//! piece's index. Substreams are therefore independent of evaluation
//! order, which is what makes serial and parallel runs bit-identical.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::math;

/// Domain tags; distinct tags keep substreams for different purposes
/// disjoint even when their indices collide.
pub mod tag {
    pub const DAG_STRUCT: u64 = 0x01;
    pub const SIMULATE: u64 = 0x02;
    pub const HIDE: u64 = 0x03;
    pub const PAIRS: u64 = 0x04;
    pub const TREE: u64 = 0x05;
    pub const TRAIN_DAG: u64 = 0x06;
    pub const TEST_DAG: u64 = 0x07;
    pub const D2_GRID: u64 = 0x08;
    pub const SHUFFLE: u64 = 0x09;
    pub const SAMPLE_COUNT: u64 = 0x0a;
}

/// SplitMix64 finalizer; the standard 64-bit mixer.
#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash a seed with a sequence of key words into a substream seed.
pub fn derive(seed: u64, keys: &[u64]) -> u64 {
    let mut h = splitmix64(seed);
    for &k in keys {
        h = splitmix64(h ^ k);
    }
    h
}

/// Deterministic stream for one derived seed.
pub fn stream(seed: u64, keys: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, keys))
}

/// Standard normal draw via Box-Muller. Kept in-crate so the values are
/// pinned to this exact transform rather than an external ziggurat.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // gen::<f64>() is uniform on [0, 1); shift away from 0 for the log.
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen::<f64>();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
}

/// Choose `k` distinct indices from `0..n`, in random order
/// (partial Fisher-Yates).
pub fn choose_indices<R: Rng>(rng: &mut R, n: usize, k: usize) -> alloc::vec::Vec<usize> {
    let mut pool: alloc::vec::Vec<usize> = (0..n).collect();
    let k = k.min(n);
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}
