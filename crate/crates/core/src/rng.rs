//! Seed derivation for reproducible fan-out.
//!
//! Every random stream is a ChaCha8 generator seeded from a 64-bit value
//! obtained by mixing a master seed with a list of coordinates (family tag,
//! n, trial index, ...). The mixing is SplitMix64 finalisation applied per
//! coordinate, so streams never depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `seed` with each coordinate in turn.
pub fn derive_seed(seed: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix(seed), |acc, &c| splitmix(acc ^ splitmix(c)))
}

/// Stable 64-bit tag for a string label (FNV-1a).
pub fn label_tag(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_order_sensitive_and_stable() {
        let a = derive_seed(42, &[1, 2]);
        assert_eq!(a, derive_seed(42, &[1, 2]));
        assert_ne!(a, derive_seed(42, &[2, 1]));
        assert_ne!(a, derive_seed(43, &[1, 2]));
    }

    #[test]
    fn streams_replay() {
        let xs: Vec<u64> = (0..5).map(|_| 0).scan(stream(9), |r, _| Some(r.gen())).collect();
        let ys: Vec<u64> = (0..5).map(|_| 0).scan(stream(9), |r, _| Some(r.gen())).collect();
        assert_eq!(xs, ys);
    }
}
