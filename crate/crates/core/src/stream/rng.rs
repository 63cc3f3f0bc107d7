use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic generator: ChaCha8 keyed by a 64-bit seed.
///
/// `substream(label)` derives a child generator from this generator's *seed*
/// and the label only, never from its current position, so a labeled
/// sub-stream is the same no matter how many draws happened elsewhere.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream(&self, label: &str) -> SeededRng {
        SeededRng::new(splitmix64(self.seed ^ fnv1a(label.as_bytes())))
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn equal_seeds_equal_sequences() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        let xs: Vec<u64> = (0..100).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..100).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn substream_independent_of_parent_draws() {
        let a = SeededRng::new(7);
        let mut b = SeededRng::new(7);
        for _ in 0..1000 {
            b.next_u64();
        }
        let mut sa = a.substream("concept-0");
        let mut sb = b.substream("concept-0");
        assert_eq!(sa.next_u64(), sb.next_u64());
    }

    #[test]
    fn labels_give_unrelated_streams() {
        let root = SeededRng::new(1);
        let mut a = root.substream("a");
        let mut b = root.substream("b");
        let n = 10_000;
        let same = (0..n)
            .filter(|_| a.random_range(0..16u32) == b.random_range(0..16u32))
            .count();
        // expected n/16 = 625, sd ~ 24
        assert!((500..750).contains(&same), "{same}");
    }

    const PINNED: u64 = 13_080_132_717_333_068_652;

    #[test]
    fn pinned_first_draw() {
        // Guards cross-platform and cross-version stability of the stream.
        assert_eq!(SeededRng::new(0).next_u64(), PINNED);
        assert_ne!(SeededRng::new(0).substream("x").next_u64(), PINNED);
    }
}
