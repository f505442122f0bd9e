//! Seeded integer hashing shared by the procedural stand-ins.

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash an ordered list of words under a seed.
#[inline]
pub fn hash_words(seed: u64, words: &[u64]) -> u64 {
    let mut h = mix64(seed ^ 0x6A09_E667_F3BC_C908);
    for &w in words {
        h = mix64(h ^ w);
    }
    h
}

/// Map a hash to a float uniformly distributed in `[0, 1)`.
#[inline]
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Map a hash to a float uniformly distributed in `[-1, 1)`.
#[inline]
pub fn signed_unit(h: u64) -> f64 {
    unit_f64(h) * 2.0 - 1.0
}

/// Streaming variant of [`hash_words`] for inputs too large to collect.
#[derive(Debug, Clone)]
pub struct Hasher64 {
    state: u64,
}

impl Hasher64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: mix64(seed ^ 0x6A09_E667_F3BC_C908),
        }
    }

    #[inline]
    pub fn write(&mut self, w: u64) {
        self.state = mix64(self.state ^ w);
    }

    pub fn finish(&self) -> u64 {
        self.state
    }
}
