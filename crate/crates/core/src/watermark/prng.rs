/// SplitMix64 finalizer: a bijective 64-bit mixer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// xorshift64* generator seeded through [`splitmix64`].
///
/// This is the payload generator shared by embedder and extractor, so its
/// output sequence is part of the key format and must never change.
#[derive(Debug, Clone)]
pub struct KeyStream {
    state: u64,
}

impl KeyStream {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        // xorshift has a fixed point at zero.
        Self { state: if s == 0 { 0x9E37_79B9_7F4A_7C15 } else { s } }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Most significant bit of the next output.
    pub fn next_bit(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}
