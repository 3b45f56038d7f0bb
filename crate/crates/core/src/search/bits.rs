//! Fixed-length bit vector over u64 words. The engine's compact levels use it
//! two ways: flag-per-bit access (masked single-bit reads and writes) and
//! word-at-a-time scans; callers pick the discipline that matches their level.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PackedBits {
    words: Vec<u64>,
    len: usize,
}

impl PackedBits {
    pub fn zeros(len: usize) -> Self {
        PackedBits { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_bytes(bits: &[u8]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                out.words[i >> 6] |= 1u64 << (i & 63);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i >> 6] & (1u64 << (i & 63)) != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i >> 6] |= 1u64 << (i & 63);
    }

    /// Flips bit i; returns +1 if it became set, -1 if it became clear.
    #[inline]
    pub fn toggle(&mut self, i: usize) -> i32 {
        let mask = 1u64 << (i & 63);
        let w = &mut self.words[i >> 6];
        *w ^= mask;
        if *w & mask != 0 { 1 } else { -1 }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit, scanning word-wise.
    pub fn lowest_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some((wi << 6) + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Calls f on each set bit in ascending order, word-wise; f returns false
    /// to stop early.
    pub fn for_each_one_until(&self, mut f: impl FnMut(usize) -> bool) {
        for (wi, &word) in self.words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let bit = (wi << 6) + w.trailing_zeros() as usize;
                if !f(bit) {
                    return;
                }
                w &= w - 1;
            }
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}
