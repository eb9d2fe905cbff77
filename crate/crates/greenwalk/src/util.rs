//! Shared numeric and RNG plumbing: compensated summation, deterministic
//! seed splitting, and a tiny fixed-seed byte hasher for interning.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Neumaier compensated accumulator.
///
/// Convolution tables add tens of millions of magnitudes per step; plain
/// `f64` summation would drift well past the 1e-12 mass-conservation
/// tolerance the tables promise.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums a slice with Neumaier compensation in fixed (index) order.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// SplitMix64 step; used to derive independent stream seeds from one root.
#[inline]
pub fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
}

/// One full SplitMix64 output for a given state word.
#[inline]
pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the RNG for logical stream `counter` of the given root seed.
///
/// Streams are independent of how work is batched across threads, so any
/// parallel sampler that indexes its draws by counter is reproducible for a
/// fixed root seed at every worker count.
pub fn stream_rng(root_seed: u64, counter: u64) -> ChaCha8Rng {
    let mut s = root_seed;
    splitmix64(&mut s);
    let a = splitmix64_mix(s ^ counter.wrapping_mul(0xa076_1d64_78bd_642f));
    let b = splitmix64_mix(a ^ 0x1591_aefa_5e7e_5a17);
    let c = splitmix64_mix(b ^ counter);
    let d = splitmix64_mix(c ^ root_seed);
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&a.to_le_bytes());
    seed[8..16].copy_from_slice(&b.to_le_bytes());
    seed[16..24].copy_from_slice(&c.to_le_bytes());
    seed[24..].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

/// FxHash-style mixer over bytes with a fixed seed.
///
/// Interning tables hash tens of millions of short normal-form encodings;
/// SipHash is measurably slower and DoS resistance is irrelevant here.
#[inline]
pub fn hash_bytes(bytes: &[u8]) -> u64 {
    const K: u64 = 0x517c_c1b7_2722_0a95;
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut chunks = bytes.chunks_exact(8);
    for c in &mut chunks {
        let v = u64::from_le_bytes(c.try_into().unwrap());
        h = (h.rotate_left(5) ^ v).wrapping_mul(K);
    }
    let rem = chunks.remainder();
    if !rem.is_empty() {
        let mut buf = [0u8; 8];
        buf[..rem.len()].copy_from_slice(rem);
        buf[7] = rem.len() as u8;
        h = (h.rotate_left(5) ^ u64::from_le_bytes(buf)).wrapping_mul(K);
    }
    splitmix64_mix(h)
}
