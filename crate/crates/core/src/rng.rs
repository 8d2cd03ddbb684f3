//! Reproducible random symbol streams.
//!
//! SplitMix64 is small enough to reimplement bit-exactly in any language,
//! which keeps stochastic renders comparable across implementations.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Generator for worker `stream` of a sharded run. Stream 0 is the plain
    /// seed, so single-worker runs reproduce the unsharded sequence.
    pub fn for_stream(seed: u64, stream: u64) -> Self {
        if stream == 0 {
            Self::new(seed)
        } else {
            Self::new(mix64(seed ^ mix64(stream.wrapping_mul(GOLDEN_GAMMA))))
        }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        unit_interval(self.next_u64())
    }
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `value / 2^64`, truncated to 53 bits so the result stays below one.
#[inline]
pub fn unit_interval(value: u64) -> f64 {
    (value >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Cumulative distribution table for symbol selection.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSampler {
    cumulative: Vec<f64>,
}

impl SymbolSampler {
    pub fn new(probabilities: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cumulative }
    }

    /// Least 1-based symbol whose cumulative probability exceeds `u`.
    #[inline]
    pub fn select_unit(&self, u: f64) -> u8 {
        for (i, &c) in self.cumulative.iter().enumerate() {
            if c > u {
                return (i + 1) as u8;
            }
        }
        // Rounding can leave the last cumulative entry a hair below 1.
        self.cumulative.len() as u8
    }

    #[inline]
    pub fn select(&self, value: u64) -> u8 {
        self.select_unit(unit_interval(value))
    }
}

pub fn select_symbol(value: u64, probabilities: &[f64]) -> u8 {
    SymbolSampler::new(probabilities).select(value)
}
