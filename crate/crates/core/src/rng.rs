//! Deterministic random number generation.
//!
//! Every stochastic routine in this crate draws from [`SplitMix64`], a tiny
//! seeded generator with a fully documented update rule. That keeps runs
//! reproducible across platforms and makes the sequence easy to replicate in
//! another language when refereeing the numbers. It is not cryptographic and
//! is not meant to be.

/// SplitMix64 generator.
///
/// State update per draw:
///
/// ```text
/// state += 0x9E3779B97F4A7C15               (wrapping)
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (wrapping)
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB  (wrapping)
/// output = z ^ (z >> 31)
/// ```
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1) with 53 bits of mantissa.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
