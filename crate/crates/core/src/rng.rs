//! SplitMix64 random source.
//!
//! Recurrence, for reimplementation in other languages:
//!
//! ```text
//! state  = state + 0x9E3779B97F4A7C15            (wrapping, mod 2^64)
//! z      = state
//! z      = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (wrapping)
//! z      = (z ^ (z >> 27)) * 0x94D049BB133111EB   (wrapping)
//! output = z ^ (z >> 31)
//! ```
//!
//! Uniform reals take the high 53 bits: `(output >> 11) * 2^-53`, which lies
//! in `[0, 1)`. With seed 0 the first three outputs are `0xE220A8397B1DCDAF`,
//! `0x6E789E6AA1B965F4` and `0x06C45D188009454F`.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSource {
    state: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform real in `[0, 1)` from the high 53 bits of the next output.
    pub fn next_uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Standard normal via Box-Muller, consuming exactly two uniforms.
    /// Returns both variates of the pair.
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        // 1 - u1 lies in (0, 1], so the log is finite.
        let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        (radius * angle.cos(), radius * angle.sin())
    }
}
