use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::C64;

/// A reproducible random stream: ChaCha8 keyed by `base_seed`, with
/// `stream_index` selecting the ChaCha stream (nonce). Identical pairs give
/// bit-identical output within one build; distinct stream indices never share
/// keystream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomStream {
    pub base_seed: u64,
    pub stream_index: u64,
}

impl RandomStream {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(base_seed: u64, stream_index: u64) -> Self {
        Self { base_seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Stream 0 of `seed`.
impl From<u64> for RandomStream {
    fn from(seed: u64) -> Self {
        RandomStream::new(seed, 0)
    }
}

/// Standard normals via the Box–Muller transform: two uniforms `u1 ∈ (0,1]`,
/// `u2 ∈ [0,1)` give `√(−2 ln u1)·cos(2πu2)` then `√(−2 ln u1)·sin(2πu2)`.
pub struct GaussianSampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSampler {
    pub fn new(stream: RandomStream) -> Self {
        Self { rng: stream.rng(), spare: None }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn fill(&mut self, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.next()).collect()
    }

    /// Unit vector with i.i.d. complex Gaussian entries, i.e. Haar-random.
    pub fn haar_state(&mut self, dim: usize) -> Vec<C64> {
        let mut v: Vec<C64> = (0..dim).map(|_| C64::new(self.next(), self.next())).collect();
        super::normalize(&mut v);
        v
    }

    pub fn below(&mut self, bound: usize) -> usize {
        ((self.uniform() * bound as f64) as usize).min(bound.saturating_sub(1))
    }
}

/// `count` standard normals from the given stream.
pub fn gaussian_stream(stream: RandomStream, count: usize) -> Vec<f64> {
    GaussianSampler::new(stream).fill(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty() {
        assert!(gaussian_stream(RandomStream::new(1, 0), 0).is_empty());
    }

    #[test]
    fn deterministic() {
        let a = gaussian_stream(RandomStream::new(42, 7), 1000);
        let b = gaussian_stream(RandomStream::new(42, 7), 1000);
        assert_eq!(a, b);
        let c = gaussian_stream(RandomStream::new(42, 8), 1000);
        assert_ne!(a, c);
    }

    #[test]
    fn moments() {
        let xs = gaussian_stream(RandomStream::new(2024, 0), 100_000);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }
}
