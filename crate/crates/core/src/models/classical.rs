use serde::Serialize;

use super::{DisorderSample, ModelKind};
use crate::algebra::{binomial_u128, combinations};
use crate::error::{capacity, input, Result};
use crate::linalg::{log_sum_exp, RandomStream};

/// Largest classical system enumerated exactly.
pub const MAX_CLASSICAL_SPINS: usize = 22;

/// Energies `H_C(σ)` of a classical p-spin sample for all `2ⁿ` configurations.
/// Bit `i` of a configuration index set means `σᵢ = −1`.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalInstance {
    pub sample: DisorderSample,
    pub energies: Vec<f64>,
}

/// In-place Walsh–Hadamard transform: `out[s] = Σ_I f[I] (−1)^{|I∧s|}`.
pub(crate) fn walsh_hadamard(f: &mut [f64]) {
    let mut h = 1;
    while h < f.len() {
        for block in f.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// `H_C(σ) = C(n,p)^{−1/2} Σ_{|I|=p} J_I Π_{i∈I} σᵢ`, couplings in
/// lexicographic order of `I`.
pub fn sample_classical_pspin(n: usize, p: usize, stream: impl Into<RandomStream>) -> Result<ClassicalInstance> {
    if n == 0 || p == 0 || p > n {
        return input(format!("need 1 ≤ p ≤ n, got n = {n}, p = {p}"));
    }
    if n > MAX_CLASSICAL_SPINS {
        return capacity(format!("{n} spins exceeds {MAX_CLASSICAL_SPINS}"));
    }
    let m = binomial_u128(n, p) as usize;
    let sample = DisorderSample::draw(ModelKind::Classical, n, p, m, stream.into());
    let scale = 1.0 / (m as f64).sqrt();
    let mut f = vec![0.0; 1 << n];
    for (subset, j) in combinations(n, p).iter().zip(&sample.g) {
        let mask: usize = subset.iter().map(|i| 1usize << i).sum();
        f[mask] = j * scale;
    }
    walsh_hadamard(&mut f);
    Ok(ClassicalInstance { sample, energies: f })
}

impl ClassicalInstance {
    pub fn n(&self) -> usize {
        self.sample.n
    }

    /// `ln Σ_σ e^{−β√n H_C(σ)}`.
    pub fn log_partition(&self, beta: f64) -> f64 {
        let s = beta * (self.n() as f64).sqrt();
        log_sum_exp(self.energies.iter().map(|e| -s * e))
    }

    /// Gibbs probabilities under `e^{−β√n H_C}`.
    pub fn gibbs(&self, beta: f64) -> Vec<f64> {
        let s = beta * (self.n() as f64).sqrt();
        let lz = self.log_partition(beta);
        self.energies.iter().map(|e| (-s * e - lz).exp()).collect()
    }

    /// `⟨R²⟩_β = (1/n²) Σ_{ij} ⟨σᵢσⱼ⟩²_β` from exact Gibbs correlations; all
    /// pair correlations come from one Walsh–Hadamard transform of the Gibbs
    /// weights.
    pub fn overlap_second_moment(&self, beta: f64) -> f64 {
        let n = self.n();
        let mut w = self.gibbs(beta);
        walsh_hadamard(&mut w);
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += w[(1 << i) | (1 << j)].powi(2);
            }
        }
        (n as f64 + 2.0 * off) / (n * n) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_energy(inst: &ClassicalInstance, cfg: usize) -> f64 {
        let n = inst.n();
        let p = inst.sample.locality;
        let scale = 1.0 / (inst.sample.g.len() as f64).sqrt();
        combinations(n, p)
            .iter()
            .zip(&inst.sample.g)
            .map(|(s, j)| j * scale * s.iter().map(|&i| if cfg >> i & 1 == 1 { -1.0 } else { 1.0 }).product::<f64>())
            .sum()
    }

    #[test]
    fn transform_matches_direct_sum() {
        let inst = sample_classical_pspin(6, 3, 4).unwrap();
        for cfg in 0..64 {
            assert!((inst.energies[cfg] - direct_energy(&inst, cfg)).abs() < 1e-12);
        }
    }

    #[test]
    fn full_product_and_flip_symmetry() {
        let inst = sample_classical_pspin(5, 5, 1).unwrap();
        let j = inst.sample.g[0];
        for cfg in 0..32usize {
            let sign = if cfg.count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            assert!((inst.energies[cfg] - sign * j).abs() < 1e-12);
        }
        let even = sample_classical_pspin(8, 4, 2).unwrap();
        for cfg in 0..256 {
            assert!((even.energies[cfg] - even.energies[255 - cfg]).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_variance_is_one() {
        let samples = 10_000;
        let vals: Vec<f64> =
            (0..samples).map(|i| sample_classical_pspin(6, 2, RandomStream::new(3, i)).unwrap().energies[13]).collect();
        let mean = vals.iter().sum::<f64>() / samples as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        // SE of a Gaussian sample variance is √(2/(N−1))
        assert!((var - 1.0).abs() < 5.0 * (2.0 / (samples - 1) as f64).sqrt(), "{var}");
    }

    fn overlap_direct(inst: &ClassicalInstance, beta: f64) -> f64 {
        let n = inst.n();
        let w = inst.gibbs(beta);
        let spin = |cfg: usize, i: usize| if cfg >> i & 1 == 1 { -1.0 } else { 1.0 };
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let c: f64 = w.iter().enumerate().map(|(cfg, p)| p * spin(cfg, i) * spin(cfg, j)).sum();
                acc += c * c;
            }
        }
        acc / (n * n) as f64
    }

    #[test]
    fn overlap_matches_direct_sum() {
        let inst = sample_classical_pspin(7, 3, 12).unwrap();
        for beta in [0.3, 1.0, 2.5] {
            assert!((inst.overlap_second_moment(beta) - overlap_direct(&inst, beta)).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_limits() {
        let inst = sample_classical_pspin(8, 4, 7).unwrap();
        assert!((inst.overlap_second_moment(0.0) - 1.0 / 8.0).abs() < 1e-14);
        assert!(inst.overlap_second_moment(50.0) > 0.999);
    }

    #[test]
    fn errors() {
        assert!(sample_classical_pspin(23, 2, 1).is_err());
        assert!(sample_classical_pspin(4, 5, 1).is_err());
    }
}
