//! Random Hamiltonian ensembles and the bound calculators built on them.
//!
//! Quantum models are normalized as `H = m^{−1/2} Σ_i g_i A_i` with
//! `g_i ~ N(0,1)` and Hermitian, unitary, traceless terms `A_i`, so that
//! `E Tr̄ H² = 1` where `Tr̄ = Tr/dim`.

mod bounds;
mod classical;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::algebra::{enumerate_set, weighted_sum, DensePauli, OperatorKind, OperatorSet};
use crate::error::{capacity, input, Result};
use crate::linalg::{eigh, eigvalsh, gaussian_stream, log_sum_exp, DenseHermitian, RandomStream, Spectrum};

pub use bounds::{
    GaussianVerdict, Regime,
    ansatz_bounds_report, depolarized_energy_identity, h_comm_count, lambda_max_lower_bound, BoundsReport,
    DepolarizedIdentity, LambdaMaxBound,
};
pub use classical::{sample_classical_pspin, ClassicalInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Syk,
    SpinGlass,
    Classical,
}

impl std::str::FromStr for ModelKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "syk" => Ok(Self::Syk),
            "sg" | "spin-glass" => Ok(Self::SpinGlass),
            "classical" => Ok(Self::Classical),
            _ => input(format!("unknown model {s:?} (expected syk, sg or classical)")),
        }
    }
}

/// Couplings of one disorder realization, in enumeration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderSample {
    pub kind: ModelKind,
    pub n: usize,
    pub locality: usize,
    pub seed: u64,
    pub stream_index: u64,
    pub g: Vec<f64>,
}

impl DisorderSample {
    pub fn draw(kind: ModelKind, n: usize, locality: usize, m: usize, stream: RandomStream) -> Self {
        Self {
            kind,
            n,
            locality,
            seed: stream.base_seed,
            stream_index: stream.stream_index,
            g: gaussian_stream(stream, m),
        }
    }
}

/// Operator basis of a quantum ensemble, shared between samples.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub kind: ModelKind,
    pub n: usize,
    pub locality: usize,
    pub set: OperatorSet,
    pub terms: Vec<DensePauli>,
    pub dim: usize,
}

/// Largest SYK mode count (dimension `2^12`).
pub const MAX_SYK_MODES: usize = 24;
/// Largest spin-glass qubit count.
pub const MAX_SG_QUBITS: usize = 12;

impl Ensemble {
    pub fn syk(n: usize, q: usize) -> Result<Self> {
        if n % 2 == 1 || q % 2 == 1 || q == 0 || q > n {
            return input(format!("SYK needs even q ≤ n with n even, got n = {n}, q = {q}"));
        }
        if n > MAX_SYK_MODES {
            return capacity(format!("{n} modes exceeds the dense limit {MAX_SYK_MODES}"));
        }
        Self::build(ModelKind::Syk, enumerate_set(OperatorKind::Majorana, n, q)?)
    }

    pub fn spin_glass(n: usize, k: usize) -> Result<Self> {
        if n > MAX_SG_QUBITS {
            return capacity(format!("{n} qubits exceeds the dense limit {MAX_SG_QUBITS}"));
        }
        Self::build(ModelKind::SpinGlass, enumerate_set(OperatorKind::Pauli, n, k)?)
    }

    pub fn new(kind: ModelKind, n: usize, locality: usize) -> Result<Self> {
        match kind {
            ModelKind::Syk => Self::syk(n, locality),
            ModelKind::SpinGlass => Self::spin_glass(n, locality),
            ModelKind::Classical => input("the classical model has no operator ensemble; use sample_classical_pspin"),
        }
    }

    fn build(kind: ModelKind, set: OperatorSet) -> Result<Self> {
        let dim = set.dim()?;
        let terms = set.dense_terms()?;
        Ok(Self { kind, n: set.n(), locality: set.locality(), set, terms, dim })
    }

    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn sample(&self, stream: RandomStream) -> Result<ModelInstance> {
        let s = DisorderSample::draw(self.kind, self.n, self.locality, self.m(), stream);
        self.instance(s)
    }

    pub fn instance(&self, sample: DisorderSample) -> Result<ModelInstance> {
        if sample.g.len() != self.m() {
            return input(format!("{} couplings for {} terms", sample.g.len(), self.m()));
        }
        let scale = 1.0 / (self.m() as f64).sqrt();
        let coefs: Vec<f64> = sample.g.iter().map(|g| g * scale).collect();
        let h = DenseHermitian::new(weighted_sum(&self.terms, &coefs, self.dim))?;
        Ok(ModelInstance { sample, dim: self.dim, h, eigenvalues: OnceLock::new(), spectrum: OnceLock::new() })
    }
}

/// One dense Hamiltonian with lazily computed spectral data.
#[derive(Debug)]
pub struct ModelInstance {
    pub sample: DisorderSample,
    pub h: DenseHermitian,
    pub dim: usize,
    eigenvalues: OnceLock<Vec<f64>>,
    spectrum: OnceLock<Spectrum>,
}

impl ModelInstance {
    pub fn eigenvalues(&self) -> Result<&[f64]> {
        if let Some(s) = self.spectrum.get() {
            return Ok(&s.eigenvalues);
        }
        if self.eigenvalues.get().is_none() {
            let ev = eigvalsh(&self.h)?;
            let _ = self.eigenvalues.set(ev);
        }
        Ok(self.eigenvalues.get().expect("just set"))
    }

    pub fn spectrum(&self) -> Result<&Spectrum> {
        if self.spectrum.get().is_none() {
            let s = eigh(&self.h)?;
            let _ = self.spectrum.set(s);
        }
        Ok(self.spectrum.get().expect("just set"))
    }

    pub fn lambda_max(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("nonempty"))
    }

    /// `ln Tr e^{−β√n H}` with `n` the model's size parameter.
    pub fn log_partition(&self, beta: f64) -> Result<f64> {
        let s = beta * (self.sample.n as f64).sqrt();
        Ok(log_sum_exp(self.eigenvalues()?.iter().map(|l| -s * l)))
    }

    /// Gibbs weights `e^{−β√n λ_k}/Z` in eigenvalue order.
    pub fn gibbs_weights(&self, beta: f64) -> Result<Vec<f64>> {
        let s = beta * (self.sample.n as f64).sqrt();
        let ev = self.eigenvalues()?;
        let lz = log_sum_exp(ev.iter().map(|l| -s * l));
        Ok(ev.iter().map(|l| (-s * l - lz).exp()).collect())
    }

    /// `Tr(A ρ_β)` for a Hermitian Pauli-form observable.
    pub fn thermal_expectation(&self, op: &DensePauli, beta: f64) -> Result<f64> {
        let spec = self.spectrum()?;
        let w = self.gibbs_weights(beta)?;
        Ok((0..self.dim).map(|k| w[k] * op.expectation(&spec.vector(k)).re).sum())
    }

    /// `(1/dim) Tr H²`.
    pub fn normalized_trace_h2(&self) -> f64 {
        self.h.matrix().data().iter().map(|z| z.norm_sqr()).sum::<f64>() / self.dim as f64
    }
}

pub fn sample_syk(n: usize, q: usize, stream: impl Into<RandomStream>) -> Result<ModelInstance> {
    Ensemble::syk(n, q)?.sample(stream.into())
}

pub fn sample_spin_glass(n: usize, k: usize, stream: impl Into<RandomStream>) -> Result<ModelInstance> {
    Ensemble::spin_glass(n, k)?.sample(stream.into())
}
