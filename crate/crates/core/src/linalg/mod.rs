//! Dense complex linear algebra and seeded Gaussian sampling.
//!
//! Everything numeric in the crate goes through these kernels: a row-major
//! complex matrix, a Hermitian eigensolver (Householder tridiagonalization
//! followed by implicit QL), spectral matrix functions, and a counter-based
//! random stream.

mod eigh;
mod matrix;
mod random;

pub use eigh::{eigh, eigvalsh, expm_hermitian, Spectrum};
pub use matrix::{C64, CMatrix, DenseHermitian};
pub use random::{gaussian_stream, GaussianSampler, RandomStream};

/// Numerically stable `ln Σ exp(x_i)`.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `⟨u|v⟩` with the first argument conjugated.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Normalizes in place; returns the previous norm.
pub fn normalize(v: &mut [C64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}
