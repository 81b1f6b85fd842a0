use num_traits::Zero;

use super::matrix::{CMatrix, DenseHermitian, C64};
use crate::error::{input, Error, Result};

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// unitary whose columns are the matching eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    /// Eigenvector for the `k`-th eigenvalue (ascending order).
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `U f(Λ) U†` for an arbitrary scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        // (U W) then times U†
        let uw = CMatrix::from_fn(n, n, |i, k| u[(i, k)] * weights[k]);
        uw.matmul(&u.adjoint())
    }

    /// `‖U diag(λ) U† − H‖_F`.
    pub fn reconstruction_error(&self, h: &DenseHermitian) -> f64 {
        self.apply(|l| C64::new(l, 0.0)).sub(h.matrix()).frobenius_norm()
    }

    /// `max |U†U − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        self.eigenvectors.adjoint().matmul(&self.eigenvectors).distance_from_identity()
    }
}

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form. Returns `(diag, offdiag, q)` where `offdiag[i]` couples `i` and `i+1`,
/// and, when requested, `q` has columns such that `H = q T q†`.
fn tridiagonalize(h: &CMatrix, want_vectors: bool) -> (Vec<f64>, Vec<f64>, Option<Vec<Vec<C64>>>) {
    let n = h.rows();
    let mut a = h.clone();
    let mut reflectors: Vec<(usize, Vec<C64>)> = Vec::new();

    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = ((k + 1)..n).map(|i| a[(i, k)]).collect();
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let beta = -phase * alpha;
        let mut v = x;
        v[0] -= beta;
        let vnorm = super::norm(&v);
        for z in v.iter_mut() {
            *z /= vnorm;
        }

        // Rank-two update of the trailing block: B ← B − v u† − u v†.
        let m = n - k - 1;
        let mut w = vec![C64::zero(); m];
        for (i, wi) in w.iter_mut().enumerate() {
            let row = &a.data()[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            *wi = row.iter().zip(&v).map(|(b, vj)| b * vj).sum::<C64>() * 2.0;
        }
        let c = super::inner(&v, &w).re;
        let u: Vec<C64> = w.iter().zip(&v).map(|(wi, vi)| wi - vi * c).collect();
        for i in 0..m {
            let (vi, ui) = (v[i], u[i]);
            let row = &mut a.data_mut()[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            for (j, b) in row.iter_mut().enumerate() {
                *b -= vi * u[j].conj() + ui * v[j].conj();
            }
        }
        a[(k + 1, k)] = beta;
        a[(k, k + 1)] = beta.conj();
        for i in (k + 2)..n {
            a[(i, k)] = C64::zero();
            a[(k, i)] = C64::zero();
        }
        if want_vectors {
            reflectors.push((k, v));
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let sub: Vec<C64> = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect();

    // Diagonal unitary making the off-diagonal real and nonnegative.
    let mut phases = vec![C64::new(1.0, 0.0); n];
    let mut off = vec![0.0; n];
    for i in 0..sub.len() {
        let mag = sub[i].norm();
        off[i] = mag;
        phases[i + 1] = if mag > 0.0 { phases[i] * sub[i] / mag } else { phases[i] };
    }

    if !want_vectors {
        return (diag, off, None);
    }

    // Q = H_0 H_1 ... accumulated backwards, kept row-major during accumulation.
    let mut q = CMatrix::identity(n);
    for (k, v) in reflectors.iter().rev() {
        let k = *k;
        let mut s = vec![C64::zero(); n];
        for (i, vi) in v.iter().enumerate() {
            let row = q.row(k + 1 + i);
            let cv = vi.conj();
            for (sj, qj) in s.iter_mut().zip(row) {
                *sj += cv * qj;
            }
        }
        for (i, vi) in v.iter().enumerate() {
            let two_v = vi * 2.0;
            let row = &mut q.data_mut()[(k + 1 + i) * n..(k + 2 + i) * n];
            for (qj, sj) in row.iter_mut().zip(&s) {
                *qj -= two_v * sj;
            }
        }
    }
    let cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| q[(i, j)] * phases[j]).collect()).collect();
    (diag, off, Some(cols))
}

/// Implicit QL with Wilkinson-type shifts on a real symmetric tridiagonal
/// matrix (the EISPACK `tql2` scheme). `e[i]` couples `i` and `i+1`; `e[n-1]`
/// is ignored. Rotations are applied to the column vectors in `vecs`.
fn tql2(d: &mut [f64], e: &mut [f64], mut vecs: Option<&mut Vec<Vec<C64>>>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let max_iter = 60 * n.max(1);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::Structural("tridiagonal QL failed to converge".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = vecs.as_deref_mut() {
                        let (left, right) = v.split_at_mut(i + 1);
                        let (ci, ci1) = (&mut left[i], &mut right[0]);
                        for (a, b) in ci.iter_mut().zip(ci1.iter_mut()) {
                            let hb = *b;
                            *b = *a * s + hb * c;
                            *a = *a * c - hb * s;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn check_square(h: &DenseHermitian) -> Result<()> {
    if h.dim() == 0 {
        return input("empty matrix");
    }
    if h.dim() > crate::MAX_DENSE_DIM {
        return Err(Error::Capacity(format!("dimension {} exceeds {}", h.dim(), crate::MAX_DENSE_DIM)));
    }
    Ok(())
}

/// Full Hermitian eigen-decomposition, eigenvalues ascending.
pub fn eigh(h: &DenseHermitian) -> Result<Spectrum> {
    check_square(h)?;
    let n = h.dim();
    let (mut d, mut e, cols) = tridiagonalize(h.matrix(), true);
    let mut cols = cols.expect("vectors requested");
    tql2(&mut d, &mut e, Some(&mut cols))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| d[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for (i, z) in cols[old_j].iter().enumerate() {
            vectors[(i, new_j)] = *z;
        }
    }
    Ok(Spectrum { eigenvalues, eigenvectors: vectors })
}

/// Eigenvalues only, ascending. Cheaper than [`eigh`] since no vectors are accumulated.
pub fn eigvalsh(h: &DenseHermitian) -> Result<Vec<f64>> {
    check_square(h)?;
    let (mut d, mut e, _) = tridiagonalize(h.matrix(), false);
    tql2(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// `exp(s H)` through the spectral decomposition. `s` must be real or purely
/// imaginary, so the result is either positive definite or unitary.
pub fn expm_hermitian(h: &DenseHermitian, s: C64) -> Result<CMatrix> {
    if s.re != 0.0 && s.im != 0.0 {
        return input("scalar must be real or purely imaginary");
    }
    let spec = eigh(h)?;
    Ok(spec.apply(|l| (s * l).exp()))
}
