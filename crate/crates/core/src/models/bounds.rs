use serde::Serialize;

use crate::algebra::{binomial_u128, enumerate_set, OperatorKind, PauliString};
use crate::error::{input, Error, Result};
use crate::graph::{commutation_degree, commutation_graph};
use crate::linalg::{CMatrix, C64};
use crate::theta::{rational_to_f64, theta_johnson_lp};

/// Sets up to this size are cross-checked against an explicit graph.
const CROSS_CHECK_TERMS: u128 = 2000;

fn majorana_count(n: usize, q: usize) -> u128 {
    // γ_S, γ_T anticommute iff q² + |S∩T| is odd
    (0..=q)
        .filter(|s| (q * q + s) % 2 == 1)
        .map(|s| binomial_u128(q, s).saturating_mul(binomial_u128(n - q, q - s)))
        .fold(0, u128::saturating_add)
}

fn pauli_count(n: usize, k: usize) -> u128 {
    // overlap s; letters on the overlap anticommute at an odd number of sites
    (0..=k)
        .map(|s| {
            // Σ_{a odd} C(s,a)·2^a = (3^s − (−1)^s)/2
            let p = 3u128.pow(s as u32);
            let odd = if s % 2 == 0 { p / 2 } else { p.div_ceil(2) };
            binomial_u128(k, s)
                .saturating_mul(binomial_u128(n - k, k - s))
                .saturating_mul(3u128.saturating_pow((k - s) as u32))
                .saturating_mul(odd)
        })
        .fold(0, u128::saturating_add)
}

/// Number of terms anticommuting with any single term (every vertex of the
/// commutation graph has this degree). Cross-checked against the explicit
/// graph when the set is small.
pub fn h_comm_count(kind: OperatorKind, n: usize, locality: usize) -> Result<u128> {
    if n == 0 || locality == 0 || locality > n {
        return input(format!("need 1 ≤ locality ≤ n, got n = {n}, locality = {locality}"));
    }
    if kind == OperatorKind::Majorana && n % 2 == 1 {
        return input(format!("Majorana mode count must be even, got {n}"));
    }
    let (count, m) = match kind {
        OperatorKind::Majorana => (majorana_count(n, locality), binomial_u128(n, locality)),
        OperatorKind::Pauli => (
            pauli_count(n, locality),
            binomial_u128(n, locality).saturating_mul(3u128.saturating_pow(locality as u32)),
        ),
    };
    if m <= CROSS_CHECK_TERMS {
        let g = commutation_graph(&enumerate_set(kind, n, locality)?)?;
        let stats = g.degree_stats();
        if stats.min != stats.max || stats.max as u128 != count {
            return Err(Error::Structural(format!(
                "closed form {count} disagrees with graph degrees {}..{}",
                stats.min,
                commutation_degree(&g)
            )));
        }
    }
    Ok(count)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Vacuous,
    Nontrivial,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LambdaMaxBound {
    pub m: f64,
    pub h_comm: f64,
    pub delta_upper: f64,
    pub c1: f64,
    /// `√m/(4√(c₁h))·(1 − 16Δ)` before clamping.
    pub raw: f64,
    pub bound: f64,
    /// `√(m/(c₁h))`.
    pub beta_max: f64,
    pub regime: Regime,
}

/// Lower bound on `E λ_max(H)` for norm-one terms. `c₁` is an unknown
/// absolute constant; results at the default `c₁ = 1` are indicative only.
// the negated comparisons also reject NaN
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn lambda_max_lower_bound(m: f64, h_comm: f64, delta_upper: f64, c1: f64) -> Result<LambdaMaxBound> {
    if !(c1 > 0.0) || !(m > 0.0) || !(h_comm > 0.0) || !(0.0..=1.0).contains(&delta_upper) {
        return input(format!("need c1 > 0, m > 0, h_comm > 0 and Δ ∈ [0,1]; got {c1}, {m}, {h_comm}, {delta_upper}"));
    }
    let raw = m.sqrt() / (4.0 * (c1 * h_comm).sqrt()) * (1.0 - 16.0 * delta_upper);
    let bound = raw.max(0.0);
    Ok(LambdaMaxBound {
        m,
        h_comm,
        delta_upper,
        c1,
        raw,
        bound,
        beta_max: (m / (c1 * h_comm)).sqrt(),
        regime: if bound > 0.0 { Regime::Nontrivial } else { Regime::Vacuous },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaussianVerdict {
    /// The concentration exponent beats the `n² ln n` size of an ε-net.
    Excluded,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub q: usize,
    pub t: f64,
    pub gate_set_size: f64,
    pub delta: f64,
    /// `σ² = ϑ(G(Sⁿ_q))/C(n,q)`.
    pub sigma2: f64,
    /// `t²n/(2σ²)`.
    pub concentration_exponent: f64,
    pub circuit_gate_threshold: u64,
    pub mps_bond_threshold: u64,
    pub nn_weight_threshold: u64,
    pub gaussian_state_verdict: GaussianVerdict,
    pub h_comm: f64,
    pub lambda_max_lower: LambdaMaxBound,
    pub beta_max: f64,
}

fn floor_nonneg(x: f64) -> u64 {
    if x.is_finite() && x > 0.0 {
        x.floor() as u64
    } else {
        0
    }
}

/// Union-bound thresholds: a family of `N` states each landing above energy
/// `t` with probability at most `e^{−t²n/(2σ²)}` contains none with
/// probability `1 − δ` once `ln N ≤ t²n/(2σ²) + ln δ`.
///
/// * circuits of `G` two-qubit gates from a set of size `M`: `N ≤ (M·C(n,2))^G`
/// * bond-dimension `χ` MPS: `ln N = χ² + ln n`
/// * networks with `W` weights: `ln N = W`
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn ansatz_bounds_report(n: usize, q: usize, t: f64, gate_set_size: f64, delta: f64, c1: f64) -> Result<BoundsReport> {
    if !(t > 0.0) || !(gate_set_size >= 2.0) || !(delta > 0.0 && delta < 1.0) {
        return input(format!("need t > 0, M ≥ 2 and 0 < δ < 1; got {t}, {gate_set_size}, {delta}"));
    }
    if n < 2 {
        return input("need n ≥ 2");
    }
    let theta = theta_johnson_lp(n, q)?;
    let m = binomial_u128(n, q) as f64;
    let sigma2 = rational_to_f64(theta.exact.as_ref().expect("LP path is exact")) / m;
    let e = t * t * n as f64 / (2.0 * sigma2);
    let ln_delta = delta.ln();
    let pairs = (n * (n - 1) / 2) as f64;
    let g = floor_nonneg((e + ln_delta) / (gate_set_size * pairs).ln());
    let chi = floor_nonneg((e + ln_delta - (n as f64).ln()).max(0.0).sqrt());
    let w = floor_nonneg(e + ln_delta);
    let nf = n as f64;
    let verdict =
        if e + ln_delta > nf * nf * nf.ln() { GaussianVerdict::Excluded } else { GaussianVerdict::Inconclusive };
    let h = h_comm_count(OperatorKind::Majorana, n, q)? as f64;
    let lam = lambda_max_lower_bound(m, h, sigma2, c1)?;
    Ok(BoundsReport {
        n,
        q,
        t,
        gate_set_size,
        delta,
        sigma2,
        concentration_exponent: e,
        circuit_gate_threshold: g,
        mps_bond_threshold: chi,
        nn_weight_threshold: w,
        gaussian_state_verdict: verdict,
        h_comm: h,
        beta_max: lam.beta_max,
        lambda_max_lower: lam,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DepolarizedIdentity {
    pub k: usize,
    /// `Tr(H·E_{1/3}^{⊗n}(|φ⟩⟨φ|))`.
    pub lhs: f64,
    /// `3^{−k}⟨φ|H|φ⟩`.
    pub rhs: f64,
    pub abs_error: f64,
    pub holds: bool,
}

/// Largest dimension for the dense density-matrix evaluation.
const MAX_DEPOLARIZE_DIM: usize = 1 << 10;

/// `ρ ↦ ρ/3 + (2/3)·Tr_b(ρ)⊗I/2` on basis bit `b`.
fn depolarize_bit(rho: &mut CMatrix, bit: usize) {
    let mask = 1usize << bit;
    let dim = rho.rows();
    for a in 0..dim {
        for c in 0..dim {
            if a & mask != 0 || c & mask != 0 {
                continue;
            }
            let (a1, c1) = (a | mask, c | mask);
            let avg = (rho[(a, c)] + rho[(a1, c1)]) * 0.5;
            let third = 1.0 / 3.0;
            rho[(a, c)] = rho[(a, c)] * third + avg * (2.0 * third);
            rho[(a1, c1)] = rho[(a1, c1)] * third + avg * (2.0 * third);
            rho[(a1, c)] *= third;
            rho[(a, c1)] *= third;
        }
    }
}

/// Checks `Tr(H·E_{1/3}^{⊗n}(|φ⟩⟨φ|)) = 3^{−k}⟨φ|H|φ⟩` for `H = Σ cᵢPᵢ`
/// with every `Pᵢ` Hermitian of weight exactly `k`.
pub fn depolarized_energy_identity(terms: &[(f64, PauliString)], phi: &[C64]) -> Result<DepolarizedIdentity> {
    let Some((_, first)) = terms.first() else { return input("empty Hamiltonian") };
    let n = first.n_qubits();
    let k = first.weight();
    if k == 0 {
        return input("terms must be traceless (weight ≥ 1)");
    }
    for (_, p) in terms {
        if p.n_qubits() != n || p.weight() != k || !p.is_hermitian() {
            return input(format!("every term must be a Hermitian weight-{k} Pauli on {n} qubits"));
        }
    }
    let dim = 1usize << n;
    if n > 10 || dim > MAX_DEPOLARIZE_DIM {
        return crate::error::capacity(format!("dimension 2^{n} exceeds {MAX_DEPOLARIZE_DIM}"));
    }
    if phi.len() != dim {
        return input(format!("state of length {} for {n} qubits", phi.len()));
    }
    let dense: Vec<_> = terms.iter().map(|(c, p)| p.to_dense().map(|d| (*c, d))).collect::<Result<_>>()?;
    let rhs = dense.iter().map(|(c, p)| c * p.expectation(phi).re).sum::<f64>() / 3f64.powi(k as i32);
    let mut rho = CMatrix::from_fn(dim, dim, |a, c| phi[a] * phi[c].conj());
    for bit in 0..n {
        depolarize_bit(&mut rho, bit);
    }
    // Tr(Pρ) = Σ_c ⟨c|P|c⊕x⟩ρ[c⊕x, c]
    let lhs: f64 = dense
        .iter()
        .map(|(coef, p)| {
            let x = p.x as usize;
            let acc: C64 = (0..dim)
                .map(|c| {
                    let sign = if (p.z & c as u64).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                    rho[(c, c ^ x)] * sign
                })
                .sum();
            coef * (acc * p.phase.to_complex()).re
        })
        .sum();
    let abs_error = (lhs - rhs).abs();
    Ok(DepolarizedIdentity { k, lhs, rhs, abs_error, holds: abs_error <= 1e-12 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, DenseHermitian, GaussianSampler, RandomStream};

    #[test]
    fn h_comm_examples() {
        assert_eq!(h_comm_count(OperatorKind::Majorana, 6, 2).unwrap(), 8);
        assert_eq!(h_comm_count(OperatorKind::Majorana, 8, 4).unwrap(), 32);
        assert!(32 <= 4 * binomial_u128(7, 3));
        // odd degree, checked against the graph
        assert_eq!(h_comm_count(OperatorKind::Majorana, 8, 3).unwrap(), majorana_count(8, 3));
        assert_eq!(h_comm_count(OperatorKind::Pauli, 2, 1).unwrap(), 2);
        for (n, k) in [(4, 2), (5, 3), (6, 2)] {
            let g = commutation_graph(&enumerate_set(OperatorKind::Pauli, n, k).unwrap()).unwrap();
            assert_eq!(h_comm_count(OperatorKind::Pauli, n, k).unwrap(), commutation_degree(&g) as u128);
        }
        // beyond the cross-check size the closed form is used
        assert!(h_comm_count(OperatorKind::Pauli, 20, 3).unwrap() > 0);
    }

    #[test]
    fn lambda_bound_arithmetic() {
        let b = lambda_max_lower_bound(1820.0, 928.0, 28.0 / 1820.0, 1.0).unwrap();
        let expect = 1820f64.sqrt() / (4.0 * 928f64.sqrt()) * (1.0 - 16.0 * 28.0 / 1820.0);
        assert!((b.bound - expect).abs() < 1e-15);
        assert!((b.bound - 0.264).abs() < 5e-4, "{}", b.bound);
        assert_eq!(b.regime, Regime::Nontrivial);
        assert!((b.beta_max - (1820.0f64 / 928.0).sqrt()).abs() < 1e-15);
        let v = lambda_max_lower_bound(1820.0, 928.0, 0.0625, 1.0).unwrap();
        assert_eq!(v.bound, 0.0);
        assert_eq!(v.regime, Regime::Vacuous);
        let larger_c1 = lambda_max_lower_bound(1820.0, 928.0, 0.01, 2.0).unwrap();
        let larger_delta = lambda_max_lower_bound(1820.0, 928.0, 0.02, 1.0).unwrap();
        let base = lambda_max_lower_bound(1820.0, 928.0, 0.01, 1.0).unwrap();
        assert!(larger_c1.bound < base.bound && larger_delta.bound < base.bound);
        assert!(lambda_max_lower_bound(10.0, 1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn h_comm_at_16_4() {
        assert_eq!(h_comm_count(OperatorKind::Majorana, 16, 4).unwrap(), 928);
    }

    #[test]
    fn ansatz_report_closed_form() {
        let r = ansatz_bounds_report(100, 4, 0.5, 64.0, 1e-3, 1.0).unwrap();
        let sigma2 = 1225.0 / 3_921_225.0;
        assert!((r.sigma2 - sigma2).abs() < 1e-15);
        let e = 0.25 * 100.0 / (2.0 * sigma2);
        let g = ((e + 1e-3f64.ln()) / (64.0 * 4950.0f64).ln()).floor() as u64;
        assert_eq!(r.circuit_gate_threshold, g);
        assert_eq!(r.nn_weight_threshold, (e + 1e-3f64.ln()).floor() as u64);
        let tiny = ansatz_bounds_report(100, 4, 1e-6, 64.0, 1e-3, 1.0).unwrap();
        assert_eq!(tiny.circuit_gate_threshold, 0);
        assert_eq!(tiny.mps_bond_threshold, 0);
        let mut last = 0;
        for t in [0.25, 0.5, 1.0] {
            let g = ansatz_bounds_report(40, 4, t, 16.0, 0.01, 1.0).unwrap().circuit_gate_threshold;
            assert!(g >= last);
            last = g;
        }
        assert!(ansatz_bounds_report(10, 4, 0.5, 1.0, 0.1, 1.0).is_err());
        assert!(ansatz_bounds_report(10, 4, 0.5, 4.0, 1.0, 1.0).is_err());
    }

    fn bell() -> Vec<C64> {
        let s = 0.5f64.sqrt();
        vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)]
    }

    #[test]
    fn depolarized_small_cases() {
        let zz = PauliString::from_letters("ZZ").unwrap();
        let xx = PauliString::from_letters("XX").unwrap();
        let mut zero = vec![C64::new(0.0, 0.0); 4];
        zero[0] = C64::new(1.0, 0.0);
        let r = depolarized_energy_identity(&[(1.0, zz.clone())], &zero).unwrap();
        assert!((r.lhs - 1.0 / 9.0).abs() < 1e-15 && r.holds);
        let r = depolarized_energy_identity(&[(1.0, xx), (1.0, zz.clone())], &bell()).unwrap();
        assert!((r.lhs - 2.0 / 9.0).abs() < 1e-15 && (r.rhs - 2.0 / 9.0).abs() < 1e-15);
        let z1 = PauliString::from_letters("ZI").unwrap();
        assert!(depolarized_energy_identity(&[(1.0, zz), (1.0, z1)], &bell()).is_err());
    }

    #[test]
    fn depolarized_top_eigenvector() {
        let set = enumerate_set(OperatorKind::Pauli, 3, 2).unwrap();
        let mut sampler = GaussianSampler::new(RandomStream::new(5, 0));
        let paulis: Vec<PauliString> = set.hermitian_paulis().unwrap();
        let terms: Vec<(f64, PauliString)> = paulis.into_iter().map(|p| (sampler.next(), p)).collect();
        let mut h = CMatrix::zeros(8, 8);
        for (c, p) in &terms {
            p.to_dense().unwrap().add_to(&mut h, C64::new(*c, 0.0));
        }
        let spec = eigh(&DenseHermitian::new(h).unwrap()).unwrap();
        let top = spec.vector(7);
        let r = depolarized_energy_identity(&terms, &top).unwrap();
        assert!((r.lhs - spec.max_eigenvalue() / 9.0).abs() < 1e-12);
        assert!(r.holds);
    }
}
