//! Commutation index `Δ(S) = sup_ψ (1/|S|) Σ_{A∈S} ⟨ψ|A|ψ⟩²`.
//!
//! Upper bounds come from `ϑ(G(S))/|S|`, lower bounds from explicit states
//! (the stabilized state of the pair-product Majorana family, joint
//! eigenvectors of commuting subfamilies, product states for Pauli sets),
//! and the see-saw heuristic climbs from seeded random starts.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::algebra::{binomial_u128, enumerate_set, DensePauli, OperatorKind, OperatorSet, PauliString, Provenance};
use crate::error::{capacity, input, Result};
use crate::graph::{commutation_graph, commuting_majorana_family, max_independent_set, stabilized_state};
use crate::linalg::{eigh, normalize, CMatrix, DenseHermitian, GaussianSampler, RandomStream, C64};
use crate::scheme::binomial;
use crate::theta::{theta_johnson_lp, theta_sdp, ThetaResult};

fn ser_opt_rational<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Largest dimension for see-saw and witness evaluation.
pub const MAX_SEESAW_DIM: usize = 1 << 12;
/// Largest dimension for the off-diagonal check.
pub const MAX_OFFDIAG_DIM: usize = 1 << 10;
/// Search nodes spent looking for a large commuting subfamily.
pub const COMMUTING_SEARCH_BUDGET: usize = 1 << 18;
/// Witness checks sum over at most this many (terms × dimension).
pub const WITNESS_BUDGET: u128 = 1 << 28;

#[derive(Clone, Debug, Serialize)]
pub struct UpperBound {
    pub value: f64,
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<BigRational>,
    pub theta: ThetaResult,
}

/// True when `set` is the complete enumeration of `Sⁿ_q`.
fn is_full_majorana(set: &OperatorSet) -> bool {
    set.kind() == OperatorKind::Majorana
        && set.provenance() == Provenance::Enumerated
        && set.locality().is_multiple_of(2)
        && binomial_u128(set.n(), set.locality()) == set.len() as u128
}

/// `ϑ(G(S))/|S|`: exact through the Johnson LP for complete `Sⁿ_q`, and the
/// upper end of the SDP bracket otherwise.
pub fn index_upper(set: &OperatorSet) -> Result<UpperBound> {
    if set.is_empty() {
        return input("empty operator set");
    }
    let m = set.len();
    if is_full_majorana(set) {
        let theta = theta_johnson_lp(set.n(), set.locality())?;
        let exact = theta.exact.clone().map(|t| t / BigRational::from_integer(m.into()));
        let value = exact.as_ref().and_then(|e| e.to_f64()).unwrap_or(f64::NAN);
        return Ok(UpperBound { value, exact, theta });
    }
    let theta = theta_sdp(&commutation_graph(set)?, 1e-7)?;
    let value = (theta.bracket[1] / m as f64).min(1.0);
    Ok(UpperBound { value, exact: None, theta })
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBound {
    pub value: f64,
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<BigRational>,
    /// `(1/m) Σ ⟨ψ|A|ψ⟩²` at the constructed witness, when evaluated.
    pub witness_value: Option<f64>,
    #[serde(skip)]
    pub witness: Option<Vec<C64>>,
}

/// `C(n/2, q/2)/C(n, q)`, with the stabilized-state witness evaluated when
/// the dimension and term count are small enough.
pub fn index_lower_majorana(n: usize, q: usize) -> Result<LowerBound> {
    let family = commuting_majorana_family(n, q)?;
    let exact = BigRational::new(binomial((n / 2) as i64, (q / 2) as i64), binomial(n as i64, q as i64));
    let value = exact.to_f64().unwrap_or(f64::NAN);
    let dim_ok = n / 2 <= 12;
    let m = binomial_u128(n, q);
    if !dim_ok || m.saturating_mul(1u128 << (n / 2)) > WITNESS_BUDGET {
        return Ok(LowerBound { value, exact: Some(exact), witness_value: None, witness: None });
    }
    let dim = 1usize << (n / 2);
    let psi = stabilized_state(&family, dim, 0x5eed)?;
    let set = enumerate_set(OperatorKind::Majorana, n, q)?;
    let w = mean_square_expectation(&set.dense_terms()?, &psi);
    if w < value - 1e-9 {
        return Err(crate::Error::Structural(format!("witness value {w} below the bound {value}")));
    }
    Ok(LowerBound { value, exact: Some(exact), witness_value: Some(w), witness: Some(psi) })
}

/// `|F|/|S|` for the largest pairwise commuting subfamily `F` found in the
/// commutation graph. Any joint eigenvector of `F` has `⟨A⟩² = 1` on every
/// member; one is taken from a generic real combination of `F` and evaluated
/// on the whole set.
pub fn index_lower_commuting(set: &OperatorSet, seed: u64) -> Result<LowerBound> {
    if set.is_empty() {
        return input("empty operator set");
    }
    let dim = set.dim()?;
    if dim > MAX_SEESAW_DIM {
        return capacity(format!("dimension {dim} exceeds {MAX_SEESAW_DIM}"));
    }
    if (set.len() as u128).saturating_mul(dim as u128) > WITNESS_BUDGET {
        return capacity(format!("{} terms at dimension {dim} exceed the witness budget", set.len()));
    }
    let (family, _) = max_independent_set(&commutation_graph(set)?, COMMUTING_SEARCH_BUDGET);
    let terms = set.dense_terms()?;
    let chosen: Vec<DensePauli> = family.iter().map(|&i| terms[i]).collect();
    let mut sampler = GaussianSampler::new(RandomStream::new(seed, 0));
    let weights = sampler.fill(chosen.len());
    let psi = eigh(&weighted_operator(&chosen, &weights, dim)?)?.vector(0);
    let exact = BigRational::new(family.len().into(), set.len().into());
    let value = exact.to_f64().unwrap_or(f64::NAN);
    let w = mean_square_expectation(&terms, &psi);
    if w < value - 1e-9 {
        return Err(crate::Error::Structural(format!("joint eigenvector gives {w}, below {value}")));
    }
    Ok(LowerBound { value, exact: Some(exact), witness_value: Some(w), witness: Some(psi) })
}

/// `(1/m) Σ ⟨ψ|A_i|ψ⟩²`.
pub fn mean_square_expectation(terms: &[DensePauli], psi: &[C64]) -> f64 {
    terms.iter().map(|t| t.expectation(psi).re.powi(2)).sum::<f64>() / terms.len() as f64
}

/// Tensor product of single-qubit unit vectors.
#[derive(Clone, Debug)]
pub struct ProductState {
    factors: Vec<[C64; 2]>,
}

impl ProductState {
    pub fn new(factors: Vec<[C64; 2]>) -> Result<Self> {
        if factors.is_empty() {
            return input("product state needs at least one factor");
        }
        for (j, f) in factors.iter().enumerate() {
            let nrm = (f[0].norm_sqr() + f[1].norm_sqr()).sqrt();
            if (nrm - 1.0).abs() > 1e-12 {
                return input(format!("factor {j} has norm {nrm}, expected 1"));
            }
        }
        Ok(Self { factors })
    }

    /// Haar-random single-qubit factors.
    pub fn random(n: usize, sampler: &mut GaussianSampler) -> Self {
        let factors = (0..n)
            .map(|_| {
                let v = sampler.haar_state(2);
                [v[0], v[1]]
            })
            .collect();
        Self { factors }
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    /// Bloch vector `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of factor `j`.
    pub fn bloch(&self, j: usize) -> [f64; 3] {
        let [a, b] = self.factors[j];
        let ab = a.conj() * b;
        [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
    }

    /// Full `2^n` state vector (qubit 0 most significant).
    pub fn to_vector(&self) -> Vec<C64> {
        let mut v = vec![C64::new(1.0, 0.0)];
        for f in &self.factors {
            v = v.iter().flat_map(|a| [a * f[0], a * f[1]]).collect();
        }
        v
    }
}

/// `(1/|Pⁿₖ|) Σ_{weight-k P} ⟨P⟩²` for a product state, evaluated term by
/// term from the factor Bloch vectors.
pub fn index_pauli_product(n: usize, k: usize, state: &ProductState) -> Result<f64> {
    if state.n_qubits() != n {
        return input(format!("state has {} qubits, expected {n}", state.n_qubits()));
    }
    let set = enumerate_set(OperatorKind::Pauli, n, k)?;
    let crate::algebra::Members::Pauli(ps) = set.members() else { unreachable!() };
    let blochs: Vec<[f64; 3]> = (0..n).map(|j| state.bloch(j)).collect();
    let total: f64 = ps
        .iter()
        .map(|p| {
            let (letters, _) = p.letters();
            letters
                .chars()
                .enumerate()
                .map(|(j, c)| match c {
                    'X' => blochs[j][0],
                    'Y' => blochs[j][1],
                    'Z' => blochs[j][2],
                    _ => 1.0,
                })
                .product::<f64>()
                .powi(2)
        })
        .sum();
    Ok(total / ps.len() as f64)
}

/// `(2/3)ᵏ`, valid for every `n`.
pub fn pauli_index_weak_bound(k: usize) -> f64 {
    (2.0f64 / 3.0).powi(k as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct SeesawResult {
    pub value: f64,
    pub per_restart: Vec<f64>,
    pub iterations: Vec<usize>,
    /// Objective never decreased along any restart.
    pub monotone: bool,
    #[serde(skip)]
    pub witness: Vec<C64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self { restarts: 8, iters: 200, seed: 1 }
    }
}

fn weighted_operator(terms: &[DensePauli], weights: &[f64], dim: usize) -> Result<DenseHermitian> {
    let mut m = CMatrix::zeros(dim, dim);
    for (t, &w) in terms.iter().zip(weights) {
        t.add_to(&mut m, C64::new(w, 0.0));
    }
    DenseHermitian::new(m)
}

fn climb(terms: &[DensePauli], dim: usize, mut psi: Vec<C64>, iters: usize) -> Result<(f64, Vec<C64>, usize, bool)> {
    let mut value = mean_square_expectation(terms, &psi);
    let mut monotone = true;
    let mut used = 0;
    for _ in 0..iters {
        used += 1;
        let weights: Vec<f64> = terms.iter().map(|t| t.expectation(&psi).re).collect();
        let spec = eigh(&weighted_operator(terms, &weights, dim)?)?;
        let next = spec.vector(dim - 1);
        let next_value = mean_square_expectation(terms, &next);
        if next_value < value - 1e-12 {
            monotone = false;
        }
        let gain = next_value - value;
        if next_value >= value {
            psi = next;
            value = next_value;
        }
        if gain < 1e-12 {
            break;
        }
    }
    Ok((value, psi, used, monotone))
}

/// Alternating ascent `ψ ← top eigenvector of (1/m) Σ ⟨ψ|A_i|ψ⟩ A_i` from
/// `restarts` seeded Haar-random states (plus `extra_start`, if given).
pub fn index_seesaw_from(set: &OperatorSet, opts: &SeesawOptions, extra_start: Option<&[C64]>) -> Result<SeesawResult> {
    let dim = set.dim()?;
    if dim > MAX_SEESAW_DIM {
        return capacity(format!("see-saw dimension {dim} exceeds {MAX_SEESAW_DIM}"));
    }
    if set.is_empty() {
        return input("empty operator set");
    }
    let terms = set.dense_terms()?;
    let mut starts: Vec<Vec<C64>> = (0..opts.restarts)
        .map(|r| GaussianSampler::new(RandomStream::new(opts.seed, r as u64)).haar_state(dim))
        .collect();
    if let Some(s) = extra_start {
        let mut v = s.to_vec();
        normalize(&mut v);
        starts.push(v);
    }
    let runs: Vec<(f64, Vec<C64>, usize, bool)> =
        starts.into_par_iter().map(|psi| climb(&terms, dim, psi, opts.iters)).collect::<Result<_>>()?;
    let best = runs.iter().enumerate().max_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).map(|(i, _)| i).unwrap_or(0);
    Ok(SeesawResult {
        value: runs[best].0,
        per_restart: runs.iter().map(|r| r.0).collect(),
        iterations: runs.iter().map(|r| r.2).collect(),
        monotone: runs.iter().all(|r| r.3),
        witness: runs[best].1.clone(),
    })
}

pub fn index_seesaw(set: &OperatorSet, restarts: usize, iters: usize, seed: u64) -> Result<SeesawResult> {
    index_seesaw_from(set, &SeesawOptions { restarts, iters, seed }, None)
}

#[derive(Clone, Debug, Serialize)]
pub struct OffdiagReport {
    pub trials: usize,
    pub estimate: f64,
    pub index_upper: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Top eigenvector of `Σ_i (A_i v)(A_i v)†`, i.e. the best `u` for fixed `v`.
fn best_partner(terms: &[DensePauli], v: &[C64]) -> Result<(f64, Vec<C64>)> {
    let dim = v.len();
    let mut g = CMatrix::zeros(dim, dim);
    for t in terms {
        let w = t.apply(v);
        for i in 0..dim {
            if w[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..dim {
                g[(i, j)] += w[i] * w[j].conj();
            }
        }
    }
    let spec = eigh(&DenseHermitian::new(g)?)?;
    Ok((spec.max_eigenvalue() / terms.len() as f64, spec.vector(dim - 1)))
}

/// Randomized see-saw estimate of `sup_{u,v} (1/m) Σ |⟨u|A_i|v⟩|²`, compared
/// against `16 · index_upper(set)`.
pub fn offdiag_index_check(set: &OperatorSet, trials: usize, seed: u64) -> Result<OffdiagReport> {
    let dim = set.dim()?;
    if dim > MAX_OFFDIAG_DIM {
        return capacity(format!("dimension {dim} exceeds {MAX_OFFDIAG_DIM}"));
    }
    let terms = set.dense_terms()?;
    let estimates: Vec<f64> = (0..trials.max(1))
        .into_par_iter()
        .map(|t| {
            let mut v = GaussianSampler::new(RandomStream::new(seed, t as u64)).haar_state(dim);
            let mut best = 0.0f64;
            for _ in 0..100 {
                let (val, u) = best_partner(&terms, &v)?;
                let gain = val - best;
                best = best.max(val);
                v = u;
                if gain < 1e-12 {
                    break;
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let estimate = estimates.into_iter().fold(0.0, f64::max);
    let upper = index_upper(set)?.value;
    let bound = 16.0 * upper;
    Ok(OffdiagReport { trials, estimate, index_upper: upper, bound, holds: estimate <= bound + 1e-9 })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IndexEstimate {
    pub kind: String,
    pub n: usize,
    pub locality: usize,
    pub size: usize,
    pub upper: Option<f64>,
    pub upper_exact: Option<String>,
    pub lower: Option<f64>,
    pub lower_exact: Option<String>,
    pub lower_source: Option<String>,
    pub heuristic: Option<f64>,
    /// Set only when `upper − lower ≤ 1e−9`.
    pub exact: Option<f64>,
    pub exact_rational: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexMethod {
    Upper,
    Lower,
    Seesaw,
    All,
}

/// Structured lower bound: the all-zeros product state for complete `Pⁿₖ`;
/// otherwise the larger of the pair-product family (complete `Sⁿ_q`) and the
/// largest commuting subfamily found, when either applies.
fn structured_lower(set: &OperatorSet) -> Result<Option<(LowerBound, &'static str)>> {
    if set.kind() == OperatorKind::Pauli
        && set.provenance() == Provenance::Enumerated
        && set.n() <= 12
    {
        let zero = ProductState::new(vec![[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]; set.n()])?;
        let value = index_pauli_product(set.n(), set.locality(), &zero)?;
        let exact = BigRational::new(1.into(), num_bigint::BigInt::from(3u64.pow(set.locality() as u32)));
        let lb = LowerBound { value, exact: Some(exact), witness_value: Some(value), witness: Some(zero.to_vector()) };
        return Ok(Some((lb, "product state |0…0⟩")));
    }
    let mut best = None;
    if is_full_majorana(set) {
        best = Some((index_lower_majorana(set.n(), set.locality())?, "pair-product family stabilized state"));
    }
    match index_lower_commuting(set, 0x5eed) {
        Ok(lb) => {
            if best.as_ref().is_none_or(|(b, _): &(LowerBound, _)| lb.exact > b.exact) {
                best = Some((lb, "joint eigenvector of a commuting subfamily"));
            }
        }
        Err(crate::Error::Capacity(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(best)
}

pub fn estimate_index(set: &OperatorSet, method: IndexMethod, seesaw: &SeesawOptions) -> Result<IndexEstimate> {
    let mut est = IndexEstimate {
        kind: match set.kind() {
            OperatorKind::Pauli => "pauli".into(),
            OperatorKind::Majorana => "majorana".into(),
        },
        n: set.n(),
        locality: set.locality(),
        size: set.len(),
        ..IndexEstimate::default()
    };
    let want = |m: IndexMethod| method == m || method == IndexMethod::All;
    let mut upper_exact = None;
    if want(IndexMethod::Upper) {
        let up = index_upper(set)?;
        est.upper = Some(up.value);
        est.upper_exact = up.exact.as_ref().map(|e| e.to_string());
        upper_exact = up.exact;
    }
    let mut lower_exact = None;
    let mut witness = None;
    if want(IndexMethod::Lower) {
        if let Some((lb, source)) = structured_lower(set)? {
            est.lower = Some(lb.value);
            est.lower_exact = lb.exact.as_ref().map(|e| e.to_string());
            est.lower_source = Some(source.into());
            lower_exact = lb.exact;
            witness = lb.witness;
        }
    }
    if want(IndexMethod::Seesaw) {
        let s = index_seesaw_from(set, seesaw, witness.as_deref())?;
        est.heuristic = Some(s.value);
        if est.lower.is_none() && method == IndexMethod::All {
            est.lower = Some(s.value);
            est.lower_source = Some("see-saw witness".into());
        }
    }
    if let (Some(u), Some(l)) = (est.upper, est.lower) {
        if u - l <= 1e-9 {
            est.exact = Some(l);
            if let (Some(ue), Some(le)) = (&upper_exact, &lower_exact) {
                if ue == le {
                    est.exact_rational = Some(ue.to_string());
                }
            }
        }
    }
    Ok(est)
}

/// Convenience for custom Pauli sets given as letter strings.
pub fn pauli_set(letters: &[&str]) -> Result<OperatorSet> {
    let members: Vec<PauliString> = letters.iter().map(|s| PauliString::from_letters(s)).collect::<Result<_>>()?;
    let n = members.first().map(|p| p.n_qubits()).unwrap_or(0);
    let k = members.iter().map(|p| p.weight()).max().unwrap_or(0);
    OperatorSet::from_paulis(n, k, members, Provenance::Custom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn upper_examples() {
        let s62 = enumerate_set(OperatorKind::Majorana, 6, 2).unwrap();
        assert_eq!(index_upper(&s62).unwrap().exact, Some(rat(1, 5)));
        let s84 = enumerate_set(OperatorKind::Majorana, 8, 4).unwrap();
        assert_eq!(index_upper(&s84).unwrap().exact, Some(rat(1, 5)));
        let xyz = pauli_set(&["X", "Y", "Z"]).unwrap();
        assert!((index_upper(&xyz).unwrap().value - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn lower_examples() {
        assert_eq!(index_lower_majorana(6, 2).unwrap().exact, Some(rat(3, 15)));
        assert_eq!(index_lower_majorana(8, 4).unwrap().exact, Some(rat(6, 70)));
        let lb = index_lower_majorana(12, 4).unwrap();
        assert_eq!(lb.exact, Some(rat(15, 495)));
        assert!(lb.witness_value.unwrap() >= 15.0 / 495.0 - 1e-9);
    }

    #[test]
    fn product_state_examples() {
        let zero = |n| ProductState::new(vec![[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]; n]).unwrap();
        assert!((index_pauli_product(2, 1, &zero(2)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((index_pauli_product(3, 2, &zero(3)).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        let mut g = GaussianSampler::new(RandomStream::new(4, 0));
        let st = ProductState::random(4, &mut g);
        assert!((index_pauli_product(4, 2, &st).unwrap() - 1.0 / 9.0).abs() < 1e-12);
        assert!(ProductState::new(vec![[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]]).is_err());
        assert!(index_pauli_product(3, 1, &zero(2)).is_err());
    }

    #[test]
    fn seesaw_examples() {
        let zz = pauli_set(&["ZI", "IZ"]).unwrap();
        assert!((index_seesaw(&zz, 4, 200, 1).unwrap().value - 1.0).abs() < 1e-9);
        let xyz = pauli_set(&["X", "Y", "Z"]).unwrap();
        let r = index_seesaw(&xyz, 4, 200, 1).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-9);
        let s62 = enumerate_set(OperatorKind::Majorana, 6, 2).unwrap();
        let r = index_seesaw(&s62, 8, 200, 3).unwrap();
        assert!((r.value - 0.2).abs() < 1e-6, "{}", r.value);
        assert!(r.monotone);
    }

    #[test]
    fn weak_bound_dominates_seesaw() {
        assert_eq!(pauli_index_weak_bound(1), 2.0 / 3.0);
        let p33 = enumerate_set(OperatorKind::Pauli, 3, 3).unwrap();
        let r = index_seesaw(&p33, 8, 200, 5).unwrap();
        assert!(r.value <= pauli_index_weak_bound(3) + 1e-12);
    }

    #[test]
    fn offdiag_examples() {
        let z = pauli_set(&["Z"]).unwrap();
        let rep = offdiag_index_check(&z, 4, 1).unwrap();
        assert!((rep.estimate - 1.0).abs() < 1e-9 && rep.holds);
        let xyz = pauli_set(&["X", "Y", "Z"]).unwrap();
        let rep = offdiag_index_check(&xyz, 8, 1).unwrap();
        assert!((rep.estimate - 2.0 / 3.0).abs() < 1e-9 && rep.holds);
        let s62 = enumerate_set(OperatorKind::Majorana, 6, 2).unwrap();
        let rep = offdiag_index_check(&s62, 32, 2).unwrap();
        assert!(rep.holds && rep.estimate <= 16.0 / 5.0);
    }

    #[test]
    fn estimate_closes_sandwich() {
        let s62 = enumerate_set(OperatorKind::Majorana, 6, 2).unwrap();
        let est = estimate_index(&s62, IndexMethod::All, &SeesawOptions::default()).unwrap();
        assert_eq!(est.exact_rational.as_deref(), Some("1/5"));
        let h = est.heuristic.unwrap();
        assert!(est.lower.unwrap() <= h + 1e-9 && h <= est.upper.unwrap() + 1e-9);
        let s84 = enumerate_set(OperatorKind::Majorana, 8, 4).unwrap();
        let est = estimate_index(&s84, IndexMethod::All, &SeesawOptions::default()).unwrap();
        assert_eq!(est.lower_exact.as_deref(), Some("1/5"));
        assert_eq!(est.exact_rational.as_deref(), Some("1/5"));
        let h = est.heuristic.unwrap();
        assert!(est.lower.unwrap() <= h + 1e-9 && h <= est.upper.unwrap() + 1e-9);
    }

    #[test]
    fn commuting_lower_bound() {
        let s84 = enumerate_set(OperatorKind::Majorana, 8, 4).unwrap();
        let lb = index_lower_commuting(&s84, 3).unwrap();
        assert_eq!(lb.exact, Some(rat(14, 70)));
        assert!((lb.witness_value.unwrap() - 0.2).abs() < 1e-9);
        // {X, Y, Z}: no two commute
        let lb = index_lower_commuting(&pauli_set(&["X", "Y", "Z"]).unwrap(), 3).unwrap();
        assert_eq!(lb.exact, Some(rat(1, 3)));
    }
}
