use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::linalg::{CMatrix, C64};

/// A power of `i`: the quarter-phase `i^k`, `k ∈ {0,1,2,3}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

/// An `n`-qubit Pauli operator `phase · ⊗_j X^{x_j} Z^{z_j}`.
///
/// Note the phase is relative to the `X^x Z^z` product, so `Y = i·XZ` is
/// stored with `x = z = 1` and phase `+i`. The operator is Hermitian iff
/// `phase · i^{|x∧z|}` is real. Use [`PauliString::letters`] for the
/// conventional `{I,X,Y,Z}` spelling.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        let w = words_for(n_qubits);
        Self { n_qubits, x: vec![0; w], z: vec![0; w], phase: Phase::ONE }
    }

    /// Single-qubit letter `X`, `Y` or `Z` on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: char) -> Result<Self> {
        if qubit >= n_qubits {
            return input(format!("qubit {qubit} out of range for {n_qubits} qubits"));
        }
        let mut p = Self::identity(n_qubits);
        p.set_letter(qubit, letter)?;
        Ok(p)
    }

    /// Parses a Hermitian string such as `"XIZY"` (letter phase `+1`).
    pub fn from_letters(s: &str) -> Result<Self> {
        Self::from_letters_with_phase(s, Phase::ONE)
    }

    /// `letter_phase · ⊗ letters`.
    pub fn from_letters_with_phase(s: &str, letter_phase: Phase) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 {
            return input("empty Pauli string");
        }
        let mut p = Self::identity(n);
        for (j, c) in s.chars().enumerate() {
            p.set_letter(j, c)?;
        }
        p.phase = p.phase * letter_phase;
        Ok(p)
    }

    fn set_letter(&mut self, j: usize, letter: char) -> Result<()> {
        let (xb, zb) = match letter.to_ascii_uppercase() {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            other => return input(format!("invalid Pauli letter {other:?}")),
        };
        let had_y = self.x_bit(j) && self.z_bit(j);
        let (w, b) = (j / WORD, j % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
        // Y = i·XZ
        if had_y {
            self.phase = self.phase * Phase::MINUS_I;
        }
        if xb && zb {
            self.phase = self.phase * Phase::I;
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn x_bit(&self, j: usize) -> bool {
        self.x[j / WORD] >> (j % WORD) & 1 == 1
    }

    pub fn z_bit(&self, j: usize) -> bool {
        self.z[j / WORD] >> (j % WORD) & 1 == 1
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn y_count(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&j| self.x_bit(j) || self.z_bit(j)).collect()
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase * Phase::from_exponent(self.y_count() as i64)).is_real()
    }

    /// Phase in front of the `{I,X,Y,Z}` letter product.
    pub fn letter_phase(&self) -> Phase {
        self.phase * Phase::from_exponent(-(self.y_count() as i64))
    }

    /// `(letters, letter_phase)` with `self = letter_phase · ⊗ letters`.
    pub fn letters(&self) -> (String, Phase) {
        let s = (0..self.n_qubits)
            .map(|j| match (self.x_bit(j), self.z_bit(j)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            })
            .collect();
        (s, self.letter_phase())
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return input(format!("qubit count mismatch: {} vs {}", self.n_qubits, other.n_qubits));
        }
        Ok(())
    }

    /// Symplectic form `⟨x_P, z_Q⟩ + ⟨x_Q, z_P⟩ mod 2`.
    pub fn anticommutes(&self, other: &Self) -> Result<bool> {
        self.check_same_size(other)?;
        let ones: u32 = (0..self.x.len())
            .map(|w| (self.x[w] & other.z[w]).count_ones() + (other.x[w] & self.z[w]).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    /// Operator product `self · other` including the accumulated phase.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_size(other)?;
        // Z^{z1} X^{x2} = (−1)^{z1·x2} X^{x2} Z^{z1}
        let swaps: u32 = self.z.iter().zip(&other.x).map(|(a, b)| (a & b).count_ones()).sum();
        let phase = self.phase * other.phase * Phase::from_exponent(2 * (swaps as i64 % 2));
        Ok(Self {
            n_qubits: self.n_qubits,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            phase,
        })
    }

    /// Tensor product `self ⊗ other` (qubits of `self` first).
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.n_qubits + other.n_qubits;
        let mut out = Self::identity(n);
        for j in 0..self.n_qubits {
            out.put_bits(j, self.x_bit(j), self.z_bit(j));
        }
        for j in 0..other.n_qubits {
            out.put_bits(self.n_qubits + j, other.x_bit(j), other.z_bit(j));
        }
        out.phase = self.phase * other.phase;
        out
    }

    fn put_bits(&mut self, j: usize, xb: bool, zb: bool) {
        let (w, b) = (j / WORD, j % WORD);
        self.x[w] |= (xb as u64) << b;
        self.z[w] |= (zb as u64) << b;
    }

    /// Packed form for dense work on at most 62 qubits.
    pub fn to_dense(&self) -> Result<DensePauli> {
        if self.n_qubits > 62 {
            return Err(Error::Capacity(format!("{} qubits is too many for dense form", self.n_qubits)));
        }
        let n = self.n_qubits;
        let mut x = 0u64;
        let mut z = 0u64;
        for j in 0..n {
            let bit = 1u64 << (n - 1 - j);
            if self.x_bit(j) {
                x |= bit;
            }
            if self.z_bit(j) {
                z |= bit;
            }
        }
        Ok(DensePauli { n_qubits: n, x, z, phase: self.phase })
    }

    /// Dense `2^n × 2^n` matrix (qubit 0 is the most significant tensor factor).
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let dim = dense_dim(self.n_qubits)?;
        let d = self.to_dense()?;
        let mut m = CMatrix::zeros(dim, dim);
        d.add_to(&mut m, C64::new(1.0, 0.0));
        Ok(m)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, ph) = self.letters();
        if ph == Phase::ONE {
            write!(f, "{s}")
        } else {
            write!(f, "({ph}){s}")
        }
    }
}

pub(crate) fn dense_dim(n_qubits: usize) -> Result<usize> {
    if n_qubits > 14 || (1usize << n_qubits) > crate::MAX_DENSE_DIM {
        return Err(Error::Capacity(format!(
            "dense dimension 2^{n_qubits} exceeds the cap {}",
            crate::MAX_DENSE_DIM
        )));
    }
    Ok(1 << n_qubits)
}

/// Bit-packed Pauli for state-vector arithmetic. Qubit `j` of an `n`-qubit
/// string maps to bit `n − 1 − j` of the basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DensePauli {
    pub n_qubits: usize,
    pub x: u64,
    pub z: u64,
    pub phase: Phase,
}

impl DensePauli {
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    #[inline]
    fn sign(&self, c: usize) -> f64 {
        if (self.z & c as u64).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    /// `P|ψ⟩`.
    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let ph = self.phase.to_complex();
        let mut out = vec![C64::new(0.0, 0.0); psi.len()];
        for (c, amp) in psi.iter().enumerate() {
            out[c ^ self.x as usize] = ph * self.sign(c) * amp;
        }
        out
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let x = self.x as usize;
        let acc: C64 = psi.iter().enumerate().map(|(c, amp)| psi[c ^ x].conj() * amp * self.sign(c)).sum();
        acc * self.phase.to_complex()
    }

    /// `⟨u|P|v⟩`.
    pub fn matrix_element(&self, u: &[C64], v: &[C64]) -> C64 {
        let x = self.x as usize;
        let acc: C64 = v.iter().enumerate().map(|(c, amp)| u[c ^ x].conj() * amp * self.sign(c)).sum();
        acc * self.phase.to_complex()
    }

    /// `M += coef · P`.
    pub fn add_to(&self, m: &mut CMatrix, coef: C64) {
        let ph = self.phase.to_complex() * coef;
        for c in 0..m.cols() {
            m[(c ^ self.x as usize, c)] += ph * self.sign(c);
        }
    }
}

/// Anticommutation predicate (symplectic form).
pub fn pauli_anticommutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.anticommutes(q)
}

/// `P · Q` with phase.
pub fn multiply_paulis(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    p.multiply(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{GaussianSampler, RandomStream};
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        PauliString::from_letters(s).unwrap()
    }

    #[test]
    fn anticommutation_examples() {
        assert!(p("XI").anticommutes(&p("ZI")).unwrap());
        assert!(!p("XX").anticommutes(&p("ZZ")).unwrap());
        assert!(!p("YI").anticommutes(&p("YI")).unwrap());
        assert!(p("X").anticommutes(&p("XX")).is_err());
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let prod = p("X").multiply(&p("Z")).unwrap();
        let (letters, phase) = prod.letters();
        assert_eq!(letters, "Y");
        assert_eq!(phase, Phase::MINUS_I);
    }

    #[test]
    fn square_is_identity_class() {
        for s in ["XYZ", "YYI", "ZXY"] {
            let q = p(s);
            let sq = q.multiply(&q).unwrap();
            assert_eq!(sq.weight(), 0);
            assert_eq!(sq.phase(), Phase::ONE);
        }
        let non_herm = p("XY").with_phase(Phase::I * p("XY").phase());
        let sq = non_herm.multiply(&non_herm).unwrap();
        assert_eq!(sq.weight(), 0);
        assert_eq!(sq.letter_phase(), Phase::MINUS_ONE);
    }

    #[test]
    fn hermiticity_rule() {
        assert!(p("XYZ").is_hermitian());
        let raw_xz = PauliString::from_letters("Y").unwrap().with_phase(Phase::ONE); // XZ = −iY
        assert!(!raw_xz.is_hermitian());
        let m = raw_xz.to_matrix().unwrap();
        assert!(m.hermiticity_error() > 0.5);
    }

    #[test]
    fn zz_matrix() {
        let m = p("ZZ").to_matrix().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn letters_round_trip_with_phase() {
        let q = PauliString::from_letters_with_phase("IYXZ", Phase::MINUS_I).unwrap();
        let (s, ph) = q.letters();
        assert_eq!(s, "IYXZ");
        assert_eq!(ph, Phase::MINUS_I);
        assert_eq!(q.weight(), 3);
    }

    fn random_pauli(g: &mut GaussianSampler, n: usize) -> PauliString {
        let letters: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][g.below(4)]).collect();
        PauliString::from_letters_with_phase(&letters, Phase::from_exponent(g.below(4) as i64)).unwrap()
    }

    #[test]
    fn product_matches_matrix_product() {
        let mut g = GaussianSampler::new(RandomStream::new(5, 0));
        for _ in 0..50 {
            let a = random_pauli(&mut g, 3);
            let b = random_pauli(&mut g, 3);
            let lhs = a.to_matrix().unwrap().matmul(&b.to_matrix().unwrap());
            let rhs = a.multiply(&b).unwrap().to_matrix().unwrap();
            assert!(lhs.sub(&rhs).max_abs() < 1e-12);
        }
    }

    #[test]
    fn symplectic_predicate_matches_matrices() {
        let mut g = GaussianSampler::new(RandomStream::new(6, 0));
        for _ in 0..500 {
            let n = 1 + g.below(4);
            let a = random_pauli(&mut g, n);
            let b = random_pauli(&mut g, n);
            let (ma, mb) = (a.to_matrix().unwrap(), b.to_matrix().unwrap());
            let anti = ma.matmul(&mb).add(&mb.matmul(&ma)).max_abs();
            let comm = ma.matmul(&mb).sub(&mb.matmul(&ma)).max_abs();
            if a.anticommutes(&b).unwrap() {
                assert!(anti < 1e-12 && comm > 1.0);
            } else {
                assert!(comm < 1e-12 && anti > 1.0);
            }
        }
    }

    #[test]
    fn dense_apply_matches_matrix() {
        let q = p("XZY");
        let d = q.to_dense().unwrap();
        let mut g = GaussianSampler::new(RandomStream::new(9, 0));
        let psi = g.haar_state(8);
        let via_matrix = q.to_matrix().unwrap().matvec(&psi);
        for (a, b) in d.apply(&psi).iter().zip(&via_matrix) {
            assert!((a - b).norm() < 1e-14);
        }
        let e = d.expectation(&psi);
        assert!((e - crate::linalg::inner(&psi, &via_matrix)).norm() < 1e-14);
    }

    #[test]
    fn wide_strings_supported() {
        let mut a = PauliString::identity(200);
        a.set_letter(150, 'X').unwrap();
        let mut b = PauliString::identity(200);
        b.set_letter(150, 'Z').unwrap();
        assert!(a.anticommutes(&b).unwrap());
        assert!(a.to_dense().is_err());
    }

    proptest! {
        #[test]
        fn product_is_associative_and_predicate_symmetric(
            a in "[IXYZ]{5}", b in "[IXYZ]{5}", c in "[IXYZ]{5}"
        ) {
            let (a, b, c) = (p(&a), p(&b), p(&c));
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(a.anticommutes(&b).unwrap(), b.anticommutes(&a).unwrap());
            // PQ = ±QP with the sign given by the predicate
            let pq = a.multiply(&b).unwrap();
            let qp = b.multiply(&a).unwrap();
            let flip = if a.anticommutes(&b).unwrap() { Phase::MINUS_ONE } else { Phase::ONE };
            prop_assert_eq!(pq.phase(), qp.phase() * flip);
        }
    }
}
