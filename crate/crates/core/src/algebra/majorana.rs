use std::fmt;

use crate::error::{input, Result};

use super::pauli::{Phase, PauliString};

/// Product `γ_{j₁} γ_{j₂} ⋯ γ_{j_q}` of distinct Majorana operators on an even
/// number of modes.
///
/// Indices are 1-based at the public boundary ([`MajoranaMonomial::new`],
/// [`MajoranaMonomial::indices`]) and 0-based internally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MajoranaMonomial {
    n_modes: usize,
    support: Vec<usize>,
}

fn check_modes(n_modes: usize) -> Result<()> {
    if n_modes == 0 || n_modes % 2 == 1 {
        return input(format!("mode count must be positive and even, got {n_modes}"));
    }
    Ok(())
}

impl MajoranaMonomial {
    /// `indices` are 1-based and must be strictly increasing.
    pub fn new(n_modes: usize, indices: &[usize]) -> Result<Self> {
        check_modes(n_modes)?;
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return input(format!("Majorana indices must be strictly increasing: {indices:?}"));
            }
        }
        if let Some(&bad) = indices.iter().find(|&&j| j == 0 || j > n_modes) {
            return input(format!("Majorana index {bad} outside 1..={n_modes}"));
        }
        Ok(Self { n_modes, support: indices.iter().map(|j| j - 1).collect() })
    }

    pub(crate) fn from_zero_based(n_modes: usize, support: Vec<usize>) -> Self {
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        Self { n_modes, support }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn degree(&self) -> usize {
        self.support.len()
    }

    /// 1-based indices.
    pub fn indices(&self) -> Vec<usize> {
        self.support.iter().map(|j| j + 1).collect()
    }

    pub(crate) fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn overlap(&self, other: &Self) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        let (a, b) = (&self.support, &other.support);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// True iff `q_S·q_T − |S∩T|` is odd.
    pub fn anticommutes(&self, other: &Self) -> Result<bool> {
        if self.n_modes != other.n_modes {
            return input(format!("mode count mismatch: {} vs {}", self.n_modes, other.n_modes));
        }
        Ok((self.degree() * other.degree() + self.overlap(other)) % 2 == 1)
    }

    /// Jordan–Wigner image on `n/2` qubits. With `hermitize`, the product
    /// is multiplied by `i^{q/2}` (even `q` only), which makes it Hermitian.
    pub fn to_pauli(&self, hermitize: bool) -> Result<PauliString> {
        let q = self.degree();
        if hermitize && q % 2 == 1 {
            return input(format!("cannot hermitize odd-degree monomial (q = {q})"));
        }
        let mut acc = PauliString::identity(self.n_modes / 2);
        for &j in &self.support {
            acc = acc.multiply(&jordan_wigner_majorana(j + 1, self.n_modes)?)?;
        }
        if hermitize {
            let ph = acc.phase() * Phase::from_exponent((q / 2) as i64);
            acc = acc.with_phase(ph);
        }
        Ok(acc)
    }
}

impl fmt::Display for MajoranaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|j| format!("g{j}")).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// `γ_j` on `n` modes (1-based `j`): `γ_{2t−1} ↦ Z^{⊗(t−1)} X`, `γ_{2t} ↦ Z^{⊗(t−1)} Y`.
pub fn jordan_wigner_majorana(j: usize, n_modes: usize) -> Result<PauliString> {
    check_modes(n_modes)?;
    if j == 0 || j > n_modes {
        return input(format!("Majorana index {j} outside 1..={n_modes}"));
    }
    let site = (j - 1) / 2;
    let mut letters = vec!['I'; n_modes / 2];
    letters[..site].fill('Z');
    letters[site] = if j % 2 == 1 { 'X' } else { 'Y' };
    PauliString::from_letters(&letters.into_iter().collect::<String>())
}

pub fn majorana_anticommutes(s: &MajoranaMonomial, t: &MajoranaMonomial) -> Result<bool> {
    s.anticommutes(t)
}
