use std::collections::HashSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{capacity, input, Error, Result};
use crate::linalg::{CMatrix, DenseHermitian, C64};

use super::majorana::MajoranaMonomial;
use super::pauli::{dense_dim, DensePauli, Phase, PauliString};
use super::{binomial_u128, combinations};

/// Largest enumeration [`enumerate_set`] will produce.
pub const MAX_ENUMERATION: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Pauli,
    Majorana,
}

impl std::str::FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pauli" => Ok(Self::Pauli),
            "majorana" => Ok(Self::Majorana),
            _ => input(format!("unknown operator kind {s:?} (expected pauli or majorana)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Enumerated,
    TernaryTree,
    CommutingFamily,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Members {
    Pauli(Vec<PauliString>),
    Majorana(Vec<MajoranaMonomial>),
}

/// Homogeneous, duplicate-free list of Pauli strings or Majorana monomials.
///
/// `n` counts qubits for Pauli sets and modes for Majorana sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSet {
    n: usize,
    locality: usize,
    members: Members,
    provenance: Provenance,
}

impl OperatorSet {
    pub fn from_paulis(
        n_qubits: usize,
        locality: usize,
        members: Vec<PauliString>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for p in &members {
            if p.n_qubits() != n_qubits {
                return input(format!("member {p} is not on {n_qubits} qubits"));
            }
            if !seen.insert(p.letters().0) {
                return input(format!("duplicate member {p}"));
            }
        }
        Ok(Self { n: n_qubits, locality, members: Members::Pauli(members), provenance })
    }

    pub fn from_majoranas(
        n_modes: usize,
        locality: usize,
        members: Vec<MajoranaMonomial>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for m in &members {
            if m.n_modes() != n_modes {
                return input(format!("member {m} is not on {n_modes} modes"));
            }
            if !seen.insert(m.support().to_vec()) {
                return input(format!("duplicate member {m}"));
            }
        }
        Ok(Self { n: n_modes, locality, members: Members::Majorana(members), provenance })
    }

    pub fn kind(&self) -> OperatorKind {
        match self.members {
            Members::Pauli(_) => OperatorKind::Pauli,
            Members::Majorana(_) => OperatorKind::Majorana,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn locality(&self) -> usize {
        self.locality
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn members(&self) -> &Members {
        &self.members
    }

    pub fn len(&self) -> usize {
        match &self.members {
            Members::Pauli(v) => v.len(),
            Members::Majorana(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Qubits in the dense representation (`n/2` for Majorana sets).
    pub fn n_qubits(&self) -> usize {
        match self.kind() {
            OperatorKind::Pauli => self.n,
            OperatorKind::Majorana => self.n / 2,
        }
    }

    /// Hilbert-space dimension of the dense representation.
    pub fn dim(&self) -> Result<usize> {
        dense_dim(self.n_qubits())
    }

    /// Kind-appropriate anticommutation predicate between members `i` and `j`.
    pub fn anticommutes(&self, i: usize, j: usize) -> bool {
        match &self.members {
            Members::Pauli(v) => v[i].anticommutes(&v[j]).expect("homogeneous set"),
            Members::Majorana(v) => v[i].anticommutes(&v[j]).expect("homogeneous set"),
        }
    }

    pub fn label(&self, i: usize) -> String {
        match &self.members {
            Members::Pauli(v) => v[i].to_string(),
            Members::Majorana(v) => v[i].to_string(),
        }
    }

    /// Hermitian Pauli form of every member (Majoranas through Jordan–Wigner
    /// with the `i^{q/2}` phase).
    pub fn hermitian_paulis(&self) -> Result<Vec<PauliString>> {
        match &self.members {
            Members::Pauli(v) => v.iter().map(hermitize_pauli).collect(),
            Members::Majorana(v) => v.iter().map(|m| m.to_pauli(true)).collect(),
        }
    }

    /// Packed Hermitian terms for state-vector arithmetic.
    pub fn dense_terms(&self) -> Result<Vec<DensePauli>> {
        self.dim()?;
        self.hermitian_paulis()?.iter().map(|p| p.to_dense()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn hermitize_pauli(p: &PauliString) -> Result<PauliString> {
    if p.is_hermitian() {
        Ok(p.clone())
    } else {
        Ok(p.clone().with_phase(p.phase() * Phase::MINUS_I))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MemberJson {
    Pauli { pauli: String, phase: String },
    Majorana(Vec<usize>),
}

#[derive(Serialize, Deserialize)]
struct SetJson {
    kind: OperatorKind,
    n: usize,
    locality: usize,
    provenance: Provenance,
    members: Vec<MemberJson>,
}

fn parse_phase(s: &str) -> Result<Phase> {
    match s {
        "+1" | "1" => Ok(Phase::ONE),
        "+i" | "i" => Ok(Phase::I),
        "-1" => Ok(Phase::MINUS_ONE),
        "-i" => Ok(Phase::MINUS_I),
        _ => input(format!("invalid phase {s:?}")),
    }
}

impl Serialize for OperatorSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let members = match &self.members {
            Members::Pauli(v) => v
                .iter()
                .map(|p| {
                    let (pauli, ph) = p.letters();
                    MemberJson::Pauli { pauli, phase: ph.to_string() }
                })
                .collect(),
            Members::Majorana(v) => v.iter().map(|m| MemberJson::Majorana(m.indices())).collect(),
        };
        SetJson { kind: self.kind(), n: self.n, locality: self.locality, provenance: self.provenance, members }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OperatorSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SetJson::deserialize(deserializer)?;
        let built = match raw.kind {
            OperatorKind::Pauli => {
                let members = raw
                    .members
                    .into_iter()
                    .map(|m| match m {
                        MemberJson::Pauli { pauli, phase } => {
                            PauliString::from_letters_with_phase(&pauli, parse_phase(&phase)?)
                        }
                        MemberJson::Majorana(_) => input("index array inside a pauli set"),
                    })
                    .collect::<Result<Vec<_>>>();
                members.and_then(|m| Self::from_paulis(raw.n, raw.locality, m, raw.provenance))
            }
            OperatorKind::Majorana => {
                let members = raw
                    .members
                    .into_iter()
                    .map(|m| match m {
                        MemberJson::Majorana(idx) => MajoranaMonomial::new(raw.n, &idx),
                        MemberJson::Pauli { .. } => input("pauli string inside a majorana set"),
                    })
                    .collect::<Result<Vec<_>>>();
                members.and_then(|m| Self::from_majoranas(raw.n, raw.locality, m, raw.provenance))
            }
        };
        built.map_err(D::Error::custom)
    }
}

/// Either kind of operator, for [`materialize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operator {
    Pauli(PauliString),
    Majorana(MajoranaMonomial),
}

impl From<PauliString> for Operator {
    fn from(p: PauliString) -> Self {
        Operator::Pauli(p)
    }
}

impl From<MajoranaMonomial> for Operator {
    fn from(m: MajoranaMonomial) -> Self {
        Operator::Majorana(m)
    }
}

impl Operator {
    /// Pauli form. For Majoranas `hermitize` applies `i^{q/2}`; for Paulis it
    /// multiplies an anti-Hermitian string by `−i`.
    pub fn to_pauli(&self, hermitize: bool) -> Result<PauliString> {
        match self {
            Operator::Pauli(p) if hermitize => hermitize_pauli(p),
            Operator::Pauli(p) => Ok(p.clone()),
            Operator::Majorana(m) => m.to_pauli(hermitize),
        }
    }

    /// Dense matrix, Hermitian or not.
    pub fn to_matrix(&self, hermitize: bool) -> Result<CMatrix> {
        self.to_pauli(hermitize)?.to_matrix()
    }
}

/// Dense Hermitian matrix of `op`. Pauli strings act on `2^n`, Majorana
/// monomials on `2^{n/2}` dimensions; dimensions above `2^14` are rejected.
/// Fails with an input error if the requested form is not Hermitian.
pub fn materialize(op: &Operator, hermitize: bool) -> Result<DenseHermitian> {
    let p = op.to_pauli(hermitize)?;
    if !p.is_hermitian() {
        return input(format!("{p} is not Hermitian; request the hermitized form"));
    }
    DenseHermitian::new(p.to_matrix()?)
}

/// Complete lexicographic enumeration of `Pⁿₖ` (exactly weight-`k` strings,
/// ordered by support then by letters over `X < Y < Z`) or `Sⁿ_q`.
pub fn enumerate_set(kind: OperatorKind, n: usize, locality: usize) -> Result<OperatorSet> {
    if n == 0 || locality == 0 || locality > n {
        return input(format!("need 1 ≤ locality ≤ n, got n = {n}, locality = {locality}"));
    }
    let count = match kind {
        OperatorKind::Pauli => binomial_u128(n, locality).saturating_mul(3u128.saturating_pow(locality as u32)),
        OperatorKind::Majorana => binomial_u128(n, locality),
    };
    if count > MAX_ENUMERATION {
        return capacity(format!("enumeration of {count} operators exceeds {MAX_ENUMERATION}"));
    }
    let supports = combinations(n, locality);
    match kind {
        OperatorKind::Majorana => {
            if n % 2 == 1 {
                return input(format!("Majorana mode count must be even, got {n}"));
            }
            let members = supports.into_iter().map(|s| MajoranaMonomial::from_zero_based(n, s)).collect();
            OperatorSet::from_majoranas(n, locality, members, Provenance::Enumerated)
        }
        OperatorKind::Pauli => {
            let mut members = Vec::with_capacity(count as usize);
            let words = 3usize.pow(locality as u32);
            for support in &supports {
                for w in 0..words {
                    let mut letters = vec!['I'; n];
                    let mut code = w;
                    for &site in support.iter().rev() {
                        letters[site] = ['X', 'Y', 'Z'][code % 3];
                        code /= 3;
                    }
                    members.push(PauliString::from_letters(&letters.into_iter().collect::<String>())?);
                }
            }
            OperatorSet::from_paulis(n, locality, members, Provenance::Enumerated)
        }
    }
}

/// `Σ_i c_i A_i` for Hermitian Pauli terms.
pub(crate) fn weighted_sum(terms: &[DensePauli], coefs: &[f64], dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for (t, &c) in terms.iter().zip(coefs) {
        t.add_to(&mut m, C64::new(c, 0.0));
    }
    m
}
