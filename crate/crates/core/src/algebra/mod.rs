//! Pauli strings, Majorana monomials and operator sets.

mod majorana;
mod pauli;
mod set;

pub use majorana::{jordan_wigner_majorana, majorana_anticommutes, MajoranaMonomial};
pub use pauli::{multiply_paulis, pauli_anticommutes, DensePauli, Phase, PauliString};
pub use set::{
    enumerate_set, materialize, Members, Operator, OperatorKind, OperatorSet, Provenance, MAX_ENUMERATION,
};

pub(crate) use set::weighted_sum;

/// All `k`-subsets of `{0..n}` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else { break };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// `C(n, k)` saturating at `u128::MAX`.
pub(crate) fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_lexicographic() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
        assert_eq!(combinations(10, 4).len(), 210);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_u128(40, 20), 137_846_528_820);
        assert_eq!(binomial_u128(5, 7), 0);
    }
}
