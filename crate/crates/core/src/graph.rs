//! Commutation graphs and the structured families built on them.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{
    combinations, MajoranaMonomial, OperatorSet, PauliString, Provenance,
};
use crate::error::{capacity, input, Error, Result};
use crate::linalg::{normalize, GaussianSampler, RandomStream, C64};

/// Largest operator set turned into a graph.
pub const MAX_GRAPH_VERTICES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegreeStats {
    pub max: usize,
    pub min: usize,
    pub mean: f64,
}

/// Simple undirected graph stored as one bitset per vertex. For commutation
/// graphs, vertex `i` is member `i` of the operator set and edges join
/// anticommuting pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationGraph {
    labels: Vec<String>,
    adjacency: Vec<Vec<u64>>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

impl CommutationGraph {
    pub fn edgeless(n: usize) -> Self {
        Self { labels: (0..n).map(|i| i.to_string()).collect(), adjacency: vec![vec![0; words(n)]; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::edgeless(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return input(format!("edge ({u},{v}) outside {n} vertices"));
            }
            if u == v {
                return input(format!("self-loop at {u}"));
            }
            g.set_edge(u, v);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::edgeless(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return input("a cycle needs at least 3 vertices");
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return input("label count does not match vertex count");
        }
        self.labels = labels;
        Ok(self)
    }

    fn set_edge(&mut self, u: usize, v: usize) {
        self.adjacency[u][v / 64] |= 1 << (v % 64);
        self.adjacency[v][u / 64] |= 1 << (u % 64);
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u][v / 64] >> (v % 64) & 1 == 1
    }

    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.has_edge(u, v)).collect()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.len()).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.len() {
            for v in u + 1..self.len() {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn degree_stats(&self) -> DegreeStats {
        if self.is_empty() {
            return DegreeStats { max: 0, min: 0, mean: 0.0 };
        }
        let d: Vec<usize> = (0..self.len()).map(|u| self.degree(u)).collect();
        DegreeStats {
            max: *d.iter().max().unwrap(),
            min: *d.iter().min().unwrap(),
            mean: d.iter().sum::<usize>() as f64 / d.len() as f64,
        }
    }

    /// True iff no two of `vertices` are adjacent.
    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| vertices[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }

    /// `{"vertices": [...], "adjacency": [[...], ...], "degree_stats": {...}}`.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct GraphJson<'a> {
            vertices: &'a [String],
            adjacency: Vec<Vec<usize>>,
            degree_stats: DegreeStats,
        }
        let adjacency = (0..self.len()).map(|u| self.neighbors(u)).collect();
        Ok(serde_json::to_string_pretty(&GraphJson {
            vertices: &self.labels,
            adjacency,
            degree_stats: self.degree_stats(),
        })?)
    }

    /// Edge list with header `source,target` (0-based vertex positions).
    pub fn to_edge_csv(&self) -> String {
        let mut s = String::from("source,target\n");
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u},{v}");
        }
        s
    }
}

pub fn commutation_graph(set: &OperatorSet) -> Result<CommutationGraph> {
    let n = set.len();
    if n > MAX_GRAPH_VERTICES {
        return capacity(format!("{n} vertices exceeds the graph limit {MAX_GRAPH_VERTICES}"));
    }
    let adjacency: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut row = vec![0u64; words(n)];
            for v in 0..n {
                if v != u && set.anticommutes(u, v) {
                    row[v / 64] |= 1 << (v % 64);
                }
            }
            row
        })
        .collect();
    Ok(CommutationGraph { labels: (0..n).map(|i| set.label(i)).collect(), adjacency })
}

/// Maximum vertex degree.
pub fn commutation_degree(g: &CommutationGraph) -> usize {
    g.degree_stats().max
}

/// Degree of every vertex of `G(Sⁿ_q)`: `Σ_{s odd} C(q,s)·C(n−q,q−s)`.
pub fn majorana_graph_degree(n: usize, q: usize) -> u128 {
    use crate::algebra::binomial_u128 as c;
    (1..=q).step_by(2).map(|s| c(q, s).saturating_mul(c(n - q, q - s))).fold(0u128, u128::saturating_add)
}

/// `(q/2)`-wise products of the pairs `γ₁γ₂, γ₃γ₄, …, γ_{n−1}γ_n`.
pub fn commuting_majorana_family(n: usize, q: usize) -> Result<OperatorSet> {
    if n == 0 || n % 2 == 1 || q == 0 || q % 2 == 1 || q > n {
        return input(format!("need even 0 < q ≤ n with n even, got n = {n}, q = {q}"));
    }
    let count = crate::algebra::binomial_u128(n / 2, q / 2);
    if count > crate::algebra::MAX_ENUMERATION {
        return capacity(format!("family of {count} operators too large"));
    }
    let members = combinations(n / 2, q / 2)
        .into_iter()
        .map(|pairs| MajoranaMonomial::from_zero_based(n, pairs.iter().flat_map(|&p| [2 * p, 2 * p + 1]).collect()))
        .collect();
    OperatorSet::from_majoranas(n, q, members, Provenance::CommutingFamily)
}

/// `3ᵏ` pairwise anticommuting Pauli strings of weight `k` on `(3ᵏ − 1)/2`
/// qubits, one per leaf of the complete ternary tree whose internal nodes are
/// qubits. Node `v` has children `3v+1, 3v+2, 3v+3`; branch 0/1/2 places
/// X/Y/Z on `v`.
pub fn ternary_tree_paulis(k: usize) -> Result<OperatorSet> {
    if k == 0 {
        return input("ternary tree depth must be at least 1");
    }
    if k > 6 {
        return capacity(format!("ternary tree depth {k} exceeds 6"));
    }
    let leaves = 3usize.pow(k as u32);
    let n_qubits = (leaves - 1) / 2;
    let mut members = Vec::with_capacity(leaves);
    for leaf in 0..leaves {
        let mut letters = vec!['I'; n_qubits];
        let mut node = 0usize;
        for level in (0..k).rev() {
            let branch = leaf / 3usize.pow(level as u32) % 3;
            letters[node] = ['X', 'Y', 'Z'][branch];
            node = 3 * node + 1 + branch;
        }
        members.push(PauliString::from_letters(&letters.into_iter().collect::<String>())?);
    }
    OperatorSet::from_paulis(n_qubits, k, members, Provenance::TernaryTree)
}

/// Largest independent set found by branch and bound within `node_budget`
/// search nodes, and whether the search finished (so the set is maximum).
pub fn max_independent_set(g: &CommutationGraph, node_budget: usize) -> (Vec<usize>, bool) {
    struct Search<'a> {
        g: &'a CommutationGraph,
        best: Vec<usize>,
        nodes: usize,
        budget: usize,
    }
    impl Search<'_> {
        fn go(&mut self, current: &mut Vec<usize>, candidates: Vec<usize>) {
            if self.nodes >= self.budget {
                return;
            }
            self.nodes += 1;
            if current.len() > self.best.len() {
                self.best = current.clone();
            }
            if current.len() + candidates.len() <= self.best.len() {
                return;
            }
            // branch on the candidate with fewest neighbours among the candidates
            let deg = |u: usize| candidates.iter().filter(|&&v| self.g.has_edge(u, v)).count();
            let Some(&v) = candidates.iter().min_by_key(|&&u| deg(u)) else { return };
            let keep: Vec<usize> = candidates.iter().copied().filter(|&u| u != v && !self.g.has_edge(u, v)).collect();
            current.push(v);
            self.go(current, keep);
            current.pop();
            let rest: Vec<usize> = candidates.into_iter().filter(|&u| u != v).collect();
            self.go(current, rest);
        }
    }
    let mut s = Search { g, best: Vec::new(), nodes: 0, budget: node_budget.max(1) };
    s.go(&mut Vec::new(), (0..g.len()).collect());
    let complete = s.nodes < s.budget;
    let mut best = s.best;
    best.sort_unstable();
    (best, complete)
}

/// Number of attempts before [`stabilized_state`] gives up.
pub const STABILIZER_RETRIES: usize = 16;

/// Unit vector in the joint `+1` eigenspace of a commuting family, obtained by
/// applying `Π (I + B)/2` to seeded Gaussian trial vectors.
pub fn stabilized_state(family: &OperatorSet, dim: usize, seed: u64) -> Result<Vec<C64>> {
    let fam_dim = family.dim()?;
    if dim != fam_dim {
        return input(format!("dimension {dim} does not match the family's {fam_dim}"));
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if family.anticommutes(i, j) {
                return input(format!("members {} and {} anticommute", family.label(i), family.label(j)));
            }
        }
    }
    let terms = family.dense_terms()?;
    for attempt in 0..STABILIZER_RETRIES {
        let mut sampler = GaussianSampler::new(RandomStream::new(seed, attempt as u64));
        let mut psi = sampler.haar_state(dim);
        for t in &terms {
            let b = t.apply(&psi);
            for (p, bp) in psi.iter_mut().zip(&b) {
                *p = 0.5 * (*p + bp);
            }
        }
        if normalize(&mut psi) > 1e-6 {
            let worst = terms.iter().map(|t| (t.expectation(&psi).re - 1.0).abs()).fold(0.0, f64::max);
            if worst > 1e-9 {
                return Err(Error::Structural(format!("stabilizer expectation off by {worst:e}")));
            }
            return Ok(psi);
        }
    }
    Err(Error::Degeneracy(format!("projector annihilated {STABILIZER_RETRIES} trial vectors")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{enumerate_set, OperatorKind};

    #[test]
    fn small_graphs() {
        let one = enumerate_set(OperatorKind::Majorana, 4, 4).unwrap();
        let g = commutation_graph(&one).unwrap();
        assert_eq!((g.len(), g.edge_count(), commutation_degree(&g)), (1, 0, 0));
        let xyz = OperatorSet::from_paulis(
            1,
            1,
            ["X", "Y", "Z"].iter().map(|s| PauliString::from_letters(s).unwrap()).collect(),
            Provenance::Custom,
        )
        .unwrap();
        assert_eq!(commutation_graph(&xyz).unwrap(), CommutationGraph::complete(3).with_labels(vec!["X".into(), "Y".into(), "Z".into()]).unwrap());
        assert_eq!(commutation_degree(&CommutationGraph::edgeless(4)), 0);
    }

    #[test]
    fn majorana_degrees_regular() {
        for (n, q, d) in [(6, 2, 8), (8, 4, 32), (8, 2, 12), (10, 4, 104)] {
            let g = commutation_graph(&enumerate_set(OperatorKind::Majorana, n, q).unwrap()).unwrap();
            let s = g.degree_stats();
            assert_eq!((s.max, s.min), (d, d), "({n},{q})");
            assert_eq!(majorana_graph_degree(n, q), d as u128);
        }
    }

    #[test]
    fn graph_export() {
        let g = CommutationGraph::cycle(4).unwrap();
        assert_eq!(g.to_edge_csv(), "source,target\n0,1\n0,3\n1,2\n2,3\n");
        let v: serde_json::Value = serde_json::from_str(&g.to_json().unwrap()).unwrap();
        assert_eq!(v["adjacency"][0], serde_json::json!([1, 3]));
        assert_eq!(v["degree_stats"]["max"], 2);
    }

    #[test]
    fn commuting_family() {
        let f = commuting_majorana_family(6, 2).unwrap();
        let crate::algebra::Members::Majorana(m) = f.members() else { panic!() };
        let idx: Vec<_> = m.iter().map(|x| x.indices()).collect();
        assert_eq!(idx, vec![vec![1, 2], vec![3, 4], vec![5, 6]]);
        assert_eq!(commuting_majorana_family(8, 4).unwrap().len(), 6);
        for (n, q) in [(4, 2), (8, 4), (12, 6)] {
            let g = commutation_graph(&commuting_majorana_family(n, q).unwrap()).unwrap();
            assert_eq!(g.edge_count(), 0);
        }
        assert!(commuting_majorana_family(6, 3).is_err());
        assert!(commuting_majorana_family(7, 2).is_err());
    }

    #[test]
    fn ternary_tree() {
        let t1 = ternary_tree_paulis(1).unwrap();
        assert_eq!((0..3).map(|i| t1.label(i)).collect::<Vec<_>>(), ["X", "Y", "Z"]);
        for k in 1..=4 {
            let t = ternary_tree_paulis(k).unwrap();
            assert_eq!(t.len(), 3usize.pow(k as u32));
            assert_eq!(t.n_qubits(), (3usize.pow(k as u32) - 1) / 2);
            let g = commutation_graph(&t).unwrap();
            assert_eq!(g.edge_count(), t.len() * (t.len() - 1) / 2);
            let crate::algebra::Members::Pauli(ps) = t.members() else { panic!() };
            assert!(ps.iter().all(|p| p.weight() == k));
        }
        assert!(ternary_tree_paulis(0).is_err());
        assert!(matches!(ternary_tree_paulis(7), Err(Error::Capacity(_))));
    }

    #[test]
    fn stabilized_states() {
        let z1 = OperatorSet::from_paulis(2, 1, vec![PauliString::from_letters("ZI").unwrap()], Provenance::Custom).unwrap();
        let psi = stabilized_state(&z1, 4, 1).unwrap();
        assert!(psi[2].norm() < 1e-12 && psi[3].norm() < 1e-12);
        for (n, q) in [(6, 2), (8, 4)] {
            let fam = commuting_majorana_family(n, q).unwrap();
            let psi = stabilized_state(&fam, 1 << (n / 2), 7).unwrap();
            for t in fam.dense_terms().unwrap() {
                assert!((t.expectation(&psi).re - 1.0).abs() < 1e-10);
            }
        }
        assert!(stabilized_state(&z1, 8, 1).is_err());
    }

    #[test]
    fn empty_joint_eigenspace_is_degenerate() {
        let fam = OperatorSet::from_paulis(
            2,
            2,
            vec![PauliString::from_letters("ZZ").unwrap(), PauliString::from_letters("XX").unwrap(), PauliString::from_letters_with_phase("YY", crate::algebra::Phase::ONE).unwrap()],
            Provenance::Custom,
        )
        .unwrap();
        // ZZ·XX = −YY, so +1 on ZZ and XX forces −1 on YY
        assert!(matches!(stabilized_state(&fam, 4, 3), Err(Error::Degeneracy(_))));
    }

    #[test]
    fn independent_sets() {
        assert_eq!(max_independent_set(&CommutationGraph::cycle(5).unwrap(), 1000), (vec![0, 2], true));
        assert_eq!(max_independent_set(&CommutationGraph::complete(3), 1000).0.len(), 1);
        assert_eq!(max_independent_set(&CommutationGraph::edgeless(4), 1000).0.len(), 4);
        // the 14 weight-4 words of the extended Hamming code commute pairwise
        let g = commutation_graph(&enumerate_set(OperatorKind::Majorana, 8, 4).unwrap()).unwrap();
        let (set, complete) = max_independent_set(&g, 1 << 20);
        assert!(complete && g.is_independent(&set));
        assert_eq!(set.len(), 14);
    }
}
