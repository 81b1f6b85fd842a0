//! Johnson association scheme `J(m, r)` and its dual Hahn eigenvalues.
//!
//! Class `d` joins two `r`-subsets of `[m]` whose intersection has size
//! `r − d`. All class matrices commute; on the `x`-th common eigenspace class
//! `d` acts as the integer
//! `H̃_d(x) = Σ_{j=0}^{d} (−1)^{d−j} C(r−j, d−j) C(r−x, j) C(m−r+j−x, j)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{binomial_u128, combinations};
use crate::error::{capacity, input, Result};
use crate::linalg::{eigvalsh, DenseHermitian};

/// Largest scheme (number of `r`-subsets) handled by the dense checks.
pub const MAX_SCHEME_VERTICES: u128 = 2000;

/// Exact binomial with `C(a, b) = 0` when `b < 0` or `a < b`.
pub fn binomial(a: i64, b: i64) -> BigInt {
    if b < 0 || a < b {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

pub fn dual_hahn(m: usize, r: usize, d: usize, x: usize) -> Result<BigInt> {
    if !(d <= r && r <= m && x <= r) {
        return input(format!("need 0 ≤ d ≤ r ≤ m and x ≤ r, got m={m} r={r} d={d} x={x}"));
    }
    Ok(dual_hahn_unchecked(m as i64, r as i64, d as i64, x as i64))
}

fn dual_hahn_unchecked(m: i64, r: i64, d: i64, x: i64) -> BigInt {
    (0..=d)
        .map(|j| {
            let term = binomial(r - j, d - j) * binomial(r - x, j) * binomial(m - r + j - x, j);
            if (d - j) % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// `values[d][x] = H̃^{m,r}_d(x)` for `0 ≤ d, x ≤ r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HahnTable {
    pub m: usize,
    pub r: usize,
    pub values: Vec<Vec<BigInt>>,
}

impl HahnTable {
    pub fn new(m: usize, r: usize) -> Result<Self> {
        if r > m {
            return input(format!("need r ≤ m, got m={m} r={r}"));
        }
        let values = (0..=r)
            .map(|d| (0..=r).map(|x| dual_hahn_unchecked(m as i64, r as i64, d as i64, x as i64)).collect())
            .collect();
        Ok(Self { m, r, values })
    }

    pub fn get(&self, d: usize, x: usize) -> &BigInt {
        &self.values[d][x]
    }

    /// Long-format CSV with header `m,r,d,x,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,r,d,x,value\n");
        for (d, row) in self.values.iter().enumerate() {
            for (x, v) in row.iter().enumerate() {
                let _ = writeln!(s, "{},{},{d},{x},{v}", self.m, self.r);
            }
        }
        s
    }
}

fn check_scheme_size(m: usize, r: usize) -> Result<usize> {
    if r > m {
        return input(format!("need r ≤ m, got m={m} r={r}"));
    }
    let count = binomial_u128(m, r);
    if count > MAX_SCHEME_VERTICES {
        return capacity(format!("J({m},{r}) has {count} vertices, limit {MAX_SCHEME_VERTICES}"));
    }
    Ok(count as usize)
}

/// 0/1 matrix of class `d` over the `r`-subsets of `[m]` in lexicographic order.
pub fn johnson_adjacency(m: usize, r: usize, d: usize) -> Result<DenseHermitian> {
    let n = check_scheme_size(m, r)?;
    if d > r {
        return input(format!("class {d} exceeds r = {r}"));
    }
    let subsets = combinations(m, r);
    let masks: Vec<u128> = subsets.iter().map(|s| s.iter().fold(0u128, |acc, &i| acc | 1 << i)).collect();
    debug_assert_eq!(masks.len(), n);
    if m > 128 {
        return capacity("ground set larger than 128");
    }
    DenseHermitian::from_real_symmetric(n, |a, b| {
        let common = (masks[a] & masks[b]).count_ones() as usize;
        if r - common == d {
            1.0
        } else {
            0.0
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenvalueCount {
    pub value: i64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectedEigenvalue {
    pub x: usize,
    pub value: String,
    /// Observed multiplicity of this value (shared with any coincident `x`).
    pub observed_multiplicity: usize,
    /// Other eigenspaces carrying the same value.
    pub coincident_with: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassCheck {
    pub d: usize,
    pub matched: bool,
    pub max_rounding_error: f64,
    pub expected: Vec<ExpectedEigenvalue>,
    pub observed: Vec<EigenvalueCount>,
    pub unexplained: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemeReport {
    pub m: usize,
    pub r: usize,
    pub vertices: usize,
    pub eigenspaces: usize,
    pub all_matched: bool,
    pub classes: Vec<ClassCheck>,
}

impl SchemeReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Diagonalizes every class matrix of `J(m, r)` and compares its distinct
/// eigenvalues with the dual Hahn values `H̃_d(x)`, `x = 0..min(r, m−r)`.
/// Mismatches are reported, not raised.
pub fn verify_scheme_spectrum(m: usize, r: usize) -> Result<SchemeReport> {
    let vertices = check_scheme_size(m, r)?;
    let table = HahnTable::new(m, r)?;
    let xmax = r.min(m - r);
    let mut classes = Vec::with_capacity(r + 1);
    for d in 0..=r {
        let eig = eigvalsh(&johnson_adjacency(m, r, d)?)?;
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        let mut max_rounding_error: f64 = 0.0;
        for &e in &eig {
            let rounded = e.round();
            max_rounding_error = max_rounding_error.max((e - rounded).abs());
            *counts.entry(rounded as i64).or_default() += 1;
        }
        let expected_values: Vec<BigInt> = (0..=xmax).map(|x| table.get(d, x).clone()).collect();
        let expected: Vec<ExpectedEigenvalue> = (0..=xmax)
            .map(|x| {
                let v = &expected_values[x];
                let as_i64 = i64::try_from(v.clone()).ok();
                ExpectedEigenvalue {
                    x,
                    value: v.to_string(),
                    observed_multiplicity: as_i64.and_then(|k| counts.get(&k).copied()).unwrap_or(0),
                    coincident_with: (0..=xmax).filter(|&y| y != x && expected_values[y] == *v).collect(),
                }
            })
            .collect();
        let unexplained: Vec<i64> =
            counts.keys().copied().filter(|k| !expected_values.contains(&BigInt::from(*k))).collect();
        let matched = max_rounding_error <= 1e-8
            && unexplained.is_empty()
            && expected.iter().all(|e| e.observed_multiplicity > 0);
        classes.push(ClassCheck {
            d,
            matched,
            max_rounding_error,
            expected,
            observed: counts.into_iter().map(|(value, multiplicity)| EigenvalueCount { value, multiplicity }).collect(),
            unexplained,
        });
    }
    Ok(SchemeReport {
        m,
        r,
        vertices,
        eigenspaces: xmax + 1,
        all_matched: classes.iter().all(|c| c.matched),
        classes,
    })
}
