//! Dense exact simplex for `max cᵀx  s.t.  Ax ≤ b, x ≥ 0` with `b ≥ 0`.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{input, Error, Result};

/// Optimal primal/dual pair. `dual` solves `min bᵀy  s.t.  Aᵀy ≥ c, y ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<BigRational>,
    pub dual: Vec<BigRational>,
    pub value: BigRational,
    pub pivots: usize,
}

impl LpSolution {
    /// Exact primal feasibility, dual feasibility and zero duality gap.
    pub fn verify(&self, c: &[BigRational], a: &[Vec<BigRational>], b: &[BigRational]) -> bool {
        let primal = self.x.iter().all(|v| !v.is_negative())
            && a.iter().zip(b).all(|(row, bi)| dot(row, &self.x) <= *bi);
        let dual = self.dual.iter().all(|v| !v.is_negative())
            && (0..c.len()).all(|j| {
                let col: BigRational = a.iter().zip(&self.dual).map(|(row, y)| &row[j] * y).sum();
                col >= c[j]
            });
        primal && dual && dot(c, &self.x) == self.value && dot(b, &self.dual) == self.value
    }
}

fn dot(u: &[BigRational], v: &[BigRational]) -> BigRational {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Tableau simplex with Bland's rule, started at the slack basis.
pub fn maximize(c: &[BigRational], a: &[Vec<BigRational>], b: &[BigRational]) -> Result<LpSolution> {
    let (m, n) = (a.len(), c.len());
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return input("inconsistent LP dimensions");
    }
    if b.iter().any(|v| v.is_negative()) {
        return input("right-hand side must be nonnegative so the origin is feasible");
    }
    let width = n + m;
    let mut t: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|k| if k == i { BigRational::from_integer(1.into()) } else { BigRational::zero() }));
            r.push(b[i].clone());
            r
        })
        .collect();
    // reduced costs; last entry is minus the objective value
    let mut obj: Vec<BigRational> = c.to_vec();
    obj.extend(std::iter::repeat_n(BigRational::zero(), m + 1));
    let mut basis: Vec<usize> = (n..width).collect();
    let mut pivots = 0;
    let cap = 10_000 + 100 * width;
    while let Some(e) = (0..width).find(|&j| obj[j].is_positive()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][e].is_positive() {
                let ratio = &t[i][width] / &t[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leave else {
            return Err(Error::Structural("LP is unbounded".into()));
        };
        let piv = t[l][e].clone();
        for v in t[l].iter_mut() {
            *v /= &piv;
        }
        let pivot_row = t[l].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != l && !row[e].is_zero() {
                let f = row[e].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
        }
        if !obj[e].is_zero() {
            let f = obj[e].clone();
            for (v, p) in obj.iter_mut().zip(&pivot_row) {
                *v -= &f * p;
            }
        }
        basis[l] = e;
        pivots += 1;
        if pivots > cap {
            return Err(Error::Structural("simplex pivot cap reached".into()));
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width].clone();
        }
    }
    let dual = (0..m).map(|i| -&obj[n + i]).collect();
    Ok(LpSolution { x, dual, value: -&obj[width], pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn textbook_lp() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let c = [q(3, 1), q(5, 1)];
        let a = vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(2, 1)], vec![q(3, 1), q(2, 1)]];
        let b = [q(4, 1), q(12, 1), q(18, 1)];
        let s = maximize(&c, &a, &b).unwrap();
        assert_eq!(s.value, q(36, 1));
        assert_eq!(s.x, vec![q(2, 1), q(6, 1)]);
        assert!(s.verify(&c, &a, &b));
    }

    #[test]
    fn fractional_optimum() {
        // max x + y, 2x + y ≤ 1, x + 3y ≤ 1 → x = 2/5, y = 1/5
        let c = [q(1, 1), q(1, 1)];
        let a = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        let b = [q(1, 1), q(1, 1)];
        let s = maximize(&c, &a, &b).unwrap();
        assert_eq!(s.value, q(3, 5));
        assert!(s.verify(&c, &a, &b));
    }

    #[test]
    fn degenerate_does_not_cycle() {
        // Beale's cycling example (max form)
        let c = [q(3, 4), q(-150, 1), q(1, 50), q(-6, 1)];
        let a = vec![
            vec![q(1, 4), q(-60, 1), q(-1, 25), q(9, 1)],
            vec![q(1, 2), q(-90, 1), q(-1, 50), q(3, 1)],
            vec![q(0, 1), q(0, 1), q(1, 1), q(0, 1)],
        ];
        let b = [q(0, 1), q(0, 1), q(1, 1)];
        let s = maximize(&c, &a, &b).unwrap();
        assert_eq!(s.value, q(1, 20));
        assert!(s.verify(&c, &a, &b));
    }

    #[test]
    fn unbounded_and_bad_input() {
        let c = [q(1, 1)];
        let a = vec![vec![q(-1, 1)]];
        assert!(matches!(maximize(&c, &a, &[q(1, 1)]), Err(Error::Structural(_))));
        assert!(matches!(maximize(&c, &a, &[q(-1, 1)]), Err(Error::Input(_))));
    }
}
