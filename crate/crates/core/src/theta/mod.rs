//! Lovász theta function of commutation graphs.
//!
//! For `G(Sⁿ_q)` the symmetry of the Johnson scheme collapses the SDP to a
//! tiny LP over the odd classes, solved here in exact rational arithmetic.
//! Arbitrary small graphs go through a numeric SDP ([`theta_sdp`]).

mod sdp;
mod simplex;

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{input, Error, Result};
use crate::scheme::{binomial, HahnTable};

pub use sdp::{theta_sdp, theta_sdp_with, SdpMethod, SdpOptions};
pub use simplex::{maximize, LpSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaMethod {
    JohnsonLpExact,
    GenericSdp,
}

fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_rational<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_rationals<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// `p(x) = Σ_d a_d H̃_d(x)` over the odd classes `d`.
    Lp {
        n: usize,
        q: usize,
        /// `min(q, n − q)`; the graphs for `q` and `n − q` are isomorphic.
        reduced_r: usize,
        odd_classes: Vec<usize>,
        #[serde(serialize_with = "ser_rationals")]
        coefficients: Vec<BigRational>,
        /// `p(0), p(1), …, p(r)`.
        #[serde(serialize_with = "ser_rationals")]
        p_values: Vec<BigRational>,
        /// Optimal multipliers of the constraints `p(x) ≥ −1`, `x = 1..r`.
        #[serde(serialize_with = "ser_rationals")]
        dual: Vec<BigRational>,
        exactly_feasible: bool,
        pivots: usize,
    },
    Sdp {
        vertices: usize,
        edges: usize,
        iterations: usize,
        solver: SdpMethod,
        /// Largest eigenvalue of the dual matrix `J + Σ_e z_e E_e` (upper bound).
        dual_lambda_max: f64,
        /// Objective of the repaired feasible primal point (lower bound).
        repaired_primal: f64,
        primal_trace: f64,
        primal_min_eigenvalue: f64,
    },
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Residuals {
    /// Relative violation of `Tr X = 1` and `X_uv = 0` on edges.
    pub primal: f64,
    /// Relative dual-feasibility residual.
    pub dual: f64,
    /// Relative primal/dual objective gap.
    pub gap: f64,
    /// Largest `|X_uv|` over edges.
    pub edge_max: f64,
    /// `max(0, −λ_min(X))`.
    pub psd_violation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaResult {
    pub method: ThetaMethod,
    pub value: f64,
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<BigRational>,
    /// `[lower, upper]`; collapses to the exact value on the LP path.
    pub bracket: [f64; 2],
    pub converged: bool,
    pub certificate: Certificate,
    pub residuals: Residuals,
    pub wall_time_s: f64,
}

impl ThetaResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn int(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// Exact `ϑ(G(Sⁿ_q))` from the symmetry-reduced LP
/// `max p(0)  s.t.  p(x) ≥ −1, x = 1..r`, `ϑ = C(n,q)/(1 + p(0))`.
pub fn theta_johnson_lp(n: usize, q: usize) -> Result<ThetaResult> {
    if n == 0 || q == 0 || n % 2 == 1 || q % 2 == 1 || q > n {
        return input(format!("need even 0 < q ≤ n with n even, got n = {n}, q = {q}"));
    }
    let start = Instant::now();
    let r = q.min(n - q);
    let table = HahnTable::new(n, r)?;
    let odd: Vec<usize> = (1..r).step_by(2).collect();
    // a_d is free: split into a⁺ − a⁻
    let mut c = Vec::with_capacity(2 * odd.len());
    for &d in &odd {
        c.push(int(table.get(d, 0)));
    }
    for &d in &odd {
        c.push(-int(table.get(d, 0)));
    }
    let a: Vec<Vec<BigRational>> = (1..=r)
        .map(|x| {
            let pos = odd.iter().map(|&d| -int(table.get(d, x)));
            let neg = odd.iter().map(|&d| int(table.get(d, x)));
            pos.chain(neg).collect()
        })
        .collect();
    let b = vec![BigRational::one(); r];
    let sol = maximize(&c, &a, &b)?;
    if !sol.verify(&c, &a, &b) {
        return Err(Error::Structural("LP optimum failed exact verification".into()));
    }
    let k = odd.len();
    let coefficients: Vec<BigRational> = (0..k).map(|i| &sol.x[i] - &sol.x[k + i]).collect();
    let p_values: Vec<BigRational> = (0..=r)
        .map(|x| odd.iter().zip(&coefficients).map(|(&d, a)| a * int(table.get(d, x))).sum())
        .collect();
    let exactly_feasible = p_values[1..].iter().all(|p| *p >= -BigRational::one()) && p_values[0] == sol.value;
    let theta = int(&binomial(n as i64, q as i64)) / (BigRational::one() + &p_values[0]);
    let value = rational_to_f64(&theta);
    Ok(ThetaResult {
        method: ThetaMethod::JohnsonLpExact,
        value,
        exact: Some(theta),
        bracket: [value, value],
        converged: true,
        certificate: Certificate::Lp {
            n,
            q,
            reduced_r: r,
            odd_classes: odd,
            coefficients,
            p_values,
            dual: sol.dual,
            exactly_feasible,
            pivots: sol.pivots,
        },
        residuals: Residuals::default(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Half-up rounding of a nonnegative rational to two decimals, e.g. `"14.57"`.
pub fn round_half_up_2dp(v: &BigRational) -> String {
    let hundred = BigInt::from(100);
    let scaled = v * BigRational::from_integer(hundred.clone()) + BigRational::new(1.into(), 2.into());
    let k = scaled.floor().to_integer();
    let (whole, frac) = k.div_mod_floor(&hundred);
    let sign = if v.is_negative() && !k.is_zero() { "-" } else { "" };
    let whole = whole.abs();
    format!("{sign}{whole}.{frac:0>2}")
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub q: usize,
    #[serde(serialize_with = "ser_rational")]
    pub theta: BigRational,
    pub theta_2dp: String,
    #[serde(serialize_with = "ser_bigint")]
    pub binom: BigInt,
    /// `ϑ = C(n/2, q/2)` exactly.
    pub equal: bool,
}

/// `ϑ(G(Sⁿ_q))` for even `n` in `2..=max_n` and even `q ∈ qs` with `q ≤ n`.
pub fn reproduce_table(max_n: usize, qs: &[usize]) -> Result<Vec<TableRow>> {
    let cells: Vec<(usize, usize)> =
        (2..=max_n).step_by(2).flat_map(|n| qs.iter().filter(move |&&q| q <= n).map(move |&q| (n, q))).collect();
    cells
        .into_par_iter()
        .map(|(n, q)| {
            let res = theta_johnson_lp(n, q)?;
            let theta = res.exact.expect("LP path is exact");
            let binom = binomial((n / 2) as i64, (q / 2) as i64);
            Ok(TableRow { n, q, theta_2dp: round_half_up_2dp(&theta), equal: theta == int(&binom), binom, theta })
        })
        .collect()
}

/// CSV with header `n,q,theta_exact_rational,theta_2dp,binom,equal_flag`.
pub fn table_to_csv(rows: &[TableRow]) -> String {
    let mut s = String::from("n,q,theta_exact_rational,theta_2dp,binom,equal_flag\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{},{}\n", r.n, r.q, r.theta, r.theta_2dp, r.binom, r.equal));
    }
    s
}
