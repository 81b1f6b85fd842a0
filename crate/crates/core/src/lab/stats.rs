//! Estimators and interval formulas shared by the experiments.

use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::linalg::log_sum_exp;

/// Two-sided 99% normal quantile.
pub fn z99() -> f64 {
    Normal::standard().inverse_cdf(0.995)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Standard error of the sample mean.
pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// Bias-corrected jackknife over leave-one-out values `θ₍ᵢ₎` of a full-sample
/// estimate `full`.
pub fn jackknife(full: f64, leave_one_out: &[f64]) -> Estimate {
    let n = leave_one_out.len() as f64;
    let m = mean(leave_one_out);
    let var = leave_one_out.iter().map(|t| (t - m).powi(2)).sum::<f64>() * (n - 1.0) / n;
    Estimate { value: n * full - (n - 1.0) * m, se: var.sqrt() }
}

/// `ln` of the sample mean of `e^{xᵢ}`, computed in log space.
pub fn log_mean_exp(logs: &[f64]) -> f64 {
    log_sum_exp(logs.iter().copied()) - (logs.len() as f64).ln()
}

/// Leave-one-out values of [`log_mean_exp`] from prefix/suffix sums.
pub fn log_mean_exp_loo(logs: &[f64]) -> Vec<f64> {
    let n = logs.len();
    let lse2 = |a: f64, b: f64| {
        if a == f64::NEG_INFINITY {
            b
        } else if b == f64::NEG_INFINITY {
            a
        } else {
            let m = a.max(b);
            m + ((a - m).exp() + (b - m).exp()).ln()
        }
    };
    let mut prefix = vec![f64::NEG_INFINITY; n + 1];
    for i in 0..n {
        prefix[i + 1] = lse2(prefix[i], logs[i]);
    }
    let mut suffix = vec![f64::NEG_INFINITY; n + 1];
    for i in (0..n).rev() {
        suffix[i] = lse2(suffix[i + 1], logs[i]);
    }
    let ln_rest = ((n - 1) as f64).ln();
    (0..n).map(|i| lse2(prefix[i], suffix[i + 1]) - ln_rest).collect()
}

/// Wilson score interval for `k` successes out of `n` at normal quantile `z`.
pub fn wilson(k: usize, n: usize, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Kolmogorov–Smirnov statistic of `xs` against the standard normal CDF.
pub fn ks_statistic_normal(xs: &[f64]) -> f64 {
    let norm = Normal::standard();
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = norm.cdf(*x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov 1% critical value with Stephens' finite-sample correction.
pub fn ks_critical_1pct(n: usize) -> f64 {
    let s = (n as f64).sqrt();
    1.6276 / (s + 0.12 + 0.11 / s)
}

/// `E f(g)` for `g ~ N(0,1)` by Gauss–Hermite quadrature.
pub fn gaussian_expectation(nodes: usize, f: impl FnMut(f64) -> f64) -> f64 {
    let mut f = f;
    let quad = GaussHermite::new(NonZeroUsize::new(nodes.max(1)).expect("nonzero"));
    quad.integrate(|x| f(std::f64::consts::SQRT_2 * x)) / std::f64::consts::PI.sqrt()
}

/// `E f(g)` for `g ~ N(0,1)` by composite Simpson on `[−L, L]`.
pub fn gaussian_expectation_simpson(half_width: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let panels = panels + panels % 2;
    let h = 2.0 * half_width / panels as f64;
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = 0.0;
    for i in 0..=panels {
        let x = -half_width + i as f64 * h;
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * f(x) * phi(x);
    }
    acc * h / 3.0
}

/// Largest `t` in `(0, hi]` with `bound(t) ≥ level`, for decreasing `bound`.
pub fn solve_decreasing(bound: impl Fn(f64) -> f64, level: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    while bound(hi) > level {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jackknife_of_mean_is_mean() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let loo: Vec<f64> = (0..4).map(|i| (xs.iter().sum::<f64>() - xs[i]) / 3.0).collect();
        let e = jackknife(mean(&xs), &loo);
        assert!((e.value - 3.5).abs() < 1e-14);
        assert!((e.se - std_error(&xs)).abs() < 1e-14);
    }

    #[test]
    fn loo_log_mean() {
        let logs = [0.1, -3.0, 2.5, 0.0, 700.0];
        let loo = log_mean_exp_loo(&logs);
        for (i, l) in loo.iter().enumerate() {
            let rest: Vec<f64> = logs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
            assert!((l - log_mean_exp(&rest)).abs() < 1e-12);
        }
    }

    #[test]
    fn wilson_known_values() {
        let (lo, hi) = wilson(0, 100, 1.96);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036994).abs() < 1e-5);
        let (lo, hi) = wilson(50, 100, 1.96);
        assert!((lo - 0.403832).abs() < 1e-5 && (hi - 0.596168).abs() < 1e-5);
    }

    #[test]
    fn quadrature_moments() {
        assert!((gaussian_expectation(20, |g| g * g) - 1.0).abs() < 1e-12);
        assert!((gaussian_expectation(20, |g| g.powi(4)) - 3.0).abs() < 1e-12);
        assert!((gaussian_expectation_simpson(12.0, 4000, |g| g * g) - 1.0).abs() < 1e-10);
        // E cosh(a g) = e^{a²/2}
        assert!((gaussian_expectation(60, |g| (1.5 * g).cosh()) - (1.125f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn ks_rejects_shifted_sample() {
        let xs: Vec<f64> = (0..1000).map(|i| Normal::standard().inverse_cdf((i as f64 + 0.5) / 1000.0)).collect();
        assert!(ks_statistic_normal(&xs) < 1e-3);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.5).collect();
        assert!(ks_statistic_normal(&shifted) > ks_critical_1pct(1000));
    }

    #[test]
    fn bisection() {
        let t = solve_decreasing(|t| 2.0 * (-t * t).exp(), 1e-3, 0.1);
        assert!((2.0 * (-t * t).exp() - 1e-3).abs() < 1e-9);
    }
}
