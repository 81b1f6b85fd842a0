use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::stats::{self, ks_critical_1pct, ks_statistic_normal, solve_decreasing, wilson, z99};
use super::{check_samples, ExperimentReport, ModelSpec, Verdict};
use crate::algebra::{DensePauli, MajoranaMonomial, PauliString};
use crate::error::{input, Result};
use crate::graph::{commuting_majorana_family, stabilized_state};
use crate::index::mean_square_expectation;
use crate::linalg::{CMatrix, GaussianSampler, RandomStream, C64};
use crate::models::{ModelInstance, ModelKind};

/// Salt separating the fixed-state stream from the disorder streams.
const STATE_SALT: u64 = 0x57a7_e5a1_7000_0001;

/// Disorder-independent state for the fixed-state experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateSpec {
    /// Joint `+1` eigenvector of the commuting `(q/2)`-pair family (SYK only).
    Stabilized,
    /// Haar-random state drawn from the experiment seed.
    Random,
    /// Computational basis vector.
    Basis(usize),
}

impl std::str::FromStr for StateSpec {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stabilized" => Ok(Self::Stabilized),
            "random" => Ok(Self::Random),
            _ => match s.strip_prefix("basis") {
                Some(rest) => rest
                    .trim_start_matches([':', '='])
                    .parse()
                    .map(Self::Basis)
                    .map_err(|_| crate::Error::Input(format!("bad basis index in {s:?}"))),
                None => input(format!("unknown state {s:?} (stabilized, random or basis:<i>)")),
            },
        }
    }
}

fn prepare_state(state: StateSpec, spec: ModelSpec, dim: usize, seed: u64) -> Result<Vec<C64>> {
    match state {
        StateSpec::Stabilized => {
            if spec.kind != ModelKind::Syk {
                return input("the stabilized state is defined for SYK only");
            }
            stabilized_state(&commuting_majorana_family(spec.n, spec.locality)?, dim, seed ^ STATE_SALT)
        }
        StateSpec::Random => Ok(GaussianSampler::new(RandomStream::new(seed ^ STATE_SALT, 0)).haar_state(dim)),
        StateSpec::Basis(i) => {
            if i >= dim {
                return input(format!("basis index {i} out of range for dimension {dim}"));
            }
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[i] = C64::new(1.0, 0.0);
            Ok(v)
        }
    }
}

fn quantum_ensemble(spec: ModelSpec) -> Result<crate::models::Ensemble> {
    if spec.kind == ModelKind::Classical {
        return input("this experiment needs a quantum model (syk or sg)");
    }
    spec.ensemble()
}

/// `⟨ψ|H|ψ⟩` over disorder against `(1/m)Σ⟨ψ|Aᵢ|ψ⟩²`; the energies are also
/// tested for exact Gaussianity with a KS test.
pub fn variance_identity_experiment(
    state: StateSpec,
    spec: ModelSpec,
    samples: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    check_samples(samples)?;
    let start = Instant::now();
    let ens = quantum_ensemble(spec)?;
    let psi = prepare_state(state, spec, ens.dim, seed)?;
    let exact = mean_square_expectation(&ens.terms, &psi);
    let energies: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| ens.sample(RandomStream::new(seed, i as u64)).map(|m| m.h.matrix().expectation(&psi).re))
        .collect::<Result<_>>()?;
    let var = stats::variance(&energies);
    let se = exact * (2.0 / (samples as f64 - 1.0)).sqrt();
    let z = if se > 0.0 { (var - exact) / se } else { 0.0 };
    let mut report = ExperimentReport::new(
        "variance",
        json!({"model": spec.kind, "n": spec.n, "locality": spec.locality, "state": state, "samples": samples}),
        seed,
    );
    report.records = energies
        .iter()
        .enumerate()
        .map(|(i, e)| json!({"sample": i, "stream_index": i, "energy": e}))
        .collect();
    report.verdicts.push(Verdict::new(
        "variance-z",
        z.abs() <= 4.0,
        "|Var̂⟨ψ|H|ψ⟩ − (1/m)Σ⟨ψ|Aᵢ|ψ⟩²| ≤ 4 SE, SE = σ²√(2/(N−1))",
        format!("z = {z:.3}"),
    ));
    let (ks, crit) = if exact > 0.0 {
        let std = exact.sqrt();
        let standardized: Vec<f64> = energies.iter().map(|e| e / std).collect();
        (ks_statistic_normal(&standardized), ks_critical_1pct(samples))
    } else {
        (0.0, ks_critical_1pct(samples))
    };
    report.verdicts.push(Verdict::new(
        "ks-gaussian",
        ks <= crit,
        "KS distance of ⟨ψ|H|ψ⟩/σ from N(0,1) ≤ 1% critical value",
        format!("D = {ks:.4}, critical {crit:.4}"),
    ));
    report.summary = json!({
        "exact_variance": exact, "empirical_variance": var, "variance_se": se, "z": z,
        "mean": stats::mean(&energies), "ks_statistic": ks, "ks_critical_1pct": crit,
    });
    report.finish(start)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailQuantity {
    LambdaMax,
    FixedStateEnergy,
    ObsExpectation,
    ThermalEnergy,
    TwoPoint,
}

impl TailQuantity {
    pub const ALL: [TailQuantity; 5] = [
        TailQuantity::LambdaMax,
        TailQuantity::FixedStateEnergy,
        TailQuantity::ObsExpectation,
        TailQuantity::ThermalEnergy,
        TailQuantity::TwoPoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TailQuantity::LambdaMax => "lambda-max",
            TailQuantity::FixedStateEnergy => "fixed-state-energy",
            TailQuantity::ObsExpectation => "obs-expectation",
            TailQuantity::ThermalEnergy => "thermal-energy",
            TailQuantity::TwoPoint => "two-point",
        }
    }
}

impl std::str::FromStr for TailQuantity {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('_', "-");
        Self::ALL
            .into_iter()
            .find(|q| q.name() == key)
            .ok_or_else(|| crate::Error::Input(format!("unknown tail quantity {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TailConfig {
    pub quantity: TailQuantity,
    pub model: ModelSpec,
    pub beta: f64,
    pub tau: f64,
    pub samples: usize,
    /// Defaults to 12 points up to where the bound falls to `10⁻³`.
    pub t_grid: Option<Vec<f64>>,
    pub seed: u64,
    pub state: StateSpec,
}

impl TailConfig {
    pub fn new(quantity: TailQuantity, model: ModelSpec, samples: usize, seed: u64) -> Self {
        Self { quantity, model, beta: 1.0, tau: 1.0, samples, t_grid: None, seed, state: StateSpec::Random }
    }
}

/// `X` and `Y` of the correlator experiments: hermitized `γ₁γ₂`, `γ₃γ₄` for
/// SYK and `Z₁`, `Z₂` for spin glasses. Both have unit norm.
fn observables(spec: ModelSpec) -> Result<(DensePauli, DensePauli)> {
    match spec.kind {
        ModelKind::Syk => {
            if spec.n < 4 {
                return input("two-point observables need at least 4 modes");
            }
            let x = MajoranaMonomial::new(spec.n, &[1, 2])?.to_pauli(true)?.to_dense()?;
            let y = MajoranaMonomial::new(spec.n, &[3, 4])?.to_pauli(true)?.to_dense()?;
            Ok((x, y))
        }
        ModelKind::SpinGlass => {
            if spec.n < 2 {
                return input("two-point observables need at least 2 qubits");
            }
            let x = PauliString::single(spec.n, 0, 'Z')?.to_dense()?;
            let y = PauliString::single(spec.n, 1, 'Z')?.to_dense()?;
            Ok((x, y))
        }
        ModelKind::Classical => input("no observables for the classical model"),
    }
}

fn dense_matrix(p: &DensePauli) -> CMatrix {
    let mut m = CMatrix::zeros(p.dim(), p.dim());
    p.add_to(&mut m, C64::new(1.0, 0.0));
    m
}

/// `Tr(X Y(τ) ρ_β)` with `Y(τ) = e^{iτ√nH} Y e^{−iτ√nH}`, evaluated in the
/// eigenbasis of `H`.
pub(crate) fn two_point(inst: &ModelInstance, x: &CMatrix, y: &CMatrix, beta: f64, tau: f64) -> Result<C64> {
    let spec = inst.spectrum()?;
    let w = inst.gibbs_weights(beta)?;
    let v = &spec.eigenvectors;
    let vd = v.adjoint();
    let xt = vd.matmul(x).matmul(v);
    let yt = vd.matmul(y).matmul(v);
    let s = tau * (inst.sample.n as f64).sqrt();
    let lam = &spec.eigenvalues;
    let d = lam.len();
    let mut acc = C64::new(0.0, 0.0);
    for l in 0..d {
        if w[l] == 0.0 {
            continue;
        }
        for k in 0..d {
            let phase = C64::from_polar(1.0, s * (lam[k] - lam[l]));
            acc += xt[(l, k)] * yt[(k, l)] * phase * w[l];
        }
    }
    Ok(acc)
}

/// One bound curve with its formula.
struct Curve {
    label: &'static str,
    formula: String,
    values: Vec<f64>,
    bound: Box<dyn Fn(f64) -> f64 + Sync>,
}

/// Empirical two-sided deviation tails against a concentration bound, per
/// quantity. A grid point counts as a violation when the 99% Wilson lower
/// limit of the exceedance frequency lies above the bound.
pub fn tail_experiment(cfg: &TailConfig) -> Result<ExperimentReport> {
    check_samples(cfg.samples)?;
    let start = Instant::now();
    let spec = cfg.model;
    let ens = quantum_ensemble(spec)?;
    let delta = spec.delta_upper()?;
    let (beta, tau, n) = (cfg.beta, cfg.tau, spec.n as f64);
    let mut report = ExperimentReport::new(
        "tails",
        json!({
            "quantity": cfg.quantity, "model": spec.kind, "n": spec.n, "locality": spec.locality,
            "beta": beta, "tau": tau, "samples": cfg.samples, "t_grid": cfg.t_grid, "state": cfg.state,
        }),
        cfg.seed,
    );
    let draw = |i: usize| ens.sample(RandomStream::new(cfg.seed, i as u64));
    let mut summary = json!({"delta_upper": delta});
    let mut notes = Vec::new();
    let beta_scaled = matches!(cfg.quantity, TailQuantity::ObsExpectation | TailQuantity::ThermalEnergy)
        || (cfg.quantity == TailQuantity::TwoPoint && beta == 0.0 && tau == 0.0);
    if beta_scaled && beta == 0.0 {
        notes.push("bound undefined at β = 0; all grid points skipped".to_string());
    }
    let curves: Vec<Curve> = match cfg.quantity {
        TailQuantity::LambdaMax => {
            let vals: Vec<f64> = (0..cfg.samples).into_par_iter().map(|i| draw(i)?.lambda_max()).collect::<Result<_>>()?;
            report.records = records(&vals, |v| json!({"lambda_max": v}));
            vec![Curve {
                label: "lambda-max",
                formula: "P(|λ_max − Eλ_max| ≥ t) ≤ 2·exp(−t²/(2Δ)), Δ ≤ ϑ/m".into(),
                values: vals,
                bound: Box::new(move |t| 2.0 * (-t * t / (2.0 * delta)).exp()),
            }]
        }
        TailQuantity::FixedStateEnergy => {
            let psi = prepare_state(cfg.state, spec, ens.dim, cfg.seed)?;
            let sigma2 = mean_square_expectation(&ens.terms, &psi);
            let vals: Vec<f64> = (0..cfg.samples)
                .into_par_iter()
                .map(|i| draw(i).map(|m| m.h.matrix().expectation(&psi).re))
                .collect::<Result<_>>()?;
            report.records = records(&vals, |v| json!({"energy": v}));
            let std = sigma2.sqrt();
            let ks = ks_statistic_normal(&vals.iter().map(|v| v / std).collect::<Vec<_>>());
            let crit = ks_critical_1pct(cfg.samples);
            report.verdicts.push(Verdict::new(
                "ks-gaussian",
                ks <= crit,
                "KS distance of ⟨ψ|H|ψ⟩/σ from N(0,1) ≤ 1% critical value",
                format!("D = {ks:.4}, critical {crit:.4}"),
            ));
            summary["sigma2"] = json!(sigma2);
            summary["ks_statistic"] = json!(ks);
            vec![Curve {
                label: "fixed-state-energy",
                formula: "P(|⟨ψ|H|ψ⟩ − E| ≥ t) ≤ 2·exp(−t²/(2σ²)), σ² = (1/m)Σ⟨ψ|Aᵢ|ψ⟩²".into(),
                values: vals,
                bound: Box::new(move |t| 2.0 * (-t * t / (2.0 * sigma2)).exp()),
            }]
        }
        TailQuantity::ObsExpectation => {
            let (x, _) = observables(spec)?;
            let vals: Vec<f64> =
                (0..cfg.samples).into_par_iter().map(|i| draw(i)?.thermal_expectation(&x, beta)).collect::<Result<_>>()?;
            report.records = records(&vals, |v| json!({"obs": v}));
            let without_n = move |t: f64| 2.0 * (-t * t / (18.0 * beta * beta * delta)).exp();
            // the same curve with the size factor n dropped, reported for comparison only
            summary["bound_without_n"] = json!("2·exp(−t²/(18β²‖X‖²Δ))");
            let c = 18.0 * beta * beta * n * delta;
            let curve = Curve {
                label: "obs-expectation",
                formula: "P(|Tr(Xρ_β) − E| ≥ t) ≤ 2·exp(−t²/(18β²n‖X‖²Δ)), ‖X‖ = 1".into(),
                values: vals,
                bound: Box::new(move |t| 2.0 * (-t * t / c).exp()),
            };
            summary["points_without_n"] = json!(tail_points(&curve.values, &grid(cfg, &curve.bound), &without_n));
            vec![curve]
        }
        TailQuantity::ThermalEnergy => {
            let pairs: Vec<(f64, f64)> = (0..cfg.samples)
                .into_par_iter()
                .map(|i| {
                    let m = draw(i)?;
                    let ev = m.eigenvalues()?;
                    let w = m.gibbs_weights(beta)?;
                    Ok((ev.iter().zip(&w).map(|(l, p)| l * p).sum::<f64>(), m.lambda_max()?))
                })
                .collect::<Result<_>>()?;
            let pilot = cfg.samples.div_ceil(10);
            if cfg.samples - pilot < super::MIN_SAMPLES {
                return input("too few samples left after the pilot phase");
            }
            let mean_lmax = stats::mean(&pairs[..pilot].iter().map(|p| p.1).collect::<Vec<_>>());
            let alpha = 0.5 * (1.0 / (4.0 * beta * beta * n) + mean_lmax * mean_lmax);
            report.records = pairs
                .iter()
                .enumerate()
                .map(|(i, (e, l))| {
                    json!({"sample": i, "stream_index": i, "energy": e, "lambda_max": l, "pilot": i < pilot})
                })
                .collect();
            summary["pilot_samples"] = json!(pilot);
            summary["pilot_mean_lambda_max"] = json!(mean_lmax);
            summary["alpha"] = json!(alpha);
            vec![Curve {
                label: "thermal-energy",
                formula: "P(|Tr(Hρ_β) − E| ≥ t) ≤ 4·exp(−(√(t²/(12β²n) + α²) − α)/(2Δ)), α from pilot".into(),
                values: pairs[pilot..].iter().map(|p| p.0).collect(),
                bound: Box::new(move |t| {
                    4.0 * (-((t * t / (12.0 * beta * beta * n) + alpha * alpha).sqrt() - alpha) / (2.0 * delta)).exp()
                }),
            }]
        }
        TailQuantity::TwoPoint => {
            let (x, y) = observables(spec)?;
            let (xm, ym) = (dense_matrix(&x), dense_matrix(&y));
            let vals: Vec<C64> =
                (0..cfg.samples).into_par_iter().map(|i| two_point(&draw(i)?, &xm, &ym, beta, tau)).collect::<Result<_>>()?;
            report.records = vals
                .iter()
                .enumerate()
                .map(|(i, c)| json!({"sample": i, "stream_index": i, "re": c.re, "im": c.im}))
                .collect();
            let c = 6.0 * n * (5.0 * beta * beta + 16.0 * tau * tau) * delta;
            let bound = move |t: f64| 2.0 * (-t * t / c).exp();
            vec![
                Curve {
                    label: "two-point-hermitian",
                    formula: "P(½|c − Ec + h.c.| ≥ t) ≤ 2·exp(−t²/(6n(5β²+16τ²)‖X‖²‖Y‖²Δ)), c = Tr(XY(τ)ρ_β)".into(),
                    values: vals.iter().map(|c| c.re).collect(),
                    bound: Box::new(bound),
                },
                Curve {
                    label: "two-point-antihermitian",
                    formula: "P(½|c − Ec − h.c.| ≥ t) ≤ 2·exp(−t²/(6n(5β²+16τ²)‖X‖²‖Y‖²Δ)), c = Tr(XY(τ)ρ_β)".into(),
                    values: vals.iter().map(|c| c.im).collect(),
                    bound: Box::new(bound),
                },
            ]
        }
    };
    let mut curve_summaries = Vec::new();
    for curve in &curves {
        let (points, violations) = if beta_scaled && beta == 0.0 {
            (Vec::new(), 0)
        } else {
            let g = grid(cfg, &curve.bound);
            let pts = tail_points(&curve.values, &g, &curve.bound);
            let v = pts.iter().filter(|p| p["violation"] == json!(true)).count();
            (pts, v)
        };
        report.verdicts.push(Verdict::new(
            format!("tail-{}", curve.label),
            violations == 0,
            curve.formula.clone(),
            format!("{violations} violations (99% Wilson lower limit above the bound){}", notes.join("; ")),
        ));
        curve_summaries.push(json!({
            "label": curve.label, "formula": curve.formula, "mean": stats::mean(&curve.values),
            "std": stats::variance(&curve.values).sqrt(), "points": points,
        }));
    }
    summary["curves"] = json!(curve_summaries);
    summary["notes"] = json!(notes);
    report.summary = summary;
    report.finish(start)
}

fn records(vals: &[f64], f: impl Fn(f64) -> Value) -> Vec<Value> {
    vals.iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut r = json!({"sample": i, "stream_index": i});
            if let (Value::Object(dst), Value::Object(src)) = (&mut r, f(v)) {
                dst.extend(src);
            }
            r
        })
        .collect()
}

fn grid(cfg: &TailConfig, bound: &(dyn Fn(f64) -> f64 + Sync)) -> Vec<f64> {
    if let Some(g) = &cfg.t_grid {
        return g.clone();
    }
    let t_max = solve_decreasing(bound, 1e-3, 1e-3);
    (1..=12).map(|k| t_max * k as f64 / 12.0).collect()
}

/// Exceedance counts of `|v − mean|` with Wilson intervals per grid point.
fn tail_points(values: &[f64], grid: &[f64], bound: &dyn Fn(f64) -> f64) -> Vec<Value> {
    let m = stats::mean(values);
    let n = values.len();
    let z = z99();
    grid.iter()
        .map(|&t| {
            let k = values.iter().filter(|v| (*v - m).abs() >= t).count();
            let (lo, hi) = wilson(k, n, z);
            let b = bound(t);
            json!({
                "t": t, "exceedances": k, "frequency": k as f64 / n as f64, "wilson_lower": lo,
                "wilson_upper": hi, "bound": b, "violation": lo > b, "upper_within_bound": hi <= b,
            })
        })
        .collect()
}
