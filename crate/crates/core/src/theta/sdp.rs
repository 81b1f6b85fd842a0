//! Numeric Lovász theta for small graphs.
//!
//! Primal: `max ⟨J, X⟩` over `X ⪰ 0, Tr X = 1, X_uv = 0` on edges. The
//! default solver is ADMM on the dual (alternating dual update, PSD projection
//! and multiplier step); a penalty Frank–Wolfe solver is kept as an
//! alternative. Both finish by producing a certified bracket: the upper end is
//! `λ_max(J + Z)` for the edge-supported dual estimate `Z`, the lower end is
//! the objective of the primal iterate after zeroing its edge entries and
//! shifting it back onto the spectrahedron.

use std::time::Instant;

use serde::Serialize;

use super::{Certificate, Residuals, ThetaMethod, ThetaResult};
use crate::error::{capacity, input, Result};
use crate::graph::CommutationGraph;
use crate::linalg::{eigh, eigvalsh, DenseHermitian, C64};

/// Largest graph accepted by the SDP path.
pub const MAX_SDP_VERTICES: usize = 600;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpMethod {
    Admm,
    PenaltyFrankWolfe,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub tol: f64,
    pub method: SdpMethod,
    pub max_iter: usize,
    /// Frank–Wolfe only: initial penalty, doubling rounds, inner cap.
    pub rho0: f64,
    pub rho_rounds: usize,
    pub inner_cap: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: 1e-6, method: SdpMethod::Admm, max_iter: 20_000, rho0: 10.0, rho_rounds: 8, inner_cap: 5000 }
    }
}

/// Dense real symmetric matrix, row-major.
#[derive(Clone, Debug)]
struct Sym {
    n: usize,
    a: Vec<f64>,
}

impl Sym {
    fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    fn set_pair(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }

    fn sum(&self) -> f64 {
        self.a.iter().sum()
    }

    fn hermitian(&self) -> Result<DenseHermitian> {
        DenseHermitian::from_real_symmetric(self.n, |i, j| self.at(i, j))
    }

    fn lambda_max(&self) -> Result<f64> {
        Ok(*eigvalsh(&self.hermitian()?)?.last().expect("nonempty"))
    }

    fn lambda_min(&self) -> Result<f64> {
        Ok(eigvalsh(&self.hermitian()?)?[0])
    }

    /// `(V₊, V₋)` with `V = V₊ + V₋`, `V₊ ⪰ 0 ⪰ V₋`.
    fn split_psd(&self) -> Result<(Sym, Sym)> {
        let spec = eigh(&self.hermitian()?)?;
        let plus = spec.apply(|l| C64::new(l.max(0.0), 0.0));
        let mut p = Sym::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                p.a[i * self.n + j] = 0.5 * (plus[(i, j)].re + plus[(j, i)].re);
            }
        }
        let m = Sym { n: self.n, a: self.a.iter().zip(&p.a).map(|(v, q)| v - q).collect() };
        Ok((p, m))
    }

    fn top_eigenvector(&self) -> Result<(f64, Vec<f64>)> {
        let spec = eigh(&self.hermitian()?)?;
        let k = self.n - 1;
        let v: Vec<C64> = spec.vector(k);
        // fix the global phase so the vector is real
        let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        let phase = pivot.conj() / pivot.norm();
        let mut out: Vec<f64> = v.iter().map(|z| (z * phase).re).collect();
        let nrm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.iter_mut().for_each(|x| *x /= nrm);
        Ok((spec.max_eigenvalue(), out))
    }
}

struct Bracket {
    lower: f64,
    upper: f64,
    repaired_trace: f64,
    min_eig: f64,
}

/// Certified bracket from a primal iterate `x` and edge multipliers `z_e`
/// (the dual matrix is `J + Σ_e z_e (E_uv + E_vu)`).
fn bracket(x: &Sym, edges: &[(usize, usize)], z: &[f64]) -> Result<Bracket> {
    let n = x.n;
    let mut dual = Sym { n, a: vec![1.0; n * n] };
    for (&(u, v), &ze) in edges.iter().zip(z) {
        dual.set_pair(u, v, 1.0 + ze);
    }
    let upper = dual.lambda_max()?;
    let mut rep = x.clone();
    for &(u, v) in edges {
        rep.set_pair(u, v, 0.0);
    }
    let min_eig = rep.lambda_min()?;
    let shift = (-min_eig).max(0.0);
    let tr = rep.trace() + shift * n as f64;
    let lower = if tr > 0.0 { (rep.sum() + shift * n as f64) / tr } else { 1.0 };
    Ok(Bracket { lower: lower.max(1.0), upper, repaired_trace: tr, min_eig })
}

pub fn theta_sdp(g: &CommutationGraph, tol: f64) -> Result<ThetaResult> {
    theta_sdp_with(g, &SdpOptions { tol, ..SdpOptions::default() })
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn theta_sdp_with(g: &CommutationGraph, opts: &SdpOptions) -> Result<ThetaResult> {
    let n = g.len();
    if n == 0 {
        return input("empty graph");
    }
    if n > MAX_SDP_VERTICES {
        return capacity(format!("{n} vertices exceeds the SDP limit {MAX_SDP_VERTICES}"));
    }
    if !(opts.tol > 0.0) {
        return input("tolerance must be positive");
    }
    let start = Instant::now();
    let edges = g.edges();
    let run = match opts.method {
        SdpMethod::Admm => admm(n, &edges, opts)?,
        SdpMethod::PenaltyFrankWolfe => penalty_fw(n, &edges, opts)?,
    };
    let br = bracket(&run.x, &edges, &run.z)?;
    let objective = run.x.sum();
    let value = objective.clamp(br.lower, br.upper.max(br.lower));
    let edge_max = edges.iter().map(|&(u, v)| run.x.at(u, v).abs()).fold(0.0, f64::max);
    let psd_violation = (-run.x.lambda_min()?).max(0.0);
    let converged = run.residuals.primal <= opts.tol
        && run.residuals.dual <= opts.tol
        && run.residuals.gap <= opts.tol
        && edge_max <= opts.tol
        && psd_violation <= opts.tol;
    Ok(ThetaResult {
        method: ThetaMethod::GenericSdp,
        value,
        exact: None,
        bracket: [br.lower, br.upper],
        converged,
        certificate: Certificate::Sdp {
            vertices: n,
            edges: edges.len(),
            iterations: run.iterations,
            solver: opts.method,
            dual_lambda_max: br.upper,
            repaired_primal: br.lower,
            primal_trace: br.repaired_trace,
            primal_min_eigenvalue: br.min_eig,
        },
        residuals: Residuals { edge_max, psd_violation, ..run.residuals },
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

struct Run {
    x: Sym,
    /// Edge multipliers for the dual matrix `J + Σ z_e (E_uv + E_vu)`.
    z: Vec<f64>,
    iterations: usize,
    residuals: Residuals,
}

/// ADMM on the dual of `min ⟨−J, X⟩  s.t.  Tr X = 1, √2·X_uv = 0, X ⪰ 0`.
/// The constraint operators are orthogonal, so the `y`-update is diagonal.
fn admm(n: usize, edges: &[(usize, usize)], opts: &SdpOptions) -> Result<Run> {
    let r2 = std::f64::consts::SQRT_2;
    let nf = n as f64;
    let c_norm = nf; // ‖J‖_F
    let mut x = Sym::zeros(n);
    for i in 0..n {
        x.a[i * n + i] = 1.0 / nf;
    }
    let mut s = Sym::zeros(n);
    let mut ye = vec![0.0; edges.len()];
    let mut mu = 1.0;
    let mut res = Residuals::default();
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        // y = −(AA*)⁻¹ (μ(A(X) − b) + A(S − C)), C = −J
        let tr_sc: f64 = s.trace() + nf;
        let y0 = -(mu * (x.trace() - 1.0) + tr_sc) / nf;
        for (k, &(u, v)) in edges.iter().enumerate() {
            ye[k] = -(mu * r2 * x.at(u, v) + r2 * (s.at(u, v) + 1.0));
        }
        // V = C − A*(y) − μX
        let mut vmat = Sym { n, a: x.a.iter().map(|xv| -1.0 - mu * xv).collect() };
        for i in 0..n {
            vmat.a[i * n + i] -= y0;
        }
        for (k, &(u, v)) in edges.iter().enumerate() {
            let val = vmat.at(u, v) - ye[k] / r2;
            vmat.set_pair(u, v, val);
        }
        let (plus, minus) = vmat.split_psd()?;
        let x_new = Sym { n, a: minus.a.iter().map(|m| -m / mu).collect() };
        // dual residual ‖A*y + S − C‖ = ‖S − V − μX_old‖
        let dres_abs = plus
            .a
            .iter()
            .zip(&vmat.a)
            .zip(&x.a)
            .map(|((p, v), xo)| {
                let r = p - v - mu * xo;
                r * r
            })
            .sum::<f64>()
            .sqrt();
        s = plus;
        x = x_new;
        let edge_sq: f64 = edges.iter().map(|&(u, v)| 2.0 * x.at(u, v).powi(2)).sum();
        let pres = ((x.trace() - 1.0).powi(2) + edge_sq).sqrt() / 2.0;
        let dres = dres_abs / (1.0 + c_norm);
        let pobj = -x.sum();
        let dobj = y0;
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        res = Residuals { primal: pres, dual: dres, gap, ..Residuals::default() };
        if pres <= opts.tol * 0.1 && dres <= opts.tol * 0.1 && gap <= opts.tol * 0.1 {
            break;
        }
        if it % 20 == 0 {
            if pres > 10.0 * dres {
                mu = (mu * 2.0).min(1e4);
            } else if dres > 10.0 * pres {
                mu = (mu / 2.0).max(1e-4);
            }
        }
    }
    // S = C − A*(y) ⪰ 0 reads J + Σ ye (E_uv+E_vu)/√2 ⪯ −y0·I
    let z = ye.iter().map(|v| v / r2).collect();
    Ok(Run { x, z, iterations: it, residuals: res })
}

/// Penalty Frank–Wolfe: maximize `⟨J, X⟩ − ρ Σ_edges 2X_uv²` over the
/// spectrahedron with exact line search, doubling `ρ` between rounds.
fn penalty_fw(n: usize, edges: &[(usize, usize)], opts: &SdpOptions) -> Result<Run> {
    let mut x = Sym::zeros(n);
    for i in 0..n {
        x.a[i * n + i] = 1.0 / n as f64;
    }
    let mut rho = opts.rho0;
    let mut iterations = 0;
    let mut gap_last = f64::INFINITY;
    for _round in 0..opts.rho_rounds {
        for _ in 0..opts.inner_cap {
            iterations += 1;
            // gradient G = J − 2ρ X_E
            let mut grad = Sym { n, a: vec![1.0; n * n] };
            for &(u, v) in edges {
                grad.set_pair(u, v, 1.0 - 2.0 * rho * x.at(u, v));
            }
            let (_, vtop) = grad.top_eigenvector()?;
            // D = vvᵀ − X
            let mut dmat = Sym::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    dmat.a[i * n + j] = vtop[i] * vtop[j] - x.at(i, j);
                }
            }
            let fw_gap: f64 = grad.a.iter().zip(&dmat.a).map(|(g, d)| g * d).sum();
            gap_last = fw_gap;
            if fw_gap <= opts.tol * 0.1 * (1.0 + x.sum().abs()) {
                break;
            }
            let curv: f64 = edges.iter().map(|&(u, v)| 2.0 * dmat.at(u, v).powi(2)).sum::<f64>() * 2.0 * rho;
            let step = if curv > 0.0 { (fw_gap / curv).clamp(0.0, 1.0) } else { 1.0 };
            for (xv, dv) in x.a.iter_mut().zip(&dmat.a) {
                *xv += step * dv;
            }
        }
        rho *= 2.0;
    }
    let rho_final = rho / 2.0;
    let edge_sq: f64 = edges.iter().map(|&(u, v)| 2.0 * x.at(u, v).powi(2)).sum();
    let z: Vec<f64> = edges.iter().map(|&(u, v)| -2.0 * rho_final * x.at(u, v)).collect();
    let residuals = Residuals {
        primal: edge_sq.sqrt() / 2.0,
        dual: 0.0,
        gap: gap_last.max(0.0) / (1.0 + x.sum().abs()),
        ..Residuals::default()
    };
    Ok(Run { x, z, iterations, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{enumerate_set, OperatorKind};
    use crate::graph::commutation_graph;

    fn admm_value(g: &CommutationGraph) -> ThetaResult {
        theta_sdp(g, 1e-6).unwrap()
    }

    #[test]
    fn complete_and_edgeless() {
        for m in [1, 3, 6] {
            let r = admm_value(&CommutationGraph::complete(m));
            assert!((r.value - 1.0).abs() < 1e-6, "K{m}: {}", r.value);
            assert!(r.converged);
            let e = admm_value(&CommutationGraph::edgeless(m));
            assert!((e.value - m as f64).abs() < 1e-6 * m as f64, "E{m}: {}", e.value);
        }
    }

    #[test]
    fn five_cycle() {
        let r = admm_value(&CommutationGraph::cycle(5).unwrap());
        assert!((r.value - 5f64.sqrt()).abs() < 1e-4, "{}", r.value);
        assert!(r.bracket[0] <= 5f64.sqrt() + 1e-9 && 5f64.sqrt() <= r.bracket[1] + 1e-9);
    }

    #[test]
    fn majorana_graph_matches_lp() {
        let g = commutation_graph(&enumerate_set(OperatorKind::Majorana, 8, 4).unwrap()).unwrap();
        let r = admm_value(&g);
        assert!((r.value - 14.0).abs() < 14e-3, "{}", r.value);
    }

    #[test]
    fn frank_wolfe_alternative() {
        let opts = SdpOptions { method: SdpMethod::PenaltyFrankWolfe, tol: 1e-4, inner_cap: 400, ..SdpOptions::default() };
        let r = theta_sdp_with(&CommutationGraph::cycle(5).unwrap(), &opts).unwrap();
        assert!(r.bracket[0] <= 5f64.sqrt() + 1e-9 && 5f64.sqrt() <= r.bracket[1] + 1e-9);
        assert!((r.value - 5f64.sqrt()).abs() < 0.05, "{}", r.value);
    }

    #[test]
    fn rejects_oversized() {
        assert!(theta_sdp(&CommutationGraph::edgeless(601), 1e-6).is_err());
        assert!(theta_sdp(&CommutationGraph::edgeless(0), 1e-6).is_err());
    }
}
