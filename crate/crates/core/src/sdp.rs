//! Minimum-trace PSD matrix under rank-one quadratic lower bounds:
//!
//! ```text
//! minimize tr(W)  subject to  g_jᴴ W g_j >= θ_j,  W ⪰ 0
//! ```
//!
//! solved by an interior-point method that follows the log-det barrier's
//! central path from both the primal and the dual side.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance relative to the largest entry.
const HERMITIAN_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated, relative to the trace.
const PSD_TOL: f64 = 1e-9;

/// Hermitian positive semidefinite complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdMatrix {
    entries: DMatrix<Complex64>,
}

impl PsdMatrix {
    /// Checks Hermiticity and semidefiniteness, then symmetrizes exactly.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), found: entries.ncols() });
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let asym = (&entries - entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Domain(format!("matrix is not Hermitian (asymmetry {asym:.3e})")));
        }
        let m = Self::symmetrized(entries);
        let trace = m.trace().re;
        let min_eig = m.clone().symmetric_eigenvalues().min();
        if min_eig < -PSD_TOL * trace.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Domain(format!("matrix is not positive semidefinite (eigenvalue {min_eig:.3e})")));
        }
        Ok(Self { entries: m })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: DMatrix::zeros(dim, dim) }
    }

    /// `Σ v vᴴ` over the given vectors.
    pub fn from_outer_products(dim: usize, vectors: &[Vec<Complex64>]) -> Result<Self> {
        let mut m = DMatrix::zeros(dim, dim);
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            let v = DVector::from_column_slice(v);
            m += &v * v.adjoint();
        }
        Ok(Self { entries: Self::symmetrized(m) })
    }

    fn symmetrized(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
        (&m + m.adjoint()).scale(0.5)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `gᴴ W g`.
    pub fn quadratic_form(&self, g: &[Complex64]) -> f64 {
        let g = DVector::from_column_slice(g);
        g.dotc(&(&self.entries * &g)).re
    }

    /// Eigenvalues in descending order with matching unit eigenvectors.
    pub fn eigen(&self) -> Vec<(f64, Vec<Complex64>)> {
        let eig = SymmetricEigen::new(self.entries.clone());
        let mut pairs: Vec<(f64, Vec<Complex64>)> = eig
            .eigenvalues
            .iter()
            .zip(eig.eigenvectors.column_iter())
            .map(|(&l, v)| (l, v.iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        pairs
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    /// Target relative duality gap.
    pub tol: f64,
    /// Barrier parameter reduction targeted per iteration.
    pub mu: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: 1e-10, mu: 10.0, max_iter: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub matrix: PsdMatrix,
    pub objective: f64,
    /// Certified lower bound `Σ γ_j θ_j` from a feasible dual point.
    pub dual_objective: f64,
    /// Dual multipliers `γ_j`, zero for users without a target.
    pub duals: Vec<f64>,
    /// `(objective - dual_objective) / objective`, zero for the trivial problem.
    pub relative_gap: f64,
    /// Interior-point iterations.
    pub iterations: usize,
}

/// Solves the aggregate beamforming SDP. Users with a zero target are
/// implied by `W ⪰ 0` and dropped; with no positive target the optimum is
/// `W = 0`.
pub fn solve_aggregate_sdp(channels: &[Vec<Complex64>], targets: &[f64], opts: &SdpOptions) -> Result<SdpSolution> {
    if channels.len() != targets.len() {
        return Err(Error::DimensionMismatch { expected: channels.len(), found: targets.len() });
    }
    let dim = channels.first().map_or(0, Vec::len);
    if dim == 0 {
        return Err(Error::Domain("channels must have at least one antenna".into()));
    }
    if let Some(bad) = channels.iter().find(|g| g.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
    }
    if let Some(t) = targets.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::Domain(format!("targets must be finite and non-negative, got {t}")));
    }
    if !(opts.tol > 0.0 && opts.mu > 1.0) {
        return Err(Error::Domain("solver needs tol > 0 and mu > 1".into()));
    }

    let active: Vec<usize> = (0..targets.len()).filter(|&j| targets[j] > 0.0).collect();
    let mut duals = vec![0.0; targets.len()];
    if active.is_empty() {
        return Ok(SdpSolution {
            matrix: PsdMatrix::zeros(dim),
            objective: 0.0,
            dual_objective: 0.0,
            duals,
            relative_gap: 0.0,
            iterations: 0,
        });
    }
    for &j in &active {
        if channels[j].iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(Error::Infeasible(format!("user {j} has a positive target but a zero channel")));
        }
    }

    // Normalize so the largest channel energy and target are both one.
    let gain_scale = active.iter().map(|&j| norm_sqr(&channels[j])).fold(0.0, f64::max);
    let target_scale = active.iter().map(|&j| targets[j]).fold(0.0, f64::max);
    let g: Vec<DVector<Complex64>> = active
        .iter()
        .map(|&j| DVector::from_iterator(dim, channels[j].iter().map(|z| z / gain_scale.sqrt())))
        .collect();
    let theta: Vec<f64> = active.iter().map(|&j| targets[j] / target_scale).collect();

    let scaled = interior_point(&g, &theta, opts)?;
    let factor = target_scale / gain_scale;
    for (k, &j) in active.iter().enumerate() {
        duals[j] = scaled.duals[k] / gain_scale;
    }
    Ok(SdpSolution {
        matrix: PsdMatrix { entries: scaled.w.scale(factor) },
        objective: scaled.primal * factor,
        dual_objective: scaled.dual * factor,
        duals,
        relative_gap: scaled.relative_gap(),
        iterations: scaled.iterations,
    })
}

fn norm_sqr(g: &[Complex64]) -> f64 {
    g.iter().map(|z| z.norm_sqr()).sum()
}

struct Scaled {
    w: DMatrix<Complex64>,
    primal: f64,
    dual: f64,
    duals: Vec<f64>,
    iterations: usize,
}

impl Scaled {
    fn relative_gap(&self) -> f64 {
        ((self.primal - self.dual) / self.primal).max(0.0)
    }
}

fn quad(g: &DVector<Complex64>, w: &DMatrix<Complex64>) -> f64 {
    g.dotc(&(w * g)).re
}

fn hermitian(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    (&m + m.adjoint()).scale(0.5)
}

fn outer(g: &DVector<Complex64>) -> DMatrix<Complex64> {
    g * g.adjoint()
}

/// Primal-dual path following on
///
/// ```text
/// primal: min tr(W)   s.t. g_jᴴ W g_j - s_j = θ_j,  W ⪰ 0, s >= 0
/// dual:   max θᵀγ     s.t. Σ γ_j G_j + Z = I,       Z ⪰ 0, γ >= 0
/// ```
///
/// with the HKM search direction, keeping the dual exactly feasible through
/// `Z = I - Σ γ_j G_j`. Each step solves a `J x J` Schur system and
/// targets `σ μ` with `σ = 1 / mu`, so a full step cuts the barrier parameter
/// by the configured factor.
fn interior_point(g: &[DVector<Complex64>], theta: &[f64], opts: &SdpOptions) -> Result<Scaled> {
    let dim = g[0].len();
    let jn = g.len();
    let n = (dim + jn) as f64;
    let eye = DMatrix::<Complex64>::identity(dim, dim);
    let sigma = 1.0 / opts.mu;

    let c = g
        .iter()
        .zip(theta)
        .map(|(g, t)| 2.0 * t / g.norm_squared())
        .fold(0.0, f64::max);
    let mut w = eye.scale(c);
    let mut s: Vec<f64> = g.iter().zip(theta).map(|(g, t)| c * g.norm_squared() - t).collect();
    let mut sum_g = DMatrix::<Complex64>::zeros(dim, dim);
    for gj in g {
        sum_g += outer(gj);
    }
    let g0 = 0.5 / hermitian(sum_g).symmetric_eigenvalues().max();
    let mut gamma = vec![g0; jn];

    let mut best: Option<Scaled> = None;
    for iter in 0..opts.max_iter {
        let rp: Vec<f64> = (0..jn).map(|j| theta[j] - quad(&g[j], &w) + s[j]).collect();
        let z = hermitian(&eye - dual_slack_sum(g, &gamma));
        let mu = (complex_inner(&w, &z) + s.iter().zip(&gamma).map(|(a, b)| a * b).sum::<f64>()) / n;

        let cert = certify(g, theta, &w, &gamma, iter);
        if best.as_ref().is_none_or(|b: &Scaled| cert.relative_gap() < b.relative_gap()) {
            best = Some(cert);
        }
        let best_gap = best.as_ref().map_or(f64::INFINITY, Scaled::relative_gap);
        if best_gap <= opts.tol || mu <= f64::EPSILON * f64::EPSILON * w.trace().re {
            break;
        }

        let z_chol = Cholesky::new(z.clone()).ok_or(Error::SolverStall { iterations: iter, gap: f64::NAN })?;
        let z_inv = hermitian(z_chol.inverse());
        let target = sigma * mu;

        let wg: Vec<DVector<Complex64>> = g.iter().map(|gj| &w * gj).collect();
        let zg: Vec<DVector<Complex64>> = g.iter().map(|gj| &z_inv * gj).collect();
        let mut schur = DMatrix::<f64>::zeros(jn, jn);
        let mut rhs = DVector::<f64>::zeros(jn);
        let base = z_inv.scale(target) - &w;
        for a in 0..jn {
            for b in 0..jn {
                schur[(a, b)] = (g[a].dotc(&wg[b]) * g[b].dotc(&zg[a])).re;
            }
            schur[(a, a)] += s[a] / gamma[a];
            rhs[a] = rp[a] - quad(&g[a], &base) + target / gamma[a] - s[a];
        }
        let schur = (&schur + schur.transpose()).scale(0.5);
        let dgamma = solve_spd(&schur, &rhs).ok_or(Error::SolverStall { iterations: iter, gap: f64::NAN })?;

        let mut dz = DMatrix::<Complex64>::zeros(dim, dim);
        for (gj, dg) in g.iter().zip(dgamma.iter()) {
            dz -= outer(gj).scale(*dg);
        }
        let dw = hermitian(z_inv.scale(target) - &w - hermitian(&w * &dz * &z_inv));
        let ds: Vec<f64> = (0..jn).map(|j| target / gamma[j] - s[j] - s[j] / gamma[j] * dgamma[j]).collect();

        let alpha_p = 0.95 * max_step_psd(&w, &dw).min(max_step_pos(&s, &ds)).min(1.0 / 0.95);
        let alpha_d = 0.95 * max_step_psd(&z, &dz).min(max_step_pos(&gamma, dgamma.as_slice())).min(1.0 / 0.95);
        w = hermitian(&w + dw.scale(alpha_p));
        for j in 0..jn {
            s[j] += alpha_p * ds[j];
            gamma[j] += alpha_d * dgamma[j];
        }
    }
    let best = best.expect("at least one iteration ran");
    if best.relative_gap() <= opts.tol {
        Ok(best)
    } else {
        Err(Error::SolverStall { iterations: best.iterations, gap: best.relative_gap() })
    }
}

fn dual_slack_sum(g: &[DVector<Complex64>], gamma: &[f64]) -> DMatrix<Complex64> {
    let dim = g[0].len();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for (gj, a) in g.iter().zip(gamma) {
        m += outer(gj).scale(*a);
    }
    m
}

fn complex_inner(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Largest `α` with `X + α ΔX ⪰ 0` for `X ≻ 0`.
fn max_step_psd(x: &DMatrix<Complex64>, dx: &DMatrix<Complex64>) -> f64 {
    let Some(ch) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l = ch.l();
    let Some(a) = l.solve_lower_triangular(dx) else {
        return 0.0;
    };
    let Some(b) = l.solve_lower_triangular(&a.adjoint()) else {
        return 0.0;
    };
    let lmin = hermitian(b).symmetric_eigenvalues().min();
    if lmin < 0.0 { -1.0 / lmin } else { f64::INFINITY }
}

fn max_step_pos(x: &[f64], dx: &[f64]) -> f64 {
    x.iter()
        .zip(dx)
        .filter(|(_, d)| **d < 0.0)
        .map(|(x, d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    match Cholesky::new(a.clone()) {
        Some(ch) => Some(ch.solve(b)),
        None => a.clone().lu().solve(b),
    }
}

/// Turns the final iterate into exact certificates: `W` is scaled up until
/// every constraint holds and `γ` is scaled down until `Σ γ_j G_j ⪯ I`.
fn certify(g: &[DVector<Complex64>], theta: &[f64], w: &DMatrix<Complex64>, gamma: &[f64], iterations: usize) -> Scaled {
    let grow = g
        .iter()
        .zip(theta)
        .map(|(gj, t)| t / quad(gj, w))
        .fold(1.0, f64::max);
    let w = w.scale(grow);
    let mut gamma: Vec<f64> = gamma.iter().map(|v| v.max(0.0)).collect();
    let lmax = hermitian(dual_slack_sum(g, &gamma)).symmetric_eigenvalues().max();
    let shrink = 1.0 / lmax.max(1.0);
    for v in &mut gamma {
        *v *= shrink;
    }
    let dual = gamma.iter().zip(theta).map(|(a, b)| a * b).sum();
    Scaled { primal: w.trace().re, w, dual, duals: gamma, iterations }
}
