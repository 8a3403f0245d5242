//! Minimum-entropy closure: Newton's method on the dual problem for the
//! Maxwell-Boltzmann entropy, with density normalization and isotropic
//! regularization.

use crate::basis::{BasisKind, BasisSpec};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm1, norm2, SymBand};
use crate::realizability;

/// Arguments of `exp` above this are rejected during the line search.
const EXP_CAP: f64 = 700.0;
/// Maximal number of step halvings in the Armijo line search.
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    /// Iterations per regularization level.
    pub k0: usize,
    /// Total iteration budget over all regularization levels.
    pub k_max: usize,
    pub eps_gamma: f64,
    /// Relative pivot floor of the Cholesky factorization.
    pub chol_eps: f64,
    /// Line-search shrink factor.
    pub chi: f64,
    /// Armijo slope constant.
    pub xi: f64,
    pub tau: f64,
    pub reg_ladder: Vec<f64>,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            k0: 500,
            k_max: 1000,
            eps_gamma: 1e-2,
            chol_eps: f64::EPSILON,
            chi: 0.5,
            xi: 1e-3,
            tau: 1e-9,
            reg_ladder: vec![0.0, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.5, 1.0],
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        let ladder = &self.reg_ladder;
        if ladder.is_empty()
            || ladder[0] < 0.0
            || *ladder.last().unwrap() != 1.0
            || ladder.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidConfiguration(
                "regularization ladder must increase strictly from >= 0 to 1".into(),
            ));
        }
        if !(self.eps_gamma > 0.0 && self.eps_gamma < 1.0) {
            return Err(Error::InvalidConfiguration(format!(
                "eps_gamma must lie in (0, 1), got {}",
                self.eps_gamma
            )));
        }
        if !(self.chi > 0.0 && self.chi < 1.0) || !(self.xi > 0.0 && self.xi < 1.0) {
            return Err(Error::InvalidConfiguration(
                "line-search parameters must lie in (0, 1)".into(),
            ));
        }
        if self.k0 == 0 || self.k_max == 0 || !(self.tau > 0.0) || !(self.chol_eps >= 0.0) {
            return Err(Error::InvalidConfiguration(
                "iteration limits and tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub alpha: Vec<f64>,
    /// Newton iterations summed over all regularization levels.
    pub iterations: usize,
    pub regularization_r: f64,
    pub converged: bool,
    /// The (possibly regularized) moment vector the multipliers belong to.
    pub moments: Vec<f64>,
}

/// `u(alpha) = <b exp(b^T alpha)>` by quadrature.
pub fn ansatz_moments(spec: &BasisSpec, alpha: &[f64]) -> Result<Vec<f64>> {
    check_len(spec, alpha)?;
    let mut u = vec![0.0; spec.n()];
    for (q, node) in spec.nodes().iter().enumerate() {
        let psi = spec.node_dot(q, alpha).exp();
        if !psi.is_finite() {
            return Err(Error::NumericalDomain(format!(
                "ansatz overflows at mu = {}",
                node.mu
            )));
        }
        let wpsi = node.weight * psi;
        for (a, v) in spec.node_values(q).iter().enumerate() {
            u[node.start + a] += wpsi * v;
        }
    }
    Ok(u)
}

/// Gradient `u(alpha) - u_target` and Hessian `<b b^T exp(b^T alpha)>` of the
/// dual objective.
pub fn gradient_and_hessian(
    spec: &BasisSpec,
    alpha: &[f64],
    u_target: &[f64],
) -> Result<(Vec<f64>, SymBand)> {
    check_len(spec, alpha)?;
    check_len(spec, u_target)?;
    let mut h = SymBand::zeros(spec.n(), spec.bandwidth());
    let mut u = vec![0.0; spec.n()];
    accumulate(spec, alpha, &mut u, &mut h, f64::INFINITY).ok_or_else(|| {
        Error::NumericalDomain("ansatz overflows while assembling the Hessian".into())
    })?;
    for (g, t) in u.iter_mut().zip(u_target) {
        *g -= t;
    }
    Ok((u, h))
}

/// Dual objective `<exp(b^T alpha)> - alpha^T u`.
pub fn dual_objective(spec: &BasisSpec, alpha: &[f64], u: &[f64]) -> Result<f64> {
    check_len(spec, alpha)?;
    objective(spec, alpha, u, f64::INFINITY)
        .ok_or_else(|| Error::NumericalDomain("ansatz overflows".into()))
}

fn check_len(spec: &BasisSpec, v: &[f64]) -> Result<()> {
    if v.len() != spec.n() {
        return Err(Error::InvalidArgument(format!(
            "expected {} components, got {}",
            spec.n(),
            v.len()
        )));
    }
    Ok(())
}

/// Fills `u` with the ansatz moments and `h` with the Hessian; returns the
/// total mass `<exp(b^T alpha)>`, or `None` if an exponent exceeds `cap`.
fn accumulate(spec: &BasisSpec, alpha: &[f64], u: &mut [f64], h: &mut SymBand, cap: f64) -> Option<f64> {
    u.iter_mut().for_each(|v| *v = 0.0);
    h.fill_zero();
    let mut mass = 0.0;
    for (q, node) in spec.nodes().iter().enumerate() {
        let s = spec.node_dot(q, alpha);
        if !(s <= cap) {
            return None;
        }
        let wpsi = node.weight * s.exp();
        if !wpsi.is_finite() {
            return None;
        }
        mass += wpsi;
        let vals = spec.node_values(q);
        for (a, &va) in vals.iter().enumerate() {
            let i = node.start + a;
            let wv = wpsi * va;
            u[i] += wv;
            for (b, &vb) in vals.iter().enumerate().take(a + 1) {
                h.add_lower(i, node.start + b, wv * vb);
            }
        }
    }
    Some(mass)
}

fn objective(spec: &BasisSpec, beta: &[f64], phi: &[f64], cap: f64) -> Option<f64> {
    let mut mass = 0.0;
    for (q, node) in spec.nodes().iter().enumerate() {
        let s = spec.node_dot(q, beta);
        if !(s <= cap) {
            return None;
        }
        mass += node.weight * s.exp();
    }
    let f = mass - dot(beta, phi);
    f.is_finite().then_some(f)
}

/// Per-group change of the objective along `beta + zeta_b d`, given the node
/// weights `omega_q exp(s_q)`, exponents `s_q` and directional slopes `t_q`.
#[allow(clippy::too_many_arguments)]
fn group_decrease(
    spec: &BasisSpec,
    node_w: &[f64],
    node_s: &[f64],
    node_t: &[f64],
    d: &[f64],
    phi: &[f64],
    gsize: usize,
    zeta: &[f64],
    out: &mut [f64],
    noise: &mut [f64],
) {
    out.iter_mut().for_each(|v| *v = 0.0);
    noise.iter_mut().for_each(|v| *v = 0.0);
    for (q, node) in spec.nodes().iter().enumerate() {
        let b = node.start / gsize;
        let step = zeta[b] * node_t[q];
        let term = if node_s[q] + step <= EXP_CAP {
            node_w[q] * step.exp_m1()
        } else {
            f64::INFINITY
        };
        out[b] += term;
        noise[b] += term.abs();
    }
    for b in 0..out.len() {
        let r = b * gsize..(b + 1) * gsize;
        let lin = zeta[b] * dot(&d[r.clone()], &phi[r]);
        out[b] -= lin;
        noise[b] += lin.abs();
        if out[b].is_nan() {
            out[b] = f64::INFINITY;
        }
    }
}

/// Cheap sufficient condition for the realizability of
/// `v = phi - (1 - eps_gamma) u(beta) / varrho`.
///
/// With normalized ansatz weights `w_q = omega_q exp(b_q^T beta) / varrho`, the
/// weights `w_q (eps_gamma + b_q^T s)` with `s = varrho H^{-1} (phi - u(beta) / varrho)`
/// reproduce `v` exactly, so `v` is a non-negative node combination whenever
/// `b_q^T s >= -eps_gamma` at every node.
fn weight_certificate(
    spec: &BasisSpec,
    chol: &crate::linalg::BandCholesky,
    phi: &[f64],
    ub: &[f64],
    varrho: f64,
    eps_gamma: f64,
) -> bool {
    let mut s: Vec<f64> = phi.iter().zip(ub).map(|(p, m)| p - m / varrho).collect();
    chol.solve_in_place(&mut s);
    s.iter_mut().for_each(|v| *v *= varrho);
    (0..spec.nodes().len()).all(|q| spec.node_dot(q, &s) >= -eps_gamma)
}

/// Default test for the second stopping criterion: whether `v` is realizable.
pub fn default_realizability_check(spec: &BasisSpec, v: &[f64]) -> bool {
    match spec.kind() {
        BasisKind::Hat => v.iter().all(|&x| x >= 0.0),
        _ => realizability::is_realizable(spec, v, 0.0),
    }
}

/// Solves for the multipliers of `u`, optionally starting from `warm` on the
/// unregularized level.
pub fn solve(
    spec: &BasisSpec,
    u: &[f64],
    cfg: &NewtonConfig,
    warm: Option<&[f64]>,
) -> Result<SolveReport> {
    solve_with_check(spec, u, cfg, warm, &|v| default_realizability_check(spec, v), None)
}

/// Like [`solve`], recording the dual objective after every accepted step.
pub fn solve_traced(
    spec: &BasisSpec,
    u: &[f64],
    cfg: &NewtonConfig,
    trace: &mut Vec<f64>,
) -> Result<SolveReport> {
    solve_with_check(
        spec,
        u,
        cfg,
        None,
        &|v| default_realizability_check(spec, v),
        Some(trace),
    )
}

enum LevelOutcome {
    Converged { beta: Vec<f64>, varrho: f64 },
    Failed,
    BudgetExhausted,
}

/// Full solver with a caller-supplied realizability test for the second
/// stopping criterion.
pub fn solve_with_check(
    spec: &BasisSpec,
    u: &[f64],
    cfg: &NewtonConfig,
    warm: Option<&[f64]>,
    check: &dyn Fn(&[f64]) -> bool,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<SolveReport> {
    check_len(spec, u)?;
    let rho = spec.density(u);
    if !(rho > 0.0) || !rho.is_finite() || u.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "moment vector must be finite with positive density, got density {rho}"
        )));
    }
    let n = spec.n();
    let e = spec.e_vector();
    let iso = spec.isotropic_scaled(rho);
    let mut total = 0usize;
    let mut level = 0usize;
    let last = cfg.reg_ladder.len() - 1;
    let mut last_beta = vec![0.0; n];

    while level <= last {
        let r = cfg.reg_ladder[level];
        let u_r: Vec<f64> = if r == 0.0 {
            u.to_vec()
        } else {
            u.iter().zip(&iso).map(|(a, b)| (1.0 - r) * a + r * b).collect()
        };
        let rho_r = spec.density(&u_r);
        let phi: Vec<f64> = u_r.iter().map(|v| v / rho_r).collect();
        let beta0: Vec<f64> = match warm {
            Some(a) if level == 0 && a.len() == n && a.iter().all(|v| v.is_finite()) => {
                let shift = rho_r.ln();
                a.iter().zip(e).map(|(ai, ei)| ai - ei * shift).collect()
            }
            _ => e.iter().map(|ei| -ei * std::f64::consts::LN_2).collect(),
        };
        let budget = if level == last {
            cfg.k0
        } else {
            cfg.k0.min(cfg.k_max.saturating_sub(total))
        };
        let (outcome, used, beta_end) =
            newton_level(spec, &phi, rho_r, beta0, cfg, budget, check, trace.as_deref_mut());
        total += used;
        last_beta = beta_end;
        match outcome {
            LevelOutcome::Converged { beta, varrho } => {
                let shift = (rho_r / varrho).ln();
                let alpha: Vec<f64> = beta.iter().zip(e).map(|(b, ei)| b + ei * shift).collect();
                return Ok(SolveReport {
                    alpha,
                    iterations: total,
                    regularization_r: r,
                    converged: true,
                    moments: u_r,
                });
            }
            LevelOutcome::Failed => level += 1,
            LevelOutcome::BudgetExhausted => {
                level = if total >= cfg.k_max && level < last { last } else { level + 1 };
            }
        }
    }
    Err(Error::OptimizationFailure {
        iterations: total,
        regularization: cfg.reg_ladder[last],
        last_iterate: last_beta,
    })
}

#[allow(clippy::too_many_arguments)]
fn newton_level(
    spec: &BasisSpec,
    phi: &[f64],
    rho: f64,
    beta0: Vec<f64>,
    cfg: &NewtonConfig,
    budget: usize,
    check: &dyn Fn(&[f64]) -> bool,
    mut trace: Option<&mut Vec<f64>>,
) -> (LevelOutcome, usize, Vec<f64>) {
    let n = spec.n();
    let mut beta = beta0;
    let mut h = SymBand::zeros(n, spec.bandwidth());
    let mut ub = vec![0.0; n];
    if accumulate(spec, &beta, &mut ub, &mut h, EXP_CAP).is_none() {
        return (LevelOutcome::Failed, 0, beta);
    }
    // Partial moments decouple into independent 2x2 problems.
    let gsize = if spec.kind() == BasisKind::Partial { 2 } else { n };
    let groups = n / gsize;
    let mut f_trial = vec![0.0; groups];
    let mut noise = vec![0.0; groups];
    let mut slopes = vec![0.0; groups];
    let mut zeta = vec![1.0; groups];
    let mut done = vec![false; groups];
    if let Some(t) = trace.as_deref_mut() {
        t.push(objective(spec, &beta, phi, f64::INFINITY).unwrap_or(f64::INFINITY));
    }

    let phi_norm = norm2(phi);
    let sn = if spec.kind().is_full() { 1.0 } else { (n as f64).sqrt() };
    let tau_prime = cfg.tau / ((1.0 + sn * phi_norm) * rho + sn * cfg.tau);
    // Same bound at unit density: the residual then also stays below `tau * rho`.
    let tol = tau_prime.min(cfg.tau / (1.0 + sn * phi_norm + sn * cfg.tau));
    let hat = spec.kind() == BasisKind::Hat;
    let gate = 1.0 - cfg.eps_gamma;

    let mut g = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let nq = spec.nodes().len();
    let (mut node_w, mut node_s, mut node_t) = (vec![0.0; nq], vec![0.0; nq], vec![0.0; nq]);
    for k in 0..budget {
        for i in 0..n {
            g[i] = ub[i] - phi[i];
        }
        let Some(chol) = h.cholesky(cfg.chol_eps) else {
            return (LevelOutcome::Failed, k + 1, beta);
        };
        d.iter_mut().zip(&g).for_each(|(di, gi)| *di = -gi);
        chol.solve_in_place(&mut d);
        if d.iter().any(|v| !v.is_finite()) {
            return (LevelOutcome::Failed, k + 1, beta);
        }

        if norm2(&g) < tol {
            let varrho = spec.density(&ub);
            let passes_gate = hat || gate < (-(norm1(&d) + varrho.ln().abs())).exp();
            if passes_gate {
                let scale = gate / varrho;
                let v: Vec<f64> = phi.iter().zip(&ub).map(|(p, m)| p - scale * m).collect();
                let certified = spec.kind().is_full()
                    && weight_certificate(spec, &chol, phi, &ub, varrho, cfg.eps_gamma);
                if certified || check(&v) {
                    return (LevelOutcome::Converged { beta: beta.clone(), varrho }, k + 1, beta);
                }
            }
        }

        // Armijo backtracking, independently per separable block of the objective.
        for b in 0..groups {
            let r = b * gsize..(b + 1) * gsize;
            slopes[b] = dot(&d[r.clone()], &g[r]);
            if slopes[b] > 0.0 || !slopes[b].is_finite() {
                return (LevelOutcome::Failed, k + 1, beta);
            }
            zeta[b] = 1.0;
            done[b] = slopes[b] == 0.0;
        }
        // Exponents at the current iterate and along the direction, so that the
        // decrease is evaluated without cancellation against `beta^T phi`.
        for (q, node) in spec.nodes().iter().enumerate() {
            node_s[q] = spec.node_dot(q, &beta);
            node_w[q] = node.weight * node_s[q].exp();
            node_t[q] = spec.node_dot(q, &d);
        }
        let mut pending = done.iter().filter(|&&x| !x).count();
        for _ in 0..MAX_BACKTRACKS {
            if pending == 0 {
                break;
            }
            group_decrease(
                spec, &node_w, &node_s, &node_t, &d, phi, gsize, &zeta, &mut f_trial, &mut noise,
            );
            for b in 0..groups {
                if done[b] {
                    continue;
                }
                // Rounding in the sums may exceed the predicted decrease near the optimum.
                if f_trial[b] <= cfg.xi * zeta[b] * slopes[b] + 1e-14 * noise[b] {
                    done[b] = true;
                    pending -= 1;
                } else {
                    zeta[b] *= cfg.chi;
                }
            }
        }
        if pending > 0 {
            return (LevelOutcome::Failed, k + 1, beta);
        }
        for i in 0..n {
            trial[i] = beta[i] + zeta[i / gsize] * d[i];
        }
        std::mem::swap(&mut beta, &mut trial);
        if accumulate(spec, &beta, &mut ub, &mut h, EXP_CAP).is_none() {
            return (LevelOutcome::Failed, k + 1, beta);
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(objective(spec, &beta, phi, f64::INFINITY).unwrap_or(f64::INFINITY));
        }
    }
    (LevelOutcome::BudgetExhausted, budget, beta)
}
