//! Exact solution of the collision, absorption and emission subsystem
//! `u' = sigma_s G u - sigma_t u + <b Q>` with isotropic scattering, where
//! `G u = u_iso(rho(u))`.

use crate::basis::BasisSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialState {
    pub sigma_s: f64,
    pub sigma_a: f64,
    /// Emission moments `<b Q>`.
    pub q_moments: Vec<f64>,
}

impl MaterialState {
    pub fn new(sigma_s: f64, sigma_a: f64, q_moments: Vec<f64>) -> Result<Self> {
        if !(sigma_s >= 0.0 && sigma_a >= 0.0) || !sigma_s.is_finite() || !sigma_a.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cross sections must be finite and non-negative, got sigma_s = {sigma_s}, sigma_a = {sigma_a}"
            )));
        }
        Ok(Self {
            sigma_s,
            sigma_a,
            q_moments,
        })
    }

    /// Pure transport: no interaction and no emission.
    pub fn vacuum(n: usize) -> Self {
        Self {
            sigma_s: 0.0,
            sigma_a: 0.0,
            q_moments: vec![0.0; n],
        }
    }

    pub fn sigma_t(&self) -> f64 {
        self.sigma_s + self.sigma_a
    }

    pub fn is_trivial(&self) -> bool {
        self.sigma_s == 0.0 && self.sigma_a == 0.0 && self.q_moments.iter().all(|&q| q == 0.0)
    }
}

/// `(1 - exp(-sigma t)) / sigma`, with the limit `t` at `sigma = 0`.
pub fn relaxation_factor(sigma: f64, t: f64) -> f64 {
    if sigma * t < 1e-8 {
        // Two-term series keeps full precision for tiny arguments.
        t * (1.0 - 0.5 * sigma * t)
    } else {
        -(-sigma * t).exp_m1() / sigma
    }
}

/// Exact solution of the source subsystem after time `t`.
pub fn advance_source(spec: &BasisSpec, state: &MaterialState, u0: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time step must be >= 0, got {t}")));
    }
    if state.q_moments.len() != u0.len() || u0.len() != spec.n() {
        return Err(Error::InvalidArgument("moment vector length mismatch".into()));
    }
    let mut out = vec![0.0; u0.len()];
    advance_source_into(spec, state, u0, t, &mut out);
    Ok(out)
}

/// Allocation-free variant of [`advance_source`] without argument checks.
pub fn advance_source_into(spec: &BasisSpec, state: &MaterialState, u0: &[f64], t: f64, out: &mut [f64]) {
    let ea = (-state.sigma_a * t).exp();
    let es = (-state.sigma_s * t).exp();
    let iso0 = spec.isotropic_scaled(spec.density(u0));
    let ft = relaxation_factor(state.sigma_t(), t);
    let fa = relaxation_factor(state.sigma_a, t);
    let gq = spec.isotropic_scaled(spec.density(&state.q_moments));
    for i in 0..out.len() {
        let homog = ea * (es * u0[i] + (1.0 - es) * iso0[i]);
        let q = state.q_moments[i];
        out[i] = homog + ft * (q - gq[i]) + fa * gq[i];
    }
}

/// Right-hand side `sigma_s G u - sigma_t u + <b Q>`.
pub fn source_rhs(spec: &BasisSpec, state: &MaterialState, u: &[f64]) -> Vec<f64> {
    let iso = spec.isotropic_scaled(spec.density(u));
    let st = state.sigma_t();
    (0..u.len())
        .map(|i| state.sigma_s * iso[i] - st * u[i] + state.q_moments[i])
        .collect()
}
