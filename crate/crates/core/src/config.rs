//! Solver parameters shared by the scheme, the CLI and the benchmarks.

use crate::entropy::NewtonConfig;
use crate::error::{Error, Result};
use crate::realizability::LimiterConfig;

/// Which realizability limiter the scheme applies to reconstructed values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimiterVariant {
    /// Positivity (hat), slab conditions (partial) or the LP limiter (full).
    #[default]
    Standard,
    /// Facet-intersection limiter; full moments with `n <= 3` only.
    HalfSpace,
    /// Componentwise limiting of characteristic variables by LP (full and hat).
    CharacteristicLp,
}

impl std::str::FromStr for LimiterVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(Self::Standard),
            "half-space" | "halfspace" => Ok(Self::HalfSpace),
            "characteristic-lp" | "characteristic" => Ok(Self::CharacteristicLp),
            _ => Err(Error::InvalidConfiguration(format!(
                "unknown limiter '{s}' (expected standard, half-space or characteristic-lp)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub newton: NewtonConfig,
    pub limiter: LimiterConfig,
    pub limiter_variant: LimiterVariant,
    /// Fraction of the admissible CFL time step actually used.
    pub cfl_safety: f64,
    /// Spatial dimension entering the CFL bound.
    pub dimension: usize,
    /// Minmod reconstruction with Heun's method; otherwise first order with forward Euler.
    pub second_order: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            newton: NewtonConfig::default(),
            limiter: LimiterConfig::default(),
            limiter_variant: LimiterVariant::Standard,
            cfl_safety: 0.99,
            dimension: 1,
            second_order: true,
            threads: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.newton.validate()?;
        if !(self.limiter.eps_r >= 0.0 && self.limiter.eps_tilde >= 0.0) {
            return Err(Error::InvalidConfiguration(
                "limiter epsilons must be non-negative".into(),
            ));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidConfiguration(format!(
                "CFL safety factor must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if self.dimension == 0 {
            return Err(Error::InvalidConfiguration("dimension must be >= 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidConfiguration("thread count must be >= 1".into()));
        }
        Ok(())
    }
}
