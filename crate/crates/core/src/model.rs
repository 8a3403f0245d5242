//! Moment models: a basis together with a closure.

use std::fmt;
use std::str::FromStr;

use crate::basis::{BasisKind, BasisSpec};
use crate::closure::ClosureKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Pn,
    Mn,
    Hfpn,
    Hfmn,
    Pmpn,
    Pmmn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Pn,
        ModelKind::Mn,
        ModelKind::Hfpn,
        ModelKind::Hfmn,
        ModelKind::Pmpn,
        ModelKind::Pmmn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Pn => "pn",
            ModelKind::Mn => "mn",
            ModelKind::Hfpn => "hfpn",
            ModelKind::Hfmn => "hfmn",
            ModelKind::Pmpn => "pmpn",
            ModelKind::Pmmn => "pmmn",
        }
    }

    pub fn is_entropy(self) -> bool {
        matches!(self, ModelKind::Mn | ModelKind::Hfmn | ModelKind::Pmmn)
    }

    pub fn basis_kind(self) -> BasisKind {
        match self {
            ModelKind::Pn | ModelKind::Mn => BasisKind::FullLegendre,
            ModelKind::Hfpn | ModelKind::Hfmn => BasisKind::Hat,
            ModelKind::Pmpn | ModelKind::Pmmn => BasisKind::Partial,
        }
    }

    /// The model with the same basis and the other closure.
    pub fn counterpart(self) -> ModelKind {
        match self {
            ModelKind::Pn => ModelKind::Mn,
            ModelKind::Mn => ModelKind::Pn,
            ModelKind::Hfpn => ModelKind::Hfmn,
            ModelKind::Hfmn => ModelKind::Hfpn,
            ModelKind::Pmpn => ModelKind::Pmmn,
            ModelKind::Pmmn => ModelKind::Pmpn,
        }
    }

    /// Checks that `n` moments make sense for this model.
    pub fn validate_n(self, n: usize) -> Result<()> {
        let ok = match self.basis_kind() {
            BasisKind::Partial => n >= 2 && n % 2 == 0,
            _ => n >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfiguration(format!(
                "{} needs {}, got n = {n}",
                self.name(),
                match self.basis_kind() {
                    BasisKind::Partial => "an even moment count n >= 2",
                    BasisKind::Hat => "at least 2 hat nodes",
                    _ => "n = N + 1 >= 2 moments",
                }
            )))
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidConfiguration(format!(
                    "unknown model '{s}' (expected one of pn, mn, hfpn, hfmn, pmpn, pmmn)"
                ))
            })
    }
}

/// A fully set up moment model.
#[derive(Debug, Clone)]
pub struct Model {
    pub kind: ModelKind,
    pub spec: BasisSpec,
    pub closure: ClosureKind,
}

impl Model {
    /// Builds the model with `n` moments on uniform angular grids.
    pub fn new(kind: ModelKind, n: usize, quad_order: usize) -> Result<Self> {
        kind.validate_n(n)?;
        let spec = match kind.basis_kind() {
            BasisKind::FullLegendre | BasisKind::FullMonomial => {
                BasisSpec::full_legendre(n - 1, quad_order)?
            }
            BasisKind::Hat => BasisSpec::hat_uniform(n, quad_order)?,
            BasisKind::Partial => BasisSpec::partial_uniform(n, quad_order)?,
        };
        let closure = if kind.is_entropy() {
            ClosureKind::Entropy
        } else {
            ClosureKind::linear(&spec)?
        };
        Ok(Self {
            kind,
            spec,
            closure,
        })
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn is_entropy(&self) -> bool {
        self.kind.is_entropy()
    }
}
