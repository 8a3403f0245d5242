//! Realizability-preserving moment methods for linear kinetic transport in
//! slab geometry.

pub mod basis;
pub mod closure;
pub mod config;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod problems;
pub mod quadrature;
pub mod realizability;
pub mod reference_sn;
pub mod scheme;
pub mod source;

pub use basis::{BasisKind, BasisSpec, MomentVector};
pub use error::{Error, Result};
pub use closure::{ClosureKind, EigenDecomposition};
pub use config::{LimiterVariant, SolverConfig};
pub use entropy::{NewtonConfig, SolveReport};
pub use model::{Model, ModelKind};
pub use problems::{ProblemKind, ProblemSpec};
pub use realizability::LimiterConfig;
pub use reference_sn::{error_norms, solve_sn, OrdinateSet, ReferenceCache, ReferenceProfile};
pub use rayon::ThreadPool;
pub use scheme::{simulate, thread_pool, Diagnostics, Grid1D, RunOutput, Scheme, StateField};
pub use source::MaterialState;
