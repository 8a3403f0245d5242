//! Benchmark problems: plane source, source beam and a smooth Gaussian pulse.
//!
//! All initial conditions are isotropic, so they are described by a cell-averaged
//! density profile. Material data is piecewise constant and evaluated at cell
//! centers.

use std::fmt;
use std::str::FromStr;

use crate::basis::{BasisSpec, Side};
use crate::error::{Error, Result};
use crate::quadrature::lobatto_reference;
use crate::scheme::Grid1D;
use crate::source::MaterialState;

/// Vacuum density used as the background of every problem.
pub const RHO_VAC: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    PlaneSource,
    SourceBeam,
    SmoothGaussian,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::PlaneSource => "plane-source",
            ProblemKind::SourceBeam => "source-beam",
            ProblemKind::SmoothGaussian => "smooth-gaussian",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "plane-source" | "planesource" => Ok(ProblemKind::PlaneSource),
            "source-beam" | "sourcebeam" => Ok(ProblemKind::SourceBeam),
            "smooth-gaussian" | "gaussian" => Ok(ProblemKind::SmoothGaussian),
            _ => Err(Error::InvalidConfiguration(format!(
                "unknown problem '{s}' (expected plane-source, source-beam or smooth-gaussian)"
            ))),
        }
    }
}

/// Piecewise-constant coefficient: `value[i]` holds on `(edges[i-1], edges[i]]`,
/// the last value everywhere beyond the last edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    pub edges: Vec<f64>,
    pub values: Vec<f64>,
}

impl Piecewise {
    pub fn constant(v: f64) -> Self {
        Self {
            edges: Vec::new(),
            values: vec![v],
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        let k = self.edges.iter().take_while(|&&e| z > e).count();
        self.values[k]
    }
}

/// Angular distribution prescribed at a boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryDistribution {
    /// Isotropic vacuum floor `psi_vac`.
    Vacuum,
    /// `exp(-sharpness (mu - 1)^2)`, normalized to unit density.
    Beam { sharpness: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    Periodic,
    Dirichlet {
        left: BoundaryDistribution,
        right: BoundaryDistribution,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// Vacuum plus a unit Dirac at `z = 0` split onto the two central cells.
    CenteredDirac,
    Vacuum,
    /// Background plus a unit-mass Gaussian density of the given width.
    Gaussian { width: f64, background: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub z_left: f64,
    pub z_right: f64,
    pub t_end: f64,
    pub sigma_s: Piecewise,
    pub sigma_a: Piecewise,
    /// Isotropic emission density `Q` (per unit `mu`).
    pub source: Piecewise,
    pub initial: InitialCondition,
    pub boundary: BoundaryKind,
    pub rho_vac: f64,
    /// Densities below this are reset to the vacuum floor before solving.
    pub rho_min: f64,
    /// Cell counts must be multiples of this.
    pub cell_multiple: usize,
}

impl ProblemSpec {
    pub fn by_kind(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::PlaneSource => plane_source(),
            ProblemKind::SourceBeam => source_beam(),
            ProblemKind::SmoothGaussian => smooth_gaussian(0.4, 0.5),
        }
    }

    pub fn psi_vac(&self) -> f64 {
        self.rho_vac / 2.0
    }

    pub fn default_cells(&self) -> usize {
        match self.kind {
            ProblemKind::PlaneSource => 600,
            ProblemKind::SourceBeam => 240,
            ProblemKind::SmoothGaussian => 160,
        }
    }

    /// Default quadrature order of a model with `n` moments.
    pub fn default_quad_order(&self, full_basis: bool, n: usize) -> usize {
        if !full_basis {
            15
        } else if self.kind == ProblemKind::SourceBeam {
            197
        } else {
            2 * (n - 1) + 40
        }
    }

    pub fn grid(&self, cells: usize) -> Result<Grid1D> {
        if cells % self.cell_multiple != 0 {
            return Err(Error::InvalidConfiguration(format!(
                "{} needs a cell count divisible by {}, got {cells}",
                self.kind, self.cell_multiple
            )));
        }
        Grid1D::new(self.z_left, self.z_right, cells)
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.boundary, BoundaryKind::Periodic)
    }

    /// Cell-averaged initial density.
    pub fn initial_density(&self, grid: &Grid1D) -> Vec<f64> {
        let j = grid.cells();
        match self.initial {
            InitialCondition::Vacuum => vec![self.rho_vac; j],
            InitialCondition::CenteredDirac => {
                let mut rho = vec![self.rho_vac; j];
                let bump = 0.5 / grid.dz();
                rho[j / 2 - 1] += bump;
                rho[j / 2] += bump;
                rho
            }
            InitialCondition::Gaussian { width, background } => {
                let s = width * std::f64::consts::SQRT_2;
                let len = self.z_right - self.z_left;
                // Images within 40 widths; on periodic domains the profile is the periodized Gaussian.
                let images = if self.boundary == BoundaryKind::Periodic { (40.0 * width / len).ceil() as i64 } else { 0 };
                (0..j)
                    .map(|c| {
                        let (a, b) = grid.cell_bounds(c);
                        let mass: f64 = (-images..=images)
                            .map(|k| {
                                let shift = k as f64 * len;
                                0.5 * (libm::erf((b + shift) / s) - libm::erf((a + shift) / s))
                            })
                            .sum();
                        background + mass / grid.dz()
                    })
                    .collect()
            }
        }
    }

    /// Initial cell means for the given basis.
    pub fn initial_moments(&self, spec: &BasisSpec, grid: &Grid1D) -> Result<Vec<Vec<f64>>> {
        self.initial_density(grid)
            .into_iter()
            .map(|rho| spec.isotropic_moment(rho))
            .collect()
    }

    /// Cell-centered material data.
    pub fn materials(&self, spec: &BasisSpec, grid: &Grid1D) -> Result<Vec<MaterialState>> {
        (0..grid.cells())
            .map(|c| {
                let z = grid.center(c);
                let q = self.source.eval(z);
                MaterialState::new(
                    self.sigma_s.eval(z),
                    self.sigma_a.eval(z),
                    spec.isotropic_scaled(2.0 * q),
                )
            })
            .collect()
    }

    /// Moments of a boundary distribution. Vacuum and beams on full bases use
    /// the model quadrature; beams on piecewise bases use a fine composite rule.
    pub fn boundary_moments(&self, spec: &BasisSpec, dist: BoundaryDistribution) -> Result<Vec<f64>> {
        match dist {
            BoundaryDistribution::Vacuum => spec.isotropic_moment(self.rho_vac),
            BoundaryDistribution::Beam { sharpness } => {
                let psi = move |mu: f64| (-sharpness * (mu - 1.0) * (mu - 1.0)).exp();
                let u = if spec.kind().is_full() {
                    spec.project(psi)
                } else {
                    fine_moments(spec, psi, 256, 12)
                };
                let rho = spec.density(&u);
                if !(rho > 0.0) {
                    return Err(Error::NumericalDomain(
                        "beam boundary distribution has no mass on the quadrature".into(),
                    ));
                }
                Ok(u.iter().map(|v| v / rho).collect())
            }
        }
    }

    /// Ghost-cell moments `(left, right)` for Dirichlet problems.
    pub fn ghost_moments(&self, spec: &BasisSpec) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        match self.boundary {
            BoundaryKind::Periodic => Ok(None),
            BoundaryKind::Dirichlet { left, right } => Ok(Some((
                self.boundary_moments(spec, left)?,
                self.boundary_moments(spec, right)?,
            ))),
        }
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }
}

/// `<b psi>` with `sub` subintervals and `m` Lobatto nodes per basis interval.
pub fn fine_moments<F: Fn(f64) -> f64>(spec: &BasisSpec, psi: F, sub: usize, m: usize) -> Vec<f64> {
    let (xr, wr) = lobatto_reference(m);
    let mut u = vec![0.0; spec.n()];
    let grid = spec.grid();
    for pair in grid.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let h = (b - a) / sub as f64;
        for s in 0..sub {
            let lo = a + s as f64 * h;
            let mid = lo + 0.5 * h;
            for (x, w) in xr.iter().zip(&wr) {
                let mu = (mid + 0.5 * h * x).clamp(a, b);
                let side = if mu < 0.5 * (a + b) { Side::Above } else { Side::Below };
                let bv = spec
                    .evaluate_sided(mu, side)
                    .expect("node lies inside [-1, 1]");
                let f = 0.5 * h * w * psi(mu);
                for (ui, bi) in u.iter_mut().zip(&bv) {
                    *ui += f * bi;
                }
            }
        }
    }
    u
}

pub fn plane_source() -> ProblemSpec {
    ProblemSpec {
        kind: ProblemKind::PlaneSource,
        z_left: -1.2,
        z_right: 1.2,
        t_end: 1.0,
        sigma_s: Piecewise::constant(1.0),
        sigma_a: Piecewise::constant(0.0),
        source: Piecewise::constant(0.0),
        initial: InitialCondition::CenteredDirac,
        boundary: BoundaryKind::Dirichlet {
            left: BoundaryDistribution::Vacuum,
            right: BoundaryDistribution::Vacuum,
        },
        rho_vac: RHO_VAC,
        rho_min: RHO_VAC / 10.0,
        cell_multiple: 2,
    }
}

pub fn source_beam() -> ProblemSpec {
    ProblemSpec {
        kind: ProblemKind::SourceBeam,
        z_left: 0.0,
        z_right: 3.0,
        t_end: 2.5,
        sigma_s: Piecewise {
            edges: vec![1.0, 2.0],
            values: vec![0.0, 2.0, 10.0],
        },
        sigma_a: Piecewise {
            edges: vec![2.0],
            values: vec![1.0, 0.0],
        },
        source: Piecewise {
            edges: vec![1.0, 1.5],
            values: vec![0.0, 0.5, 0.0],
        },
        initial: InitialCondition::Vacuum,
        boundary: BoundaryKind::Dirichlet {
            left: BoundaryDistribution::Beam { sharpness: 1e5 },
            right: BoundaryDistribution::Vacuum,
        },
        rho_vac: RHO_VAC,
        rho_min: RHO_VAC / 10.0,
        cell_multiple: 6,
    }
}

/// Periodized Gaussian pulse on `[-1, 1]` with a small isotropic background.
pub fn smooth_gaussian(width: f64, t_end: f64) -> ProblemSpec {
    ProblemSpec {
        kind: ProblemKind::SmoothGaussian,
        z_left: -1.0,
        z_right: 1.0,
        t_end,
        sigma_s: Piecewise::constant(1.0),
        sigma_a: Piecewise::constant(0.0),
        source: Piecewise::constant(0.0),
        initial: InitialCondition::Gaussian {
            width,
            background: 0.1,
        },
        boundary: BoundaryKind::Periodic,
        rho_vac: RHO_VAC,
        rho_min: RHO_VAC / 10.0,
        cell_multiple: 1,
    }
}
