//! Second-order realizability-preserving finite-volume scheme.
//!
//! One flux stage performs, for every cell:
//! 1. the entropy solve for the cell mean (warm started, regularized means
//!    replace the stored ones),
//! 2. minmod reconstruction in characteristic variables,
//! 3. realizability limiting of both interface values,
//! 4. the entropy solves for the limited interface values, falling back to
//!    first order in the cell when one of them fails,
//! 5. kinetic fluxes and the conservative update.
//!
//! Time stepping is Heun's method inside a Strang splitting with the exact
//! source solution.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::basis::BasisKind;
use crate::closure::{ClosureKind, EigenDecomposition};
use crate::config::{LimiterVariant, SolverConfig};
use crate::entropy::{self, SolveReport};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::problems::ProblemSpec;
use crate::realizability::{self, HalfSpaceSet};
use crate::source::{advance_source_into, MaterialState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    z_min: f64,
    z_max: f64,
    cells: usize,
}

impl Grid1D {
    pub fn new(z_min: f64, z_max: f64, cells: usize) -> Result<Self> {
        if cells < 3 {
            return Err(Error::InvalidConfiguration(format!(
                "at least 3 cells required, got {cells}"
            )));
        }
        if !(z_max > z_min) || !z_min.is_finite() || !z_max.is_finite() {
            return Err(Error::InvalidConfiguration(format!(
                "invalid domain [{z_min}, {z_max}]"
            )));
        }
        Ok(Self { z_min, z_max, cells })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn length(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / self.cells as f64
    }

    pub fn center(&self, j: usize) -> f64 {
        self.z_min + (j as f64 + 0.5) * self.dz()
    }

    pub fn cell_bounds(&self, j: usize) -> (f64, f64) {
        let dz = self.dz();
        (self.z_min + j as f64 * dz, self.z_min + (j + 1) as f64 * dz)
    }
}

/// Largest realizability-preserving time step `safety (1 - eps_gamma) dz / (2 sqrt(d))`.
pub fn cfl_dt(dz: f64, eps_gamma: f64, safety: f64, dimension: usize) -> f64 {
    safety * (1.0 - eps_gamma) / (2.0 * (dimension as f64).sqrt()) * dz
}

/// `minmod(a, b, c)`: the smallest magnitude if all signs agree, else 0.
pub fn minmod(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// Cell means with the multipliers of their last solve.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub means: Vec<Vec<f64>>,
    /// Entropy multipliers (a copy of the mean for linear closures).
    pub alphas: Vec<Vec<f64>>,
    /// Cells whose reconstruction was disabled in the last stage.
    pub disabled: Vec<bool>,
}

impl StateField {
    pub fn cells(&self) -> usize {
        self.means.len()
    }

    pub fn densities(&self, model: &Model) -> Vec<f64> {
        self.means.iter().map(|u| model.spec.density(u)).collect()
    }

    pub fn total_mass(&self, model: &Model, dz: f64) -> f64 {
        self.densities(model).iter().sum::<f64>() * dz
    }
}

/// Counters collected over a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub steps: usize,
    pub stages: usize,
    pub newton_solves: usize,
    pub limiter_activations: usize,
    pub max_theta: f64,
    /// Number of solves that ended on each regularization level.
    pub regularization_counts: Vec<usize>,
    pub reg_ladder: Vec<f64>,
    /// Total Newton iterations per solve, as a histogram.
    pub newton_iterations: BTreeMap<usize, usize>,
    pub mood_activations: usize,
    pub eigen_failures: usize,
    pub limiter_failures: usize,
    pub density_guard_triggers: usize,
    pub wall_time: f64,
}

impl Diagnostics {
    fn new(ladder: &[f64]) -> Self {
        Self {
            regularization_counts: vec![0; ladder.len()],
            reg_ladder: ladder.to_vec(),
            ..Self::default()
        }
    }

    fn record_solve(&mut self, rep: &SolveReport) {
        self.newton_solves += 1;
        *self.newton_iterations.entry(rep.iterations).or_insert(0) += 1;
        if let Some(k) = self.reg_ladder.iter().position(|&r| r == rep.regularization_r) {
            self.regularization_counts[k] += 1;
        }
    }

    pub fn regularized_solves(&self) -> usize {
        self.regularization_counts.iter().skip(1).sum()
    }

    /// Flat `key=value` lines.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("steps".to_string(), self.steps.to_string()),
            ("stages".to_string(), self.stages.to_string()),
            ("newton_solves".to_string(), self.newton_solves.to_string()),
            ("limiter_activations".to_string(), self.limiter_activations.to_string()),
            ("max_theta".to_string(), format!("{:e}", self.max_theta)),
            ("mood_activations".to_string(), self.mood_activations.to_string()),
            ("eigen_failures".to_string(), self.eigen_failures.to_string()),
            ("limiter_failures".to_string(), self.limiter_failures.to_string()),
            ("density_guard_triggers".to_string(), self.density_guard_triggers.to_string()),
            ("wall_time_s".to_string(), format!("{:.6}", self.wall_time)),
        ];
        for (r, c) in self.reg_ladder.iter().zip(&self.regularization_counts) {
            kv.push((format!("regularization[{r:e}]"), c.to_string()));
        }
        for (it, c) in &self.newton_iterations {
            kv.push((format!("newton_iterations[{it}]"), c.to_string()));
        }
        kv
    }
}

/// Ghost cell at a Dirichlet boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Ghost {
    pub moments: Vec<f64>,
    /// Multipliers (entropy) or moments (linear) entering the kinetic flux.
    pub state: Vec<f64>,
}

/// Per-cell interface values after reconstruction and limiting.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFaces {
    /// Value at `z_{j-1/2}` (seen from inside cell `j`).
    pub left: Vec<f64>,
    /// Value at `z_{j+1/2}`.
    pub right: Vec<f64>,
    pub theta_max: f64,
    pub eigen_failed: bool,
    pub limiter_failed: bool,
}

struct FaceStates {
    left: Vec<f64>,
    right: Vec<f64>,
    reports: Vec<SolveReport>,
    mood: bool,
}

struct MeanSolve {
    mean: Vec<f64>,
    alpha: Vec<f64>,
    report: Option<SolveReport>,
    guard: bool,
}

/// Spatial and temporal discretization of one problem with one model.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub model: Model,
    pub grid: Grid1D,
    pub cfg: SolverConfig,
    pub materials: Vec<MaterialState>,
    /// `None` for periodic boundaries.
    pub ghosts: Option<(Ghost, Ghost)>,
    pub rho_min: f64,
    pub rho_vac: f64,
    linear_eigen: Option<EigenDecomposition>,
    half_space: Option<HalfSpaceSet>,
    materials_trivial: bool,
}

impl Scheme {
    pub fn new(model: Model, problem: &ProblemSpec, grid: Grid1D, cfg: SolverConfig) -> Result<Self> {
        let materials = problem.materials(&model.spec, &grid)?;
        let ghosts = problem.ghost_moments(&model.spec)?;
        Self::from_parts(model, grid, cfg, materials, ghosts, problem.rho_min, problem.rho_vac)
    }

    /// Assembles a scheme from explicit material data and ghost moments.
    pub fn from_parts(
        model: Model,
        grid: Grid1D,
        cfg: SolverConfig,
        materials: Vec<MaterialState>,
        ghost_moments: Option<(Vec<f64>, Vec<f64>)>,
        rho_min: f64,
        rho_vac: f64,
    ) -> Result<Self> {
        cfg.validate()?;
        if materials.len() != grid.cells() {
            return Err(Error::InvalidArgument(format!(
                "{} material states for {} cells",
                materials.len(),
                grid.cells()
            )));
        }
        let linear_eigen = match &model.closure {
            ClosureKind::Linear(_) => Some(model.closure.eigendecompose(&model.spec, &[])?),
            ClosureKind::Entropy => None,
        };
        let half_space = match cfg.limiter_variant {
            LimiterVariant::HalfSpace if model.is_entropy() => Some(HalfSpaceSet::build(&model.spec)?),
            _ => None,
        };
        let materials_trivial = materials.iter().all(MaterialState::is_trivial);
        let mut scheme = Self {
            model,
            grid,
            cfg,
            materials,
            ghosts: None,
            rho_min,
            rho_vac,
            linear_eigen,
            half_space,
            materials_trivial,
        };
        if let Some((l, r)) = ghost_moments {
            let gl = scheme.make_ghost(l)?;
            let gr = scheme.make_ghost(r)?;
            scheme.ghosts = Some((gl, gr));
        }
        Ok(scheme)
    }

    fn make_ghost(&self, moments: Vec<f64>) -> Result<Ghost> {
        if !self.model.is_entropy() {
            return Ok(Ghost {
                state: moments.clone(),
                moments,
            });
        }
        let rep = entropy::solve(&self.model.spec, &moments, &self.cfg.newton, None)?;
        Ok(Ghost {
            moments: rep.moments,
            state: rep.alpha,
        })
    }

    pub fn is_periodic(&self) -> bool {
        self.ghosts.is_none()
    }

    pub fn dt_max(&self) -> f64 {
        cfl_dt(
            self.grid.dz(),
            self.cfg.newton.eps_gamma,
            self.cfg.cfl_safety,
            self.cfg.dimension,
        )
    }

    /// Field with the given means; multipliers are solved in the first stage.
    pub fn field_from_means(&self, means: Vec<Vec<f64>>) -> Result<StateField> {
        let n = self.model.n();
        if means.len() != self.grid.cells() || means.iter().any(|u| u.len() != n) {
            return Err(Error::InvalidArgument("field does not match the grid".into()));
        }
        let alphas = if self.model.is_entropy() {
            let iso: Vec<f64> = self
                .model
                .spec
                .e_vector()
                .iter()
                .map(|e| -e * std::f64::consts::LN_2)
                .collect();
            means
                .iter()
                .map(|u| {
                    let shift = self.model.spec.density(u).max(self.rho_vac).ln();
                    iso.iter()
                        .zip(self.model.spec.e_vector())
                        .map(|(a, e)| a + e * shift)
                        .collect()
                })
                .collect()
        } else {
            means.clone()
        };
        let cells = means.len();
        Ok(StateField {
            means,
            alphas,
            disabled: vec![false; cells],
        })
    }

    fn solve_mean(&self, j: usize, mean: &[f64], warm: &[f64], time: f64) -> Result<MeanSolve> {
        if !self.model.is_entropy() {
            return Ok(MeanSolve {
                mean: mean.to_vec(),
                alpha: mean.to_vec(),
                report: None,
                guard: false,
            });
        }
        let spec = &self.model.spec;
        let rho = spec.density(mean);
        let (target, guard) = if !(rho >= self.rho_min) {
            (spec.isotropic_moment(self.rho_vac)?, true)
        } else {
            (mean.to_vec(), false)
        };
        let rep = entropy::solve(spec, &target, &self.cfg.newton, Some(warm)).map_err(|e| {
            Error::StepFailure {
                cell: j,
                time,
                reason: format!("cell-mean optimization failed: {e}"),
                moments: target.clone(),
            }
        })?;
        Ok(MeanSolve {
            mean: rep.moments.clone(),
            alpha: rep.alpha.clone(),
            report: Some(rep),
            guard,
        })
    }

    /// Neighbor means `(left, right)` of cell `j`.
    fn neighbors<'a>(&'a self, means: &'a [Vec<f64>], j: usize) -> (&'a [f64], &'a [f64]) {
        let last = means.len() - 1;
        let left = if j > 0 {
            &means[j - 1][..]
        } else {
            match &self.ghosts {
                Some((g, _)) => &g.moments[..],
                None => &means[last][..],
            }
        };
        let right = if j < last {
            &means[j + 1][..]
        } else {
            match &self.ghosts {
                Some((_, g)) => &g.moments[..],
                None => &means[0][..],
            }
        };
        (left, right)
    }

    /// Minmod reconstruction in characteristic variables followed by
    /// realizability limiting, for cell `j`.
    pub fn cell_faces(&self, means: &[Vec<f64>], alphas: &[Vec<f64>], j: usize) -> CellFaces {
        let mean = &means[j];
        let unchanged = CellFaces {
            left: mean.clone(),
            right: mean.clone(),
            theta_max: 0.0,
            eigen_failed: false,
            limiter_failed: false,
        };
        if !self.cfg.second_order {
            return unchanged;
        }
        let spec = &self.model.spec;
        let computed;
        let eig = match &self.linear_eigen {
            Some(e) => e,
            None => match self.model.closure.eigendecompose(spec, &alphas[j]) {
                Ok(e) => {
                    computed = e;
                    &computed
                }
                Err(_) => {
                    return CellFaces {
                        eigen_failed: true,
                        ..unchanged
                    }
                }
            },
        };
        let (ul, ur) = self.neighbors(means, j);
        let n = mean.len();
        let dp: Vec<f64> = (0..n).map(|i| ur[i] - mean[i]).collect();
        let dm: Vec<f64> = (0..n).map(|i| mean[i] - ul[i]).collect();
        let wp = eig.to_characteristic(&dp);
        let wm = eig.to_characteristic(&dm);
        let slope: Vec<f64> = (0..n)
            .map(|i| 0.5 * minmod(wp[i], wm[i], 0.5 * (wp[i] + wm[i])))
            .collect();
        if slope.iter().all(|&s| s == 0.0) {
            return unchanged;
        }
        let delta = eig.from_characteristic(&slope);
        let mut left: Vec<f64> = (0..n).map(|i| mean[i] - delta[i]).collect();
        let mut right: Vec<f64> = (0..n).map(|i| mean[i] + delta[i]).collect();
        if !self.model.is_entropy() {
            return CellFaces {
                left,
                right,
                ..unchanged
            };
        }
        let mut limiter_failed = false;
        let theta_max;
        match (self.cfg.limiter_variant, spec.kind()) {
            (LimiterVariant::CharacteristicLp, BasisKind::Hat | BasisKind::FullLegendre | BasisKind::FullMonomial) => {
                let lim = |face: &[f64]| {
                    realizability::limit_characteristic_lp(face, mean, spec, &eig.v, &eig.v_inv, &self.cfg.limiter)
                };
                match (lim(&left), lim(&right)) {
                    (Ok(l), Ok(r)) => {
                        theta_max = if l == left && r == right { 0.0 } else { 1.0 };
                        left = l;
                        right = r;
                    }
                    _ => {
                        limiter_failed = true;
                        theta_max = 1.0;
                        left = mean.clone();
                        right = mean.clone();
                    }
                }
            }
            (_, BasisKind::Partial) => {
                let tl = realizability::limit_partial_blocks(&left, mean, spec, &self.cfg.limiter);
                let tr = realizability::limit_partial_blocks(&right, mean, spec, &self.cfg.limiter);
                let thetas: Vec<f64> = tl.iter().zip(&tr).map(|(a, b)| a.max(*b)).collect();
                theta_max = thetas.iter().fold(0.0, |m: f64, t| m.max(*t));
                for (b, &t) in thetas.iter().enumerate() {
                    for i in 2 * b..2 * b + 2 {
                        damp(&mut left[i], mean[i], t);
                        damp(&mut right[i], mean[i], t);
                    }
                }
            }
            (variant, kind) => {
                let theta = match (variant, kind) {
                    (_, BasisKind::Hat) => {
                        Ok(realizability::limit_hat(&left, mean, &self.cfg.limiter)
                            .max(realizability::limit_hat(&right, mean, &self.cfg.limiter)))
                    }
                    (LimiterVariant::HalfSpace, _) => {
                        let hs = self.half_space.as_ref().expect("half-space set is built at setup");
                        Ok(hs.limit(&left, mean, &self.cfg.limiter).max(hs.limit(&right, mean, &self.cfg.limiter)))
                    }
                    _ => realizability::limit_full_lp(&left, mean, spec, &self.cfg.limiter).and_then(|a| {
                        realizability::limit_full_lp(&right, mean, spec, &self.cfg.limiter).map(|b| a.max(b))
                    }),
                };
                let theta = theta.unwrap_or_else(|_| {
                    limiter_failed = true;
                    1.0
                });
                theta_max = theta;
                for i in 0..n {
                    damp(&mut left[i], mean[i], theta);
                    damp(&mut right[i], mean[i], theta);
                }
            }
        }
        CellFaces {
            left,
            right,
            theta_max,
            eigen_failed: false,
            limiter_failed,
        }
    }

    /// Entropy solves for the interface values of cell `j`; first order on failure.
    fn face_states(&self, faces: CellFaces, mean: &[f64], alpha: &[f64]) -> FaceStates {
        if !self.model.is_entropy() {
            return FaceStates {
                left: faces.left,
                right: faces.right,
                reports: Vec::new(),
                mood: false,
            };
        }
        let spec = &self.model.spec;
        let mut reports = Vec::with_capacity(2);
        let mut solve_face = |face: &[f64]| -> Option<Vec<f64>> {
            if face == mean {
                return Some(alpha.to_vec());
            }
            match entropy::solve(spec, face, &self.cfg.newton, Some(alpha)) {
                Ok(rep) => {
                    let ok = rep.converged && rep.regularization_r == 0.0;
                    let a = rep.alpha.clone();
                    reports.push(rep);
                    ok.then_some(a)
                }
                Err(_) => None,
            }
        };
        let l = solve_face(&faces.left);
        let r = match l {
            Some(_) => solve_face(&faces.right),
            None => None,
        };
        match (l, r) {
            (Some(left), Some(right)) => FaceStates {
                left,
                right,
                reports,
                mood: false,
            },
            _ => FaceStates {
                left: alpha.to_vec(),
                right: alpha.to_vec(),
                reports,
                mood: true,
            },
        }
    }

    /// Semi-discrete right-hand side `(F_{j-1/2} - F_{j+1/2}) / dz`.
    ///
    /// Updates the stored means (vacuum guard, regularization) and multipliers.
    pub fn flux_rhs(&self, field: &mut StateField, time: f64, diag: &mut Diagnostics) -> Result<Vec<Vec<f64>>> {
        let cells = field.cells();
        diag.stages += 1;

        let solved: Vec<Result<MeanSolve>> = (0..cells)
            .into_par_iter()
            .map(|j| self.solve_mean(j, &field.means[j], &field.alphas[j], time))
            .collect();
        for (j, s) in solved.into_iter().enumerate() {
            let s = s?;
            if s.guard {
                diag.density_guard_triggers += 1;
            }
            if let Some(rep) = &s.report {
                diag.record_solve(rep);
            }
            field.means[j] = s.mean;
            field.alphas[j] = s.alpha;
        }

        let means = &field.means;
        let alphas = &field.alphas;
        let states: Vec<(FaceStates, f64, bool, bool)> = (0..cells)
            .into_par_iter()
            .map(|j| {
                let faces = self.cell_faces(means, alphas, j);
                let (theta, ef, lf) = (faces.theta_max, faces.eigen_failed, faces.limiter_failed);
                (self.face_states(faces, &means[j], &alphas[j]), theta, ef, lf)
            })
            .collect();

        let mut left_states = Vec::with_capacity(cells);
        let mut right_states = Vec::with_capacity(cells);
        for (j, (fs, theta, ef, lf)) in states.into_iter().enumerate() {
            if theta > 1e-10 {
                diag.limiter_activations += 1;
            }
            diag.max_theta = diag.max_theta.max(theta);
            diag.eigen_failures += ef as usize;
            diag.limiter_failures += lf as usize;
            for rep in &fs.reports {
                diag.record_solve(rep);
            }
            if fs.mood {
                diag.mood_activations += 1;
            }
            field.disabled[j] = fs.mood || ef;
            left_states.push(fs.left);
            right_states.push(fs.right);
        }

        let spec = &self.model.spec;
        let closure = &self.model.closure;
        let fluxes: Vec<Vec<f64>> = (0..cells)
            .into_par_iter()
            .map(|i| {
                let upwind = if i > 0 {
                    &right_states[i - 1][..]
                } else {
                    match &self.ghosts {
                        Some((g, _)) => &g.state[..],
                        None => &right_states[cells - 1][..],
                    }
                };
                closure.kinetic_flux(spec, upwind, &left_states[i])
            })
            .collect();
        let last_flux = match &self.ghosts {
            Some((_, g)) => closure.kinetic_flux(spec, &right_states[cells - 1], &g.state),
            None => fluxes[0].clone(),
        };
        let inv_dz = 1.0 / self.grid.dz();
        Ok((0..cells)
            .map(|j| {
                let fr = if j + 1 < cells { &fluxes[j + 1] } else { &last_flux };
                fluxes[j].iter().zip(fr).map(|(a, b)| (a - b) * inv_dz).collect()
            })
            .collect())
    }

    /// Forward-Euler transport step.
    pub fn euler_step(&self, field: &mut StateField, dt: f64, time: f64, diag: &mut Diagnostics) -> Result<()> {
        let rhs = self.flux_rhs(field, time, diag)?;
        for (u, l) in field.means.iter_mut().zip(&rhs) {
            for (ui, li) in u.iter_mut().zip(l) {
                *ui += dt * li;
            }
        }
        Ok(())
    }

    /// Heun (SSP-RK2) transport step.
    pub fn heun_step(&self, field: &mut StateField, dt: f64, time: f64, diag: &mut Diagnostics) -> Result<()> {
        let rhs = self.flux_rhs(field, time, diag)?;
        let start = field.means.clone();
        for (u, l) in field.means.iter_mut().zip(&rhs) {
            for (ui, li) in u.iter_mut().zip(l) {
                *ui += dt * li;
            }
        }
        let rhs2 = self.flux_rhs(field, time + dt, diag)?;
        for ((u, l), u0) in field.means.iter_mut().zip(&rhs2).zip(&start) {
            for ((ui, li), u0i) in u.iter_mut().zip(l).zip(u0) {
                *ui = 0.5 * u0i + 0.5 * (*ui + dt * li);
            }
        }
        Ok(())
    }

    /// Transport step of the configured order.
    pub fn transport_step(&self, field: &mut StateField, dt: f64, time: f64, diag: &mut Diagnostics) -> Result<()> {
        if self.cfg.second_order {
            self.heun_step(field, dt, time, diag)
        } else {
            self.euler_step(field, dt, time, diag)
        }
    }

    /// Exact source solution over `dt` in every cell.
    pub fn source_step(&self, field: &mut StateField, dt: f64) {
        if self.materials_trivial || dt == 0.0 {
            return;
        }
        let spec = &self.model.spec;
        field
            .means
            .par_iter_mut()
            .zip(&self.materials)
            .for_each(|(u, m)| {
                let u0 = u.clone();
                advance_source_into(spec, m, &u0, dt, u);
            });
    }

    /// `S(dt/2) T(dt) S(dt/2)`.
    pub fn strang_step(&self, field: &mut StateField, dt: f64, time: f64, diag: &mut Diagnostics) -> Result<()> {
        self.source_step(field, 0.5 * dt);
        self.transport_step(field, dt, time, diag)?;
        self.source_step(field, 0.5 * dt);
        diag.steps += 1;
        Ok(())
    }

    /// Advances `field` from `t = 0` to `t_end`, shortening the last step.
    pub fn run(&self, field: &mut StateField, t_end: f64, diag: &mut Diagnostics) -> Result<()> {
        if !(t_end >= 0.0) {
            return Err(Error::InvalidArgument(format!("t_end must be >= 0, got {t_end}")));
        }
        let dt_max = self.dt_max();
        let mut t = 0.0;
        while t < t_end {
            let remaining = t_end - t;
            let dt = if remaining <= dt_max * (1.0 + 1e-10) { remaining } else { dt_max };
            self.strang_step(field, dt, t, diag)?;
            t = if dt == remaining { t_end } else { t + dt };
        }
        Ok(())
    }

    pub fn new_diagnostics(&self) -> Diagnostics {
        Diagnostics::new(&self.cfg.newton.reg_ladder)
    }
}

#[inline]
fn damp(v: &mut f64, mean: f64, theta: f64) {
    if theta >= 1.0 {
        *v = mean;
    } else if theta > 0.0 {
        *v = mean + (1.0 - theta) * (*v - mean);
    }
}

/// Result of a complete simulation.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub grid: Grid1D,
    pub field: StateField,
    pub diagnostics: Diagnostics,
    pub densities: Vec<f64>,
}

/// Sets up `problem` with `model` on `cells` cells and runs it to `t_end`.
pub fn simulate(problem: &ProblemSpec, model: Model, cells: usize, t_end: f64, cfg: SolverConfig) -> Result<RunOutput> {
    let threads = cfg.threads;
    let body = move || -> Result<RunOutput> {
        let started = Instant::now();
        let grid = problem.grid(cells)?;
        let means = problem.initial_moments(&model.spec, &grid)?;
        let scheme = Scheme::new(model, problem, grid, cfg)?;
        let mut field = scheme.field_from_means(means)?;
        let mut diag = scheme.new_diagnostics();
        scheme.run(&mut field, t_end, &mut diag)?;
        diag.wall_time = started.elapsed().as_secs_f64();
        let densities = field.densities(&scheme.model);
        Ok(RunOutput {
            grid,
            field,
            diagnostics: diag,
            densities,
        })
    };
    match threads {
        Some(t) => thread_pool(t)?.install(body),
        None => body(),
    }
}

/// Dedicated worker pool with `threads` threads.
pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfiguration(format!("thread pool: {e}")))
}
