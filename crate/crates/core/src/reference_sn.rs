//! Discrete-ordinates reference solver for the slab transport equation
//! `psi_t + mu psi_z + sigma_t psi = sigma_s rho / 2 + Q`.
//!
//! Every ordinate is advected with an upwind finite-volume scheme (minmod
//! slopes and a scalar positivity limiter for second order), and scattering,
//! absorption and emission are integrated exactly in a Strang splitting.

use std::collections::hash_map::DefaultHasher;
use std::fs;
use std::hash::{Hash, Hasher};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problems::{BoundaryDistribution, BoundaryKind, ProblemSpec};
use crate::quadrature::gauss_legendre;
use crate::scheme::Grid1D;
use crate::source::relaxation_factor;

/// Default number of ordinates.
pub const DEFAULT_ORDINATES: usize = 256;
/// Default ratio between reference and model resolution.
pub const DEFAULT_REFINEMENT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct OrdinateSet {
    mu: Vec<f64>,
    w: Vec<f64>,
}

impl OrdinateSet {
    /// Gauss-Legendre ordinates; `m` must be even so that no ordinate is zero.
    pub fn gauss_legendre(m: usize) -> Result<Self> {
        if m == 0 || m % 2 == 1 {
            return Err(Error::InvalidArgument(format!(
                "the ordinate count must be even and positive, got {m}"
            )));
        }
        let (mu, w) = gauss_legendre(m);
        Ok(Self { mu, w })
    }

    /// Arbitrary ordinates with positive weights.
    pub fn new(mu: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if mu.is_empty() || mu.len() != w.len() {
            return Err(Error::InvalidArgument("ordinates and weights must match and be non-empty".into()));
        }
        if mu.iter().any(|&m| m == 0.0 || !(m.abs() <= 1.0)) || w.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidArgument(
                "ordinates must lie in [-1, 1] \\ {0} with positive weights".into(),
            ));
        }
        Ok(Self { mu, w })
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn total_weight(&self) -> f64 {
        self.w.iter().sum()
    }

    pub fn max_speed(&self) -> f64 {
        self.mu.iter().fold(0.0, |a, m| a.max(m.abs()))
    }

    /// Ordinate values of a boundary distribution, scaled so that the
    /// ordinate density matches the one used by the moment models.
    fn boundary_values(&self, problem: &ProblemSpec, dist: BoundaryDistribution) -> Result<Vec<f64>> {
        match dist {
            BoundaryDistribution::Vacuum => Ok(vec![problem.rho_vac / self.total_weight(); self.len()]),
            BoundaryDistribution::Beam { sharpness } => {
                let raw: Vec<f64> = self.mu.iter().map(|m| (-sharpness * (m - 1.0) * (m - 1.0)).exp()).collect();
                let rho: f64 = raw.iter().zip(&self.w).map(|(p, w)| p * w).sum();
                if !(rho > 0.0) {
                    return Err(Error::NumericalDomain("beam misses every ordinate".into()));
                }
                Ok(raw.into_iter().map(|p| p / rho).collect())
            }
        }
    }
}

/// Cell densities of a discrete-ordinates run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceProfile {
    pub grid: Grid1D,
    pub rho: Vec<f64>,
}

impl ReferenceProfile {
    pub fn total_mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.dz()
    }
}

/// Runs the discrete-ordinates model of `problem` on `grid` up to `t_end`.
pub fn solve_sn(
    problem: &ProblemSpec,
    grid: &Grid1D,
    ordinates: &OrdinateSet,
    t_end: f64,
    second_order: bool,
) -> Result<ReferenceProfile> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("t_end must be finite and >= 0, got {t_end}")));
    }
    let cells = grid.cells();
    let wsum = ordinates.total_weight();
    let rho0 = problem.initial_density(grid);
    let mut psi: Vec<Vec<f64>> = ordinates.mu.iter().map(|_| rho0.iter().map(|r| r / wsum).collect()).collect();

    let ghosts = match problem.boundary {
        BoundaryKind::Periodic => None,
        BoundaryKind::Dirichlet { left, right } => Some((
            ordinates.boundary_values(problem, left)?,
            ordinates.boundary_values(problem, right)?,
        )),
    };
    let sigma_s: Vec<f64> = (0..cells).map(|j| problem.sigma_s.eval(grid.center(j))).collect();
    let sigma_a: Vec<f64> = (0..cells).map(|j| problem.sigma_a.eval(grid.center(j))).collect();
    let q: Vec<f64> = (0..cells).map(|j| problem.source.eval(grid.center(j))).collect();
    let trivial = sigma_s.iter().chain(&sigma_a).chain(&q).all(|&v| v == 0.0);

    let safety = 0.99;
    let courant = if second_order { 0.5 } else { 1.0 };
    let dt_max = safety * courant * grid.dz() / ordinates.max_speed();
    let dz = grid.dz();

    let mut rho = vec![0.0; cells];
    let mut source = |psi: &mut [Vec<f64>], dt: f64| {
        if trivial || dt == 0.0 {
            return;
        }
        density_into(psi, &ordinates.w, &mut rho);
        let coeffs: Vec<(f64, f64)> = (0..cells)
            .map(|j| {
                let ea = (-sigma_a[j] * dt).exp();
                let es = (-sigma_s[j] * dt).exp();
                let emitted = relaxation_factor(sigma_a[j], dt) * q[j];
                (ea * es, ea * (1.0 - es) * rho[j] / wsum + emitted)
            })
            .collect();
        psi.par_iter_mut().for_each(|row| {
            for (p, c) in row.iter_mut().zip(&coeffs) {
                *p = c.0 * *p + c.1;
            }
        });
    };

    let mut t = 0.0;
    while t < t_end {
        let remaining = t_end - t;
        let dt = if remaining <= dt_max * (1.0 + 1e-10) { remaining } else { dt_max };
        source(&mut psi, 0.5 * dt);
        psi.par_iter_mut().enumerate().for_each(|(m, row)| {
            let mu = ordinates.mu[m];
            let bc = ghosts.as_ref().map(|(l, r)| (l[m], r[m]));
            let lambda = dt * mu.abs() / dz;
            let mut pad = vec![0.0; cells + 4];
            let mut flux = vec![0.0; cells + 1];
            if second_order {
                let u0 = row.clone();
                upwind_differences(row, mu, bc, true, &mut pad, &mut flux);
                for j in 0..cells {
                    row[j] -= lambda * (flux[j + 1] - flux[j]);
                }
                upwind_differences(row, mu, bc, true, &mut pad, &mut flux);
                for j in 0..cells {
                    row[j] = 0.5 * u0[j] + 0.5 * (row[j] - lambda * (flux[j + 1] - flux[j]));
                }
            } else {
                upwind_differences(row, mu, bc, false, &mut pad, &mut flux);
                for j in 0..cells {
                    row[j] -= lambda * (flux[j + 1] - flux[j]);
                }
            }
        });
        source(&mut psi, 0.5 * dt);
        t = if dt == remaining { t_end } else { t + dt };
    }

    density_into(&psi, &ordinates.w, &mut rho);
    Ok(ReferenceProfile { grid: grid.clone(), rho })
}

fn density_into(psi: &[Vec<f64>], w: &[f64], rho: &mut [f64]) {
    rho.iter_mut().for_each(|r| *r = 0.0);
    for (row, &wm) in psi.iter().zip(w) {
        for (r, p) in rho.iter_mut().zip(row) {
            *r += wm * p;
        }
    }
}

/// Upwind face values `flux[k]` at face `k - 1/2`, `k = 0..=J`, oriented along
/// the direction of travel of the ordinate.
fn upwind_differences(
    psi: &[f64],
    mu: f64,
    bc: Option<(f64, f64)>,
    reconstruct: bool,
    pad: &mut [f64],
    flux: &mut [f64],
) {
    let j_max = psi.len();
    // Two ghost cells per side; stored against the direction of travel so
    // that the upwind neighbour is always on the left.
    let (left, right) = match bc {
        Some((l, r)) => ([l, l], [r, r]),
        None => (
            [psi[(2 * j_max - 2) % j_max], psi[j_max - 1]],
            [psi[0], psi[1 % j_max]],
        ),
    };
    let (first, last) = if mu > 0.0 { (left, right) } else { ([right[1], right[0]], [left[1], left[0]]) };
    pad[..2].copy_from_slice(&first);
    pad[j_max + 2..].copy_from_slice(&last);
    if mu > 0.0 {
        pad[2..j_max + 2].copy_from_slice(psi);
    } else {
        pad[2..j_max + 2].iter_mut().zip(psi.iter().rev()).for_each(|(d, s)| *d = *s);
    }
    // Downstream face value of padded cell i, used at face i - 1/2 after the shift.
    for k in 0..=j_max {
        let i = k + 1;
        let c = pad[i];
        let mut v = c;
        if reconstruct {
            let (dp, dm) = (pad[i + 1] - c, c - pad[i - 1]);
            // The centred difference lies between the one-sided ones, so the
            // three-argument minmod reduces to the two-argument one.
            let mut s = if dp * dm > 0.0 { 0.5 * dp.abs().min(dm.abs()).copysign(dp) } else { 0.0 };
            // Scalar positivity limiter.
            if c - s.abs() < 0.0 {
                s = if c > 0.0 { s.signum() * c } else { 0.0 };
            }
            v = c + s;
        }
        flux[k] = v;
    }
    if mu < 0.0 {
        flux.reverse();
        flux.iter_mut().for_each(|f| *f = -*f);
    }
    if bc.is_none() {
        flux[j_max] = flux[0];
    }
}

/// `(L1, Linf)` distance between `model` and `reference` averaged onto the
/// model grid; `length` is the domain length.
pub fn error_norms(model: &[f64], reference: &[f64], length: f64) -> Result<(f64, f64)> {
    let averaged = cell_average(reference, model.len())?;
    let dz = length / model.len() as f64;
    let mut l1 = 0.0;
    let mut linf: f64 = 0.0;
    for (a, b) in model.iter().zip(&averaged) {
        let d = (a - b).abs();
        l1 += d * dz;
        linf = linf.max(d);
    }
    Ok((l1, linf))
}

/// Means of `fine` over `cells` coarse cells; the fine count must be a multiple.
pub fn cell_average(fine: &[f64], cells: usize) -> Result<Vec<f64>> {
    if cells == 0 || fine.len() < cells || fine.len() % cells != 0 {
        return Err(Error::InvalidArgument(format!(
            "grids are incommensurate: {} reference cells onto {cells} model cells",
            fine.len()
        )));
    }
    let k = fine.len() / cells;
    Ok(fine.chunks(k).map(|c| c.iter().sum::<f64>() / k as f64).collect())
}

/// Reference profiles cached on disk as CSV files.
///
/// Each file starts with one `#` header line holding `problem`, `M`, `J`,
/// `t_end`, `order` and `key` as `name=value` pairs, followed by the column
/// line `z,rho` and one row per cell.
#[derive(Debug, Clone)]
pub struct ReferenceCache {
    dir: PathBuf,
}

impl ReferenceCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn header(problem: &ProblemSpec, m: usize, cells: usize, t_end: f64, second_order: bool) -> String {
        let mut h = DefaultHasher::new();
        format!("{problem:?}").hash(&mut h);
        format!(
            "# problem={} M={m} J={cells} t_end={t_end:e} order={} key={:016x}",
            problem.kind,
            if second_order { 2 } else { 1 },
            h.finish()
        )
    }

    pub fn path_for(&self, problem: &ProblemSpec, m: usize, cells: usize, t_end: f64, second_order: bool) -> PathBuf {
        let mut h = DefaultHasher::new();
        Self::header(problem, m, cells, t_end, second_order).hash(&mut h);
        self.dir
            .join(format!("{}-M{m}-J{cells}-{:016x}.csv", problem.kind, h.finish()))
    }

    /// Loads the profile if a matching file exists; otherwise computes and stores it.
    pub fn load_or_compute(
        &self,
        problem: &ProblemSpec,
        m: usize,
        cells: usize,
        t_end: f64,
        second_order: bool,
    ) -> Result<ReferenceProfile> {
        let grid = problem.grid(cells)?;
        let path = self.path_for(problem, m, cells, t_end, second_order);
        let header = Self::header(problem, m, cells, t_end, second_order);
        if let Some(rho) = read_profile(&path, &header, cells) {
            return Ok(ReferenceProfile { grid, rho });
        }
        let ordinates = OrdinateSet::gauss_legendre(m)?;
        let profile = solve_sn(problem, &grid, &ordinates, t_end, second_order)?;
        fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension("tmp");
        {
            let mut out = BufWriter::new(fs::File::create(&tmp)?);
            writeln!(out, "{header}")?;
            writeln!(out, "z,rho")?;
            for (j, r) in profile.rho.iter().enumerate() {
                writeln!(out, "{:.16e},{:.16e}", grid.center(j), r)?;
            }
            out.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(profile)
    }
}

fn read_profile(path: &Path, header: &str, cells: usize) -> Option<Vec<f64>> {
    let file = fs::File::open(path).ok()?;
    let mut lines = BufReader::new(file).lines();
    if lines.next()?.ok()? != header || lines.next()?.ok()? != "z,rho" {
        return None;
    }
    let rho: Vec<f64> = lines
        .map(|l| l.ok().and_then(|l| l.split(',').nth(1).and_then(|v| v.trim().parse().ok())))
        .collect::<Option<_>>()?;
    (rho.len() == cells).then_some(rho)
}
