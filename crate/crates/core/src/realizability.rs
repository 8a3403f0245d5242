//! Realizability tests and realizability limiters.
//!
//! Every limiter returns the damping `theta` that pulls a reconstructed
//! interface value `u` toward the cell mean `u_mean`:
//! `u_lim = theta * u_mean + (1 - theta) * u`.

use nalgebra::DMatrix;

use crate::basis::{BasisKind, BasisSpec};
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome, StandardForm};

/// Distance-to-boundary parameters of the limiters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    /// Minimal distance of limited values to the realizable boundary.
    pub eps_r: f64,
    /// Additive bump applied to the LP limiter result.
    pub eps_tilde: f64,
}

impl Default for LimiterConfig {
    fn default() -> Self {
        Self {
            eps_r: 1e-11,
            eps_tilde: 1e-11,
        }
    }
}

/// Basis values at the quadrature nodes as a dense row-major `n x Q` matrix.
pub fn node_matrix(spec: &BasisSpec) -> Vec<f64> {
    let n = spec.n();
    let nq = spec.nodes().len();
    let mut b = vec![0.0; n * nq];
    for (q, node) in spec.nodes().iter().enumerate() {
        for (a, v) in spec.node_values(q).iter().enumerate() {
            b[(node.start + a) * nq + q] = *v;
        }
    }
    b
}

fn lp_iteration_cap(rows: usize, cols: usize) -> usize {
    10 * rows * cols.max(1)
}

/// Membership in the (numerically) realizable set, with a distance margin
/// for the bases that have analytic realizability conditions.
///
/// Hat functions: componentwise `u_i >= margin`. Partial moments: the slab
/// conditions per interval. Full moments: LP feasibility `B w = u, w >= 0`
/// over the quadrature nodes (the margin is ignored).
pub fn is_realizable(spec: &BasisSpec, u: &[f64], margin: f64) -> bool {
    if u.iter().any(|v| !v.is_finite()) || !(spec.density(u) > 0.0) {
        return false;
    }
    match spec.kind() {
        BasisKind::Hat => u.iter().all(|&v| v >= margin),
        BasisKind::Partial => (0..spec.n() / 2).all(|j| {
            let (lo, hi) = spec.partial_interval(j);
            partial_block_ok(u[2 * j], u[2 * j + 1], lo, hi, margin)
        }),
        BasisKind::FullMonomial | BasisKind::FullLegendre => lp_feasible(spec, u),
    }
}

fn partial_block_ok(u0: f64, u1: f64, lo: f64, hi: f64, margin: f64) -> bool {
    u0 >= margin
        && lo * u0 + margin * (lo * lo + 1.0).sqrt() <= u1
        && u1 <= hi * u0 - margin * (hi * hi + 1.0).sqrt()
}

/// Whether `u` is a non-negative combination of the basis values at the nodes.
pub fn lp_feasible(spec: &BasisSpec, u: &[f64]) -> bool {
    let n = spec.n();
    let nq = spec.nodes().len();
    let scale = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) {
        return false;
    }
    let b: Vec<f64> = u.iter().map(|v| v / scale).collect();
    let a = node_matrix(spec);
    let c = vec![0.0; nq];
    let problem = StandardForm {
        rows: n,
        cols: nq,
        a: &a,
        b: &b,
        c: &c,
    };
    matches!(
        lp::solve(&problem, lp_iteration_cap(n, nq)),
        LpOutcome::Optimal { .. }
    )
}

/// Intersection parameter of the segment `u + theta (u_mean - u)` with a
/// boundary, or 0 when it falls outside `[0, 1]`.
#[inline]
fn clip_unit(t: f64) -> f64 {
    if (0.0..=1.0).contains(&t) {
        t
    } else {
        0.0
    }
}

/// Componentwise positivity limiter for hat functions.
pub fn limit_hat(u_recon: &[f64], u_mean: &[f64], cfg: &LimiterConfig) -> f64 {
    let eps = cfg.eps_r;
    u_recon
        .iter()
        .zip(u_mean)
        .map(|(&u, &m)| {
            if m < eps {
                1.0
            } else {
                clip_unit((eps - u) / (m - u))
            }
        })
        .fold(0.0, f64::max)
}

/// Limiter variables for each partial-moment interval.
pub fn limit_partial_blocks(
    u_recon: &[f64],
    u_mean: &[f64],
    spec: &BasisSpec,
    cfg: &LimiterConfig,
) -> Vec<f64> {
    let eps = cfg.eps_r;
    (0..spec.n() / 2)
        .map(|j| {
            let (lo, hi) = spec.partial_interval(j);
            let (u0, u1) = (u_recon[2 * j], u_recon[2 * j + 1]);
            let (m0, m1) = (u_mean[2 * j], u_mean[2 * j + 1]);
            if !partial_block_ok(m0, m1, lo, hi, eps) {
                return 1.0;
            }
            let t0 = clip_unit((eps - u0) / (m0 - u0));
            let t1 = clip_unit(
                (u0 * lo - u1 + eps * (lo * lo + 1.0).sqrt()) / ((m1 - u1) - (m0 - u0) * lo),
            );
            let t2 = clip_unit(
                (u0 * hi - u1 - eps * (hi * hi + 1.0).sqrt()) / ((m1 - u1) - (m0 - u0) * hi),
            );
            t0.max(t1).max(t2)
        })
        .collect()
}

/// Single limiter variable for one-dimensional partial moments (max over intervals).
pub fn limit_partial_1d(
    u_recon: &[f64],
    u_mean: &[f64],
    spec: &BasisSpec,
    cfg: &LimiterConfig,
) -> f64 {
    limit_partial_blocks(u_recon, u_mean, spec, cfg)
        .into_iter()
        .fold(0.0, f64::max)
}

/// Limiter for full moments by linear programming over the quadrature nodes:
/// minimal `theta >= -eps_tilde` with `(1 - theta) u + theta u_mean = B w`,
/// `w >= 0`; the result is `theta + eps_tilde` clamped to `[0, 1]`.
///
/// An infeasible program (the mean itself is not realizable) yields 1.
pub fn limit_full_lp(
    u_recon: &[f64],
    u_mean: &[f64],
    spec: &BasisSpec,
    cfg: &LimiterConfig,
) -> Result<f64> {
    let n = spec.n();
    let nq = spec.nodes().len();
    let scale = u_recon
        .iter()
        .chain(u_mean)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) || !scale.is_finite() {
        return Ok(1.0);
    }
    let u: Vec<f64> = u_recon.iter().map(|v| v / scale).collect();
    let m: Vec<f64> = u_mean.iter().map(|v| v / scale).collect();
    let cols = nq + 1;
    let bmat = node_matrix(spec);
    let mut a = vec![0.0; n * cols];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        a[i * cols..i * cols + nq].copy_from_slice(&bmat[i * nq..(i + 1) * nq]);
        a[i * cols + nq] = u[i] - m[i];
        rhs[i] = u[i] - cfg.eps_tilde * (m[i] - u[i]);
    }
    let mut c = vec![0.0; cols];
    c[nq] = 1.0;
    let problem = StandardForm {
        rows: n,
        cols,
        a: &a,
        b: &rhs,
        c: &c,
    };
    match lp::solve(&problem, lp_iteration_cap(n, cols)) {
        LpOutcome::Optimal { x, .. } => Ok(x[nq].clamp(0.0, 1.0)),
        LpOutcome::Infeasible => Ok(1.0),
        LpOutcome::IterationLimit => Err(Error::LimiterFailure(
            "LP limiter exceeded its iteration cap".into(),
        )),
    }
}

/// Half-space description `{u : a_l^T u < c_l}` of the numerically
/// realizable cone for bases with `b_0 = 1` and `n <= 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceSet {
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
}

impl HalfSpaceSet {
    /// Convex hull of `{0} ∪ {b(mu_i)}` with the `rho < 1` facet dropped.
    ///
    /// All node values lie on the plane `u_0 = 1`, so the hull facets through
    /// the origin are the cones over the edges of the node polygon in that plane.
    pub fn build(spec: &BasisSpec) -> Result<Self> {
        let n = spec.n();
        let first_is_one = spec.kind().is_full()
            || (spec.kind() == BasisKind::Partial && n == 2);
        if !(2..=3).contains(&n) || !first_is_one {
            return Err(Error::InvalidConfiguration(format!(
                "half-space limiter needs n <= 3 and b_0 = 1 (got n = {n}, {:?})",
                spec.kind()
            )));
        }
        let points: Vec<Vec<f64>> = (0..spec.nodes().len())
            .map(|q| spec.node_values(q).to_vec())
            .collect();
        let (normals, offsets) = if n == 2 {
            let lo = points.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
            if !(hi > lo) {
                return Err(Error::InvalidConfiguration("degenerate node hull".into()));
            }
            (vec![vec![-hi, 1.0], vec![lo, -1.0]], vec![0.0, 0.0])
        } else {
            let planar: Vec<(f64, f64)> = points.iter().map(|p| (p[1], p[2])).collect();
            let hull = convex_hull_2d(&planar);
            if hull.len() < 3 {
                return Err(Error::InvalidConfiguration("degenerate node hull".into()));
            }
            let (cx, cy) = hull.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.0, sy + p.1));
            let centroid = [1.0, cx / hull.len() as f64, cy / hull.len() as f64];
            let mut normals = Vec::new();
            for k in 0..hull.len() {
                let p = [1.0, hull[k].0, hull[k].1];
                let q = [1.0, hull[(k + 1) % hull.len()].0, hull[(k + 1) % hull.len()].1];
                let mut a = [
                    p[1] * q[2] - p[2] * q[1],
                    p[2] * q[0] - p[0] * q[2],
                    p[0] * q[1] - p[1] * q[0],
                ];
                let side: f64 = a.iter().zip(&centroid).map(|(x, y)| x * y).sum();
                if side > 0.0 {
                    a.iter_mut().for_each(|v| *v = -*v);
                }
                let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
                normals.push(a.iter().map(|v| v / norm).collect());
            }
            let offsets = vec![0.0; normals.len()];
            (normals, offsets)
        };
        Ok(Self { normals, offsets })
    }

    pub fn facet_count(&self) -> usize {
        self.normals.len()
    }

    /// Offsets shifted inward by `eps_r * |a_l|`.
    fn shifted(&self, eps_r: f64) -> impl Iterator<Item = (&Vec<f64>, f64)> + '_ {
        self.normals.iter().zip(&self.offsets).map(move |(a, &c)| {
            let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            (a, c - eps_r * norm)
        })
    }

    /// Facet-intersection limiter; 1 when the mean violates a shifted facet.
    pub fn limit(&self, u_recon: &[f64], u_mean: &[f64], cfg: &LimiterConfig) -> f64 {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut theta: f64 = 0.0;
        for (a, c) in self.shifted(cfg.eps_r) {
            let am = dot(a, u_mean);
            if am >= c {
                return 1.0;
            }
            let au = dot(a, u_recon);
            theta = theta.max(clip_unit((c - au) / (am - au)));
        }
        theta
    }
}

/// Counter-clockwise convex hull by the monotone chain algorithm.
fn convex_hull_2d(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-15 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-15 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Limits each characteristic component independently by linear programming.
///
/// `v` holds the eigenvectors of the flux Jacobian at the mean. Returns the
/// limited vector. Full moments require the limited value to be a
/// non-negative node combination; hat functions require componentwise
/// `u_i >= eps_r`. Other bases are rejected.
pub fn limit_characteristic_lp(
    u_recon: &[f64],
    u_mean: &[f64],
    spec: &BasisSpec,
    v: &DMatrix<f64>,
    v_inv: &DMatrix<f64>,
    cfg: &LimiterConfig,
) -> Result<Vec<f64>> {
    let n = spec.n();
    let w_recon = v_inv * nalgebra::DVector::from_column_slice(u_recon);
    let w_mean = v_inv * nalgebra::DVector::from_column_slice(u_mean);
    // vt[i][j] = V_ij (w_recon_j - w_mean_j)
    let vt = DMatrix::from_fn(n, n, |i, j| v[(i, j)] * (w_recon[j] - w_mean[j]));
    let theta = match spec.kind() {
        BasisKind::FullLegendre | BasisKind::FullMonomial => {
            let nq = spec.nodes().len();
            // variables: w (nq), theta' (n), slack s (n) with theta' + s = 1 + eps
            let cols = nq + 2 * n;
            let rows = 2 * n;
            let bmat = node_matrix(spec);
            let mut a = vec![0.0; rows * cols];
            let mut b = vec![0.0; rows];
            for i in 0..n {
                a[i * cols..i * cols + nq].copy_from_slice(&bmat[i * nq..(i + 1) * nq]);
                let mut shift = 0.0;
                for j in 0..n {
                    a[i * cols + nq + j] = vt[(i, j)];
                    shift += vt[(i, j)];
                }
                b[i] = u_recon[i] + cfg.eps_tilde * shift;
                let r = n + i;
                a[r * cols + nq + i] = 1.0;
                a[r * cols + nq + n + i] = 1.0;
                b[r] = 1.0 + cfg.eps_tilde;
            }
            let mut c = vec![0.0; cols];
            c[nq..nq + n].iter_mut().for_each(|x| *x = 1.0);
            solve_theta_lp(rows, cols, &a, &b, &c, nq, n)?
        }
        BasisKind::Hat => {
            // variables: theta (n), slack s (n) for vt theta + s = u - eps, t (n) for theta + t = 1
            let cols = 3 * n;
            let rows = 2 * n;
            let mut a = vec![0.0; rows * cols];
            let mut b = vec![0.0; rows];
            for i in 0..n {
                for j in 0..n {
                    a[i * cols + j] = vt[(i, j)];
                }
                a[i * cols + n + i] = 1.0;
                b[i] = u_recon[i] - cfg.eps_r;
                let r = n + i;
                a[r * cols + i] = 1.0;
                a[r * cols + 2 * n + i] = 1.0;
                b[r] = 1.0;
            }
            let mut c = vec![0.0; cols];
            c[..n].iter_mut().for_each(|x| *x = 1.0);
            solve_theta_lp(rows, cols, &a, &b, &c, 0, n)?
        }
        BasisKind::Partial => {
            return Err(Error::InvalidConfiguration(
                "characteristic LP limiter is available for full moments and hat functions".into(),
            ))
        }
    };
    let limited_char: Vec<f64> = (0..n)
        .map(|j| (1.0 - theta[j]) * w_recon[j] + theta[j] * w_mean[j])
        .collect();
    let out = v * nalgebra::DVector::from_vec(limited_char);
    Ok(out.iter().copied().collect())
}

fn solve_theta_lp(
    rows: usize,
    cols: usize,
    a: &[f64],
    b: &[f64],
    c: &[f64],
    offset: usize,
    n: usize,
) -> Result<Vec<f64>> {
    let problem = StandardForm { rows, cols, a, b, c };
    match lp::solve(&problem, lp_iteration_cap(rows, cols)) {
        LpOutcome::Optimal { x, .. } => Ok(x[offset..offset + n]
            .iter()
            .map(|t| t.clamp(0.0, 1.0))
            .collect()),
        LpOutcome::Infeasible => Ok(vec![1.0; n]),
        LpOutcome::IterationLimit => Err(Error::LimiterFailure(
            "characteristic LP limiter exceeded its iteration cap".into(),
        )),
    }
}
