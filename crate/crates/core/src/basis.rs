//! Angular bases in slab geometry.
//!
//! A [`BasisSpec`] couples a basis (full moments, hat functions or partial
//! moments) with the composite quadrature used for every angular integral.
//! Basis values at the quadrature nodes are cached in a sparse layout: at each
//! node the non-zero entries of `b(mu)` occupy a contiguous index range
//! `start..start + width`, where `width` is `n` for full moments and 2 for the
//! piecewise-linear bases.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quadrature::{HalfRange, QuadratureRule};

/// Vector of velocity moments `<b psi>` for one spatial cell.
pub type MomentVector = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    FullMonomial,
    FullLegendre,
    Hat,
    Partial,
}

impl BasisKind {
    pub fn is_full(self) -> bool {
        matches!(self, BasisKind::FullMonomial | BasisKind::FullLegendre)
    }
}

/// Side of a breakpoint used to resolve basis evaluation on interval edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Use the interval that ends at the breakpoint.
    Below,
    /// Use the interval that starts at the breakpoint.
    Above,
}

/// A quadrature node together with its basis support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeBasis {
    pub mu: f64,
    pub weight: f64,
    /// First basis index with a non-zero value at this node.
    pub start: usize,
    pub positive_half: bool,
    pub negative_half: bool,
}

#[derive(Debug, Clone)]
pub struct BasisSpec {
    kind: BasisKind,
    n: usize,
    grid: Vec<f64>,
    rule: QuadratureRule,
    width: usize,
    nodes: Vec<NodeBasis>,
    values: Vec<f64>,
    e_vector: Vec<f64>,
    iso: Vec<f64>,
    mass: DMatrix<f64>,
}

impl BasisSpec {
    /// Legendre polynomials `P_0..P_N`.
    pub fn full_legendre(order_n: usize, quad_order: usize) -> Result<Self> {
        Self::new(BasisKind::FullLegendre, vec![-1.0, 0.0, 1.0], order_n + 1, quad_order)
    }

    /// Monomials `1, mu, ..., mu^N`.
    pub fn full_monomial(order_n: usize, quad_order: usize) -> Result<Self> {
        Self::new(BasisKind::FullMonomial, vec![-1.0, 0.0, 1.0], order_n + 1, quad_order)
    }

    /// Hat functions on the given angular nodes (`-1 = mu_1 < ... < mu_n = 1`).
    pub fn hat(nodes: Vec<f64>, quad_order: usize) -> Result<Self> {
        let n = nodes.len();
        Self::new(BasisKind::Hat, nodes, n, quad_order)
    }

    pub fn hat_uniform(n: usize, quad_order: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "hat basis needs at least 2 nodes, got {n}"
            )));
        }
        Self::hat(uniform_grid(n - 1), quad_order)
    }

    /// Partial moments `(1, mu)` on each interval between the breakpoints.
    pub fn partial(breakpoints: Vec<f64>, quad_order: usize) -> Result<Self> {
        let n = 2 * (breakpoints.len().saturating_sub(1));
        Self::new(BasisKind::Partial, breakpoints, n, quad_order)
    }

    /// Partial moments with `n / 2` equal intervals.
    pub fn partial_uniform(n: usize, quad_order: usize) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "partial-moment basis needs an even moment count >= 2, got {n}"
            )));
        }
        Self::partial(uniform_grid(n / 2), quad_order)
    }

    fn new(kind: BasisKind, grid: Vec<f64>, n: usize, quad_order: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "basis needs at least 2 moments, got {n}"
            )));
        }
        validate_grid(&grid)?;
        let mut quad_breaks = grid.clone();
        if !quad_breaks.contains(&0.0) {
            quad_breaks.push(0.0);
            quad_breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let rule = QuadratureRule::build_gauss_lobatto(&quad_breaks, quad_order)?;
        let width = if kind.is_full() { n } else { 2 };

        let mut spec = Self {
            kind,
            n,
            grid,
            rule,
            width,
            nodes: Vec::new(),
            values: Vec::new(),
            e_vector: Vec::new(),
            iso: vec![0.0; n],
            mass: DMatrix::zeros(n, n),
        };

        let mut nodes = Vec::with_capacity(spec.rule.len());
        let mut values = Vec::with_capacity(spec.rule.len() * width);
        let mut scratch = vec![0.0; width];
        for iv in spec.rule.intervals() {
            for (&mu, &weight) in iv.nodes.iter().zip(&iv.weights) {
                let start = spec.sparse_values(mu, 0.5 * (iv.lower + iv.upper), &mut scratch);
                nodes.push(NodeBasis {
                    mu,
                    weight,
                    start,
                    positive_half: iv.in_half(HalfRange::Positive),
                    negative_half: iv.in_half(HalfRange::Negative),
                });
                values.extend_from_slice(&scratch);
            }
        }
        spec.nodes = nodes;
        spec.values = values;

        spec.e_vector = match kind {
            BasisKind::FullMonomial | BasisKind::FullLegendre => {
                let mut e = vec![0.0; n];
                e[0] = 1.0;
                e
            }
            BasisKind::Hat => vec![1.0; n],
            BasisKind::Partial => (0..n).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect(),
        };

        let mut iso = vec![0.0; n];
        let mut mass = DMatrix::zeros(n, n);
        for (q, node) in spec.nodes.iter().enumerate() {
            let vals = spec.node_values(q);
            for (a, &va) in vals.iter().enumerate() {
                iso[node.start + a] += node.weight * va;
                for (b, &vb) in vals.iter().enumerate() {
                    mass[(node.start + a, node.start + b)] += node.weight * va * vb;
                }
            }
        }
        spec.iso = iso;
        spec.mass = mass;
        Ok(spec)
    }

    /// Writes the non-zero basis values at `mu` (which lies in the interval
    /// containing `probe`) into `out` and returns the first index.
    fn sparse_values(&self, mu: f64, probe: f64, out: &mut [f64]) -> usize {
        match self.kind {
            BasisKind::FullMonomial => {
                let mut p = 1.0;
                for v in out.iter_mut() {
                    *v = p;
                    p *= mu;
                }
                0
            }
            BasisKind::FullLegendre => {
                legendre_values(mu, out);
                0
            }
            BasisKind::Hat => {
                let i = self.grid_interval(probe);
                let (lo, hi) = (self.grid[i], self.grid[i + 1]);
                let h = hi - lo;
                out[0] = (hi - mu) / h;
                out[1] = (mu - lo) / h;
                i
            }
            BasisKind::Partial => {
                let j = self.grid_interval(probe);
                out[0] = 1.0;
                out[1] = mu;
                2 * j
            }
        }
    }

    /// Index of the angular-grid interval containing `probe` (interior point).
    fn grid_interval(&self, probe: f64) -> usize {
        let k = self.grid.len() - 1;
        (0..k)
            .find(|&i| probe >= self.grid[i] && probe <= self.grid[i + 1])
            .unwrap_or(k - 1)
    }

    /// Dense basis vector `b(mu)`; at shared breakpoints `side` picks the interval.
    pub fn evaluate_sided(&self, mu: f64, side: Side) -> Result<Vec<f64>> {
        if !(-1.0..=1.0).contains(&mu) {
            return Err(Error::InvalidArgument(format!(
                "mu = {mu} lies outside [-1, 1]"
            )));
        }
        let probe = match self.kind {
            BasisKind::FullMonomial | BasisKind::FullLegendre => mu,
            BasisKind::Hat | BasisKind::Partial => {
                let eps = 1e-12;
                let p = match side {
                    Side::Below => mu - eps,
                    Side::Above => mu + eps,
                };
                p.clamp(-1.0 + eps, 1.0 - eps)
            }
        };
        let mut scratch = vec![0.0; self.width];
        let start = self.sparse_values(mu, probe, &mut scratch);
        let mut out = vec![0.0; self.n];
        out[start..start + self.width].copy_from_slice(&scratch);
        Ok(out)
    }

    /// Dense basis vector `b(mu)`, taking the interval above `mu` at breakpoints.
    pub fn evaluate(&self, mu: f64) -> Result<Vec<f64>> {
        self.evaluate_sided(mu, Side::Above)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Number of moments.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Hat nodes, partial-moment breakpoints, or `{-1, 0, 1}` for full moments.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Number of non-zero basis entries at a quadrature node.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Half-bandwidth of `<b b^T f>` matrices.
    pub fn bandwidth(&self) -> usize {
        self.width - 1
    }

    /// Size of the independent diagonal blocks of `<b b^T f>` (2 for partial moments).
    pub fn block_size(&self) -> usize {
        match self.kind {
            BasisKind::Partial => 2,
            _ => self.n,
        }
    }

    pub fn nodes(&self) -> &[NodeBasis] {
        &self.nodes
    }

    /// Non-zero basis values at quadrature node `q`.
    #[inline]
    pub fn node_values(&self, q: usize) -> &[f64] {
        &self.values[q * self.width..(q + 1) * self.width]
    }

    /// `b(mu_q)^T alpha` at quadrature node `q`.
    #[inline]
    pub fn node_dot(&self, q: usize, alpha: &[f64]) -> f64 {
        let start = self.nodes[q].start;
        self.node_values(q)
            .iter()
            .zip(&alpha[start..start + self.width])
            .map(|(b, a)| b * a)
            .sum()
    }

    /// Vector `e` with `e^T b(mu) = 1`.
    pub fn e_vector(&self) -> &[f64] {
        &self.e_vector
    }

    /// Quadrature approximation of `<b>`.
    pub fn iso_moment_unit(&self) -> &[f64] {
        &self.iso
    }

    /// `<b b^T>` by quadrature.
    pub fn mass_matrix(&self) -> &DMatrix<f64> {
        &self.mass
    }

    /// Local particle density `rho(u) = e^T u`.
    pub fn density(&self, u: &[f64]) -> f64 {
        match self.kind {
            BasisKind::FullMonomial | BasisKind::FullLegendre => u[0],
            BasisKind::Hat => u.iter().sum(),
            BasisKind::Partial => u.iter().step_by(2).sum(),
        }
    }

    /// Isotropic moment vector `<b> rho / 2` with the given density.
    pub fn isotropic_moment(&self, rho: f64) -> Result<MomentVector> {
        if !(rho > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "isotropic moment needs a positive density, got {rho}"
            )));
        }
        Ok(self.isotropic_scaled(rho))
    }

    /// `<b> rho / 2` without sign checks (the linear map `u -> G u` uses this).
    pub fn isotropic_scaled(&self, rho: f64) -> MomentVector {
        self.iso.iter().map(|b| 0.5 * rho * b).collect()
    }

    /// `<b psi>` for a distribution given as a function of `mu`, by quadrature.
    ///
    /// `psi` is evaluated once per node; at shared breakpoints each adjacent
    /// interval sees its own copy.
    pub fn project<F: Fn(f64) -> f64>(&self, psi: F) -> MomentVector {
        let mut u = vec![0.0; self.n];
        for (q, node) in self.nodes.iter().enumerate() {
            let p = psi(node.mu);
            for (a, &v) in self.node_values(q).iter().enumerate() {
                u[node.start + a] += node.weight * v * p;
            }
        }
        u
    }

    /// Partial-moment interval `[mu_j, mu_{j+1}]` for block `j`.
    pub fn partial_interval(&self, j: usize) -> (f64, f64) {
        (self.grid[j], self.grid[j + 1])
    }
}

/// Uniform partition of `[-1, 1]` into `k` intervals.
pub fn uniform_grid(k: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..=k).map(|i| -1.0 + 2.0 * i as f64 / k as f64).collect();
    g[0] = -1.0;
    g[k] = 1.0;
    if k % 2 == 0 {
        g[k / 2] = 0.0;
    }
    g
}

/// Legendre polynomial values `P_0(mu) .. P_{len-1}(mu)`.
pub fn legendre_values(mu: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = mu;
    }
    for l in 1..out.len().saturating_sub(1) {
        let lf = l as f64;
        out[l + 1] = ((2.0 * lf + 1.0) * mu * out[l] - lf * out[l - 1]) / (lf + 1.0);
    }
}

/// Matrix `T` with `P(mu) = T * (1, mu, ..., mu^N)^T` (rows are Legendre
/// coefficients in the monomial basis).
pub fn legendre_from_monomial(order_n: usize) -> DMatrix<f64> {
    let n = order_n + 1;
    let mut t = DMatrix::zeros(n, n);
    t[(0, 0)] = 1.0;
    if n > 1 {
        t[(1, 1)] = 1.0;
    }
    for l in 1..n.saturating_sub(1) {
        let lf = l as f64;
        for k in 0..n {
            let shifted = if k > 0 { t[(l, k - 1)] } else { 0.0 };
            t[(l + 1, k)] = ((2.0 * lf + 1.0) * shifted - lf * t[(l - 1, k)]) / (lf + 1.0);
        }
    }
    t
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 || grid[0] != -1.0 || *grid.last().unwrap() != 1.0 {
        return Err(Error::InvalidArgument(
            "angular grid must start at -1 and end at 1".into(),
        ));
    }
    if grid.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InvalidArgument(
            "angular grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}
