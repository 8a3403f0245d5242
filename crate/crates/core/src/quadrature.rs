//! Composite Gauss-Lobatto quadrature on a partition of `[-1, 1]`.
//!
//! The rule order is the polynomial exactness degree. A Lobatto rule with `m`
//! nodes integrates polynomials up to degree `2m - 3` exactly, so an order `p`
//! rule uses `m = ceil((p + 3) / 2)` nodes per interval. Nodes on shared
//! breakpoints are duplicated, one copy per adjacent interval.

use crate::error::{Error, Result};

/// Which half of the velocity range a half-range integral covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfRange {
    Positive,
    Negative,
}

/// Nodes and weights of one interval of a composite rule.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRule {
    pub lower: f64,
    pub upper: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl IntervalRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn in_half(&self, half: HalfRange) -> bool {
        match half {
            HalfRange::Positive => self.lower >= 0.0,
            HalfRange::Negative => self.upper <= 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    breakpoints: Vec<f64>,
    intervals: Vec<IntervalRule>,
}

/// Number of Lobatto nodes per interval needed for exactness degree `order`.
pub fn nodes_for_order(order: usize) -> usize {
    ((order + 3) + 1) / 2
}

/// Polynomial exactness degree of an `m`-node Lobatto rule.
pub fn order_for_nodes(m: usize) -> usize {
    2 * m - 3
}

/// Reference Gauss-Lobatto nodes and weights on `[-1, 1]` with `m >= 2` nodes.
///
/// Interior nodes are the roots of `P'_{m-1}`; they are found by Newton
/// iteration started from the Chebyshev-Gauss-Lobatto points.
pub fn lobatto_reference(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 2, "a Lobatto rule needs at least two nodes");
    let n = m - 1;
    let mut x: Vec<f64> = (0..m)
        .map(|i| -(std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect();
    let mut p_n = vec![0.0; m];
    for _ in 0..200 {
        let mut max_change: f64 = 0.0;
        for (i, xi) in x.iter_mut().enumerate() {
            if i == 0 || i == n {
                continue;
            }
            let (pn, pn1) = legendre_pair(n, *xi);
            let update = (*xi * pn - pn1) / (m as f64 * pn);
            *xi -= update;
            max_change = max_change.max(update.abs());
        }
        if max_change < 1e-16 {
            break;
        }
    }
    x[0] = -1.0;
    x[n] = 1.0;
    // Enforce exact symmetry about zero.
    for i in 0..m / 2 {
        let s = 0.5 * (x[n - i] - x[i]);
        x[i] = -s;
        x[n - i] = s;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    for (p, &xi) in p_n.iter_mut().zip(&x) {
        *p = legendre_pair(n, xi).0;
    }
    let scale = 2.0 / (n as f64 * m as f64);
    let mut w: Vec<f64> = p_n.iter().map(|p| scale / (p * p)).collect();
    for i in 0..m / 2 {
        let s = 0.5 * (w[i] + w[n - i]);
        w[i] = s;
        w[n - i] = s;
    }
    (x, w)
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]` with `m >= 1` nodes.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "a Gauss rule needs at least one node");
    let mf = m as f64;
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut xi = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        for _ in 0..100 {
            let (pn, pn1) = legendre_pair(m, xi);
            let dp = mf * (xi * pn - pn1) / (xi * xi - 1.0);
            let update = pn / dp;
            xi -= update;
            if update.abs() < 1e-16 {
                break;
            }
        }
        let (pn, pn1) = legendre_pair(m, xi);
        let dp = mf * (xi * pn - pn1) / (xi * xi - 1.0);
        let wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
        x[m - 1 - i] = xi;
        x[i] = -xi;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

impl QuadratureRule {
    /// Composite rule with exactness degree `order` on every interval.
    pub fn build_gauss_lobatto(breakpoints: &[f64], order: usize) -> Result<Self> {
        if order < 3 {
            return Err(Error::InvalidArgument(format!(
                "quadrature order must be at least 3, got {order}"
            )));
        }
        Self::with_nodes_per_interval(breakpoints, nodes_for_order(order))
    }

    /// Composite rule with `m` Lobatto nodes on every interval.
    pub fn with_nodes_per_interval(breakpoints: &[f64], m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidArgument(format!(
                "at least 3 nodes per interval required, got {m}"
            )));
        }
        validate_breakpoints(breakpoints)?;
        let (ref_nodes, ref_weights) = lobatto_reference(m);
        let intervals = breakpoints
            .windows(2)
            .map(|pair| {
                let (a, b) = (pair[0], pair[1]);
                let half = 0.5 * (b - a);
                let mid = 0.5 * (a + b);
                let mut nodes: Vec<f64> = ref_nodes.iter().map(|x| mid + half * x).collect();
                nodes[0] = a;
                nodes[m - 1] = b;
                let weights = ref_weights.iter().map(|w| half * w).collect();
                IntervalRule {
                    lower: a,
                    upper: b,
                    nodes,
                    weights,
                }
            })
            .collect();
        Ok(Self {
            breakpoints: breakpoints.to_vec(),
            intervals,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn intervals(&self) -> &[IntervalRule] {
        &self.intervals
    }

    /// Total number of (duplicated) nodes.
    pub fn len(&self) -> usize {
        self.intervals.iter().map(IntervalRule::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_zero_breakpoint(&self) -> bool {
        self.breakpoints.iter().any(|&b| b == 0.0)
    }

    /// Iterates `(interval index, node, weight)` over every node.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.intervals.iter().enumerate().flat_map(|(k, iv)| {
            iv.nodes
                .iter()
                .zip(&iv.weights)
                .map(move |(&mu, &w)| (k, mu, w))
        })
    }

    /// `sum_i w_i f(mu_i)` over the whole rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        sum_checked(self.iter(), f)
    }

    /// Quadrature restricted to intervals on one side of zero.
    pub fn integrate_half_range<F: Fn(f64) -> f64>(&self, half: HalfRange, f: F) -> Result<f64> {
        if !self.has_zero_breakpoint() {
            return Err(Error::InvalidConfiguration(
                "half-range integrals need 0 as a quadrature breakpoint".into(),
            ));
        }
        sum_checked(
            self.iter()
                .filter(|&(k, _, _)| self.intervals[k].in_half(half)),
            f,
        )
    }
}

fn sum_checked<I, F>(nodes: I, f: F) -> Result<f64>
where
    I: Iterator<Item = (usize, f64, f64)>,
    F: Fn(f64) -> f64,
{
    let mut acc = 0.0;
    for (_, mu, w) in nodes {
        let v = f(mu);
        if !v.is_finite() {
            return Err(Error::NumericalDomain(format!(
                "integrand is not finite at mu = {mu}"
            )));
        }
        acc += w * v;
    }
    Ok(acc)
}

fn validate_breakpoints(breakpoints: &[f64]) -> Result<()> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidArgument(
            "at least two breakpoints are required".into(),
        ));
    }
    if breakpoints[0] != -1.0 || *breakpoints.last().unwrap() != 1.0 {
        return Err(Error::InvalidArgument(
            "breakpoints must start at -1 and end at 1".into(),
        ));
    }
    if breakpoints.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InvalidArgument(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    Ok(())
}
