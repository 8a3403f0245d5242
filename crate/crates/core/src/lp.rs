//! Dense two-phase simplex method for small standard-form linear programs
//!
//! ```text
//! min c^T x  s.t.  A x = b,  x >= 0
//! ```
//!
//! Entering columns follow Dantzig's rule; after a run of degenerate pivots
//! the method switches to Bland's rule, which cannot cycle. Problem sizes in
//! this crate are tiny (a few rows, at most a few hundred columns).

/// Pivot elements with magnitude below this are treated as zero.
pub const PIVOT_TOL: f64 = 1e-12;
/// Consecutive degenerate pivots after which Bland's rule takes over.
const BLAND_AFTER: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    IterationLimit,
}

/// Row-major constraint matrix with `rows` rows.
#[derive(Debug, Clone)]
pub struct StandardForm<'a> {
    pub rows: usize,
    pub cols: usize,
    pub a: &'a [f64],
    pub b: &'a [f64],
    pub c: &'a [f64],
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.at(row, col);
        for j in 0..w {
            self.data[row * w + j] /= p;
        }
        for i in 0..=self.rows {
            if i == row {
                continue;
            }
            let f = self.data[i * w + col];
            if f != 0.0 {
                for j in 0..w {
                    let v = self.data[row * w + j];
                    self.data[i * w + j] -= f * v;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations with the objective in row `rows`. Columns
    /// `0..allowed` may enter the basis. Returns false on the iteration limit.
    fn iterate(&mut self, allowed: usize, budget: &mut usize, degenerate_run: &mut usize) -> bool {
        let rhs = self.width - 1;
        let obj = self.rows;
        loop {
            let entering = if *degenerate_run < BLAND_AFTER {
                // Dantzig's rule: most negative reduced cost.
                let mut best: Option<(usize, f64)> = None;
                for j in 0..allowed {
                    let r = self.at(obj, j);
                    if r < -1e-11 && best.is_none_or(|(_, b)| r < b) {
                        best = Some((j, r));
                    }
                }
                best.map(|(j, _)| j)
            } else {
                (0..allowed).find(|&j| self.at(obj, j) < -1e-11)
            };
            let Some(col) = entering else {
                return true;
            };
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, col);
                if a > PIVOT_TOL {
                    let ratio = self.at(i, rhs) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - 1e-15
                                || (ratio <= best + 1e-15 && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            match leave {
                // Unbounded direction; not reachable for the bounded problems built here.
                None => return true,
                Some((row, ratio)) => {
                    if ratio <= 1e-15 {
                        *degenerate_run += 1;
                    } else {
                        *degenerate_run = 0;
                    }
                    self.pivot(row, col)
                }
            }
        }
    }
}

/// Solves the program; `max_iterations` caps the total pivot count.
pub fn solve(problem: &StandardForm<'_>, max_iterations: usize) -> LpOutcome {
    let (m, n) = (problem.rows, problem.cols);
    let width = n + m + 1;
    let mut data = vec![0.0; (m + 1) * width];
    let b_scale = problem.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    for i in 0..m {
        let sign = if problem.b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            data[i * width + j] = sign * problem.a[i * n + j];
        }
        data[i * width + n + i] = 1.0;
        data[i * width + width - 1] = sign * problem.b[i];
    }
    // Phase-one objective: sum of artificials, expressed in reduced costs.
    for j in 0..n {
        let s: f64 = (0..m).map(|i| data[i * width + j]).sum();
        data[m * width + j] = -s;
    }
    let total: f64 = (0..m).map(|i| data[i * width + width - 1]).sum();
    data[m * width + width - 1] = -total;

    let mut t = Tableau {
        rows: m,
        width,
        data,
        basis: (n..n + m).collect(),
    };
    let mut budget = max_iterations;
    let mut degenerate_run = 0;
    if !t.iterate(n, &mut budget, &mut degenerate_run) {
        return LpOutcome::IterationLimit;
    }
    let infeasibility = -t.at(m, width - 1);
    if infeasibility > 1e-11 * b_scale {
        return LpOutcome::Infeasible;
    }
    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| t.at(i, j).abs() > 1e-9) {
                t.pivot(i, col);
            }
        }
    }
    // Phase two.
    for j in 0..width {
        let mut r = if j < n { problem.c[j] } else { 0.0 };
        for i in 0..m {
            let bj = t.basis[i];
            let cb = if bj < n { problem.c[bj] } else { 0.0 };
            r -= cb * t.at(i, j);
        }
        t.data[m * width + j] = r;
    }
    if !t.iterate(n, &mut budget, &mut degenerate_run) {
        return LpOutcome::IterationLimit;
    }
    let mut x = vec![0.0; n];
    for i in 0..m {
        if t.basis[i] < n {
            x[t.basis[i]] = t.at(i, width - 1).max(0.0);
        }
    }
    let objective = problem.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpOutcome::Optimal { x, objective }
}
